#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "errors.hpp"

namespace instanton {

inline constexpr const char* kToolVersion = "1.0.0";

/// Numbers, or exact values such as rationals and type labels rendered as strings.
using CheckValue = std::variant<double, std::string>;

struct Check {
  std::string name;
  CheckValue value;
  double tol = 0;
  bool pass = false;
  std::string ref;

  bool operator==(const Check&) const = default;
};

/// value < tol.
inline Check check_below(std::string name, double value, double tol, std::string ref) {
  return {std::move(name), value, tol, value < tol, std::move(ref)};
}

/// |value - expected| <= tol.
inline Check check_near(std::string name, double value, double expected, double tol, std::string ref) {
  return {std::move(name), value, tol, std::abs(value - expected) <= tol, std::move(ref)};
}

inline Check check_positive(std::string name, double value, std::string ref) {
  return {std::move(name), value, 0.0, value > 0, std::move(ref)};
}

inline Check check_equal(std::string name, const std::string& value, const std::string& expected, std::string ref) {
  return {std::move(name), value, 0.0, value == expected, std::move(ref)};
}

inline Check check_true(std::string name, bool ok, std::string ref) {
  return {std::move(name), std::string(ok ? "true" : "false"), 0.0, ok, std::move(ref)};
}

using Json = nlohmann::ordered_json;

struct Report {
  std::string version = kToolVersion;
  std::string command;
  Json params = Json::object();
  std::uint64_t seed = 0;
  std::vector<Check> checks;

  bool pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
  void add(Check c) { checks.push_back(std::move(c)); }
  void add(const std::vector<Check>& cs) { checks.insert(checks.end(), cs.begin(), cs.end()); }

  bool operator==(const Report&) const = default;
};

namespace detail {
inline Json number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

inline double parse_number(const Json& j) {
  if (j.is_number()) return j.get<double>();
  auto s = j.get<std::string>();
  if (s == "nan") return NAN;
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  throw ParseError("expected a number, got '" + s + "'");
}

/// Shortest text that reads back to the same double.
inline std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::string value_text(const CheckValue& v) {
  if (auto s = std::get_if<std::string>(&v)) return *s;
  return format_double(std::get<double>(v));
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}
}  // namespace detail

inline Json to_json(const Report& r) {
  Json checks = Json::array();
  for (const auto& c : r.checks) {
    Json v = std::holds_alternative<double>(c.value) ? detail::number(std::get<double>(c.value))
                                                      : Json(std::get<std::string>(c.value));
    checks.push_back(Json{{"name", c.name}, {"value", v}, {"tol", detail::number(c.tol)}, {"pass", c.pass}, {"ref", c.ref}});
  }
  return Json{{"version", r.version}, {"command", r.command}, {"params", r.params},
              {"seed", r.seed},       {"checks", checks},      {"pass", r.pass()}};
}

/// Inverse of to_json. A string value that spells a non-finite number reads back as that number.
inline Report report_from_json(const Json& j) {
  try {
    Report r;
    r.version = j.at("version").get<std::string>();
    r.command = j.at("command").get<std::string>();
    r.params = j.at("params");
    r.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& c : j.at("checks")) {
      Check k;
      k.name = c.at("name").get<std::string>();
      const Json& v = c.at("value");
      if (v.is_number() || v == "nan" || v == "inf" || v == "-inf")
        k.value = detail::parse_number(v);
      else
        k.value = v.get<std::string>();
      k.tol = detail::parse_number(c.at("tol"));
      k.pass = c.at("pass").get<bool>();
      k.ref = c.at("ref").get<std::string>();
      r.checks.push_back(std::move(k));
    }
    if (j.at("pass").get<bool>() != r.pass()) throw ParseError("summary pass disagrees with the checks");
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed report: ") + e.what());
  }
}

enum class Format { Json, Csv, Text };

inline Format parse_format(const std::string& s) {
  if (s == "json") return Format::Json;
  if (s == "csv") return Format::Csv;
  if (s == "text") return Format::Text;
  throw UsageError("unknown format '" + s + "' (json, csv, text)");
}

inline const char* extension(Format f) {
  switch (f) {
    case Format::Json: return "json";
    case Format::Csv: return "csv";
    default: return "txt";
  }
}

inline std::string emit_report(const Report& r, Format f) {
  std::ostringstream os;
  if (f == Format::Json) {
    os << to_json(r).dump(2) << '\n';
  } else if (f == Format::Csv) {
    os << "name,value,tol,pass,ref\n";
    for (const auto& c : r.checks)
      os << detail::csv_field(c.name) << ',' << detail::csv_field(detail::value_text(c.value)) << ','
         << detail::format_double(c.tol) << ',' << (c.pass ? "true" : "false") << ',' << detail::csv_field(c.ref) << '\n';
  } else {
    os << r.command << " (seed " << r.seed << ")\n";
    for (const auto& c : r.checks)
      os << (c.pass ? "  PASS  " : "  FAIL  ") << c.name << " = " << detail::value_text(c.value) << "  [tol "
         << detail::format_double(c.tol) << "]\n";
    std::size_t failed = 0;
    for (const auto& c : r.checks) failed += !c.pass;
    os << (r.pass() ? "PASS" : "FAIL") << ": " << r.checks.size() - failed << "/" << r.checks.size() << " checks\n";
  }
  return os.str();
}

inline void write_report(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << bytes;
  if (!out) throw IoError("write to '" + path + "' failed");
}

}  // namespace instanton
