#pragma once

#include <CLI11.hpp>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "report.hpp"
#include "suite.hpp"

namespace instanton {

/// Everything a subcommand reads from the command line.
struct RunConfig {
  std::string command;
  std::string metric;
  std::vector<std::string> params;
  std::string orientation = "standard";
  int samples = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> tolerances;
  std::string format = "json";
  std::string output;
  std::string expect;
  // toda
  std::string solution;
  std::string u_expr;
  std::string surface = "torus";
  std::vector<double> rho_range;
  int points = 1000;
  // decay
  std::string model;
  std::vector<double> radii;
  std::optional<double> expect_rate;
  // toric
  std::string fan;
  std::string standard;
  std::vector<int> fan_params;
  std::optional<std::size_t> boundary;
  std::string expect_ample;
  int max_n = 6, max_k = 3;
  // suite
  std::vector<int> only;
};

namespace detail {
inline std::pair<std::string, double> key_value(const std::string& s) {
  auto eq = s.find('=');
  if (eq == std::string::npos || eq == 0) throw UsageError("expected key=value, got '" + s + "'");
  std::string key = s.substr(0, eq), val = s.substr(eq + 1);
  try {
    std::size_t used = 0;
    double v = std::stod(val, &used);
    if (used != val.size()) throw std::invalid_argument(val);
    return {key, v};
  } catch (const std::exception&) {
    throw UsageError("value of '" + key + "' is not a number: '" + val + "'");
  }
}

inline Params parse_params(const std::vector<std::string>& items) {
  Params p;
  for (const auto& s : items) p.insert(key_value(s));
  return p;
}

inline Tolerances parse_tolerances(const std::vector<std::string>& items) {
  Tolerances t;
  for (const auto& s : items) {
    auto [k, v] = key_value(s);
    t.set(k, v);
  }
  return t;
}

inline Json params_json(const Params& p) {
  Json j = Json::object();
  for (const auto& [k, v] : p) j[k] = v;
  return j;
}

inline WeylType parse_type(const std::string& s) {
  if (s == "I") return WeylType::I;
  if (s == "II") return WeylType::II;
  if (s == "III") return WeylType::III;
  throw UsageError("type must be I, II or III, got '" + s + "'");
}

inline Report start(const RunConfig& cfg) {
  Report r;
  r.command = cfg.command;
  r.seed = cfg.seed;
  return r;
}

inline Report cmd_classify(const RunConfig& cfg) {
  Report r = start(cfg);
  std::string name = normalize_name(cfg.metric);
  Params p = parse_params(cfg.params);
  Orientation o = parse_orientation(cfg.orientation);
  auto chart = make_metric(name, p, o);
  std::optional<WeylType> expect = cfg.expect.empty() ? expected_type(name, o) : parse_type(cfg.expect);
  if (p.size() && cfg.expect.empty()) expect = std::nullopt;
  r.params = {{"metric", name}, {"params", params_json(resolve_params(family(name), p))},
              {"orientation", to_string(o)}, {"samples", cfg.samples}};
  if (expect) r.params["expect"] = to_string(*expect);
  r.add(type_checks(chart, entry_label(name, o), expect, cfg.samples, cfg.seed, "type table"));
  return r;
}

inline Report cmd_verify_ricci(const RunConfig& cfg) {
  Report r = start(cfg);
  std::string name = normalize_name(cfg.metric);
  Params p = parse_params(cfg.params);
  Orientation o = parse_orientation(cfg.orientation);
  auto chart = make_metric(name, p, o);
  auto tol = parse_tolerances(cfg.tolerances);
  r.params = {{"metric", name}, {"params", params_json(resolve_params(family(name), p))},
              {"orientation", to_string(o)}, {"samples", cfg.samples}};
  r.add(ricci_checks(chart, entry_label(name, o), cfg.samples, cfg.seed, tol, "Ricci-flat"));
  return r;
}

inline Report cmd_verify_hermitian(const RunConfig& cfg) {
  Report r = start(cfg);
  std::string name = normalize_name(cfg.metric);
  Params p = parse_params(cfg.params);
  Orientation o = parse_orientation(cfg.orientation);
  auto chart = make_metric(name, p, o);
  auto tol = parse_tolerances(cfg.tolerances);
  r.params = {{"metric", name}, {"params", params_json(resolve_params(family(name), p))},
              {"orientation", to_string(o)}, {"samples", cfg.samples}};
  r.add(hermitian_checks(chart, entry_label(name, o), expected_scalar_sign(name), cfg.samples, cfg.seed, tol,
                         "conformal Kahler identities"));
  return r;
}

inline Surface parse_surface(const std::string& s) {
  if (s == "torus") return Surface::Torus;
  if (s == "sphere") return Surface::Sphere;
  if (s == "chart") return Surface::Chart;
  throw UsageError("surface must be torus, sphere or chart, got '" + s + "'");
}

inline TodaField toda_from_config(const RunConfig& cfg, Json& echo) {
  if (cfg.solution.empty() == cfg.u_expr.empty()) throw UsageError("give exactly one of --solution and --u");
  if (!cfg.solution.empty()) {
    Params p = parse_params(cfg.params);
    echo["solution"] = cfg.solution;
    echo["params"] = params_json(p);
    return toda_field(normalize_name(cfg.solution), p);
  }
  Surface s = parse_surface(cfg.surface);
  if (cfg.rho_range.size() != 2 || !(cfg.rho_range[0] < cfg.rho_range[1]))
    throw UsageError("--u needs --rho-range lo,hi with lo < hi");
  double half = s == Surface::Sphere ? 2.0 : 0.5, mid = s == Surface::Torus ? 0.5 : 0.0;
  Box box{{cfg.rho_range[0], mid - half, mid - half, 0}, {cfg.rho_range[1], mid + half, mid + half, 2 * std::numbers::pi}};
  echo["u"] = cfg.u_expr;
  echo["surface"] = cfg.surface;
  echo["rho_range"] = cfg.rho_range;
  return toda_field_from_string(cfg.u_expr, s, box);
}

inline Report cmd_toda_check(const RunConfig& cfg) {
  Report r = start(cfg);
  auto tol = parse_tolerances(cfg.tolerances);
  Json echo = Json::object();
  auto f = toda_from_config(cfg, echo);
  echo["points"] = cfg.points;
  r.params = echo;
  r.add(toda_residual_checks(f, cfg.points, cfg.seed, tol, "Toda equation"));
  return r;
}

inline Report cmd_toda_build(const RunConfig& cfg) {
  Report r = start(cfg);
  auto tol = parse_tolerances(cfg.tolerances);
  Json echo = Json::object();
  auto f = toda_from_config(cfg, echo);
  echo["samples"] = cfg.samples;
  r.params = echo;
  r.add(toda_build_checks(f, cfg.samples, cfg.seed, tol, "Toda ansatz"));
  return r;
}

inline Report cmd_decay(const RunConfig& cfg) {
  Report r = start(cfg);
  std::string name = normalize_name(cfg.metric);
  Params p = parse_params(cfg.params);
  auto tol = parse_tolerances(cfg.tolerances);
  asymptotic_model(cfg.model, name, p);  // usage errors before any computation
  auto radii = cfg.radii.empty() ? default_radii() : cfg.radii;
  if (radii.size() < 4) throw UsageError("--radii needs at least four values");
  double rate = cfg.expect_rate ? *cfg.expect_rate : default_rate(cfg.model);
  r.params = {{"metric", name}, {"params", params_json(resolve_params(family(name), p))}, {"model", cfg.model},
              {"radii", radii},  {"expect_rate", detail::number(rate)}};
  r.add(decay_checks(name, p, cfg.model, radii, rate, tol, cfg.seed, "decay"));
  return r;
}

inline std::optional<bool> parse_expect_ample(const std::string& s) {
  if (s.empty()) return std::nullopt;
  if (s == "true" || s == "yes" || s == "ample") return true;
  if (s == "false" || s == "no" || s == "not-ample") return false;
  throw UsageError("--expect-ample takes true or false, got '" + s + "'");
}

inline Report cmd_toric_intersect(const RunConfig& cfg) {
  Report r = start(cfg);
  if (cfg.fan.empty() == cfg.standard.empty()) throw UsageError("give exactly one of --fan and --standard");
  Fan2D f = cfg.fan.empty() ? standard_fan(cfg.standard, cfg.fan_params) : parse_fan(cfg.fan);
  if (cfg.boundary && *cfg.boundary >= f.size()) throw UsageError("--boundary is not a ray index of the fan");
  Json rays = Json::array();
  for (const auto& v : f.rays) rays.push_back(to_string(v));
  r.params = {{"rays", rays}};
  if (cfg.boundary) r.params["boundary"] = *cfg.boundary;
  auto expect = parse_expect_ample(cfg.expect_ample);
  if (expect) r.params["expect_ample"] = *expect;
  r.add(fan_checks(f, cfg.boundary, expect, "toric intersection"));
  return r;
}

inline Report cmd_toric_classify(const RunConfig& cfg) {
  Report r = start(cfg);
  if (cfg.max_n < 1 || cfg.max_k < 1) throw UsageError("--max-n and --max-k must be at least 1");
  r.params = {{"max_n", cfg.max_n}, {"max_k", cfg.max_k}};
  r.add(classification_checks(cfg.max_n, cfg.max_k, "toric classification"));
  return r;
}

inline SuiteConfig suite_config(const RunConfig& cfg) {
  SuiteConfig s;
  s.seed = cfg.seed;
  s.samples = cfg.samples;
  s.tol = parse_tolerances(cfg.tolerances);
  for (int id : cfg.only) {
    if (id < 1 || id > 10) throw UsageError("--only takes criteria between 1 and 10");
    s.only.insert(id);
  }
  return s;
}

inline Report cmd_suite(const RunConfig& cfg) { return suite_report(suite_config(cfg)); }

inline std::string output_path(const RunConfig& cfg, Format f) {
  if (!cfg.output.empty()) return cfg.output == "-" ? "" : cfg.output;
  if (const char* dir = std::getenv("INSTANTON_REPORT_DIR"); dir && *dir)
    return std::string(dir) + "/" + cfg.command + "." + extension(f);
  return "";
}
}  // namespace detail

/// Runs one subcommand. Exit codes: 0 all checks pass, 1 a check failed, 2 usage error.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Verification engine for Hermitian non-Kahler Ricci-flat metrics", "instanton"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value file overriding defaults");
  RunConfig cfg;
  using Handler = std::function<Report(const RunConfig&)>;
  std::map<CLI::App*, std::pair<std::string, Handler>> handlers;

  auto common = [&](CLI::App* sub, bool with_samples) {
    sub->add_option("--seed", cfg.seed, "sampling seed")->capture_default_str();
    sub->add_option("--format", cfg.format, "json, csv or text")->capture_default_str();
    sub->add_option("-o,--output", cfg.output, "report path ('-' for stdout)");
    sub->add_option("--tol", cfg.tolerances, "tolerance override name=value");
    if (with_samples) sub->add_option("--samples", cfg.samples, "sample points (default per subcommand)");
  };
  auto metric_opts = [&](CLI::App* sub) {
    sub->add_option("--metric", cfg.metric, "catalog family")->required();
    sub->add_option("--param", cfg.params, "family parameter name=value");
    sub->add_option("--orientation", cfg.orientation, "standard or reversed")->capture_default_str();
  };
  auto toda_opts = [&](CLI::App* sub) {
    sub->add_option("--solution", cfg.solution, "kasner, alh_star or sphere_profile");
    sub->add_option("--param", cfg.params, "solution parameter name=value");
    sub->add_option("--u", cfg.u_expr, "closed-form u(rho, x, y)");
    sub->add_option("--surface", cfg.surface, "torus, sphere or chart")->capture_default_str();
    sub->add_option("--rho-range", cfg.rho_range, "rho interval lo,hi")->delimiter(',');
  };
  auto add = [&](const std::string& name, const std::string& help, Handler h) {
    CLI::App* sub = app.add_subcommand(name, help);
    handlers[sub] = {name, std::move(h)};
    return sub;
  };

  // Defaults differ per subcommand; they are applied after parsing from the chosen one.
  std::map<std::string, int> default_samples = {{"classify", 200},  {"verify-ricci", 200}, {"verify-hermitian", 100},
                                                {"toda-build", 50}, {"suite", 200}};
  auto* classify = add("classify", "self-dual Weyl type of a catalog metric", detail::cmd_classify);
  metric_opts(classify);
  common(classify, true);
  classify->add_option("--expect", cfg.expect, "expected type I, II or III");
  auto* ricci = add("verify-ricci", "Ricci-flatness of a catalog metric", detail::cmd_verify_ricci);
  metric_opts(ricci);
  common(ricci, true);
  auto* herm = add("verify-hermitian", "conformal Kahler identities of a Type II metric", detail::cmd_verify_hermitian);
  metric_opts(herm);
  common(herm, true);
  auto* tcheck = add("toda-check", "Toda equation residuals", detail::cmd_toda_check);
  toda_opts(tcheck);
  common(tcheck, false);
  tcheck->add_option("--points", cfg.points, "sample points")->capture_default_str();
  auto* tbuild = add("toda-build", "metric from Toda data and its checks", detail::cmd_toda_build);
  toda_opts(tbuild);
  common(tbuild, true);
  auto* decay = add("decay", "decay rate towards an asymptotic model", detail::cmd_decay);
  decay->add_option("--metric", cfg.metric, "catalog family")->required();
  decay->add_option("--param", cfg.params, "family parameter name=value");
  decay->add_option("--model", cfg.model, "AF, ALF-A, ALE, Kasner or ALH*")->required();
  decay->add_option("--radii", cfg.radii, "radii r1,r2,...")->delimiter(',');
  decay->add_option("--expect-rate", cfg.expect_rate, "expected power-law rate");
  common(decay, false);
  auto* tint = add("toric-intersect", "intersection numbers of a fan", detail::cmd_toric_intersect);
  tint->add_option("--fan", cfg.fan, "rays, e.g. [(1,0),(0,1),(-1,-1)]");
  tint->add_option("--standard", cfg.standard, "projective_plane, p1xp1, hirzebruch, fmn or bl_fmn");
  tint->add_option("--fan-param", cfg.fan_params, "integer parameters of --standard")->delimiter(',');
  tint->add_option("--boundary", cfg.boundary, "ray index of D");
  tint->add_option("--expect-ample", cfg.expect_ample, "true or false");
  common(tint, false);
  auto* tcls = add("toric-classify", "enumerate log del Pezzo toric pairs", detail::cmd_toric_classify);
  tcls->add_option("--max-n", cfg.max_n)->capture_default_str();
  tcls->add_option("--max-k", cfg.max_k)->capture_default_str();
  common(tcls, false);
  auto* suite = add("suite", "all acceptance criteria", detail::cmd_suite);
  suite->add_option("--only", cfg.only, "criteria to run, e.g. 6,7")->delimiter(',');
  common(suite, true);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  }

  CLI::App* chosen = app.get_subcommands().front();
  auto [name, handler] = handlers.at(chosen);
  cfg.command = name;
  if (auto it = default_samples.find(name); it != default_samples.end() && chosen->count("--samples") == 0)
    cfg.samples = it->second;
  if (cfg.samples < 1 && default_samples.count(name)) {
    err << "usage error: --samples must be at least 1\n";
    return 2;
  }
  try {
    Format f = parse_format(cfg.format);
    Report r = handler(cfg);
    std::string bytes = emit_report(r, f);
    std::string path = detail::output_path(cfg, f);
    if (path.empty()) {
      out << bytes;
    } else {
      write_report(path, bytes);
      out << (r.pass() ? "PASS" : "FAIL") << " " << name << ": report written to " << path << "\n";
    }
    return r.pass() ? 0 : 1;
  } catch (const Error& e) {
    err << e.kind() << ": " << e.what() << "\n";
    return 2;
  }
}

inline int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace instanton
