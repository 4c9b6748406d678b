#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "catalog.hpp"
#include "hermitian.hpp"
#include "report.hpp"
#include "toda.hpp"
#include "toric.hpp"

namespace instanton {

/// Tolerances with named overrides.
class Tolerances {
 public:
  static const std::map<std::string, double>& defaults() {
    static const std::map<std::string, double> d = {
        {"ricci", 1e-7},          {"scalar_identity", 1e-5}, {"pde", 1e-4},         {"killing", 1e-6},
        {"kahler", 1e-5},         {"lebrun", 1e-7},          {"toda_residual", 1e-14}, {"potential", 1e-15},
        {"catalog_match", 1e-12}, {"scalar_formula", 1e-6},  {"reduction", 1e-8},   {"shell_volume", 1e-3},
        {"decay_rate", 0.1},      {"expansion", 0.02},       {"j_zeta", 1e-8},      {"jx", 1e-6},
        {"unit_circle", 1e-12},
    };
    return d;
  }

  void set(const std::string& key, double value) {
    if (!defaults().count(key)) throw UsageError("unknown tolerance '" + key + "'");
    if (!(value > 0)) throw UsageError("tolerance '" + key + "' must be positive");
    overrides_[key] = value;
  }
  double operator()(const std::string& key) const {
    if (auto it = overrides_.find(key); it != overrides_.end()) return it->second;
    return defaults().at(key);
  }
  const std::map<std::string, double>& overrides() const { return overrides_; }

 private:
  std::map<std::string, double> overrides_;
};

inline const char* to_string(Orientation o) { return o == Orientation::Standard ? "standard" : "reversed"; }

inline Orientation parse_orientation(const std::string& s) {
  if (s == "standard" || s == "std") return Orientation::Standard;
  if (s == "reversed" || s == "rev") return Orientation::Reversed;
  throw UsageError("orientation must be 'standard' or 'reversed', got '" + s + "'");
}

/// Accepts taub-nut as well as taub_nut.
inline std::string normalize_name(std::string s) {
  for (char& c : s)
    if (c == '-') c = '_';
  return s;
}

struct TableEntry {
  std::string family;
  Orientation orientation;
  WeylType type;
};

/// Expected self-dual Weyl types of the catalog at default parameters.
inline const std::vector<TableEntry>& type_table() {
  using O = Orientation;
  static const std::vector<TableEntry> t = {
      {"flat", O::Standard, WeylType::I},           {"eguchi_hanson", O::Standard, WeylType::I},
      {"eguchi_hanson", O::Reversed, WeylType::II}, {"taub_nut", O::Standard, WeylType::I},
      {"taub_nut", O::Reversed, WeylType::II},      {"taub_bolt", O::Standard, WeylType::II},
      {"taub_bolt", O::Reversed, WeylType::II},     {"schwarzschild", O::Standard, WeylType::II},
      {"schwarzschild", O::Reversed, WeylType::II}, {"kerr", O::Standard, WeylType::II},
      {"kasner", O::Standard, WeylType::II},        {"alh_star", O::Standard, WeylType::II},
  };
  return t;
}

inline std::optional<WeylType> expected_type(const std::string& family, Orientation o) {
  for (const auto& e : type_table())
    if (e.family == family && e.orientation == o) return e.type;
  return std::nullopt;
}

/// Sign of s_g on the Type II catalog entries.
inline std::optional<int> expected_scalar_sign(const std::string& family) {
  if (family == "kasner" || family == "alh_star") return -1;
  if (family == "flat") return std::nullopt;
  for (const auto& f : families())
    if (f.name == family) return 1;
  return std::nullopt;
}

inline std::string entry_label(const std::string& family, Orientation o) {
  return family + "(" + to_string(o) + ")";
}

namespace detail {
/// Runs body; an exception becomes one failing check naming the error.
inline std::vector<Check> guarded(const std::string& label, const std::string& ref,
                                  const std::function<std::vector<Check>()>& body) {
  try {
    return body();
  } catch (const Error& e) {
    return {Check{label + ": " + e.kind(), std::string(e.what()), 0.0, false, ref}};
  }
}

inline std::string sign_text(int s) { return s > 0 ? "positive" : "negative"; }
}  // namespace detail

// ---- building blocks shared by the suite and the subcommands ----

inline std::vector<Check> ricci_checks(const MetricChart& c, const std::string& label, int samples, std::uint64_t seed,
                                       const Tolerances& tol, const std::string& ref) {
  return detail::guarded(label, ref, [&] {
    double worst = 0;
    for (const Point& p : sample_points(c, samples, seed)) worst = std::max(worst, curvature(c, p).ricci_norm);
    return std::vector<Check>{check_below(label + ": max |Ric|", worst, tol("ricci"), ref)};
  });
}

inline std::vector<Check> type_checks(const MetricChart& c, const std::string& label, std::optional<WeylType> expect,
                                      int samples, std::uint64_t seed, const std::string& ref) {
  try {
    auto t = classify_type(c, {samples, seed});
    std::string got = to_string(t.label);
    if (expect) return {check_equal(label + ": type", got, to_string(*expect), ref)};
    return {Check{label + ": type", got, 0.0, true, ref}};
  } catch (const InconclusiveError& e) {
    return {Check{label + ": type", std::string("inconclusive"), 0.0, false, ref}};
  } catch (const Error& e) {
    return {Check{label + ": " + e.kind(), std::string(e.what()), 0.0, false, ref}};
  }
}

inline std::vector<Check> hermitian_checks(const MetricChart& c, const std::string& label, std::optional<int> expect_sign,
                                           int samples, std::uint64_t seed, const Tolerances& tol,
                                           const std::string& ref) {
  return detail::guarded(label, ref, [&] {
    auto s = hermitian_summary(conformal_pair(c), samples, seed);
    std::vector<Check> out{
        check_below(label + ": sup ||s_g| - lambda^{1/3}|", s.scalar_identity, tol("scalar_identity"), ref),
        check_below(label + ": |6 Lap_h lambda^{1/3} + lambda^{4/3}|", s.pde, tol("pde"), ref),
        check_below(label + ": Killing residual of K for g", s.killing_g, tol("killing"), ref),
        check_below(label + ": Killing residual of K for h", s.killing_h, tol("killing"), ref),
        check_below(label + ": |nabla_g omega|", s.kahler, tol("kahler"), ref),
        check_below(label + ": LeBrun form identity", s.lebrun, tol("lebrun"), ref),
    };
    if (s.scalar_sign > 0)
      out.push_back(check_positive(label + ": LeBrun form min eigenvalue", s.lebrun_min_eigenvalue, ref));
    std::string got = detail::sign_text(s.scalar_sign);
    if (expect_sign)
      out.push_back(check_equal(label + ": sign of s_g", got, detail::sign_text(*expect_sign), ref));
    else
      out.push_back(Check{label + ": sign of s_g", got, 0.0, true, ref});
    return out;
  });
}

inline std::vector<Point> field_points(const TodaField& f, int n, std::uint64_t seed) {
  return sample_points(f.domain, [](const Point&) { return true; }, n, seed);
}

inline std::vector<Check> toda_residual_checks(const TodaField& f, int points, std::uint64_t seed,
                                               const Tolerances& tol, const std::string& ref) {
  return detail::guarded(f.name, ref, [&] {
    double worst = 0;
    for (const auto& p : field_points(f, points, seed)) worst = std::max(worst, std::abs(toda_residual(f, p)));
    std::vector<Check> out{check_below(f.name + ": max Toda residual", worst, tol("toda_residual"), ref)};
    if (f.surface == Surface::Sphere) {
      double g = 0;
      for (const auto& p : field_points(f, std::min(points, 100), seed)) g = std::max(g, gauss_curvature_residual(f, p).residual);
      out.push_back(check_below(f.name + ": Gauss curvature form of the equation", g, 1e-9, ref));
    }
    return out;
  });
}

/// Worst relative deviation of V from c * rho over the field's domain.
inline double potential_deviation(const AnsatzData& d, const TodaField& f, double c, int points, std::uint64_t seed) {
  double worst = 0;
  for (const auto& p : field_points(f, points, seed)) {
    double want = c * p[0];
    worst = std::max(worst, std::abs(evaluate(d.V, p) - want) / std::abs(want));
  }
  return worst;
}

inline double catalog_deviation(const MetricChart& built, const MetricChart& ref, int samples, std::uint64_t seed) {
  double worst = 0;
  for (const auto& p : sample_points(ref, samples, seed))
    for (int i = 0; i < 10; ++i) {
      double want = evaluate(ref.components[i], p);
      worst = std::max(worst, std::abs(evaluate(built.components[i], p) - want) / std::max(1.0, std::abs(want)));
    }
  return worst;
}

struct ScalarDeviation {
  double vs_curvature = 0;  // relative, against the curvature of the Kahler chart
  double vs_rho = 0;        // relative |s - rho| / |rho|
  double vs_inverse = 0;    // relative |s - 1/rho| * |rho|
};

inline ScalarDeviation scalar_deviation(const AnsatzData& d, int samples, std::uint64_t seed) {
  ScalarDeviation out;
  auto g = conformal_kahler_chart(d);
  for (const auto& p : sample_points(g, samples, seed)) {
    double s = scalar_from_ansatz(d, p), direct = curvature(g, p).scalar, rho = p[0];
    out.vs_curvature = std::max(out.vs_curvature, std::abs(s - direct) / std::abs(direct));
    out.vs_rho = std::max(out.vs_rho, std::abs(s - rho) / std::abs(rho));
    out.vs_inverse = std::max(out.vs_inverse, std::abs(s - 1 / rho) * std::abs(rho));
  }
  return out;
}

/// Metric from Toda data, with the checks that make it a Hermitian non-Kahler Ricci-flat end.
inline std::vector<Check> toda_build_checks(const TodaField& f, int samples, std::uint64_t seed, const Tolerances& tol,
                                            const std::string& ref) {
  return detail::guarded(f.name, ref, [&] {
    auto d = ansatz_from_toda(f);
    auto c = build_metric(d);
    std::vector<Check> out = ricci_checks(c, f.name, samples, seed, tol, ref);
    auto t = type_checks(c, f.name, WeylType::II, samples, seed, ref);
    out.insert(out.end(), t.begin(), t.end());
    auto s = scalar_deviation(d, std::min(samples, 100), seed);
    out.push_back(check_below(f.name + ": scalar formula vs curvature", s.vs_curvature, tol("scalar_formula"), ref));
    if (f.name == "kasner" || f.name == "alh_star")
      out.push_back(check_below(f.name + ": matches catalog metric", catalog_deviation(c, make_metric(f.name), 50, seed),
                                tol("catalog_match"), ref));
    return out;
  });
}

inline std::vector<double> default_radii() { return {100, 200, 400, 800, 1600}; }

inline double default_rate(const std::string& model) {
  if (model == "AF" || model == "ALF-A") return 1.0;
  if (model == "ALE") return 4.0;
  return INFINITY;
}

inline std::vector<Check> decay_checks(const std::string& family, const Params& params, const std::string& model,
                                       const std::vector<double>& radii, double expect_rate, const Tolerances& tol,
                                       std::uint64_t seed, const std::string& ref) {
  std::string label = family + " vs " + model;
  return detail::guarded(label, ref, [&] {
    auto rep = decay_report(make_metric(family, params), asymptotic_model(model, family, params), radii, 16, seed);
    if (std::isinf(expect_rate))
      return std::vector<Check>{Check{label + ": fitted rate", rep.fitted_rate, 0.0, std::isinf(rep.fitted_rate), ref}};
    return std::vector<Check>{check_near(label + ": fitted rate", rep.fitted_rate, expect_rate, tol("decay_rate"), ref)};
  });
}

inline std::vector<Check> fan_checks(const Fan2D& f, std::optional<std::size_t> boundary,
                                     std::optional<bool> expect_ample, const std::string& ref) {
  return detail::guarded("fan", ref, [&] {
    std::vector<Check> out;
    auto M = intersection_matrix(f);
    for (std::size_t i = 0; i < f.size(); ++i)
      for (std::size_t j = i; j < f.size(); ++j)
        if (i == j || j == f.next(i) || i == f.next(j))
          out.push_back(Check{"D" + std::to_string(i) + ".D" + std::to_string(j), to_string(M[i][j]), 0.0, true, ref});
    Rational k2 = canonical_square(f);
    out.push_back(Check{"K.K", to_string(k2), 0.0, true, ref});
    if (f.smooth()) {
      Rational want(12 - static_cast<std::int64_t>(f.size()));
      out.push_back(check_equal("K.K = 12 - rays (smooth)", to_string(k2), to_string(want), ref));
    }
    if (boundary) {
      auto v = log_anticanonical_check(f, *boundary);
      for (std::size_t i = 0; i < f.size(); ++i)
        out.push_back(Check{"-(K+D).D" + std::to_string(i), to_string(v.degrees[i]), 0.0, true, ref});
      std::string got = v.ample ? "ample" : "not ample";
      if (expect_ample)
        out.push_back(check_equal("-(K+D)", got, *expect_ample ? "ample" : "not ample", ref));
      else
        out.push_back(Check{"-(K+D)", got, 0.0, true, ref});
    }
    return out;
  });
}

inline std::vector<Check> classification_checks(int max_n, int max_k, const std::string& ref) {
  return detail::guarded("classification", ref, [&] {
    auto verdicts = classify_pairs(max_n, max_k);
    auto match = match_classification(verdicts, listed_pairs(max_n, max_k));
    std::vector<Check> out;
    std::size_t ample = 0;
    for (const auto& v : verdicts) ample += v.ample;
    out.push_back(Check{"candidate pairs", static_cast<double>(verdicts.size()), 0.0, true, ref});
    out.push_back(Check{"ample pairs", static_cast<double>(ample), 0.0, true, ref});
    for (const auto& s : match.unexpected) out.push_back(Check{"unexpected ample pair", s, 0.0, false, ref});
    for (const auto& s : match.missing) out.push_back(Check{"listed pair not found ample", s, 0.0, false, ref});
    out.push_back(check_true("ample pairs equal the listed classification", match.exact(), ref));
    return out;
  });
}

// ---- acceptance criteria ----

struct SuiteConfig {
  std::uint64_t seed = 0;
  int samples = 200;
  Tolerances tol;
  std::set<int> only;  // empty: all of 1..10

  bool selected(int id) const { return only.empty() || only.count(id); }
};

struct CriterionResult {
  int id = 0;
  std::string title;
  std::vector<Check> checks;

  bool pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
  /// First failing check, if any.
  const Check* first_failure() const {
    for (const auto& c : checks)
      if (!c.pass) return &c;
    return nullptr;
  }
};

inline const std::vector<std::string>& ricci_families() {
  static const std::vector<std::string> f = {"flat",      "schwarzschild", "kerr",   "taub_nut",
                                             "taub_bolt", "eguchi_hanson", "kasner", "alh_star"};
  return f;
}

inline std::vector<Check> criterion_ricci(const SuiteConfig& cfg) {
  std::vector<Check> out;
  for (const auto& name : ricci_families()) {
    auto c = ricci_checks(make_metric(name), name, cfg.samples, cfg.seed, cfg.tol, "criterion 1");
    out.insert(out.end(), c.begin(), c.end());
  }
  return out;
}

inline std::vector<Check> criterion_types(const SuiteConfig& cfg) {
  std::vector<Check> out;
  for (const auto& e : type_table()) {
    auto label = entry_label(e.family, e.orientation);
    auto c = detail::guarded(label, "criterion 2", [&] {
      return type_checks(make_metric(e.family, {}, e.orientation), label, e.type, cfg.samples, cfg.seed, "criterion 2");
    });
    out.insert(out.end(), c.begin(), c.end());
  }
  return out;
}

inline std::vector<Check> criterion_conformal(const SuiteConfig& cfg) {
  std::vector<Check> out;
  for (const auto& e : type_table()) {
    if (e.type != WeylType::II) continue;
    auto label = entry_label(e.family, e.orientation);
    auto c = detail::guarded(label, "criterion 3", [&] {
      return hermitian_checks(make_metric(e.family, {}, e.orientation), label, expected_scalar_sign(e.family),
                              cfg.samples, cfg.seed, cfg.tol, "criterion 3");
    });
    out.insert(out.end(), c.begin(), c.end());
  }
  return out;
}

inline std::vector<Check> criterion_toda(const SuiteConfig& cfg) {
  const std::string ref = "criterion 4";
  std::vector<Check> out;
  for (const auto& name : {"kasner", "alh_star", "sphere_profile"}) {
    auto c = toda_residual_checks(toda_field(name), 1000, cfg.seed, cfg.tol, ref);
    out.insert(out.end(), c.begin(), c.end());
  }
  for (auto [name, coef] : {std::pair{"kasner", -6.0}, std::pair{"alh_star", -12.0}}) {
    auto c = detail::guarded(name, ref, [&, name = std::string(name), coef = coef] {
      auto f = toda_field(name);
      auto d = ansatz_from_toda(f);
      auto cn = std::to_string(static_cast<int>(coef));
      std::vector<Check> r{
          check_below(name + ": V = " + cn + " rho (relative)", potential_deviation(d, f, coef, 1000, cfg.seed),
                      cfg.tol("potential"), ref),
          check_below(name + ": build_metric vs catalog (componentwise)",
                      catalog_deviation(build_metric(d), make_metric(name), 200, cfg.seed), cfg.tol("catalog_match"), ref),
      };
      auto s = scalar_deviation(d, 100, cfg.seed);
      r.push_back(check_below(name + ": s_g = rho from scalar_from_ansatz", s.vs_rho, cfg.tol("scalar_formula"), ref));
      r.push_back(check_below(name + ": s_g = 1/rho from scalar_from_ansatz", s.vs_inverse, cfg.tol("scalar_formula"), ref));
      r.push_back(check_below(name + ": scalar_from_ansatz vs curvature of g", s.vs_curvature, cfg.tol("scalar_formula"), ref));
      return r;
    });
    out.insert(out.end(), c.begin(), c.end());
  }
  return out;
}

inline std::vector<Check> criterion_integrals(const SuiteConfig& cfg) {
  const std::string ref = "criterion 5";
  std::vector<double> levels{-40, -20, -10, -5, -3};
  auto c = detail::guarded("integrals", ref, [&] {
    std::vector<Check> r;
    double t = cfg.tol("reduction");
    auto k = reduction_integrals(toda_field("kasner"), levels);
    r.push_back(check_near("kasner: euler term", k.euler_term, 0, t, ref));
    r.push_back(check_near("kasner: a", k.a, -1, t, ref));
    r.push_back(check_near("kasner: b", k.b, 0, t, ref));
    auto a = reduction_integrals(toda_field("alh_star"), levels);
    r.push_back(check_near("alh_star: euler term", a.euler_term, 0, t, ref));
    r.push_back(check_near("alh_star: a", a.a, 0, t, ref));
    r.push_back(check_near("alh_star: b", a.b, 1, t, ref));
    double direct = chart_shell_volume(make_metric("kasner"), -4, -2);
    double formula = volume_between(k, -4, -2, VolumeMode::Circle);
    r.push_back(check_below("kasner: circle volume formula vs direct shell volume (relative)",
                            std::abs(formula - direct) / std::abs(direct), cfg.tol("shell_volume"), ref));
    return r;
  });
  return c;
}

inline std::vector<Check> criterion_indicial(const SuiteConfig&) {
  const std::string ref = "criterion 6";
  std::vector<Check> out;
  auto z = indicial_roots(0);
  out.push_back(check_true("eigenvalue 0: roots (-1, -2) exactly",
                           z.exact && z.roots.first == -1.0 && z.roots.second == -2.0, ref));
  for (int k = 0; k <= 10; ++k) {
    auto p = indicial_roots(-k * (k + 1));
    bool ok = p.exact && indicial_identity_exact(p) && p.roots.first == k - 1 && p.roots.second == -k - 2;
    out.push_back(check_true("eigenvalue " + std::to_string(-k * (k + 1)) + ": exact roots (" + std::to_string(k - 1) +
                                 ", " + std::to_string(-k - 2) + ")",
                             ok, ref));
  }
  return out;
}

inline std::vector<Check> criterion_toric(const SuiteConfig&) {
  const std::string ref = "criterion 7";
  auto index_of = [](const Fan2D& f, Ray r) {
    for (std::size_t i = 0; i < f.size(); ++i)
      if (f.rays[i] == r) return i;
    throw InvalidFan("ray " + to_string(r) + " missing");
  };
  return detail::guarded("toric", ref, [&] {
    std::vector<Check> out;
    for (int k = 1; k <= 5; ++k) {
      auto f = hirzebruch(k);
      auto M = intersection_matrix(f);
      std::size_t c = index_of(f, {0, 1});
      out.push_back(check_equal("H_" + std::to_string(k) + ": C_infinity^2", to_string(M[c][c]), to_string(Rational(-k)), ref));
    }
    for (int n = 2; n <= 6; ++n)
      for (int m = 1; m < n; ++m) {
        if (std::gcd(m, n) != 1) continue;
        auto f = fmn(m, n);
        auto M = intersection_matrix(f);
        std::size_t d = index_of(f, {-n, -m});
        std::string tag = "F_{" + std::to_string(m) + "," + std::to_string(n) + "}";
        out.push_back(check_equal(tag + ": D.D_prev", to_string(M[d][f.prev(d)]), to_string(Rational(1, n)), ref));
        out.push_back(check_equal(tag + ": D.D_next", to_string(M[d][f.next(d)]), to_string(Rational(1, n)), ref));
        for (int k = 0; k <= 3; ++k) {
          auto g = possible_four(m, n, k);
          auto G = intersection_matrix(g);
          std::size_t d1 = index_of(g, {0, -1});
          std::string gt = "four-ray (m,n,k)=(" + std::to_string(m) + "," + std::to_string(n) + "," + std::to_string(k) + ")";
          out.push_back(check_equal(gt + ": D1^2", to_string(G[d1][d1]), to_string(Rational(-m + n * k, n)), ref));
          bool window = (k - 1) * n < m && m < (k + 1) * n;
          auto v = log_anticanonical_check(g, 2);
          out.push_back(check_equal(gt + ": -(K+D) ample", v.ample ? "ample" : "not ample",
                                    window ? "ample" : "not ample", ref));
        }
      }
    auto cls = classification_checks(6, 3, ref);
    out.insert(out.end(), cls.begin(), cls.end());
    return out;
  });
}

inline std::vector<Check> criterion_decay(const SuiteConfig& cfg) {
  const std::string ref = "criterion 8";
  std::vector<Check> out = decay_checks("schwarzschild", {{"m", 1.0}}, "AF", default_radii(), 1.0, cfg.tol, cfg.seed, ref);
  auto t = decay_checks("taub_nut", {{"m", 1.0}}, "ALF-A", default_radii(), 1.0, cfg.tol, cfg.seed, ref);
  out.insert(out.end(), t.begin(), t.end());
  auto e = detail::guarded("schwarzschild", ref, [&] {
    double m = 1.0;
    auto x = conformal_expansion_check(make_metric("schwarzschild", {{"m", m}}), {125 * m, 250 * m, 500 * m, 1000 * m},
                                       8, cfg.seed);
    double want = std::cbrt(12 * m);
    return std::vector<Check>{check_below("schwarzschild: rho lambda^{1/3} at rho = 1000 m vs (12 m)^{1/3} (relative)",
                                          std::abs(x.values.back() - want) / want, cfg.tol("expansion"), ref)};
  });
  out.insert(out.end(), e.begin(), e.end());
  return out;
}

inline std::vector<Check> criterion_compactification(const SuiteConfig& cfg) {
  const std::string ref = "criterion 9";
  return detail::guarded("compactification", ref, [&] {
    Expr xi = Expr::variable(0);
    Box box{{1e-3, -1, -1, 0}, {0.5, 1, 1, 2 * std::numbers::pi}};
    double eps = 0.5;
    auto alf = ansatz_from_xi("leading ALF", pow(xi, -2), round_sphere_potential() + log(pow(xi, 2)), {}, box);
    auto [chart, rep] = compactification_chart(alf, eps, 9, 1.0 / xi - 1.0 / eps);
    return std::vector<Check>{
        check_below("||w| - 1| at xi = epsilon", rep.w_at_epsilon, cfg.tol("unit_circle"), ref),
        check_true("|w| decreases monotonically to 0 as xi -> 0", rep.monotone && rep.w_smallest < 1e-6, ref),
        check_below("|J d_zeta - d_phi|", rep.j_zeta_defect, cfg.tol("j_zeta"), ref),
        check_below("(zeta, phi)-variation of the J d_x coefficients", rep.jx_variation, cfg.tol("jx"), ref),
    };
  });
}

inline const std::vector<std::pair<int, std::string>>& criterion_titles() {
  static const std::vector<std::pair<int, std::string>> t = {
      {1, "Ricci-flat catalog"},
      {2, "self-dual Weyl type table"},
      {3, "conformal Kahler identities"},
      {4, "Toda exact solutions and ansatz"},
      {5, "reduction integrals and volumes"},
      {6, "indicial roots"},
      {7, "toric intersection numbers and classification"},
      {8, "decay rates and expansion constant"},
      {9, "compactification chart"},
      {10, "determinism of the suite report"},
  };
  return t;
}

inline std::string criterion_title(int id) {
  for (const auto& [i, t] : criterion_titles())
    if (i == id) return t;
  throw UsageError("no acceptance criterion " + std::to_string(id));
}

/// Criteria 1..9; criterion 10 compares whole suite reports and lives in suite_report.
inline CriterionResult run_criterion(int id, const SuiteConfig& cfg) {
  using Fn = std::vector<Check> (*)(const SuiteConfig&);
  static const Fn fns[] = {criterion_ricci,    criterion_types,     criterion_conformal,
                           criterion_toda,     criterion_integrals, criterion_indicial,
                           criterion_toric,    criterion_decay,     criterion_compactification};
  if (id < 1 || id > 9) throw UsageError("criterion " + std::to_string(id) + " is not a single computation");
  CriterionResult r{id, criterion_title(id), fns[id - 1](cfg)};
  for (auto& c : r.checks) c.name = "c" + std::to_string(id) + " " + c.name;
  return r;
}

inline Json suite_params(const SuiteConfig& cfg) {
  Json p = Json::object();
  p["samples"] = cfg.samples;
  Json crit = Json::array();
  for (int i = 1; i <= 10; ++i)
    if (cfg.selected(i)) crit.push_back(i);
  p["criteria"] = crit;
  Json tol = Json::object();
  for (const auto& [k, v] : cfg.tol.overrides()) tol[k] = v;
  p["tolerances"] = tol;
  return p;
}

/// Report over the selected criteria 1..9, without the determinism check.
inline Report criteria_report(const SuiteConfig& cfg, std::vector<CriterionResult>* results = nullptr) {
  Report r;
  r.command = "suite";
  r.seed = cfg.seed;
  r.params = suite_params(cfg);
  for (int id = 1; id <= 9; ++id) {
    if (!cfg.selected(id)) continue;
    auto res = run_criterion(id, cfg);
    r.add(res.checks);
    if (results) results->push_back(std::move(res));
  }
  return r;
}

/// Full suite; criterion 10 reruns criteria 1..9 and compares the serialized reports byte for byte.
inline Report suite_report(const SuiteConfig& cfg, std::vector<CriterionResult>* results = nullptr) {
  Report r = criteria_report(cfg, results);
  if (cfg.selected(10)) {
    Report again = criteria_report(cfg);
    bool same = emit_report(r, Format::Json) == emit_report(again, Format::Json);
    Check c = check_true("c10 repeated suite run gives byte-identical JSON", same, "criterion 10");
    r.add(c);
    if (results) results->push_back({10, criterion_title(10), {c}});
  }
  return r;
}

}  // namespace instanton
