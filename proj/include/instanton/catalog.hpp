#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "errors.hpp"
#include "expr.hpp"
#include "geometry.hpp"

namespace instanton {

using Params = std::map<std::string, double>;

struct ParamSpec {
  std::string name;
  double default_value;
  double lo, hi;
};

struct MetricFamily {
  std::string name;
  std::vector<ParamSpec> params;
  std::array<std::string, 4> coords;
  std::string asymptotics;
};

inline const std::vector<MetricFamily>& families() {
  static const std::vector<MetricFamily> list = {
      {"flat", {}, {"x0", "x1", "x2", "x3"}, "ALE"},
      {"schwarzschild", {{"m", 1.0, 1e-6, 1e6}}, {"tau", "r", "theta", "phi"}, "AF"},
      {"kerr", {{"m", 1.0, 1e-6, 1e6}, {"a", 0.2, 0.0, 0.5}}, {"tau", "r", "theta", "phi"}, "AF"},
      {"taub_nut", {{"m", 1.0, 1e-6, 1e6}}, {"r", "theta", "phi", "psi"}, "ALF-A"},
      {"taub_bolt", {{"n", 1.0, 1e-6, 1e6}}, {"tau", "r", "theta", "phi"}, "ALF-A"},
      {"eguchi_hanson", {{"a", 1.0, 1e-6, 1e6}}, {"r", "theta", "phi", "psi"}, "ALE"},
      {"kasner", {}, {"rho", "x", "y", "t"}, "Kasner"},
      {"alh_star", {}, {"rho", "x", "y", "t"}, "ALH*"},
  };
  return list;
}

inline const MetricFamily& family(const std::string& name) {
  for (const auto& f : families())
    if (f.name == name) return f;
  throw UnknownFamily("unknown metric family '" + name + "'");
}

inline Params resolve_params(const MetricFamily& fam, const Params& given) {
  Params out;
  for (const auto& p : fam.params) out[p.name] = p.default_value;
  for (const auto& [k, v] : given) {
    auto it = std::find_if(fam.params.begin(), fam.params.end(), [&](const ParamSpec& s) { return s.name == k; });
    if (it == fam.params.end()) throw ParamOutOfRange(fam.name + ": unknown parameter '" + k + "'");
    if (!(v >= it->lo && v <= it->hi))
      throw ParamOutOfRange(fam.name + ": parameter " + k + "=" + std::to_string(v) + " outside [" +
                            std::to_string(it->lo) + ", " + std::to_string(it->hi) + "]");
    out[k] = v;
  }
  return out;
}

namespace detail {

inline Expr var(int i) { return Expr::variable(i); }

inline RadialStructure coordinate_radial(int rvar, const Box& box) {
  return {var(rvar), [rvar, box](double rho, const std::array<double, 3>& u) {
            Point p{};
            int k = 0;
            for (int i = 0; i < 4; ++i) p[i] = i == rvar ? rho : box.lo[i] + u[k++] * (box.hi[i] - box.lo[i]);
            return p;
          }};
}

/// rho = sqrt(c) (2/3) ((-q)^{3/2} - 2^{3/2}), the distance from q = -2 along d/dq for h_qq = -c q.
inline RadialStructure toda_radial(double c, const Box& box) {
  Expr q = var(0);
  Expr proxy = std::sqrt(c) * (2.0 / 3.0) * (pow(-q, 1.5) - std::pow(2.0, 1.5));
  return {proxy, [c, box](double rho, const std::array<double, 3>& u) {
            double s = rho / (std::sqrt(c) * 2.0 / 3.0) + std::pow(2.0, 1.5);
            return Point{-std::pow(s, 2.0 / 3.0), box.lo[1] + u[0] * (box.hi[1] - box.lo[1]),
                         box.lo[2] + u[1] * (box.hi[2] - box.lo[2]), box.lo[3] + u[2] * (box.hi[3] - box.lo[3])};
          }};
}

inline bool polar_ok(double th) { return th > 0 && th < std::numbers::pi; }

}  // namespace detail

inline constexpr double kPolarMargin = 0.25;

inline MetricChart flat_chart() {
  using detail::var;
  MetricChart c;
  c.name = "flat";
  c.coords = family("flat").coords;
  for (int i = 0; i < 4; ++i)
    for (int j = i; j < 4; ++j) c.set(i, j, i == j ? 1.0 : 0.0);
  c.box = {{-3, -3, -3, -3}, {3, 3, 3, 3}};
  c.complex_hint = std::pair{0, 1};
  Expr r2 = 0.0;
  for (int i = 0; i < 4; ++i) r2 = r2 + pow(var(i), 2);
  c.radial = RadialStructure{sqrt(r2), [](double rho, const std::array<double, 3>& u) {
                               double a = std::numbers::pi * (0.1 + 0.8 * u[0]), b = std::numbers::pi * (0.1 + 0.8 * u[1]),
                                      f = 2 * std::numbers::pi * u[2];
                               return Point{rho * std::cos(a), rho * std::sin(a) * std::cos(b),
                                            rho * std::sin(a) * std::sin(b) * std::cos(f),
                                            rho * std::sin(a) * std::sin(b) * std::sin(f)};
                             }};
  return c;
}

inline MetricChart schwarzschild_chart(double m) {
  using detail::var;
  Expr r = var(1), th = var(2);
  Expr f = 1.0 - 2.0 * m / r;
  MetricChart c;
  c.name = "schwarzschild";
  c.coords = family("schwarzschild").coords;
  c.set(0, 0, f);
  c.set(1, 1, 1.0 / f);
  c.set(2, 2, pow(r, 2));
  c.set(3, 3, pow(r * sin(th), 2));
  c.box = {{0, 3 * m, kPolarMargin, 0}, {8 * std::numbers::pi * m, 50 * m, std::numbers::pi - kPolarMargin, 2 * std::numbers::pi}};
  c.domain = [m](const Point& p) { return p[1] > 2 * m && detail::polar_ok(p[2]); };
  c.scale_hint = {m, m, 1, 1};
  c.complex_hint = std::pair{2, 3};
  c.radial = detail::coordinate_radial(1, c.box);
  return c;
}

inline MetricChart kerr_chart(double m, double a) {
  using detail::var;
  Expr r = var(1), th = var(2);
  Expr s2 = pow(sin(th), 2);
  Expr Sigma = pow(r, 2) - a * a * pow(cos(th), 2);
  Expr Delta = pow(r, 2) - 2.0 * m * r - a * a;
  Expr r2a2 = pow(r, 2) - a * a;
  MetricChart c;
  c.name = "kerr";
  c.coords = family("kerr").coords;
  c.set(0, 0, (Delta + a * a * s2) / Sigma);
  c.set(0, 3, a * s2 * (Delta - r2a2) / Sigma);
  c.set(3, 3, s2 * (Delta * a * a * s2 + pow(r2a2, 2)) / Sigma);
  c.set(1, 1, Sigma / Delta);
  c.set(2, 2, Sigma);
  double rplus = m + std::sqrt(m * m + a * a);
  c.box = {{0, 3 * m, kPolarMargin, 0}, {8 * std::numbers::pi * m, 50 * m, std::numbers::pi - kPolarMargin, 2 * std::numbers::pi}};
  c.domain = [rplus](const Point& p) { return p[1] > rplus && detail::polar_ok(p[2]); };
  c.scale_hint = {m, m, 1, 1};
  c.complex_hint = std::pair{2, 3};
  c.radial = detail::coordinate_radial(1, c.box);
  return c;
}

inline MetricChart taub_nut_chart(double m) {
  using detail::var;
  Expr r = var(0), th = var(1);
  Expr V = 1.0 + 2.0 * m / r;
  MetricChart c;
  c.name = "taub_nut";
  c.coords = family("taub_nut").coords;
  c.set(0, 0, V);
  c.set(1, 1, V * pow(r, 2));
  c.set(2, 2, V * pow(r * sin(th), 2) + 4.0 * m * m * pow(cos(th), 2) / V);
  c.set(2, 3, 2.0 * m * cos(th) / V);
  c.set(3, 3, 1.0 / V);
  c.box = {{m, kPolarMargin, 0, 0}, {50 * m, std::numbers::pi - kPolarMargin, 2 * std::numbers::pi, 8 * std::numbers::pi * m}};
  c.domain = [](const Point& p) { return p[0] > 0 && detail::polar_ok(p[1]); };
  c.scale_hint = {m, 1, 1, m};
  c.complex_hint = std::pair{1, 2};
  c.radial = detail::coordinate_radial(0, c.box);
  return c;
}

inline MetricChart taub_bolt_chart(double n) {
  using detail::var;
  Expr r = var(1), th = var(2);
  Expr F = (pow(r, 2) - 2.5 * n * r + n * n) / (pow(r, 2) - n * n);
  MetricChart c;
  c.name = "taub_bolt";
  c.coords = family("taub_bolt").coords;
  c.set(0, 0, F);
  c.set(0, 3, 2.0 * n * F * cos(th));
  c.set(3, 3, 4.0 * n * n * F * pow(cos(th), 2) + (pow(r, 2) - n * n) * pow(sin(th), 2));
  c.set(1, 1, 1.0 / F);
  c.set(2, 2, pow(r, 2) - n * n);
  c.box = {{0, 2.2 * n, kPolarMargin, 0}, {8 * std::numbers::pi * n, 50 * n, std::numbers::pi - kPolarMargin, 2 * std::numbers::pi}};
  c.domain = [n](const Point& p) { return p[1] > 2 * n && detail::polar_ok(p[2]); };
  c.scale_hint = {n, n, 1, 1};
  c.complex_hint = std::pair{2, 3};
  c.radial = detail::coordinate_radial(1, c.box);
  return c;
}

inline MetricChart eguchi_hanson_chart(double a) {
  using detail::var;
  Expr r = var(0), th = var(1);
  Expr f = 1.0 - std::pow(a, 4) / pow(r, 4);
  Expr q = pow(r, 2) / 4.0;
  MetricChart c;
  c.name = "eguchi_hanson";
  c.coords = family("eguchi_hanson").coords;
  c.set(0, 0, 1.0 / f);
  c.set(1, 1, q);
  c.set(2, 2, q * (pow(sin(th), 2) + f * pow(cos(th), 2)));
  c.set(2, 3, q * f * cos(th));
  c.set(3, 3, q * f);
  c.box = {{1.2 * a, 0.5, 0, 0}, {5 * a, std::numbers::pi - 0.5, 2 * std::numbers::pi, 2 * std::numbers::pi}};
  c.domain = [a](const Point& p) { return p[0] > a && detail::polar_ok(p[1]); };
  c.orientation = -1;
  c.scale_hint = {a, 1, 1, 1};
  c.complex_hint = std::pair{1, 2};
  c.radial = detail::coordinate_radial(0, c.box);
  return c;
}

inline MetricChart kasner_chart() {
  using detail::var;
  Expr q = var(0);
  MetricChart c;
  c.name = "kasner";
  c.coords = family("kasner").coords;
  c.set(0, 0, -6.0 * q);
  c.set(1, 1, 6.0 * pow(q, 2));
  c.set(2, 2, 6.0 * pow(q, 2));
  c.set(3, 3, -1.0 / (6.0 * q));
  c.box = {{-50, 0, 0, 0}, {-2, 1, 1, 2 * std::numbers::pi}};
  c.domain = [](const Point& p) { return p[0] < 0; };
  c.orientation = -1;
  c.complex_hint = std::pair{1, 2};
  c.radial = detail::toda_radial(6.0, c.box);
  return c;
}

inline MetricChart alh_star_chart() {
  using detail::var;
  Expr q = var(0), x = var(1);
  MetricChart c;
  c.name = "alh_star";
  c.coords = family("alh_star").coords;
  c.set(0, 0, -12.0 * q);
  c.set(1, 1, -12.0 * q);
  c.set(2, 2, -12.0 * q - 12.0 * pow(x, 2) / q);
  c.set(2, 3, x / q);
  c.set(3, 3, -1.0 / (12.0 * q));
  c.box = {{-50, 0, 0, 0}, {-2, 1, 1, 2 * std::numbers::pi}};
  c.domain = [](const Point& p) { return p[0] < 0; };
  c.orientation = -1;
  c.complex_hint = std::pair{1, 2};
  c.radial = detail::toda_radial(12.0, c.box);
  return c;
}

enum class Orientation { Standard, Reversed };

inline MetricChart make_metric(const std::string& name, const Params& given = {},
                               Orientation orient = Orientation::Standard) {
  const auto& fam = family(name);
  Params p = resolve_params(fam, given);
  MetricChart c;
  if (name == "flat") c = flat_chart();
  else if (name == "schwarzschild") c = schwarzschild_chart(p["m"]);
  else if (name == "kerr") c = kerr_chart(p["m"], p["a"]);
  else if (name == "taub_nut") c = taub_nut_chart(p["m"]);
  else if (name == "taub_bolt") c = taub_bolt_chart(p["n"]);
  else if (name == "eguchi_hanson") c = eguchi_hanson_chart(p["a"]);
  else if (name == "kasner") c = kasner_chart();
  else c = alh_star_chart();
  if (orient == Orientation::Reversed) c = orientation_flip(c);
  return c;
}

/// Model end in the same coordinates as the family's chart.
struct AsymptoticModel {
  std::string kind;
  MetricChart chart;
};

inline AsymptoticModel asymptotic_model(const std::string& kind, const std::string& family_name, const Params& given = {}) {
  using detail::var;
  const auto& fam = family(family_name);
  Params p = resolve_params(fam, given);
  MetricChart base = make_metric(family_name, given);
  MetricChart m = base;
  m.name = kind + " model";
  for (auto& e : m.components) e = 0.0;
  auto mismatch = [&] { return TypeMismatch(family_name + " has no " + kind + " model"); };
  if (kind == "AF") {
    if (family_name != "schwarzschild" && family_name != "kerr") throw mismatch();
    Expr r = var(1), th = var(2);
    m.set(0, 0, 1.0);
    m.set(1, 1, 1.0);
    m.set(2, 2, pow(r, 2));
    m.set(3, 3, pow(r * sin(th), 2));
  } else if (kind == "ALF-A") {
    if (family_name == "taub_nut") {
      double mm = p["m"];
      Expr r = var(0), th = var(1);
      m.set(0, 0, 1.0);
      m.set(1, 1, pow(r, 2));
      m.set(2, 2, pow(r * sin(th), 2) + 4.0 * mm * mm * pow(cos(th), 2));
      m.set(2, 3, 2.0 * mm * cos(th));
      m.set(3, 3, 1.0);
    } else if (family_name == "taub_bolt") {
      double n = p["n"];
      Expr r = var(1), th = var(2);
      m.set(0, 0, 1.0);
      m.set(0, 3, 2.0 * n * cos(th));
      m.set(3, 3, 4.0 * n * n * pow(cos(th), 2) + pow(r * sin(th), 2));
      m.set(1, 1, 1.0);
      m.set(2, 2, pow(r, 2));
    } else {
      throw mismatch();
    }
  } else if (kind == "ALE") {
    if (family_name == "eguchi_hanson") {
      Expr r = var(0), th = var(1);
      Expr q = pow(r, 2) / 4.0;
      m.set(0, 0, 1.0);
      m.set(1, 1, q);
      m.set(2, 2, q);
      m.set(2, 3, q * cos(th));
      m.set(3, 3, q);
    } else if (family_name == "flat") {
      m.components = base.components;
    } else {
      throw mismatch();
    }
  } else if (kind == "Kasner" || kind == "ALH*") {
    if ((kind == "Kasner") != (family_name == "kasner") || (kind == "ALH*") != (family_name == "alh_star"))
      throw mismatch();
    m.components = base.components;
  } else {
    throw UnknownFamily("unknown asymptotic model '" + kind + "'");
  }
  return {kind, m};
}

struct DecayReport {
  std::vector<double> radii;
  std::vector<double> deviations;  // sup over angular samples at each radius
  double sup_deviation = 0;        // at the largest radius
  double fitted_rate = 0;          // +inf when the deviation vanishes
};

inline double radial_value(const MetricChart& c, const Point& p) { return evaluate(c.radial->proxy, p); }

inline std::vector<std::array<double, 3>> angular_samples(int n, std::uint64_t seed) {
  Box unit{{0, 0, 0, 0}, {1, 1, 1, 1}};
  std::vector<std::array<double, 3>> out;
  for (const auto& p : sample_points(unit, [](const Point&) { return true; }, n, seed)) out.push_back({p[0], p[1], p[2]});
  return out;
}

/// Least-squares slope of ys against xs.
inline double fit_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  double n = static_cast<double>(xs.size()), sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  double den = n * sxx - sx * sx;
  if (den == 0) throw FitError("degenerate abscissae in slope fit");
  return (n * sxy - sx * sy) / den;
}

/// Sup over angular samples of |h - h_model|_h at each radius, with a power-law rate fitted
/// over the outer half of the radii.
inline DecayReport decay_report(const MetricChart& c, const AsymptoticModel& model, std::vector<double> radii,
                                int angular = 16, std::uint64_t seed = 0) {
  if (radii.size() < 4) throw InsufficientRadii("decay fit needs at least four radii");
  if (!c.radial) throw TypeMismatch(c.name + ": no radial structure");
  std::sort(radii.begin(), radii.end());
  DecayReport rep;
  rep.radii = radii;
  auto dirs = angular_samples(angular, seed);
  for (double rho : radii) {
    double sup = 0;
    for (const auto& u : dirs) {
      Point p = c.radial->point_at(rho, u);
      if (!c.domain(p)) throw DomainError(c.name + ": radial sample outside domain");
      Mat4<double> g{}, diff{};
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
          g[i][j] = evaluate(c.component(i, j), p);
          diff[i][j] = g[i][j] - evaluate(model.chart.component(i, j), p);
        }
      auto fr = gram_schmidt(g);
      double s = 0;
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
          double v = 0;
          for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) v += fr.F[a][i] * fr.F[b][j] * diff[i][j];
          s += v * v;
        }
      sup = std::max(sup, std::sqrt(s));
    }
    rep.deviations.push_back(sup);
  }
  rep.sup_deviation = rep.deviations.back();
  std::size_t start = radii.size() / 2;
  std::vector<double> xs, ys;
  bool vanishing = false;
  for (std::size_t i = start; i < radii.size(); ++i) {
    if (rep.deviations[i] <= 1e-300) vanishing = true;
    xs.push_back(std::log(radii[i]));
    ys.push_back(-std::log(std::max(rep.deviations[i], 1e-300)));
  }
  rep.fitted_rate = vanishing ? INFINITY : fit_slope(xs, ys);
  return rep;
}

struct ExpansionCheck {
  std::vector<double> radii;
  std::vector<double> values;  // mean of rho * lambda^{1/3} at each radius
  double constant = 0;         // +inf when the product grows
  double rate = 0;             // fitted rate of |value - constant|, +inf when exact
  double growth_slope = 0;     // slope of log(value) against log(rho)
};

/// Large-radius behaviour of rho * lambda^{1/3}.
inline ExpansionCheck conformal_expansion_check(const MetricChart& c, std::vector<double> radii, int angular = 8,
                                                std::uint64_t seed = 0) {
  if (!c.radial) throw TypeMismatch(c.name + ": no radial structure");
  if (radii.size() < 4) throw InsufficientRadii("expansion check needs at least four radii");
  std::sort(radii.begin(), radii.end());
  ExpansionCheck out;
  out.radii = radii;
  auto dirs = angular_samples(angular, seed);
  for (double rho : radii) {
    double sum = 0;
    for (const auto& u : dirs) {
      Point p = c.radial->point_at(rho, u);
      auto d = metric_derivatives<0>(c, p);
      sum += std::cbrt(weyl_analysis(d, c.orientation).lambda) * radial_value(c, p);
    }
    out.values.push_back(sum / static_cast<double>(dirs.size()));
  }
  std::size_t start = radii.size() / 2;
  std::vector<double> lx, ly;
  for (std::size_t i = start; i < radii.size(); ++i) {
    lx.push_back(std::log(radii[i]));
    ly.push_back(std::log(std::abs(out.values[i])));
  }
  out.growth_slope = fit_slope(lx, ly);
  if (out.growth_slope > 0.1) {
    out.constant = INFINITY;
    out.rate = NAN;
    return out;
  }
  out.constant = out.values.back();
  std::vector<double> xs, ys;
  bool exact = true;
  for (std::size_t i = 0; i + 1 < radii.size(); ++i) {
    double dv = std::abs(out.values[i] - out.constant);
    if (dv > 1e-12 * std::abs(out.constant)) exact = false;
    xs.push_back(std::log(radii[i]));
    ys.push_back(-std::log(std::max(dv, 1e-300)));
  }
  out.rate = exact ? INFINITY : fit_slope(xs, ys);
  return out;
}

}  // namespace instanton
