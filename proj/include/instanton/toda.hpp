#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/rational.hpp>
#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "catalog.hpp"
#include "errors.hpp"
#include "expr.hpp"
#include "geometry.hpp"
#include "hermitian.hpp"

namespace instanton {

// Toda fields live on (rho, x, y); the ansatz charts add the fibre coordinate t.
// Version-one data (W, v) uses xi = 1/rho in slot 0.
inline constexpr int kRho = 0, kX = 1, kY = 2, kT = 3;

enum class Surface { Sphere, Torus, Chart };

inline const char* to_string(Surface s) {
  switch (s) {
    case Surface::Sphere: return "sphere";
    case Surface::Torus: return "torus";
    default: return "chart";
  }
}

struct TodaField {
  std::string name;
  Expr u;
  Box domain;  // (rho, x, y, t)
  Surface surface = Surface::Chart;
  int euler_char = 0;
};

/// log(4 / (1 + x^2 + y^2)^2), the round unit sphere in stereographic coordinates.
inline Expr round_sphere_potential() {
  Expr x = Expr::variable(kX), y = Expr::variable(kY);
  return std::log(4.0) - 2.0 * log(1.0 + pow(x, 2) + pow(y, 2));
}

inline double round_sphere_potential(double x, double y) { return std::log(4.0) - 2.0 * std::log(1 + x * x + y * y); }

namespace detail {
inline Box torus_box() { return {{-50, 0, 0, 0}, {-2, 1, 1, 2 * std::numbers::pi}}; }
}  // namespace detail

/// Named closed-form solutions: kasner (u = log(-rho)), alh_star (u = 0) and
/// sphere_profile (u = log(rho^2 + b rho + c) + varpi, b = c = 0 by default).
inline TodaField toda_field(const std::string& name, const Params& params = {}) {
  Expr rho = Expr::variable(kRho);
  TodaField f;
  f.name = name;
  if (name == "kasner") {
    f.u = log(-rho);
    f.domain = detail::torus_box();
    f.surface = Surface::Torus;
  } else if (name == "alh_star") {
    f.u = 0.0;
    f.domain = detail::torus_box();
    f.surface = Surface::Torus;
  } else if (name == "sphere_profile") {
    double b = 0, c = 0;
    for (const auto& [k, v] : params) {
      if (k == "b") b = v;
      else if (k == "c") c = v;
      else throw ParamOutOfRange("sphere_profile: unknown parameter '" + k + "'");
    }
    double disc = b * b - 4 * c, root = disc >= 0 ? (-b + std::sqrt(disc)) / 2 : 0.0;
    double lo = std::max(1.0, 2 * root);
    Expr P = pow(rho, 2) + b * rho + c;
    f.u = log(P) + round_sphere_potential();
    f.domain = {{lo, -2, -2, 0}, {lo + 20, 2, 2, 2 * std::numbers::pi}};
    f.surface = Surface::Sphere;
    f.euler_char = 2;
  } else {
    throw UnknownFamily("unknown Toda solution '" + name + "'");
  }
  for (const auto& [k, v] : params)
    if (name != "sphere_profile") throw ParamOutOfRange(name + ": unknown parameter '" + k + "'");
  return f;
}

/// A field given as text in the variables rho, x, y.
inline TodaField toda_field_from_string(const std::string& text, Surface surface, const Box& domain) {
  TodaField f;
  f.name = text;
  f.u = parse_expr(text, {{"rho", kRho}, {"x", kX}, {"y", kY}});
  f.domain = domain;
  f.surface = surface;
  f.euler_char = surface == Surface::Sphere ? 2 : 0;
  return f;
}

namespace detail {
template <int N>
std::array<Jet<4, N>, 4> jet_point(const Point& p) {
  std::array<Jet<4, N>, 4> x;
  for (int i = 0; i < 4; ++i) x[i] = Jet<4, N>::variable(i, p[i]);
  return x;
}

template <int N>
double second(const Jet<4, N>& j, int a, int b) {
  return derivative(derivative(j, a), b).value();
}

template <int N>
double first(const Jet<4, N>& j, int a) {
  return derivative(j, a).value();
}
}  // namespace detail

/// (e^u)_rr + u_xx + u_yy at p, from second-order jets.
inline double toda_residual(const TodaField& f, const Point& p) {
  if (!f.domain.contains(p)) throw DomainError(f.name + ": point outside the field domain");
  auto u = evaluate(f.u, detail::jet_point<2>(p));
  auto eu = exp(u);
  return detail::second(eu, kRho, kRho) + detail::second(u, kX, kX) + detail::second(u, kY, kY);
}

struct GaussCheck {
  double lhs = 0;    // (e^u)_rr e^{-u} / 2
  double gauss = 0;  // curvature of e^u (dx^2 + dy^2)
  double residual = 0;
};

/// Compares the Toda side with the Gauss curvature of the level surface, computed from
/// the orthogonal-coordinates formula for E = G = e^u, F = 0.
inline GaussCheck gauss_curvature_residual(const TodaField& f, const Point& p) {
  if (!f.domain.contains(p)) throw DomainError(f.name + ": point outside the field domain");
  using J2 = Jet<4, 2>;
  using J1 = Jet<4, 1>;
  J2 E = exp(evaluate(f.u, detail::jet_point<2>(p)));
  J2 G = E;
  J1 root = truncate<1>(sqrt(E * G));
  J1 qx = derivative(G, kX) / root;
  J1 qy = derivative(E, kY) / root;
  GaussCheck out;
  out.gauss = -(derivative(qx, kX).value() + derivative(qy, kY).value()) / (2 * root.value());
  out.lhs = 0.5 * detail::second(E, kRho, kRho) / E.value();
  out.residual = std::abs(out.lhs - out.gauss);
  return out;
}

/// eta = dt + X dx + Y dy + Z d(slot 0).
struct Connection {
  Expr X{0.0}, Y{0.0}, Z{0.0};
};

struct AnsatzData {
  std::string name;
  Expr V, u;       // on (rho, x, y)
  Expr W, v;       // on (xi, x, y)
  Expr xi;         // 1/rho on the rho chart
  Connection eta;  // on the rho chart
  double k_const = 1;
  double base_level = 0;
  Box box;  // rho chart, t in [0, 2 pi]
};

namespace detail {
inline Expr rho_to_xi(const Expr& e) { return substitute(e, 0, 1.0 / Expr::variable(0)); }

inline Expr log_square(const Expr& s) { return log(pow(s, 2)); }

inline Box xi_box_to_rho(const Box& b) {
  Box r = b;
  double a0 = 1 / b.lo[0], a1 = 1 / b.hi[0];
  r.lo[0] = std::min(a0, a1);
  r.hi[0] = std::max(a0, a1);
  return r;
}
}  // namespace detail

/// Connection components in the xi chart: Z_xi dxi = Z_rho drho.
inline Connection eta_xi(const AnsatzData& d) {
  Expr xi = Expr::variable(0);
  return {detail::rho_to_xi(d.eta.X), detail::rho_to_xi(d.eta.Y), -detail::rho_to_xi(d.eta.Z) / pow(xi, 2)};
}

/// Fills the rho-side fields from version-one data (W, v, eta) given on (xi, x, y).
inline AnsatzData ansatz_from_xi(const std::string& name, const Expr& W, const Expr& v, const Connection& eta,
                                 const Box& xi_box, double k_const = 1) {
  Expr rho = Expr::variable(0);
  AnsatzData d;
  d.name = name;
  d.W = W;
  d.v = v;
  d.k_const = k_const;
  d.V = detail::rho_to_xi(W) / pow(rho, 2);
  d.u = detail::rho_to_xi(v) + detail::log_square(pow(rho, 2));
  d.xi = 1.0 / rho;
  d.eta = {detail::rho_to_xi(eta.X), detail::rho_to_xi(eta.Y), -detail::rho_to_xi(eta.Z) / pow(rho, 2)};
  d.box = detail::xi_box_to_rho(xi_box);
  d.base_level = d.box.lo[0];
  return d;
}

/// Version-two data from a Toda solution. eta is integrated with Z = 0,
/// X = -int_{r0}^{r} V_y, Y = int_0^x F(r0, s, y) ds + int_{r0}^{r} V_x,
/// F = -rho^2 d_rho(V e^u rho^{-2}).
inline AnsatzData ansatz_from_toda(const TodaField& f, std::optional<double> base_level = std::nullopt,
                                   int sign_samples = 64) {
  Expr rho = Expr::variable(kRho), xi = Expr::variable(0);
  AnsatzData d;
  d.name = f.name;
  d.u = f.u;
  d.V = -12.0 * rho + 6.0 * pow(rho, 2) * differentiate(f.u, kRho);
  d.box = f.domain;
  d.base_level = base_level.value_or(0.5 * (f.domain.lo[0] + f.domain.hi[0]));
  d.xi = 1.0 / rho;
  d.W = detail::rho_to_xi(d.V) / pow(xi, 2);
  d.v = detail::rho_to_xi(f.u) + detail::log_square(pow(xi, 2));

  std::vector<Point> pts = sample_points(f.domain, [](const Point&) { return true; }, sign_samples, 0);
  for (int m = 0; m < 8; ++m)
    pts.push_back({m & 1 ? f.domain.hi[0] : f.domain.lo[0], m & 2 ? f.domain.hi[1] : f.domain.lo[1],
                   m & 4 ? f.domain.hi[2] : f.domain.lo[2], 0});
  for (const Point& p : pts) {
    double V = evaluate(d.V, p);
    if (!(V > 1e-12 * (1 + 12 * std::abs(p[0])))) {
      std::string branch = p[0] < 0 ? "rho < 0 (s_g < 0 branch)" : "rho > 0 (s_g > 0 branch)";
      throw SignError(f.name + ": V = " + std::to_string(V) + " is not positive at rho = " + std::to_string(p[0]) +
                      " on the " + branch);
    }
  }

  Expr Ve = d.V * exp(f.u) / pow(rho, 2);
  Expr F = -pow(rho, 2) * differentiate(Ve, kRho);
  Expr F0 = substitute(F, kRho, d.base_level);
  d.eta.X = -integral(differentiate(d.V, kY), kRho, d.base_level, rho);
  d.eta.Y = integral(F0, kX, 0.0, Expr::variable(kX)) + integral(differentiate(d.V, kX), kRho, d.base_level, rho);
  d.eta.Z = 0.0;
  return d;
}

/// Max over the invariants: V = -12 rho + 6 rho^2 u_rho, V = xi^2 W, u = v - 4 log|xi|,
/// W = k^2 (12/xi^3 - 6 v_xi / xi^2). Relative to the size of V and W.
inline double ansatz_invariant_residual(const AnsatzData& d, const Point& p) {
  auto rj = detail::jet_point<1>(p);
  auto u = evaluate(d.u, rj);
  double rho = p[0], V = evaluate(d.V, p);
  Point q = p;
  q[0] = 1 / rho;
  auto vj = evaluate(d.v, detail::jet_point<1>(q));
  double W = evaluate(d.W, q), xi = q[0];
  double r1 = std::abs(V - (-12 * rho + 6 * rho * rho * detail::first(u, 0))) / (1 + std::abs(V));
  double r2 = std::abs(V - xi * xi * W) / (1 + std::abs(V));
  double r3 = std::abs(u.value() - (vj.value() - 2 * std::log(xi * xi)));
  double k2 = d.k_const * d.k_const;
  double r4 = std::abs(W - k2 * (12 / (xi * xi * xi) - 6 * detail::first(vj, 0) / (xi * xi))) / (1 + std::abs(W));
  return std::max({r1, r2, r3, r4});
}

/// h = V (drho^2 + e^u (dx^2 + dy^2)) + eta^2 / V in coordinates (rho, x, y, t).
inline MetricChart build_metric(const AnsatzData& d) {
  Expr Vinv = 1.0 / d.V;
  std::array<Expr, 4> e{d.eta.Z, d.eta.X, d.eta.Y, 1.0};
  std::array<Expr, 4> base{d.V, d.V * exp(d.u), d.V * exp(d.u), 0.0};
  MetricChart c;
  c.name = "toda:" + d.name;
  c.coords = {"rho", "x", "y", "t"};
  for (int i = 0; i < 4; ++i)
    for (int j = i; j < 4; ++j) c.set(i, j, (i == j ? base[i] : Expr(0.0)) + e[i] * e[j] * Vinv);
  c.box = d.box;
  c.box.lo[3] = 0;
  c.box.hi[3] = 2 * std::numbers::pi;
  int sign = d.box.lo[0] < 0 ? -1 : 1;
  Expr V = d.V;
  c.domain = [sign, V](const Point& p) { return p[0] * sign > 0 && evaluate(V, p) > 0; };
  c.orientation = -1;
  c.complex_hint = std::pair{1, 2};
  for (const auto& q : sample_points(c.box, [](const Point&) { return true; }, 16, 0))
    if (!(evaluate(V, q) > 0)) throw SignError(d.name + ": V is not positive on the chart box");
  return c;
}

/// g = h / rho^2 on the same chart.
inline MetricChart conformal_kahler_chart(const AnsatzData& d) {
  MetricChart c = build_metric(d);
  c.name = "kahler:" + d.name;
  Expr f = pow(Expr::variable(kRho), -2);
  for (auto& e : c.components) e = e * f;
  return c;
}

namespace detail {
inline Point to_xi(const Point& p) { return {1 / p[0], p[1], p[2], p[3]}; }
}  // namespace detail

/// -((e^v)_xixi + v_xx + v_yy) / (W e^v) at the rho-chart point p.
inline double scalar_from_ansatz(const AnsatzData& d, const Point& p) {
  Point q = detail::to_xi(p);
  auto v = evaluate(d.v, detail::jet_point<2>(q));
  auto ev = exp(v);
  double W = evaluate(d.W, q);
  double num = detail::second(ev, 0, 0) + detail::second(v, kX, kX) + detail::second(v, kY, kY);
  return -num / (W * ev.value());
}

struct CompatibilityReport {
  double formula = 0;       // |(W e^v)_xixi + W_xx + W_yy|
  double gauge_defect = 0;  // d(eta) from X, Y, Z against the prescribed d(eta)
};

inline CompatibilityReport compatibility_residual(const AnsatzData& d, const Point& p) {
  CompatibilityReport out;
  Point q = detail::to_xi(p);
  auto xj = detail::jet_point<2>(q);
  auto W = evaluate(d.W, xj);
  auto Wev = W * exp(evaluate(d.v, xj));
  out.formula = std::abs(detail::second(Wev, 0, 0) + detail::second(W, kX, kX) + detail::second(W, kY, kY));

  auto rj = detail::jet_point<2>(p);
  auto V = evaluate(d.V, rj);
  auto X = evaluate(d.eta.X, rj), Y = evaluate(d.eta.Y, rj), Z = evaluate(d.eta.Z, rj);
  auto Ve = V * exp(evaluate(d.u, rj)) / (rj[0] * rj[0]);
  double rho = p[0];
  double F = -rho * rho * detail::first(Ve, kRho);
  double dxy = detail::first(Y, kX) - detail::first(X, kY);
  double drx = detail::first(X, kRho) - detail::first(Z, kX);
  double dry = detail::first(Y, kRho) - detail::first(Z, kY);
  out.gauge_defect = std::max({std::abs(dxy - F), std::abs(drx + detail::first(V, kY)),
                               std::abs(dry - detail::first(V, kX))});
  return out;
}

namespace detail {
/// int over the level surface of f(rho, x, y) dx dy.
inline double surface_integral(const TodaField& field, const Expr& f, double rho) {
  if (field.surface == Surface::Torus) {
    const auto& [nodes, weights] = gauss_legendre<16>();
    double ax = field.domain.hi[1] - field.domain.lo[1], ay = field.domain.hi[2] - field.domain.lo[2], s = 0;
    for (int i = 0; i < 16; ++i)
      for (int j = 0; j < 16; ++j)
        s += weights[i] * weights[j] *
             evaluate(f, Point{rho, field.domain.lo[1] + ax * nodes[i], field.domain.lo[2] + ay * nodes[j], 0});
    return s * ax * ay;
  }
  if (field.surface == Surface::Sphere) {
    // dx dy = e^{-varpi} dA on the unit sphere, dA = dz dphi.
    const auto& [nodes, weights] = gauss_legendre<32>();
    constexpr int nphi = 64;
    double s = 0;
    for (int i = 0; i < 32; ++i) {
      double z = 2 * nodes[i] - 1, t = std::sqrt((1 - z) / (1 + z));
      for (int k = 0; k < nphi; ++k) {
        double ph = 2 * std::numbers::pi * k / nphi, x = t * std::cos(ph), y = t * std::sin(ph);
        s += 2 * weights[i] * (2 * std::numbers::pi / nphi) * evaluate(f, Point{rho, x, y, 0}) *
             std::exp(-round_sphere_potential(x, y));
      }
    }
    return s;
  }
  throw DomainError(field.name + ": surface integrals need a compact surface descriptor");
}
}  // namespace detail

struct ReductionIntegrals {
  double a = 0, b = 0;
  double euler_term = 0;    // 2 pi chi
  double fit_residual = 0;  // relative, for int e^u
  double ve_residual = 0;   // relative, for int V e^u against -6 a rho^2 - 12 b rho
  std::vector<double> levels, area, ve_integral;
};

inline ReductionIntegrals reduction_integrals(const TodaField& f, std::vector<double> levels, double tol = 1e-6) {
  if (levels.size() < 3) throw FitError("reduction integrals need at least three levels");
  std::sort(levels.begin(), levels.end());
  if (std::adjacent_find(levels.begin(), levels.end()) != levels.end()) throw FitError("levels must be distinct");
  Expr rho = Expr::variable(kRho);
  Expr eu = exp(f.u);
  Expr V = -12.0 * rho + 6.0 * pow(rho, 2) * differentiate(f.u, kRho);
  ReductionIntegrals out;
  out.levels = levels;
  out.euler_term = 2 * std::numbers::pi * f.euler_char;
  for (double r : levels) {
    out.area.push_back(detail::surface_integral(f, eu, r));
    out.ve_integral.push_back(detail::surface_integral(f, V * eu, r));
  }
  double n = static_cast<double>(levels.size()), sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::vector<double> rest;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    double x = levels[i], y = out.area[i] - out.euler_term * x * x;
    rest.push_back(y);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  out.a = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  out.b = (sy - out.a * sx) / n;
  double scale = 1, vscale = 1;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    scale = std::max(scale, std::abs(out.area[i]));
    vscale = std::max(vscale, std::abs(out.ve_integral[i]));
  }
  for (std::size_t i = 0; i < levels.size(); ++i) {
    double x = levels[i];
    out.fit_residual = std::max(out.fit_residual, std::abs(rest[i] - out.a * x - out.b) / scale);
    out.ve_residual =
        std::max(out.ve_residual, std::abs(out.ve_integral[i] - (-6 * out.a * x * x - 12 * out.b * x)) / vscale);
  }
  if (out.fit_residual > tol)
    throw FitError(f.name + ": int e^u is not quadratic in rho (residual " + std::to_string(out.fit_residual) + ")");
  if (out.ve_residual > tol)
    throw FitError(f.name + ": int V e^u disagrees with -6 a rho^2 - 12 b rho (residual " +
                   std::to_string(out.ve_residual) + ")");
  return out;
}

enum class VolumeMode { Circle, Torus };

inline double volume_between(const ReductionIntegrals& ints, double D0, double D1, VolumeMode mode) {
  constexpr double pi = std::numbers::pi;
  double c3 = D1 * D1 * D1 - D0 * D0 * D0;
  if (mode == VolumeMode::Circle) return -4 * pi * ints.a * c3 - 12 * pi * ints.b * (D1 * D1 - D0 * D0);
  return -32 * pi * pi * ints.a * c3 - 96 * pi * pi * ints.b * (D0 * D0 - D1 * D1);
}

/// int sqrt(det g) over D0 <= x0 <= D1 and the chart box in the other coordinates.
inline double chart_shell_volume(const MetricChart& c, double D0, double D1) {
  const auto& [n32, w32] = gauss_legendre<32>();
  const auto& [n4, w4] = gauss_legendre<4>();
  const Box& b = c.box;
  double s = 0;
  for (int i = 0; i < 32; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k)
        for (int l = 0; l < 4; ++l) {
          Point p{D0 + (D1 - D0) * n32[i], b.lo[1] + (b.hi[1] - b.lo[1]) * n4[j], b.lo[2] + (b.hi[2] - b.lo[2]) * n4[k],
                  b.lo[3] + (b.hi[3] - b.lo[3]) * n4[l]};
          Eigen::Matrix4d g;
          for (int r = 0; r < 4; ++r)
            for (int q = 0; q < 4; ++q) g(r, q) = evaluate(c.component(r, q), p);
          s += w32[i] * w4[j] * w4[k] * w4[l] * std::sqrt(g.determinant());
        }
  return s * (D1 - D0) * (b.hi[1] - b.lo[1]) * (b.hi[2] - b.lo[2]) * (b.hi[3] - b.lo[3]);
}

struct IndicialPair {
  double eigenvalue = 0;
  std::pair<double, double> roots;
  bool exact = false;  // integer roots from a perfect-square discriminant
};

/// Roots of (mu + 2)(mu + 1) + eigenvalue = 0, larger first.
inline IndicialPair indicial_roots(double eigenvalue) {
  double disc = 1 - 4 * eigenvalue;
  if (disc < 0) throw ParamOutOfRange("indicial roots: 1 - 4 eigenvalue < 0");
  IndicialPair out{eigenvalue, {}, false};
  if (eigenvalue == std::floor(eigenvalue) && std::abs(eigenvalue) < 1e15) {
    auto D = static_cast<long long>(disc);
    auto s = static_cast<long long>(std::llround(std::sqrt(static_cast<double>(D))));
    while (s * s > D) --s;
    while ((s + 1) * (s + 1) <= D) ++s;
    if (s * s == D) {
      out.roots = {static_cast<double>((-3 + s) / 2), static_cast<double>((-3 - s) / 2)};
      out.exact = true;
      return out;
    }
  }
  double s = std::sqrt(disc);
  out.roots = {(-3 + s) / 2, (-3 - s) / 2};
  return out;
}

/// (mu + 2)(mu + 1) + eigenvalue == 0 in rational arithmetic; false unless both roots are exact.
inline bool indicial_identity_exact(const IndicialPair& p) {
  if (!p.exact) return false;
  using Q = boost::rational<long long>;
  Q lam(static_cast<long long>(p.eigenvalue));
  for (double r : {p.roots.first, p.roots.second}) {
    Q mu(static_cast<long long>(r));
    if ((mu + 2) * (mu + 1) + lam != Q(0)) return false;
  }
  return true;
}

struct ProfileSample {
  double rho = 0, x = 0, y = 0, varpi = 0, u = 0, V = 0;
};

struct AlfProfile {
  double residual = 0;    // sup |u - 2 log rho - varpi + k0^2/(6 rho)| rho^{1 + delta}
  double v_residual = 0;  // sup |V - k0^2| rho^delta
  double k0 = 0;
  double delta = 0.5;
};

inline AlfProfile alf_profile_residual(const std::vector<ProfileSample>& samples, double k0, double delta = 0.5) {
  AlfProfile out;
  out.k0 = k0;
  out.delta = delta;
  for (const auto& s : samples) {
    double dev = s.u - 2 * std::log(s.rho) - s.varpi + k0 * k0 / (6 * s.rho);
    out.residual = std::max(out.residual, std::abs(dev) * std::pow(s.rho, 1 + delta));
    out.v_residual = std::max(out.v_residual, std::abs(s.V - k0 * k0) * std::pow(s.rho, delta));
  }
  return out;
}

/// Samples of a closed-form field on a 5 x 5 grid of the (x, y) box at each level.
inline std::vector<ProfileSample> profile_samples(const TodaField& f, const std::vector<double>& levels) {
  Expr rho = Expr::variable(kRho);
  Expr V = -12.0 * rho + 6.0 * pow(rho, 2) * differentiate(f.u, kRho);
  std::vector<ProfileSample> out;
  for (double r : levels)
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j) {
        double x = f.domain.lo[1] + (f.domain.hi[1] - f.domain.lo[1]) * i / 4.0;
        double y = f.domain.lo[2] + (f.domain.hi[2] - f.domain.lo[2]) * j / 4.0;
        Point p{r, x, y, 0};
        out.push_back({r, x, y, round_sphere_potential(x, y), evaluate(f.u, p), evaluate(V, p)});
      }
  return out;
}

inline AlfProfile alf_profile_residual(const TodaField& f, double k0, const std::vector<double>& levels) {
  return alf_profile_residual(profile_samples(f, levels), k0);
}

/// Least-squares fit of u - 2 log rho - varpi = A / rho + B / rho^2, k0 = sqrt(-6 A).
inline double fit_k0(const std::vector<ProfileSample>& samples) {
  Eigen::MatrixXd M(samples.size(), 2);
  Eigen::VectorXd r(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    M(i, 0) = 1 / s.rho;
    M(i, 1) = 1 / (s.rho * s.rho);
    r(i) = s.u - 2 * std::log(s.rho) - s.varpi;
  }
  Eigen::Vector2d c = M.colPivHouseholderQr().solve(r);
  if (!(-6 * c(0) > 0)) throw FitError("fitted k0^2 is not positive");
  return std::sqrt(-6 * c(0));
}

/// Starting data for extracting a profile from a type II chart: a base point, chart
/// vectors representing d_x and d_y there, and the (x, y) they correspond to.
struct FlowSeed {
  MetricChart chart;
  Point base{};
  std::array<double, 4> dx{}, dy{};
  double x = 0, y = 0;
  int sign = 1;  // sign of s_g, rho = sign lambda^{-1/3}
};

/// Equatorial point theta = pi/2, phi = 0 of Schwarzschild, where d_x = d_theta, d_y = d_phi
/// for z = tan(theta/2) e^{i phi} and (x, y) = (1, 0).
inline FlowSeed schwarzschild_seed(double m, double r0) {
  FlowSeed s;
  s.chart = make_metric("schwarzschild", {{"m", m}});
  s.base = {0, r0, std::numbers::pi / 2, 0};
  s.dx = {0, 0, 1, 0};
  s.dy = {0, 0, 0, 1};
  s.x = 1;
  s.y = 0;
  return s;
}

namespace detail {
struct FlowState {
  Point p;
  std::array<double, 4> a, b;
};

struct FlowLocal {
  std::array<double, 4> N, grad, jgrad;
  Mat4<double> dN;  // dN[k][i] = d_k N^i
  Mat4<double> h;
  double rho, V;
};

inline FlowLocal flow_local(const FlowSeed& s, const Point& p) {
  auto hj = hermitian_jets<0>(s.chart, p);
  using J2 = Jet<4, 2>;
  using J1 = Jet<4, 1>;
  J2 rho = pow(hj.lambda, -1.0 / 3.0) * static_cast<double>(s.sign);
  Mat4<J1> h1;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) h1[i][j] = truncate<1>(hj.h[i][j]);
  Mat4<J1> hinv = inverse(h1);
  std::array<J1, 4> dr, G;
  for (int i = 0; i < 4; ++i) dr[i] = derivative(rho, i);
  J1 n2(0.0);
  for (int i = 0; i < 4; ++i) {
    G[i] = J1(0.0);
    for (int j = 0; j < 4; ++j) G[i] += hinv[i][j] * dr[j];
    n2 += G[i] * dr[i];
  }
  FlowLocal out;
  out.rho = rho.value();
  out.V = 1 / n2.value();
  for (int i = 0; i < 4; ++i) {
    J1 Ni = G[i] / n2;
    out.N[i] = Ni.value();
    out.grad[i] = G[i].value();
    for (int k = 0; k < 4; ++k) out.dN[k][i] = derivative(Ni, k).value();
  }
  for (int j = 0; j < 4; ++j) {
    out.jgrad[j] = 0;
    for (int i = 0; i < 4; ++i) out.jgrad[j] += out.grad[i] * hj.J[i][j].value();
  }
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) out.h[i][j] = hj.h[i][j].value();
  return out;
}

inline FlowState flow_rhs(const FlowSeed& s, const FlowState& st) {
  auto L = flow_local(s, st.p);
  FlowState d{};
  for (int i = 0; i < 4; ++i) {
    d.p[i] = L.N[i];
    d.a[i] = d.b[i] = 0;
    for (int k = 0; k < 4; ++k) {
      d.a[i] += L.dN[k][i] * st.a[k];
      d.b[i] += L.dN[k][i] * st.b[k];
    }
  }
  return d;
}

inline FlowState axpy(const FlowState& x, double t, const FlowState& d) {
  FlowState r = x;
  for (int i = 0; i < 4; ++i) {
    r.p[i] += t * d.p[i];
    r.a[i] += t * d.a[i];
    r.b[i] += t * d.b[i];
  }
  return r;
}

inline double hdot(const Mat4<double>& h, const std::array<double, 4>& a, const std::array<double, 4>& b) {
  double s = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) s += h[i][j] * a[i] * b[j];
  return s;
}

/// Area of the dragged (d_x, d_y) in the quotient by span(grad rho, J grad rho).
inline double quotient_area(const FlowLocal& L, std::array<double, 4> a, std::array<double, 4> b) {
  for (const auto& e : {L.grad, L.jgrad}) {
    double ee = hdot(L.h, e, e), ca = hdot(L.h, a, e) / ee, cb = hdot(L.h, b, e) / ee;
    for (int i = 0; i < 4; ++i) {
      a[i] -= ca * e[i];
      b[i] -= cb * e[i];
    }
  }
  double aa = hdot(L.h, a, a), bb = hdot(L.h, b, b), ab = hdot(L.h, a, b);
  return std::sqrt(aa * bb - ab * ab);
}
}  // namespace detail

/// Ansatz data along one flow line of grad rho / |grad rho|^2, rho = sign lambda^{-1/3}:
/// V = 1 / |d rho|^2 and e^u = (quotient area of the dragged d_x, d_y) / V. RK4 in rho.
inline std::vector<ProfileSample> extract_profile(const FlowSeed& seed, std::vector<double> levels,
                                                  int steps_per_unit_log = 64) {
  std::sort(levels.begin(), levels.end());
  detail::FlowState st{seed.base, seed.dx, seed.dy};
  double rho = detail::flow_local(seed, st.p).rho;
  std::vector<ProfileSample> out;
  double varpi = round_sphere_potential(seed.x, seed.y);
  for (double target : levels) {
    if (target < rho) throw DomainError("profile extraction levels must lie beyond the seed level");
    int n = std::max(4, static_cast<int>(std::ceil(steps_per_unit_log * std::log(target / rho))));
    double h = (target - rho) / n;
    for (int k = 0; k < n; ++k) {
      auto k1 = detail::flow_rhs(seed, st);
      auto k2 = detail::flow_rhs(seed, detail::axpy(st, h / 2, k1));
      auto k3 = detail::flow_rhs(seed, detail::axpy(st, h / 2, k2));
      auto k4 = detail::flow_rhs(seed, detail::axpy(st, h, k3));
      for (int i = 0; i < 4; ++i) {
        st.p[i] += h / 6 * (k1.p[i] + 2 * k2.p[i] + 2 * k3.p[i] + k4.p[i]);
        st.a[i] += h / 6 * (k1.a[i] + 2 * k2.a[i] + 2 * k3.a[i] + k4.a[i]);
        st.b[i] += h / 6 * (k1.b[i] + 2 * k2.b[i] + 2 * k3.b[i] + k4.b[i]);
      }
    }
    auto L = detail::flow_local(seed, st.p);
    rho = L.rho;
    double area = detail::quotient_area(L, st.a, st.b);
    out.push_back({rho, seed.x, seed.y, varpi, std::log(area / L.V), L.V});
  }
  return out;
}

struct CompactChart {
  double epsilon = 0;
  Expr zeta;       // int_xi^eps W dxi on (xi, x, y)
  Expr phi_shift;  // int_xi^eps Z dxi
  Expr W, Z;

  /// Adaptive Gauss-Kronrod values of the two integrals at q = (xi, x, y, t).
  double zeta_value(const Point& q) const { return integrate(W, q); }
  double phi_shift_value(const Point& q) const { return integrate(Z, q); }
  std::complex<double> w(const Point& q) const {
    double phi = -q[3] + phi_shift_value(q);
    return std::exp(std::complex<double>(-zeta_value(q), -phi));
  }

 private:
  double integrate(const Expr& f, const Point& q) const {
    if (f.is_const(0)) return 0.0;
    auto g = [&](double s) { return evaluate(f, Point{s, q[1], q[2], q[3]}); };
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(g, q[0], epsilon, 20, 1e-13);
  }
};

struct CompactReport {
  double w_at_epsilon = 0;      // max ||w| - 1| at xi = eps
  bool monotone = true;         // |w| strictly decreasing as xi decreases
  double w_smallest = 0;        // max |w| at the smallest sampled xi
  double zeta_defect = 0;       // relative |zeta - expected| when an expected zeta is known
  double j_zeta_defect = 0;     // max |J d_zeta - d_phi|
  double jx_variation = 0;      // spread of the d_zeta, d_phi coefficients of J d_x over (zeta, phi)
  double jx_boundary_defect = 0;  // those coefficients against (X, Y) at xi = eps
};

namespace detail {
/// J in the xi chart, J d_i = J[i][j] d_j, for g = W (dxi^2 + e^v (dx^2 + dy^2)) + eta^2 / W:
/// J(d_xi - Z T) = W T, J(d_x - X T) = d_y - Y T, T = d_t (this is the sign for which the
/// Kahler form W dxi ^ eta + W e^v dx ^ dy is closed).
inline Mat4<double> ansatz_complex_structure(double W, double X, double Y, double Z) {
  using V4 = std::array<double, 4>;
  V4 T{0, 0, 0, 1}, hxi{1, 0, 0, -Z}, hx{0, 1, 0, -X}, hy{0, 0, 1, -Y};
  V4 JT, Jhxi, Jhx, Jhy;
  for (int i = 0; i < 4; ++i) {
    JT[i] = -hxi[i] / W;
    Jhxi[i] = W * T[i];
    Jhx[i] = hy[i];
    Jhy[i] = -hx[i];
  }
  Mat4<double> J;
  for (int i = 0; i < 4; ++i) {
    J[0][i] = Jhxi[i] + Z * JT[i];
    J[1][i] = Jhx[i] + X * JT[i];
    J[2][i] = Jhy[i] + Y * JT[i];
    J[3][i] = JT[i];
  }
  return J;
}
}  // namespace detail

/// zeta = int_xi^eps W, phi = -t + int_xi^eps Z, w = exp(-zeta - i phi). Checks the pushed
/// forward J on xi = eps 2^{-k}, k = 0..levels-1, at a few (x, y, t).
inline std::pair<CompactChart, CompactReport> compactification_chart(const AnsatzData& d, double epsilon,
                                                                     int levels = 9,
                                                                     std::optional<Expr> expected_zeta = std::nullopt) {
  Connection ex = eta_xi(d);
  Expr xi = Expr::variable(0);
  CompactChart ch;
  ch.epsilon = epsilon;
  ch.zeta = -integral(d.W, 0, epsilon, xi);
  ch.phi_shift = -integral(ex.Z, 0, epsilon, xi);
  ch.W = d.W;
  ch.Z = ex.Z;
  std::array<Expr, 4> zeta_d, phi_d;
  for (int k = 0; k < 4; ++k) {
    zeta_d[k] = differentiate(ch.zeta, k);
    phi_d[k] = differentiate(ch.phi_shift, k) - (k == 3 ? 1.0 : 0.0);
  }
  CompactReport rep;
  double xlo = d.box.lo[1], xhi = d.box.hi[1], ylo = d.box.lo[2], yhi = d.box.hi[2];
  const std::array<std::array<double, 2>, 3> xy = {
      {{0.5 * (xlo + xhi), 0.5 * (ylo + yhi)}, {xlo + 0.2 * (xhi - xlo), ylo + 0.7 * (yhi - ylo)},
       {xlo + 0.9 * (xhi - xlo), ylo + 0.3 * (yhi - ylo)}}};
  for (const auto& [x, y] : xy) {
    double prev = -1;
    std::optional<std::array<double, 2>> ref;
    for (double t : {0.0, 1.0, 4.0}) {
      prev = -1;
      for (int k = 0; k < levels; ++k) {
        double s = epsilon * std::pow(0.5, k);
        Point q{s, x, y, t};
        double W = evaluate(d.W, q);
        if (!(W > 0) || !std::isfinite(W)) throw IntegrationError(d.name + ": W must be positive on (0, eps]");
        double zeta = ch.zeta_value(q);
        if (!std::isfinite(zeta)) throw IntegrationError(d.name + ": zeta integral is not finite");
        if (expected_zeta) {
          double e = evaluate(*expected_zeta, q);
          rep.zeta_defect = std::max(rep.zeta_defect, std::abs(zeta - e) / std::max(1.0, std::abs(e)));
        }
        double aw = std::abs(ch.w(q));
        if (k == 0) rep.w_at_epsilon = std::max(rep.w_at_epsilon, std::abs(aw - 1));
        if (prev >= 0 && !(aw < prev)) rep.monotone = false;
        prev = aw;
        if (k == levels - 1) rep.w_smallest = std::max(rep.w_smallest, aw);

        // M[a][i] = d new_a / d old_i for new = (zeta, x, y, phi), old = (xi, x, y, t).
        Eigen::Matrix4d M = Eigen::Matrix4d::Zero();
        for (int i = 0; i < 4; ++i) {
          M(0, i) = evaluate(zeta_d[i], q);
          M(3, i) = evaluate(phi_d[i], q);
        }
        M(1, 1) = M(2, 2) = 1;
        Mat4<double> J = detail::ansatz_complex_structure(W, evaluate(ex.X, q), evaluate(ex.Y, q), evaluate(ex.Z, q));
        Eigen::Matrix4d Jm;  // column i = J d_i in old components
        for (int i = 0; i < 4; ++i)
          for (int j = 0; j < 4; ++j) Jm(j, i) = J[i][j];
        Eigen::Matrix4d Jnew = M * Jm * M.inverse();
        Eigen::Vector4d jz = Jnew.col(0);
        rep.j_zeta_defect =
            std::max(rep.j_zeta_defect, (jz - Eigen::Vector4d(0, 0, 0, 1)).cwiseAbs().maxCoeff());
        Eigen::Vector4d jx = Jnew.col(1);
        std::array<double, 2> coef{jx(0), jx(3)};
        if (!ref) ref = coef;
        rep.jx_variation =
            std::max({rep.jx_variation, std::abs(coef[0] - (*ref)[0]), std::abs(coef[1] - (*ref)[1])});
        Point qe{epsilon, x, y, t};
        rep.jx_boundary_defect =
            std::max({rep.jx_boundary_defect, std::abs(coef[0] - evaluate(ex.X, qe)), std::abs(coef[1] - evaluate(ex.Y, qe)),
                      std::abs(jx(1)), std::abs(jx(2) - 1)});
      }
    }
  }
  return {ch, rep};
}

/// 4 s_g^2 e^{-v}.
inline double extension_density(double s_g, double v) { return 4 * s_g * s_g * std::exp(-v); }

inline double extension_density(const AnsatzData& d, const Point& p) {
  return extension_density(scalar_from_ansatz(d, p), evaluate(d.v, detail::to_xi(p)));
}

}  // namespace instanton
