#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "expr.hpp"
#include "jet.hpp"

namespace instanton {

using Point = std::array<double, 4>;
using Index4 = MultiIndex<4>;
using DomainFn = std::function<bool(const Point&)>;

constexpr int kMaxLiftOrder = 6;

struct DiffConfig {
  int jet_order = 4;
  double fd_step_scale = 1e-4;
  std::array<double, 4> coordinate_scale{1, 1, 1, 1};
};

/// Scalar field with a closed-form evaluator.
struct ScalarField {
  Expr expr;
  DomainFn domain = [](const Point&) { return true; };
  int max_order = kMaxLiftOrder;
};

/// Taylor coefficients at a point, stored in the layout of Jet<4, order>.
struct TaylorJet {
  Point center{};
  int order = 0;
  std::vector<double> coeffs;

  double coefficient(const Index4& a) const;
};

namespace detail {
template <int N>
std::vector<double> lift_coeffs(const Expr& e, const Point& p) {
  std::array<Jet<4, N>, 4> x;
  for (int i = 0; i < 4; ++i) x[i] = Jet<4, N>::variable(i, p[i]);
  auto j = evaluate(e, x);
  return {j.c.begin(), j.c.end()};
}

template <int N>
double coefficient_at(const std::vector<double>& c, const Index4& a) {
  std::size_t k = JetLayout<4, N>::get().position(a);
  return k < c.size() ? c[k] : 0.0;
}
}  // namespace detail

inline double TaylorJet::coefficient(const Index4& a) const {
  if (degree<4>(a) > order) throw OrderExceeded("multi-index degree " + std::to_string(degree<4>(a)) +
                                                " exceeds jet order " + std::to_string(order));
  switch (order) {
    case 0: return coeffs[0];
    case 1: return detail::coefficient_at<1>(coeffs, a);
    case 2: return detail::coefficient_at<2>(coeffs, a);
    case 3: return detail::coefficient_at<3>(coeffs, a);
    case 4: return detail::coefficient_at<4>(coeffs, a);
    case 5: return detail::coefficient_at<5>(coeffs, a);
    default: return detail::coefficient_at<6>(coeffs, a);
  }
}

inline TaylorJet jet_lift(const ScalarField& f, const Point& p, int order) {
  if (order < 0 || order > std::min(f.max_order, kMaxLiftOrder))
    throw OrderUnsupported("jet order " + std::to_string(order) + " not supported");
  if (!f.domain(p)) throw DomainError("point outside the field's domain");
  TaylorJet t{p, order, {}};
  switch (order) {
    case 0: t.coeffs = {evaluate(f.expr, p)}; break;
    case 1: t.coeffs = detail::lift_coeffs<1>(f.expr, p); break;
    case 2: t.coeffs = detail::lift_coeffs<2>(f.expr, p); break;
    case 3: t.coeffs = detail::lift_coeffs<3>(f.expr, p); break;
    case 4: t.coeffs = detail::lift_coeffs<4>(f.expr, p); break;
    case 5: t.coeffs = detail::lift_coeffs<5>(f.expr, p); break;
    default: t.coeffs = detail::lift_coeffs<6>(f.expr, p); break;
  }
  return t;
}

/// Partial derivative of multi-index `a`: coefficient times a!.
inline double partial(const TaylorJet& j, const Index4& a) {
  double f = 1;
  for (int v : a)
    for (int k = 2; k <= v; ++k) f *= k;
  return j.coefficient(a) * f;
}

namespace detail {
struct Stencil {
  std::vector<int> offsets;
  std::vector<double> weights;
};

inline const Stencil& central_stencil(int k) {
  static const std::array<Stencil, 5> table = {{
      {{0}, {1.0}},
      {{-1, 1}, {-0.5, 0.5}},
      {{-1, 0, 1}, {1.0, -2.0, 1.0}},
      {{-2, -1, 1, 2}, {-0.5, 1.0, -1.0, 0.5}},
      {{-2, -1, 0, 1, 2}, {1.0, -4.0, 6.0, -4.0, 1.0}},
  }};
  return table.at(k);
}

inline double tensor_difference(const std::function<double(const Point&)>& f, const Point& p, const Index4& a,
                                const std::array<double, 4>& h) {
  double total = 0;
  std::array<std::size_t, 4> it{};
  const Stencil* st[4];
  for (int v = 0; v < 4; ++v) st[v] = &central_stencil(a[v]);
  for (;;) {
    Point q = p;
    double w = 1;
    for (int v = 0; v < 4; ++v) {
      q[v] += st[v]->offsets[it[v]] * h[v];
      w *= st[v]->weights[it[v]] / std::pow(h[v], a[v]);
    }
    total += w * f(q);
    int v = 0;
    while (v < 4 && ++it[v] == st[v]->offsets.size()) it[v++] = 0;
    if (v == 4) break;
  }
  return total;
}
}  // namespace detail

/// Central differences with one Richardson step. Each multi-index entry must be at most four.
inline double fd_partial(const std::function<double(const Point&)>& f, const DomainFn& domain, const Point& p,
                         const Index4& a, const DiffConfig& cfg = {}) {
  int k = degree<4>(a);
  if (k == 0) return f(p);
  for (int v : a)
    if (v > 4 || v < 0) throw OrderUnsupported("finite differences support per-coordinate order up to 4");
  double base = std::pow(cfg.fd_step_scale, 2.0 / (k + 1));
  std::array<double, 4> h{};
  for (int v = 0; v < 4; ++v) h[v] = base * cfg.coordinate_scale[v];
  for (int v = 0; v < 4; ++v) {
    if (a[v] == 0) continue;
    for (double s : {-4.0, 4.0}) {
      Point q = p;
      q[v] += s * h[v];
      if (!domain(q)) throw DomainError("finite-difference stencil leaves the domain");
    }
  }
  if (!domain(p)) throw DomainError("point outside the domain");
  std::array<double, 4> half = h;
  for (double& x : half) x *= 0.5;
  double coarse = detail::tensor_difference(f, p, a, h);
  double fine = detail::tensor_difference(f, p, a, half);
  return (4.0 * fine - coarse) / 3.0;
}

}  // namespace instanton
