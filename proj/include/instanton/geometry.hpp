#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "differentiation.hpp"
#include "errors.hpp"
#include "expr.hpp"
#include "jet.hpp"

namespace instanton {

struct Box {
  Point lo{}, hi{};
  bool contains(const Point& p) const {
    for (int i = 0; i < 4; ++i)
      if (p[i] < lo[i] || p[i] > hi[i]) return false;
    return true;
  }
};

/// Radial structure used by asymptotic checks: a distance proxy and a way to
/// place a point at proxy value rho with angular parameters u in [0,1]^3.
struct RadialStructure {
  Expr proxy;
  std::function<Point(double, const std::array<double, 3>&)> point_at;
};

/// Riemannian metric in a single chart, given by closed-form components.
struct MetricChart {
  std::string name;
  std::array<std::string, 4> coords{"x0", "x1", "x2", "x3"};
  std::array<Expr, 10> components;  // 00 01 02 03 11 12 13 22 23 33
  Box box;
  DomainFn domain = [](const Point&) { return true; };
  int orientation = 1;
  std::array<double, 4> scale_hint{1, 1, 1, 1};
  std::optional<std::pair<int, int>> complex_hint;  // J d_first has positive d_second component
  std::optional<RadialStructure> radial;

  static constexpr int slot(int i, int j) {
    if (i > j) std::swap(i, j);
    return i * 4 - i * (i - 1) / 2 + (j - i);
  }
  const Expr& component(int i, int j) const { return components[slot(i, j)]; }
  void set(int i, int j, const Expr& e) { components[slot(i, j)] = e; }

  std::vector<std::pair<std::string, int>> coordinate_names() const {
    return {{coords[0], 0}, {coords[1], 1}, {coords[2], 2}, {coords[3], 3}};
  }
};

inline MetricChart orientation_flip(MetricChart c) {
  c.orientation = -c.orientation;
  return c;
}

/// Scrambled Halton points in the chart box, skipping points outside the domain.
inline std::vector<Point> sample_points(const Box& box, const DomainFn& domain, int n, std::uint64_t seed) {
  static constexpr int primes[4] = {2, 3, 5, 7};
  std::mt19937_64 rng(seed);
  std::array<double, 4> shift{};
  for (double& s : shift) s = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  std::vector<Point> out;
  for (std::uint64_t k = 1; static_cast<int>(out.size()) < n; ++k) {
    if (k > static_cast<std::uint64_t>(n) * 1000 + 1000) throw DomainError("sampling box misses the domain");
    Point p{};
    for (int d = 0; d < 4; ++d) {
      double f = 1, r = 0;
      for (std::uint64_t i = k; i > 0; i /= primes[d]) {
        f /= primes[d];
        r += f * static_cast<double>(i % primes[d]);
      }
      r = std::fmod(r + shift[d], 1.0);
      p[d] = box.lo[d] + r * (box.hi[d] - box.lo[d]);
    }
    if (domain(p)) out.push_back(p);
  }
  return out;
}

inline std::vector<Point> sample_points(const MetricChart& c, int n, std::uint64_t seed) {
  return sample_points(c.box, c.domain, n, seed);
}

template <int N>
std::array<Jet<4, N>, 10> metric_jets(const MetricChart& c, const Point& p) {
  if (!c.domain(p)) throw DomainError(c.name + ": point outside the chart domain");
  std::array<Jet<4, N>, 4> x;
  for (int i = 0; i < 4; ++i) x[i] = Jet<4, N>::variable(i, p[i]);
  std::array<Jet<4, N>, 10> out;
  for (int k = 0; k < 10; ++k) out[k] = evaluate(c.components[k], x);
  return out;
}

template <class T>
using Mat4 = std::array<std::array<T, 4>, 4>;
template <class T>
using Mat6 = std::array<std::array<T, 6>, 6>;
template <class T>
using Mat3 = std::array<std::array<T, 3>, 3>;

/// Metric with first and second partials: dg[k][i][j] = d_k g_ij.
template <class T>
struct MetricDerivatives {
  Mat4<T> g;
  std::array<Mat4<T>, 4> dg;
  std::array<std::array<Mat4<T>, 4>, 4> ddg;
};

/// From jets of order N + 2 to derivative data at jet order N.
template <int N>
MetricDerivatives<Scalar<N>> derivatives_from_jets(const std::array<Jet<4, N + 2>, 10>& h) {
  MetricDerivatives<Scalar<N>> d;
  for (int i = 0; i < 4; ++i)
    for (int j = i; j < 4; ++j) {
      const auto& hij = h[MetricChart::slot(i, j)];
      d.g[i][j] = d.g[j][i] = lower<N>(hij);
      for (int k = 0; k < 4; ++k) {
        auto dk = derivative(hij, k);
        d.dg[k][i][j] = d.dg[k][j][i] = lower<N>(dk);
        for (int l = k; l < 4; ++l) {
          auto dkl = lower<N>(derivative(dk, l));
          d.ddg[k][l][i][j] = d.ddg[k][l][j][i] = d.ddg[l][k][i][j] = d.ddg[l][k][j][i] = dkl;
        }
      }
    }
  return d;
}

template <int N>
MetricDerivatives<Scalar<N>> metric_derivatives(const MetricChart& c, const Point& p) {
  return derivatives_from_jets<N>(metric_jets<N + 2>(c, p));
}

template <class T>
Mat4<T> inverse(const Mat4<T>& m) {
  Mat4<T> a = m, inv{};
  for (int i = 0; i < 4; ++i) inv[i][i] = T(1.0);
  for (int c = 0; c < 4; ++c) {
    int piv = c;
    for (int r = c + 1; r < 4; ++r)
      if (std::abs(value_of(a[r][c])) > std::abs(value_of(a[piv][c]))) piv = r;
    std::swap(a[c], a[piv]);
    std::swap(inv[c], inv[piv]);
    T p = T(1.0) / a[c][c];
    for (int k = 0; k < 4; ++k) {
      a[c][k] = a[c][k] * p;
      inv[c][k] = inv[c][k] * p;
    }
    for (int r = 0; r < 4; ++r) {
      if (r == c) continue;
      T f = a[r][c];
      for (int k = 0; k < 4; ++k) {
        a[r][k] = a[r][k] - f * a[c][k];
        inv[r][k] = inv[r][k] - f * inv[c][k];
      }
    }
  }
  return inv;
}

constexpr std::array<std::pair<int, int>, 6> kBivectors{{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};

constexpr int bivector_index(int a, int b) {
  for (int k = 0; k < 6; ++k)
    if (kBivectors[k].first == a && kBivectors[k].second == b) return k;
  return -1;
}

/// Coordinate curvature. riemann[I][J] = R_{abcd} with I = (ab), J = (cd) bivector slots,
/// sign convention R_{abcd} = K (g_ac g_bd - g_ad g_bc) for constant curvature K.
template <class T>
struct Curvature {
  Mat4<T> ginv;
  std::array<Mat4<T>, 4> gamma;  // gamma[k][i][j] = Gamma^k_ij
  Mat6<T> riemann;
  Mat4<T> ricci;
  T scalar;

  T rm(int a, int b, int c, int d) const {
    if (a == b || c == d) return T(0.0);
    int s = 1;
    if (a > b) std::swap(a, b), s = -s;
    if (c > d) std::swap(c, d), s = -s;
    T v = riemann[bivector_index(a, b)][bivector_index(c, d)];
    return s > 0 ? v : -v;
  }
};

template <class T>
Curvature<T> compute_curvature(const MetricDerivatives<T>& d) {
  Curvature<T> c;
  c.ginv = inverse(d.g);
  std::array<Mat4<T>, 4> first;  // first[l][i][j] = Gamma_{l,ij}
  for (int l = 0; l < 4; ++l)
    for (int i = 0; i < 4; ++i)
      for (int j = i; j < 4; ++j) first[l][i][j] = first[l][j][i] = (d.dg[i][j][l] + d.dg[j][i][l] - d.dg[l][i][j]) * 0.5;
  for (int k = 0; k < 4; ++k)
    for (int i = 0; i < 4; ++i)
      for (int j = i; j < 4; ++j) {
        T s(0.0);
        for (int l = 0; l < 4; ++l) s += c.ginv[k][l] * first[l][i][j];
        c.gamma[k][i][j] = c.gamma[k][j][i] = s;
      }
  for (int I = 0; I < 6; ++I)
    for (int J = 0; J < 6; ++J) {
      auto [a, b] = kBivectors[I];
      auto [cc, dd] = kBivectors[J];
      T r = (d.ddg[b][cc][a][dd] + d.ddg[a][dd][b][cc] - d.ddg[a][cc][b][dd] - d.ddg[b][dd][a][cc]) * 0.5;
      for (int f = 0; f < 4; ++f) r += first[f][b][cc] * c.gamma[f][a][dd] - first[f][b][dd] * c.gamma[f][a][cc];
      c.riemann[I][J] = r;
    }
  for (int b = 0; b < 4; ++b)
    for (int e = b; e < 4; ++e) {
      T s(0.0);
      for (int a = 0; a < 4; ++a)
        for (int cc = 0; cc < 4; ++cc)
          if (a != b && cc != e) s += c.ginv[a][cc] * c.rm(a, b, cc, e);
      c.ricci[b][e] = c.ricci[e][b] = s;
    }
  T s(0.0);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) s += c.ginv[i][j] * c.ricci[i][j];
  c.scalar = s;
  return c;
}

/// Orthonormal frame by Gram-Schmidt in coordinate order: e_a = F[a][i] d_i, theta^a = coframe[a][i] dx^i.
template <class T>
struct Frame {
  Mat4<T> F;
  Mat4<T> coframe;
};

template <class T>
Frame<T> gram_schmidt(const Mat4<T>& g) {
  Frame<T> fr{};
  for (int a = 0; a < 4; ++a) {
    std::array<T, 4> v{};
    for (int i = 0; i < 4; ++i) v[i] = T(i == a ? 1.0 : 0.0);
    for (int b = 0; b < a; ++b) {
      T ip(0.0);
      for (int j = 0; j < 4; ++j) ip += g[a][j] * fr.F[b][j];
      for (int i = 0; i < 4; ++i) v[i] = v[i] - ip * fr.F[b][i];
    }
    T n2(0.0);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) n2 += g[i][j] * v[i] * v[j];
    if (!(value_of(n2) > 0)) throw NonPositiveDefinite("metric is not positive definite");
    T inv = T(1.0) / sqrt(n2);
    for (int i = 0; i < 4; ++i) fr.F[a][i] = v[i] * inv;
  }
  for (int a = 0; a < 4; ++a)
    for (int i = 0; i < 4; ++i) {
      T s(0.0);
      for (int j = 0; j < 4; ++j) s += g[i][j] * fr.F[a][j];
      fr.coframe[a][i] = s;
    }
  return fr;
}

/// Components of Lambda^+ basis forms in the bivector slots of an oriented orthonormal frame.
inline std::array<std::array<double, 6>, 3> self_dual_basis(int orientation) {
  const double r = 1.0 / std::sqrt(2.0), s = orientation;
  std::array<std::array<double, 6>, 3> b{};
  b[0][bivector_index(0, 1)] = r;
  b[0][bivector_index(2, 3)] = s * r;
  b[1][bivector_index(0, 2)] = r;
  b[1][bivector_index(1, 3)] = -s * r;
  b[2][bivector_index(0, 3)] = r;
  b[2][bivector_index(1, 2)] = s * r;
  return b;
}

/// Everything pointwise that the Weyl analysis needs, in scalar type T.
template <class T>
struct WeylData {
  Curvature<T> curvature;
  Frame<T> frame;
  Mat6<T> frame_riemann;
  Mat6<T> frame_weyl;
  Mat4<T> frame_ricci;
  Mat3<T> wplus;
  T wplus_norm2;
  T lambda;
};

template <class T>
WeylData<T> weyl_analysis(const MetricDerivatives<T>& d, int orientation) {
  WeylData<T> w;
  w.curvature = compute_curvature(d);
  w.frame = gram_schmidt(d.g);
  const auto& F = w.frame.F;
  Mat6<T> B;
  for (int I = 0; I < 6; ++I)
    for (int J = 0; J < 6; ++J) {
      auto [a, b] = kBivectors[I];
      auto [i, j] = kBivectors[J];
      B[I][J] = F[a][i] * F[b][j] - F[a][j] * F[b][i];
    }
  Mat6<T> tmp;
  for (int I = 0; I < 6; ++I)
    for (int L = 0; L < 6; ++L) {
      T s(0.0);
      for (int K = 0; K < 6; ++K) s += B[I][K] * w.curvature.riemann[K][L];
      tmp[I][L] = s;
    }
  for (int I = 0; I < 6; ++I)
    for (int J = I; J < 6; ++J) {
      T s(0.0);
      for (int L = 0; L < 6; ++L) s += tmp[I][L] * B[J][L];
      w.frame_riemann[I][J] = s;
      w.frame_riemann[J][I] = s;
    }
  auto frm = [&](int a, int b, int c, int e) -> T {
    if (a == b || c == e) return T(0.0);
    int sg = 1;
    if (a > b) std::swap(a, b), sg = -sg;
    if (c > e) std::swap(c, e), sg = -sg;
    T v = w.frame_riemann[bivector_index(a, b)][bivector_index(c, e)];
    return sg > 0 ? v : -v;
  };
  for (int b = 0; b < 4; ++b)
    for (int e = b; e < 4; ++e) {
      T s(0.0);
      for (int a = 0; a < 4; ++a) s += frm(a, b, a, e);
      w.frame_ricci[b][e] = w.frame_ricci[e][b] = s;
    }
  T scal = w.frame_ricci[0][0] + w.frame_ricci[1][1] + w.frame_ricci[2][2] + w.frame_ricci[3][3];
  auto delta = [](int a, int b) { return a == b ? 1.0 : 0.0; };
  for (int I = 0; I < 6; ++I)
    for (int J = 0; J < 6; ++J) {
      auto [a, b] = kBivectors[I];
      auto [c, e] = kBivectors[J];
      T r = w.frame_riemann[I][J];
      r -= (w.frame_ricci[a][c] * delta(b, e) - w.frame_ricci[a][e] * delta(b, c) + w.frame_ricci[b][e] * delta(a, c) -
            w.frame_ricci[b][c] * delta(a, e)) *
           0.5;
      r += scal * ((delta(a, c) * delta(b, e) - delta(a, e) * delta(b, c)) / 6.0);
      w.frame_weyl[I][J] = r;
    }
  auto basis = self_dual_basis(orientation);
  w.wplus_norm2 = T(0.0);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      T s(0.0);
      for (int I = 0; I < 6; ++I) {
        if (basis[i][I] == 0.0) continue;
        for (int J = 0; J < 6; ++J)
          if (basis[j][J] != 0.0) s += w.frame_weyl[I][J] * (basis[i][I] * basis[j][J]);
      }
      w.wplus[i][j] = s;
      w.wplus_norm2 += s * s;
    }
  w.lambda = sqrt(w.wplus_norm2) * (2.0 * std::sqrt(6.0));
  return w;
}

/// Pointwise curvature in coordinates.
struct CurvatureBundle {
  Point point{};
  Mat4<double> metric;
  std::array<Mat4<double>, 4> christoffel;
  std::array<std::array<std::array<std::array<double, 4>, 4>, 4>, 4> riemann;
  Mat4<double> ricci;
  double scalar;
  double ricci_norm;    // orthonormal-frame norm
  double riemann_norm;  // orthonormal-frame norm
};

inline void check_positive_definite(const Mat4<double>& g) {
  Eigen::Matrix4d m;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m(i, j) = g[i][j];
  Eigen::LLT<Eigen::Matrix4d> llt(m);
  if (llt.info() != Eigen::Success) throw NonPositiveDefinite("metric is not positive definite");
}

inline double frame_norm(const Mat6<double>& m) {
  double s = 0;
  for (const auto& row : m)
    for (double v : row) s += v * v;
  return std::sqrt(4.0 * s);
}

inline double frame_norm(const Mat4<double>& m) {
  double s = 0;
  for (const auto& row : m)
    for (double v : row) s += v * v;
  return std::sqrt(s);
}

inline CurvatureBundle curvature(const MetricChart& c, const Point& p) {
  auto d = metric_derivatives<0>(c, p);
  check_positive_definite(d.g);
  auto w = weyl_analysis(d, c.orientation);
  CurvatureBundle b;
  b.point = p;
  b.metric = d.g;
  b.christoffel = w.curvature.gamma;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k)
        for (int l = 0; l < 4; ++l) b.riemann[i][j][k][l] = w.curvature.rm(i, j, k, l);
  b.ricci = w.curvature.ricci;
  b.scalar = w.curvature.scalar;
  b.ricci_norm = frame_norm(w.frame_ricci);
  b.riemann_norm = frame_norm(w.frame_riemann);
  return b;
}

/// Self-dual Weyl operator on Lambda^+ in the chart's orientation.
struct WeylPlusOperator {
  Point point{};
  Eigen::Matrix3d matrix;
  Eigen::Vector3d eigenvalues;  // ascending
  double norm;                  // Frobenius norm of the 3x3 matrix
  double riemann_norm;
};

inline WeylPlusOperator weyl_plus(const MetricChart& c, const Point& p) {
  auto d = metric_derivatives<0>(c, p);
  check_positive_definite(d.g);
  auto w = weyl_analysis(d, c.orientation);
  WeylPlusOperator op;
  op.point = p;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) op.matrix(i, j) = w.wplus[i][j];
  op.matrix = 0.5 * (op.matrix + op.matrix.transpose()).eval();
  op.eigenvalues = Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(op.matrix, Eigen::EigenvaluesOnly).eigenvalues();
  op.norm = std::sqrt(w.wplus_norm2);
  op.riemann_norm = frame_norm(w.frame_riemann);
  return op;
}

/// Eigenvalues of the anti-self-dual Weyl operator, computed by projecting the
/// full Weyl operator on 2-forms with the Hodge star.
inline Eigen::Vector3d weyl_minus_eigenvalues(const MetricChart& c, const Point& p) {
  auto d = metric_derivatives<0>(c, p);
  check_positive_definite(d.g);
  auto w = weyl_analysis(d, c.orientation);
  Eigen::Matrix<double, 6, 6> W, star = Eigen::Matrix<double, 6, 6>::Zero();
  for (int I = 0; I < 6; ++I)
    for (int J = 0; J < 6; ++J) W(I, J) = w.frame_weyl[I][J];
  for (int I = 0; I < 6; ++I) {
    auto [a, b] = kBivectors[I];
    int rest[2], n = 0;
    for (int k = 0; k < 4; ++k)
      if (k != a && k != b) rest[n++] = k;
    int q[4] = {a, b, rest[0], rest[1]}, inv = 0;
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j)
        if (q[i] > q[j]) ++inv;
    star(bivector_index(rest[0], rest[1]), I) = (inv % 2 ? -1.0 : 1.0) * c.orientation;
  }
  Eigen::Matrix<double, 6, 6> P = 0.5 * (Eigen::Matrix<double, 6, 6>::Identity() - star);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 6, 6>> proj(P);
  Eigen::Matrix<double, 6, 3> Q = proj.eigenvectors().rightCols<3>();
  Eigen::Matrix3d M = Q.transpose() * W * Q;
  M = 0.5 * (M + M.transpose()).eval();
  return Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(M, Eigen::EigenvaluesOnly).eigenvalues();
}

enum class WeylType { I, II, III };

inline const char* to_string(WeylType t) {
  switch (t) {
    case WeylType::I: return "I";
    case WeylType::II: return "II";
    default: return "III";
  }
}

struct ClassifyConfig {
  int samples = 200;
  std::uint64_t seed = 0;
  double zero_tol = 1e-9;       // max|mu| / |Rm| below this: zero
  double zero_band = 1e-6;      // between zero_tol and this: inconclusive
  double equal_tol = 1e-6;      // relative gap below this: equal
  double distinct_tol = 1e-4;   // relative gap at or above this: distinct
};

struct TypeLabel {
  WeylType label;
  int samples = 0;
  std::uint64_t seed = 0;
  int zero_samples = 0;
  int repeated_samples = 0;
  int distinct_samples = 0;
  double max_zero_ratio = 0;     // largest max|mu|/|Rm| among samples called zero
  double min_relative_gap = 0;   // smallest relative gap over nonzero samples
  double max_relative_gap = 0;   // largest smaller-gap over samples called repeated
};

inline TypeLabel classify_type(const MetricChart& c, const ClassifyConfig& cfg = {}) {
  TypeLabel t{WeylType::I, cfg.samples, cfg.seed};
  t.min_relative_gap = INFINITY;
  for (const Point& p : sample_points(c, cfg.samples, cfg.seed)) {
    auto op = weyl_plus(c, p);
    const auto& mu = op.eigenvalues;
    double mx = mu.cwiseAbs().maxCoeff();
    double ratio = op.riemann_norm > 0 ? mx / op.riemann_norm : 0.0;
    if (op.riemann_norm == 0 || ratio < cfg.zero_tol) {
      ++t.zero_samples;
      t.max_zero_ratio = std::max(t.max_zero_ratio, ratio);
      continue;
    }
    if (ratio < cfg.zero_band)
      throw InconclusiveError(c.name + ": self-dual Weyl norm in the ambiguity band");
    double g1 = (mu[1] - mu[0]) / mx, g2 = (mu[2] - mu[1]) / mx;
    double small = std::min(g1, g2), large = std::max(g1, g2);
    t.min_relative_gap = std::min(t.min_relative_gap, small);
    if (large < cfg.distinct_tol) throw InconclusiveError(c.name + ": all eigenvalue gaps small");
    if (small < cfg.equal_tol) {
      ++t.repeated_samples;
      t.max_relative_gap = std::max(t.max_relative_gap, small);
    } else if (small >= cfg.distinct_tol) {
      ++t.distinct_samples;
    } else {
      throw InconclusiveError(c.name + ": eigenvalue gap in the ambiguity band");
    }
  }
  if (t.distinct_samples > 0)
    t.label = WeylType::III;
  else if (t.repeated_samples == 0)
    t.label = WeylType::I;
  else if (t.zero_samples == 0)
    t.label = WeylType::II;
  else
    throw InconclusiveError(c.name + ": mixture of vanishing and degenerate samples");
  return t;
}

/// lambda = 2 sqrt(6) |W^+| as a pointwise function.
inline std::function<double(const Point&)> lambda_field(const MetricChart& c, const ClassifyConfig& cfg = {32, 0}) {
  auto t = classify_type(c, cfg);
  if (t.label == WeylType::I) throw TypeMismatch(c.name + ": self-dual Weyl curvature vanishes");
  return [c](const Point& p) {
    auto d = metric_derivatives<0>(c, p);
    return weyl_analysis(d, c.orientation).lambda;
  };
}

}  // namespace instanton
