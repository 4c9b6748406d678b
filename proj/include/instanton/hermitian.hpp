#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "geometry.hpp"

namespace instanton {

/// A Type II metric h together with the Kahler metric g = lambda^{2/3} h.
struct ConformalPair {
  MetricChart base;
  TypeLabel type;

  double lambda(const Point& p) const {
    auto d = metric_derivatives<0>(base, p);
    return weyl_analysis(d, base.orientation).lambda;
  }
  double lambda_cbrt(const Point& p) const { return std::cbrt(lambda(p)); }
  Mat4<double> kahler_metric(const Point& p) const {
    auto d = metric_derivatives<0>(base, p);
    double phi = std::pow(weyl_analysis(d, base.orientation).lambda, 2.0 / 3.0);
    Mat4<double> g = d.g;
    for (auto& row : g)
      for (double& v : row) v *= phi;
    return g;
  }
};

inline ConformalPair conformal_pair(const MetricChart& c, const ClassifyConfig& cfg = {32, 0}) {
  auto t = classify_type(c, cfg);
  if (t.label != WeylType::II)
    throw TypeMismatch(c.name + ": expected self-dual Weyl type II, found type " + to_string(t.label));
  return {c, t};
}

/// Pointwise Hermitian data with lambda, J and g as jets of order N + 2 and the
/// curvature of g as jets of order N.
template <int N>
struct HermitianJets {
  using Hi = Jet<4, N + 2>;
  Mat4<Hi> h;
  Mat4<Hi> g;
  Mat4<Hi> J;  // J d_i = J[i][j] d_j
  Hi lambda;
  Hi simple_eigenvalue;  // non-repeated eigenvalue of W^+
  Curvature<Scalar<N>> gcurv;
};

template <int N>
HermitianJets<N> hermitian_jets(const MetricChart& c, const Point& p) {
  using Hi = Jet<4, N + 2>;
  auto hj = metric_jets<N + 4>(c, p);
  auto d = derivatives_from_jets<N + 2>(hj);
  auto w = weyl_analysis(d, c.orientation);
  HermitianJets<N> out;
  out.h = d.g;
  out.lambda = w.lambda;

  const auto& W = w.wplus;
  Hi det = W[0][0] * (W[1][1] * W[2][2] - W[1][2] * W[2][1]) - W[0][1] * (W[1][0] * W[2][2] - W[1][2] * W[2][0]) +
           W[0][2] * (W[1][0] * W[2][1] - W[1][1] * W[2][0]);
  Hi cc = cbrt(det * 0.5);
  out.simple_eigenvalue = cc * 2.0;
  Mat3<Hi> P;
  Hi inv3c = Hi(1.0) / (cc * 3.0);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) P[i][j] = (W[i][j] + (i == j ? cc : Hi(0.0))) * inv3c;
  int k = 0;
  for (int i = 1; i < 3; ++i)
    if (P[i][i].value() > P[k][k].value()) k = i;
  Hi norm = Hi(1.0) / sqrt(P[k][k]);
  std::array<Hi, 3> v;
  for (int i = 0; i < 3; ++i) v[i] = P[i][k] * norm;

  auto basis = self_dual_basis(c.orientation);
  std::array<Hi, 6> tau;
  for (int I = 0; I < 6; ++I) {
    Hi s(0.0);
    for (int i = 0; i < 3; ++i)
      if (basis[i][I] != 0.0) s += v[i] * (std::sqrt(2.0) * basis[i][I]);
    tau[I] = s;
  }
  Mat4<Hi> sigma{};
  for (int I = 0; I < 6; ++I) {
    auto [a, b] = kBivectors[I];
    sigma[a][b] = tau[I];
    sigma[b][a] = -tau[I];
  }
  const auto& F = w.frame.F;
  const auto& th = w.frame.coframe;
  Mat4<Hi> sF{};
  for (int a = 0; a < 4; ++a)
    for (int j = 0; j < 4; ++j) {
      Hi s(0.0);
      for (int b = 0; b < 4; ++b)
        if (a != b) s += sigma[a][b] * F[b][j];
      sF[a][j] = s;
    }
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      Hi s(0.0);
      for (int a = 0; a < 4; ++a) s += th[a][i] * sF[a][j];
      out.J[i][j] = s;
    }
  if (c.complex_hint) {
    auto [from, to] = *c.complex_hint;
    if (out.J[from][to].value() < 0)
      for (auto& row : out.J)
        for (auto& e : row) e = -e;
  }

  Hi phi = pow(w.lambda, 2.0 / 3.0);
  std::array<Hi, 10> gj;
  for (int i = 0; i < 4; ++i)
    for (int j = i; j < 4; ++j) {
      out.g[i][j] = out.g[j][i] = d.g[i][j] * phi;
      gj[MetricChart::slot(i, j)] = out.g[i][j];
    }
  out.gcurv = compute_curvature(derivatives_from_jets<N>(gj));
  return out;
}

inline Mat4<double> values(const Mat4<Jet<4, 4>>& m) {
  Mat4<double> r;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) r[i][j] = m[i][j].value();
  return r;
}

/// Integrable complex structure at p, J d_i = J[i][j] d_j.
inline Mat4<double> complex_structure(const ConformalPair& pair, const Point& p) {
  return values(hermitian_jets<2>(pair.base, p).J);
}

/// Norm of a covariant 2-tensor in the metric g.
inline double tensor_norm(const Mat4<double>& g, const Mat4<double>& t) {
  auto F = gram_schmidt(g).F;
  double s = 0;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      double v = 0;
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) v += F[a][i] * F[b][j] * t[i][j];
      s += v * v;
    }
  return std::sqrt(s);
}

inline double covector_norm(const Mat4<double>& g, const std::array<double, 4>& w) {
  auto gi = inverse(g);
  double s = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) s += gi[i][j] * w[i] * w[j];
  return std::sqrt(std::max(s, 0.0));
}

inline double vector_norm(const Mat4<double>& g, const std::array<double, 4>& v) {
  double s = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) s += g[i][j] * v[i] * v[j];
  return std::sqrt(std::max(s, 0.0));
}

/// Everything the Hermitian checks measure at one point.
struct HermitianSample {
  Point point{};
  double scalar = 0;            // s_g from the curvature of g
  double lambda_cbrt = 0;
  double simple_eigenvalue = 0;
  double scalar_identity = 0;   // | |s_g| - lambda^{1/3} |
  double complex_defect = 0;    // |J^2 + 1| + |h(J.,J.) - h|
  std::array<double, 4> extremal{};        // -J grad_h lambda^{-1/3}
  std::array<double, 4> extremal_route1{}; // sign(s_g) J grad_g s_g
  double route_mismatch = 0;    // relative
  double killing_h = 0;
  double killing_g = 0;
  double kahler = 0;            // |nabla_g omega|_g
  double hamiltonian_plus = 0;  // |i_K omega - ds_g|_g
  double hamiltonian_minus = 0; // |i_K omega + ds_g|_g
  double orthogonality = 0;     // |g(K, grad_g s_g)| / (|K| |ds|)
  double lebrun = 0;            // |Omega(.,J.) - closed form|_g
  double lebrun_min_eigenvalue = 0;
};

inline HermitianSample hermitian_sample(const ConformalPair& pair, const Point& p) {
  using J4 = Jet<4, 4>;
  auto hj = hermitian_jets<2>(pair.base, p);
  HermitianSample out;
  out.point = p;
  const auto& gc = hj.gcurv;
  const Jet<4, 2>& s = gc.scalar;
  double sv = s.value();
  double sign = sv >= 0 ? 1.0 : -1.0;
  out.scalar = sv;
  out.lambda_cbrt = std::cbrt(hj.lambda.value());
  out.simple_eigenvalue = hj.simple_eigenvalue.value();
  out.scalar_identity = std::abs(std::abs(sv) - out.lambda_cbrt);

  Mat4<double> g = values(hj.g), h = values(hj.h), J = values(hj.J);
  {
    Mat4<double> J2{}, hJ{};
    double a = 0, b = 0;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        double s2 = 0, hh = 0;
        for (int k = 0; k < 4; ++k) s2 += J[i][k] * J[k][j];
        for (int k = 0; k < 4; ++k)
          for (int l = 0; l < 4; ++l) hh += J[i][k] * J[j][l] * h[k][l];
        J2[i][j] = s2 + (i == j ? 1.0 : 0.0);
        hJ[i][j] = hh - h[i][j];
        a = std::max(a, std::abs(J2[i][j]));
      }
    b = tensor_norm(h, hJ);
    out.complex_defect = a + b;
  }

  Mat4<double> ginv{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) ginv[i][j] = gc.ginv[i][j].value();

  // extremal field from lambda: K^j = - (grad_h f)^i J[i][j], f = lambda^{-1/3}
  Jet<4, 3> hinv[4][4];
  {
    Mat4<Jet<4, 3>> h3;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) h3[i][j] = truncate<3>(hj.h[i][j]);
    auto hi = inverse(h3);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) hinv[i][j] = hi[i][j];
  }
  J4 f = pow(hj.lambda, -1.0 / 3.0);
  std::array<Jet<4, 3>, 4> df, grad, K;
  for (int k = 0; k < 4; ++k) df[k] = derivative(f, k);
  for (int i = 0; i < 4; ++i) {
    Jet<4, 3> t(0.0);
    for (int j = 0; j < 4; ++j) t += hinv[i][j] * df[j];
    grad[i] = t;
  }
  for (int j = 0; j < 4; ++j) {
    Jet<4, 3> t(0.0);
    for (int i = 0; i < 4; ++i) t += grad[i] * truncate<3>(hj.J[i][j]);
    K[j] = -t;
    out.extremal[j] = K[j].value();
  }

  std::array<double, 4> ds{}, gs{};
  for (int k = 0; k < 4; ++k) ds[k] = derivative(s, k).value();
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) gs[i] += ginv[i][j] * ds[j];
  for (int j = 0; j < 4; ++j) {
    double t = 0;
    for (int i = 0; i < 4; ++i) t += gs[i] * J[i][j];
    out.extremal_route1[j] = sign * t;
  }
  {
    std::array<double, 4> dk{};
    for (int j = 0; j < 4; ++j) dk[j] = out.extremal[j] - out.extremal_route1[j];
    double kn = vector_norm(g, out.extremal);
    out.route_mismatch = vector_norm(g, dk) / (kn > 0 ? kn : 1.0);
    double gk = 0;
    for (int j = 0; j < 4; ++j) gk += out.extremal[j] * ds[j];
    double dn = covector_norm(g, ds);
    out.orthogonality = (kn > 0 && dn > 0) ? std::abs(gk) / (kn * dn) : 0.0;
  }

  auto lie = [&](const Mat4<J4>& m) {
    Mat4<double> L{};
    std::array<std::array<double, 4>, 4> dK{};  // dK[i][k] = d_i K^k
    for (int i = 0; i < 4; ++i)
      for (int k = 0; k < 4; ++k) dK[i][k] = derivative(K[k], i).value();
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        double v = 0;
        for (int k = 0; k < 4; ++k)
          v += K[k].value() * derivative(m[i][j], k).value() + m[k][j].value() * dK[i][k] + m[i][k].value() * dK[j][k];
        L[i][j] = v;
      }
    return L;
  };
  out.killing_h = tensor_norm(h, lie(hj.h));
  out.killing_g = tensor_norm(g, lie(hj.g));

  // omega_ij = J[i][k] g_kj, so omega(X, Y) = g(JX, Y)
  Mat4<J4> omega;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      J4 t(0.0);
      for (int k = 0; k < 4; ++k) t += hj.J[i][k] * hj.g[k][j];
      omega[i][j] = t;
    }
  {
    Mat4<double> om = values(omega);
    auto F = gram_schmidt(g).F;
    double nabla[4][4][4];
    for (int k = 0; k < 4; ++k)
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
          double v = derivative(omega[i][j], k).value();
          for (int l = 0; l < 4; ++l)
            v -= gc.gamma[l][k][i].value() * om[l][j] + gc.gamma[l][k][j].value() * om[i][l];
          nabla[k][i][j] = v;
        }
    double tot = 0;
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        for (int c = 0; c < 4; ++c) {
          double v = 0;
          for (int k = 0; k < 4; ++k)
            for (int i = 0; i < 4; ++i)
              for (int j = 0; j < 4; ++j) v += F[a][k] * F[b][i] * F[c][j] * nabla[k][i][j];
          tot += v * v;
        }
    out.kahler = std::sqrt(tot);

    std::array<double, 4> iko{}, plus{}, minus{};
    for (int j = 0; j < 4; ++j) {
      for (int i = 0; i < 4; ++i) iko[j] += out.extremal[i] * om[i][j];
      plus[j] = iko[j] - ds[j];
      minus[j] = iko[j] + ds[j];
    }
    out.hamiltonian_plus = covector_norm(g, plus);
    out.hamiltonian_minus = covector_norm(g, minus);
  }

  {
    Jet<4, 2> lf = log(abs(s));
    std::array<double, 4> dl{};
    for (int k = 0; k < 4; ++k) dl[k] = derivative(lf, k).value();
    Mat4<double> hess{}, hessJ{}, lhs{}, rhs{};
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        double v = derivative(derivative(lf, i), j).value();
        for (int k = 0; k < 4; ++k) v -= gc.gamma[k][i][j].value() * dl[k];
        hess[i][j] = v;
      }
    std::array<double, 4> Jds{};
    for (int i = 0; i < 4; ++i)
      for (int a = 0; a < 4; ++a) Jds[i] += J[i][a] * ds[a];
    double ds2 = 0;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) ds2 += ginv[i][j] * ds[i] * ds[j];
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        double v = 0;
        for (int a = 0; a < 4; ++a)
          for (int b = 0; b < 4; ++b) v += J[i][a] * J[j][b] * hess[a][b];
        hessJ[i][j] = v;
        lhs[i][j] = gc.ricci[i][j].value() + hess[i][j] + hessJ[i][j];
        rhs[i][j] = sv / 6.0 * g[i][j] + (ds2 * g[i][j] - ds[i] * ds[j] - Jds[i] * Jds[j]) / (sv * sv);
      }
    Mat4<double> diff{};
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) diff[i][j] = lhs[i][j] - rhs[i][j];
    out.lebrun = tensor_norm(g, diff);
    Eigen::Matrix4d A, B;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        A(i, j) = 0.5 * (lhs[i][j] + lhs[j][i]);
        B(i, j) = g[i][j];
      }
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::Matrix4d> ges(A, B, Eigen::EigenvaluesOnly);
    out.lebrun_min_eigenvalue = ges.eigenvalues().minCoeff();
  }
  return out;
}

/// 6 Delta_h s + s^4 with s = sign(s_g) lambda^{1/3}, Laplacian by finite differences.
inline double conformal_pde_residual(const ConformalPair& pair, const Point& p, double sign, const DiffConfig& cfg = {}) {
  const auto& c = pair.base;
  auto F = [&](const Point& q) { return sign * pair.lambda_cbrt(q); };
  DiffConfig dc = cfg;
  dc.coordinate_scale = c.scale_hint;
  auto d = metric_derivatives<0>(c, p);
  auto curv = compute_curvature(d);
  std::array<double, 4> grad{};
  for (int k = 0; k < 4; ++k) {
    Index4 a{};
    a[k] = 1;
    grad[k] = fd_partial(F, c.domain, p, a, dc);
  }
  double lap = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = i; j < 4; ++j) {
      if (curv.ginv[i][j] == 0.0) continue;
      Index4 a{};
      a[i] += 1;
      a[j] += 1;
      double v = fd_partial(F, c.domain, p, a, dc);
      for (int k = 0; k < 4; ++k) v -= curv.gamma[k][i][j] * grad[k];
      lap += (i == j ? 1.0 : 2.0) * curv.ginv[i][j] * v;
    }
  double s = F(p);
  return std::abs(6.0 * lap + s * s * s * s);
}

/// Maxima over samples of the Hermitian residuals.
struct HermitianSummary {
  int samples = 0;
  std::uint64_t seed = 0;
  int scalar_sign = 0;
  int moment_sign = 0;  // i_K omega = moment_sign * ds_g
  double scalar_identity = 0;
  double pde = 0;
  double complex_defect = 0;
  double route_mismatch = 0;
  double killing_h = 0;
  double killing_g = 0;
  double kahler = 0;
  double hamiltonian = 0;
  double orthogonality = 0;
  double lebrun = 0;
  double lebrun_min_eigenvalue = INFINITY;
  double min_abs_scalar = INFINITY;
};

inline HermitianSummary hermitian_summary(const ConformalPair& pair, int samples, std::uint64_t seed,
                                          bool with_pde = true) {
  HermitianSummary sum;
  sum.samples = samples;
  sum.seed = seed;
  int eig_sign = 0;
  for (const Point& p : sample_points(pair.base, samples, seed)) {
    auto hs = hermitian_sample(pair, p);
    int sg = hs.scalar >= 0 ? 1 : -1;
    int es = hs.simple_eigenvalue >= 0 ? 1 : -1;
    if (sum.scalar_sign == 0) {
      sum.scalar_sign = sg;
      eig_sign = es;
      sum.moment_sign = hs.hamiltonian_plus <= hs.hamiltonian_minus ? 1 : -1;
    }
    if (es != eig_sign) throw EigenformBranchError(pair.base.name + ": simple eigenvalue of W+ changes sign");
    if (sg != sum.scalar_sign) throw SignError(pair.base.name + ": scalar curvature of g changes sign");
    sum.scalar_identity = std::max(sum.scalar_identity, hs.scalar_identity);
    sum.complex_defect = std::max(sum.complex_defect, hs.complex_defect);
    sum.route_mismatch = std::max(sum.route_mismatch, hs.route_mismatch);
    sum.killing_h = std::max(sum.killing_h, hs.killing_h);
    sum.killing_g = std::max(sum.killing_g, hs.killing_g);
    sum.kahler = std::max(sum.kahler, hs.kahler);
    sum.hamiltonian = std::max(sum.hamiltonian, sum.moment_sign > 0 ? hs.hamiltonian_plus : hs.hamiltonian_minus);
    sum.orthogonality = std::max(sum.orthogonality, hs.orthogonality);
    sum.lebrun = std::max(sum.lebrun, hs.lebrun);
    sum.lebrun_min_eigenvalue = std::min(sum.lebrun_min_eigenvalue, hs.lebrun_min_eigenvalue);
    sum.min_abs_scalar = std::min(sum.min_abs_scalar, std::abs(hs.scalar));
    if (with_pde) sum.pde = std::max(sum.pde, conformal_pde_residual(pair, p, sg));
  }
  return sum;
}

}  // namespace instanton
