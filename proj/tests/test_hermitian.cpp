#include <catch_amalgamated.hpp>

#include <cmath>

#include "instanton/catalog.hpp"
#include "instanton/hermitian.hpp"

using namespace instanton;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("Kasner conformal pair", "[hermitian]") {
  auto pair = conformal_pair(make_metric("kasner"));
  for (const auto& p : sample_points(pair.base, 10, 4)) {
    CHECK_THAT(pair.lambda_cbrt(p), WithinRel(1.0 / std::abs(p[0]), 1e-10));
    auto g = pair.kahler_metric(p);
    auto d = metric_derivatives<0>(pair.base, p);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) CHECK_THAT(g[i][j], WithinAbs(d.g[i][j] / (p[0] * p[0]), 1e-12 * (1 + std::abs(g[i][j]))));
    auto hs = hermitian_sample(pair, p);
    CHECK_THAT(hs.scalar, WithinRel(1.0 / p[0], 1e-10));
    CHECK_THAT(hs.extremal[3], WithinAbs(-1.0, 1e-10));
    for (int k = 0; k < 3; ++k) CHECK_THAT(hs.extremal[k], WithinAbs(0.0, 1e-10));
  }
}

TEST_CASE("conformal pair requires type II", "[hermitian]") {
  CHECK_THROWS_AS(conformal_pair(make_metric("flat")), TypeMismatch);
  CHECK_THROWS_AS(conformal_pair(make_metric("taub_nut")), TypeMismatch);
  CHECK_NOTHROW(conformal_pair(make_metric("taub_nut", {}, Orientation::Reversed)));
}

TEST_CASE("complex structure is orthogonal and squares to minus one", "[hermitian]") {
  for (const auto& name : {"schwarzschild", "kerr", "taub_bolt", "alh_star"}) {
    auto pair = conformal_pair(make_metric(name));
    for (const auto& p : sample_points(pair.base, 5, 8)) {
      auto J = complex_structure(pair, p);
      auto h = metric_derivatives<0>(pair.base, p).g;
      auto [from, to] = *pair.base.complex_hint;
      CHECK(J[from][to] > 0);
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
          double sq = 0, hh = 0;
          for (int k = 0; k < 4; ++k) sq += J[i][k] * J[k][j];
          for (int k = 0; k < 4; ++k)
            for (int l = 0; l < 4; ++l) hh += J[i][k] * J[j][l] * h[k][l];
          CHECK_THAT(sq, WithinAbs(i == j ? -1.0 : 0.0, 1e-10));
          CHECK_THAT(hh, WithinAbs(h[i][j], 1e-9 * (1 + std::abs(h[i][j]))));
        }
    }
  }
}

TEST_CASE("Schwarzschild Hermitian structure", "[hermitian]") {
  const double m = 1.0;
  auto pair = conformal_pair(make_metric("schwarzschild", {{"m", m}}));
  auto sum = hermitian_summary(pair, 30, 1);
  CHECK(sum.scalar_sign == 1);
  CHECK(sum.moment_sign == -1);
  CHECK(sum.scalar_identity < 1e-8);
  CHECK(sum.pde < 1e-4);
  CHECK(sum.route_mismatch < 1e-6);
  CHECK(sum.killing_g < 1e-6);
  CHECK(sum.killing_h < 1e-6);
  CHECK(sum.kahler < 1e-6);
  CHECK(sum.hamiltonian < 1e-6);
  CHECK(sum.orthogonality < 1e-8);
  CHECK(sum.lebrun < 1e-6);
  CHECK(sum.lebrun_min_eigenvalue > 0);
  for (const auto& p : sample_points(pair.base, 5, 2)) {
    auto hs = hermitian_sample(pair, p);
    CHECK_THAT(hs.lambda_cbrt * p[1], WithinRel(std::cbrt(12 * m), 1e-9));
    CHECK(std::abs(hs.extremal[0]) > 0.1);
    for (int k = 1; k < 4; ++k) CHECK_THAT(hs.extremal[k], WithinAbs(0.0, 1e-9));
  }
}

TEST_CASE("Taub-bolt extremal field generates the circle action", "[hermitian]") {
  auto pair = conformal_pair(make_metric("taub_bolt"));
  for (const auto& p : sample_points(pair.base, 5, 3)) {
    auto hs = hermitian_sample(pair, p);
    CHECK(std::abs(hs.extremal[0]) > 1e-3);
    for (int k = 1; k < 4; ++k) CHECK_THAT(hs.extremal[k], WithinAbs(0.0, 1e-9));
    CHECK(hs.killing_h < 1e-8);
  }
}

TEST_CASE("negative scalar curvature branch", "[hermitian]") {
  auto sum = hermitian_summary(conformal_pair(make_metric("alh_star")), 20, 5);
  CHECK(sum.scalar_sign == -1);
  CHECK(sum.moment_sign == 1);
  CHECK(sum.pde < 1e-4);
  CHECK(sum.lebrun < 1e-6);
  CHECK(sum.kahler < 1e-6);
}
