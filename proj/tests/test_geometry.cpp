#include <catch_amalgamated.hpp>

#include <cmath>

#include "instanton/catalog.hpp"

using namespace instanton;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {
MetricChart round_sphere() {
  MetricChart s;
  s.name = "sphere";
  Expr r2 = 0.0;
  for (int i = 0; i < 4; ++i) r2 = r2 + pow(Expr::variable(i), 2);
  for (int i = 0; i < 4; ++i)
    for (int j = i; j < 4; ++j) s.set(i, j, i == j ? 4.0 / pow(1.0 + r2, 2) : Expr(0.0));
  s.box = {{-1, -1, -1, -1}, {1, 1, 1, 1}};
  return s;
}

MetricChart generic_metric() {
  MetricChart g;
  g.name = "generic";
  g.box = {{-1, -1, -1, -1}, {1, 1, 1, 1}};
  auto x = [](int i) { return Expr::variable(i); };
  for (int i = 0; i < 4; ++i)
    for (int j = i; j < 4; ++j)
      g.set(i, j, i == j ? 1.0 + 0.2 * sin(x(i) * x((i + 1) % 4)) : 0.1 * cos(x(i) + 2.0 * x(j)));
  return g;
}
}  // namespace

TEST_CASE("flat space has vanishing curvature", "[geometry]") {
  auto c = make_metric("flat");
  for (const auto& p : sample_points(c, 20, 3)) {
    auto b = curvature(c, p);
    CHECK(b.riemann_norm == 0.0);
    CHECK(b.scalar == 0.0);
  }
}

TEST_CASE("stereographic four-sphere", "[geometry]") {
  auto s = round_sphere();
  for (const auto& p : sample_points(s, 10, 1)) {
    auto b = curvature(s, p);
    CHECK_THAT(b.scalar, WithinAbs(12.0, 1e-10));
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) CHECK_THAT(b.ricci[i][j], WithinAbs(3.0 * b.metric[i][j], 1e-10));
    double K = 1.0;
    CHECK_THAT(b.riemann[0][1][0][1], WithinRel(K * b.metric[0][0] * b.metric[1][1], 1e-10));
  }
}

TEST_CASE("Riemann tensor symmetries", "[geometry]") {
  for (const auto& c : {make_metric("kerr"), generic_metric()}) {
    for (const auto& p : sample_points(c, 10, 5)) {
      auto b = curvature(c, p);
      double scale = 1e-10 * (1 + b.riemann_norm);
      const auto& R = b.riemann;
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
          for (int k = 0; k < 4; ++k)
            for (int l = 0; l < 4; ++l) {
              CHECK(std::abs(R[i][j][k][l] + R[j][i][k][l]) <= scale);
              CHECK(std::abs(R[i][j][k][l] - R[k][l][i][j]) <= scale);
              CHECK(std::abs(R[i][j][k][l] + R[i][k][l][j] + R[i][l][j][k]) <= scale);
            }
    }
  }
}

TEST_CASE("non positive definite metric is rejected", "[geometry]") {
  MetricChart c = make_metric("flat");
  c.set(0, 0, -1.0);
  CHECK_THROWS_AS(curvature(c, {0, 0, 0, 0}), NonPositiveDefinite);
}

TEST_CASE("Schwarzschild self-dual Weyl eigenvalues", "[geometry]") {
  for (double m : {1.0, 2.5}) {
    auto c = make_metric("schwarzschild", {{"m", m}});
    for (double r : {3.0 * m, 10.0 * m, 40.0 * m}) {
      Point p{0.3, r, 1.1, 0.7};
      auto op = weyl_plus(c, p);
      double a = m / std::pow(r, 3);
      CHECK_THAT(op.eigenvalues[0], WithinRel(-a, 1e-9));
      CHECK_THAT(op.eigenvalues[1], WithinRel(-a, 1e-9));
      CHECK_THAT(op.eigenvalues[2], WithinRel(2 * a, 1e-9));
      auto lam = lambda_field(c);
      CHECK_THAT(lam(p), WithinRel(12 * m / std::pow(r, 3), 1e-8));
      CHECK_THAT(std::cbrt(lam(p)) * r, WithinRel(std::cbrt(12 * m), 1e-8));
    }
  }
}

TEST_CASE("Kasner conformal factor", "[geometry]") {
  auto c = make_metric("kasner");
  auto lam = lambda_field(c);
  for (const auto& p : sample_points(c, 20, 2)) CHECK_THAT(std::cbrt(lam(p)), WithinRel(1.0 / std::abs(p[0]), 1e-9));
}

TEST_CASE("orientation flip exchanges W+ and W-", "[geometry]") {
  for (const auto& c : {make_metric("kerr"), make_metric("taub_bolt"), make_metric("eguchi_hanson"), generic_metric()}) {
    for (const auto& p : sample_points(c, 10, 9)) {
      auto flipped = weyl_plus(orientation_flip(c), p).eigenvalues;
      auto minus = weyl_minus_eigenvalues(c, p);
      double scale = 1e-10 * (1 + weyl_plus(c, p).riemann_norm);
      for (int i = 0; i < 3; ++i) CHECK(std::abs(flipped[i] - minus[i]) <= scale);
    }
    CHECK(orientation_flip(orientation_flip(c)).orientation == c.orientation);
  }
}

TEST_CASE("Weyl type classification", "[geometry]") {
  CHECK(classify_type(make_metric("flat")).label == WeylType::I);
  CHECK(classify_type(make_metric("flat", {}, Orientation::Reversed)).label == WeylType::I);
  CHECK(classify_type(make_metric("taub_nut")).label == WeylType::I);
  CHECK(classify_type(make_metric("taub_nut", {}, Orientation::Reversed)).label == WeylType::II);
  CHECK(classify_type(make_metric("eguchi_hanson")).label == WeylType::I);
  CHECK(classify_type(make_metric("eguchi_hanson", {}, Orientation::Reversed)).label == WeylType::II);
  CHECK(classify_type(make_metric("schwarzschild")).label == WeylType::II);
  CHECK(classify_type(make_metric("kerr")).label == WeylType::II);
  CHECK(classify_type(make_metric("kasner")).label == WeylType::II);
  CHECK(classify_type(generic_metric()).label == WeylType::III);
  CHECK_THROWS_AS(lambda_field(make_metric("flat")), TypeMismatch);
}

TEST_CASE("classification reports an ambiguous self-dual norm", "[geometry]") {
  auto c = make_metric("eguchi_hanson");
  c.set(1, 1, c.component(1, 1) * (1.0 + 1e-10 * pow(Expr::variable(0), 2) * sin(Expr::variable(1))));
  CHECK_THROWS_AS(classify_type(c, {20, 0}), InconclusiveError);
}

TEST_CASE("sampling is deterministic", "[geometry]") {
  auto c = make_metric("kerr");
  auto a = sample_points(c, 30, 42), b = sample_points(c, 30, 42), d = sample_points(c, 30, 43);
  CHECK(a == b);
  CHECK(a != d);
  for (const auto& p : a) CHECK(c.box.contains(p));
}
