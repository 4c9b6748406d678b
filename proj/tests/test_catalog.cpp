#include <catch_amalgamated.hpp>

#include <cmath>

#include "instanton/catalog.hpp"

using namespace instanton;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("catalog metrics are Ricci flat", "[catalog]") {
  for (const auto& f : families()) {
    auto c = make_metric(f.name);
    double worst = 0;
    for (const auto& p : sample_points(c, 50, 17)) worst = std::max(worst, curvature(c, p).ricci_norm);
    INFO(f.name);
    CHECK(worst < 1e-7);
  }
}

TEST_CASE("catalog parameters", "[catalog]") {
  CHECK_THROWS_AS(make_metric("nonexistent"), UnknownFamily);
  CHECK_THROWS_AS(make_metric("schwarzschild", {{"m", -1.0}}), ParamOutOfRange);
  CHECK_THROWS_AS(make_metric("schwarzschild", {{"q", 1.0}}), ParamOutOfRange);
  auto c = make_metric("kerr", {{"a", 0.1}});
  CHECK(c.domain({0, 2.1, 1, 0}));
}

TEST_CASE("ALH* components at a reference point", "[catalog]") {
  auto c = make_metric("alh_star");
  Point p{-1, 0, 0.3, 0.2};
  double want[4] = {12, 12, 12, 1.0 / 12};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) CHECK_THAT(evaluate(c.component(i, j), p), WithinAbs(i == j ? want[i] : 0.0, 1e-15));
}

TEST_CASE("decay towards model ends", "[catalog]") {
  std::vector<double> radii{100, 200, 400, 800, 1600};
  auto s = decay_report(make_metric("schwarzschild"), asymptotic_model("AF", "schwarzschild"), radii);
  CHECK_THAT(s.fitted_rate, WithinAbs(1.0, 0.05));
  auto t = decay_report(make_metric("taub_nut"), asymptotic_model("ALF-A", "taub_nut"), radii);
  CHECK_THAT(t.fitted_rate, WithinAbs(1.0, 0.05));
  auto e = decay_report(make_metric("eguchi_hanson"), asymptotic_model("ALE", "eguchi_hanson"), radii);
  CHECK_THAT(e.fitted_rate, WithinAbs(4.0, 0.05));
  auto k = decay_report(make_metric("kasner"), asymptotic_model("Kasner", "kasner"), radii);
  CHECK(std::isinf(k.fitted_rate));
  CHECK_THROWS_AS(decay_report(make_metric("schwarzschild"), asymptotic_model("AF", "schwarzschild"), {1, 2, 3}),
                  InsufficientRadii);
  CHECK_THROWS_AS(asymptotic_model("AF", "taub_nut"), TypeMismatch);
}

TEST_CASE("conformal expansion constant", "[catalog]") {
  std::vector<double> radii{100, 200, 400, 800, 1600};
  for (double m : {1.0, 1.0 / 12}) {
    auto e = conformal_expansion_check(make_metric("schwarzschild", {{"m", m}}), radii);
    CHECK_THAT(e.constant, WithinRel(std::cbrt(12 * m), 1e-8));
  }
  auto k = conformal_expansion_check(make_metric("kasner"), radii);
  CHECK(std::isinf(k.constant));
}
