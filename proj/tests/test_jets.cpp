#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "instanton/differentiation.hpp"

using namespace instanton;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {
Expr X(int i) { return Expr::variable(i); }
}  // namespace

TEST_CASE("jet of x^2 at 3", "[jets]") {
  ScalarField f{pow(X(0), 2)};
  auto j = jet_lift(f, {3, 0, 0, 0}, 2);
  CHECK(partial(j, {0, 0, 0, 0}) == 9.0);
  CHECK(partial(j, {1, 0, 0, 0}) == 6.0);
  CHECK(j.coefficient({2, 0, 0, 0}) == 1.0);
}

TEST_CASE("exp jet at zero has inverse factorial coefficients", "[jets]") {
  ScalarField f{exp(X(0))};
  auto j = jet_lift(f, {0, 0, 0, 0}, 6);
  double fact = 1;
  for (int k = 0; k <= 6; ++k) {
    if (k > 0) fact *= k;
    CHECK_THAT(j.coefficient({k, 0, 0, 0}), WithinRel(1.0 / fact, 1e-14));
  }
}

TEST_CASE("mixed partial of xy", "[jets]") {
  ScalarField f{X(0) * X(1)};
  auto j = jet_lift(f, {0.3, -1.2, 0, 0}, 2);
  CHECK_THAT(partial(j, {1, 1, 0, 0}), WithinAbs(1.0, 1e-15));
}

TEST_CASE("jet errors", "[jets]") {
  ScalarField f{log(X(0)), [](const Point& p) { return p[0] > 0; }};
  CHECK_THROWS_AS(jet_lift(f, {1, 0, 0, 0}, 7), OrderUnsupported);
  CHECK_THROWS_AS(jet_lift(f, {-1, 0, 0, 0}, 2), DomainError);
  auto j = jet_lift(f, {1, 0, 0, 0}, 2);
  CHECK_THROWS_AS(partial(j, {3, 0, 0, 0}), OrderExceeded);
}

TEST_CASE("finite difference fourth derivative of exp", "[jets]") {
  auto f = [](const Point& p) { return std::exp(p[0]); };
  auto all = [](const Point&) { return true; };
  CHECK_THAT(fd_partial(f, all, {0, 0, 0, 0}, {4, 0, 0, 0}), WithinAbs(1.0, 1e-4));
  CHECK_THAT(fd_partial(f, all, {0, 0, 0, 0}, {1, 0, 0, 0}), WithinAbs(1.0, 1e-9));
}

TEST_CASE("finite difference stencil outside domain", "[jets]") {
  auto f = [](const Point& p) { return std::log(p[0]); };
  auto pos = [](const Point& p) { return p[0] > 0; };
  CHECK_THROWS_AS(fd_partial(f, pos, {1e-5, 0, 0, 0}, {1, 0, 0, 0}), DomainError);
}

TEST_CASE("transcendental jets match symbolic derivatives", "[jets]") {
  Expr e = sin(X(0) * X(1)) * exp(X(2)) / sqrt(1.0 + X(3) * X(3)) + cbrt(X(0) - 5.0) + log(X(1) + 3.0);
  ScalarField f{e};
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 20; ++trial) {
    Point p{u(rng), u(rng), u(rng), u(rng)};
    auto j = jet_lift(f, p, 4);
    Expr d = e;
    Index4 a{};
    for (int step = 0; step < 4; ++step) {
      int v = static_cast<int>(rng() % 4);
      d = differentiate(d, v);
      a[v] += 1;
      double sym = evaluate(d, p);
      CHECK_THAT(partial(j, a), WithinAbs(sym, 1e-10 * (1 + std::abs(sym))));
    }
  }
}

TEST_CASE("jet lift agrees with finite differences", "[jets]") {
  Expr e = exp(X(0)) * cos(X(1)) + X(2) * X(2) * X(3);
  ScalarField f{e};
  auto fn = [&](const Point& p) { return evaluate(e, p); };
  auto all = [](const Point&) { return true; };
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 100; ++trial) {
    Point p{u(rng), u(rng), u(rng), u(rng)};
    auto j = jet_lift(f, p, 2);
    for (const Index4& a : {Index4{1, 0, 0, 0}, Index4{0, 1, 0, 0}, Index4{1, 1, 0, 0}, Index4{0, 0, 2, 0},
                            Index4{0, 0, 1, 1}}) {
      double exact = partial(j, a);
      CHECK(std::abs(fd_partial(fn, all, p, a) - exact) < 1e-5 * (1 + std::abs(exact)));
    }
  }
}

TEST_CASE("integral node", "[jets]") {
  Expr F = integral(X(0) * X(0) * X(1), 0, 1.0, X(0));
  Point p{2.0, 3.0, 0, 0};
  CHECK_THAT(evaluate(F, p), WithinRel(3.0 * 7.0 / 3.0, 1e-13));
  CHECK_THAT(evaluate(differentiate(F, 0), p), WithinRel(12.0, 1e-13));
  CHECK_THAT(evaluate(differentiate(F, 1), p), WithinRel(7.0 / 3.0, 1e-13));
  auto j = jet_lift(ScalarField{F}, p, 2);
  CHECK_THAT(partial(j, {1, 1, 0, 0}), WithinRel(4.0, 1e-12));
  Expr G = substitute(F, 0, 2.0 * X(2));
  CHECK_THAT(evaluate(G, Point{0, 3.0, 1.0, 0}), WithinRel(7.0, 1e-13));
}

TEST_CASE("parser", "[jets]") {
  std::vector<std::pair<std::string, int>> names{{"rho", 0}, {"x", 1}, {"y", 2}, {"t", 3}};
  Expr e = parse_expr("log(-rho) + 2*x^2 - sin(pi*y)/3", names);
  Point p{-2.0, 0.5, 0.25, 0};
  CHECK_THAT(evaluate(e, p), WithinAbs(std::log(2.0) + 0.5 - std::sin(M_PI * 0.25) / 3, 1e-15));
  CHECK_THROWS_AS(parse_expr("foo(1)", names), ParseError);
  CHECK_THROWS_AS(parse_expr("x^y", names), ParseError);
}
