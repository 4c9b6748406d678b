#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "instanton/catalog.hpp"
#include "instanton/toda.hpp"

using namespace instanton;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {
std::vector<Point> field_points(const TodaField& f, int n, std::uint64_t seed) {
  return sample_points(f.domain, [](const Point&) { return true; }, n, seed);
}

// Schwarzschild corresponds to sphere_profile with c = 0, b = -2m / (12m)^{1/3}.
double schwarzschild_b(double m) { return -2 * m / std::cbrt(12 * m); }
}  // namespace

TEST_CASE("closed-form Toda solutions", "[toda]") {
  for (const auto& name : {"kasner", "alh_star", "sphere_profile"}) {
    auto f = toda_field(name);
    double worst = 0;
    for (const auto& p : field_points(f, 1000, 3)) worst = std::max(worst, std::abs(toda_residual(f, p)));
    INFO(name);
    CHECK(worst < 1e-14);
  }
  auto bad = toda_field_from_string("x^2", Surface::Torus, toda_field("kasner").domain);
  CHECK_THAT(toda_residual(bad, {-3, 0.5, 0.5, 0}), WithinAbs(2.0, 1e-12));
  CHECK_THROWS_AS(toda_residual(toda_field("kasner"), {1, 0.5, 0.5, 0}), DomainError);
  CHECK_THROWS_AS(toda_field("nope"), UnknownFamily);
}

TEST_CASE("ansatz potentials", "[toda]") {
  auto k = ansatz_from_toda(toda_field("kasner"));
  auto a = ansatz_from_toda(toda_field("alh_star"));
  for (const auto& p : field_points(toda_field("kasner"), 100, 1)) {
    CHECK_THAT(evaluate(k.V, p), WithinRel(-6 * p[0], 4e-16));
    CHECK_THAT(evaluate(a.V, p), WithinRel(-12 * p[0], 4e-16));
    CHECK(ansatz_invariant_residual(k, p) < 1e-12);
    CHECK(ansatz_invariant_residual(a, p) < 1e-12);
  }
  CHECK(k.eta.X.is_const(0));
  CHECK(k.eta.Y.is_const(0));
  CHECK_THROWS_AS(ansatz_from_toda(toda_field("sphere_profile")), SignError);
  auto pos = toda_field("kasner");
  pos.u = log(Expr::variable(0));
  pos.domain.lo[0] = 2;
  pos.domain.hi[0] = 50;
  CHECK_THROWS_AS(ansatz_from_toda(pos), SignError);
}

TEST_CASE("build_metric reproduces the catalog torus ends", "[toda]") {
  for (const auto& name : {"kasner", "alh_star"}) {
    auto c = build_metric(ansatz_from_toda(toda_field(name)));
    auto ref = make_metric(name);
    double worst = 0;
    for (const auto& p : sample_points(ref, 50, 2))
      for (int i = 0; i < 10; ++i) {
        double want = evaluate(ref.components[i], p);
        worst = std::max(worst, std::abs(evaluate(c.components[i], p) - want) / std::max(1.0, std::abs(want)));
      }
    INFO(name);
    CHECK(worst < 1e-12);
  }
}

TEST_CASE("ansatz metrics from exact solutions are Ricci flat", "[toda]") {
  std::vector<TodaField> fields{toda_field("kasner"), toda_field("alh_star"),
                                toda_field("sphere_profile", {{"b", schwarzschild_b(1.0)}}),
                                toda_field("sphere_profile", {{"b", -1.0}, {"c", 0.1}})};
  for (const auto& f : fields) {
    auto c = build_metric(ansatz_from_toda(f));
    double worst = 0;
    for (const auto& p : sample_points(c, 50, 5)) worst = std::max(worst, curvature(c, p).ricci_norm);
    INFO(f.name);
    CHECK(worst < 1e-7);
    CHECK(classify_type(c).label == WeylType::II);
  }
}

TEST_CASE("scalar curvature formula", "[toda]") {
  for (const auto& name : {"kasner", "alh_star"}) {
    auto d = ansatz_from_toda(toda_field(name));
    auto g = conformal_kahler_chart(d);
    for (const auto& p : sample_points(g, 100, 6)) {
      double s = scalar_from_ansatz(d, p);
      CHECK_THAT(s, WithinRel(curvature(g, p).scalar, 1e-6));
      CHECK_THAT(s, WithinRel(1 / p[0], 1e-10));
    }
  }
  auto d = ansatz_from_toda(toda_field("sphere_profile", {{"b", -1.0}, {"c", 0.1}}));
  auto g = conformal_kahler_chart(d);
  for (const auto& p : sample_points(g, 10, 6)) {
    CHECK_THAT(scalar_from_ansatz(d, p), WithinRel(curvature(g, p).scalar, 1e-6));
    CHECK_THAT(scalar_from_ansatz(d, p), WithinRel(1 / p[0], 1e-8));
  }
}

TEST_CASE("compatibility equation", "[toda]") {
  for (const auto& name : {"kasner", "alh_star"}) {
    auto d = ansatz_from_toda(toda_field(name));
    for (const auto& p : field_points(toda_field(name), 20, 7)) {
      auto r = compatibility_residual(d, p);
      CHECK(r.formula < 1e-10);
      CHECK(r.gauge_defect < 1e-10);
    }
    auto bumped = d;
    bumped.W = d.W + pow(Expr::variable(kX), 2);
    CHECK_THAT(compatibility_residual(bumped, {-3, 0, 0.5, 0}).formula, WithinAbs(2.0, 1e-9));
  }
  auto s = ansatz_from_toda(toda_field("sphere_profile", {{"b", -1.0}, {"c", 0.1}}));
  for (const auto& p : field_points(toda_field("sphere_profile", {{"b", -1.0}, {"c", 0.1}}), 10, 7)) {
    auto r = compatibility_residual(s, p);
    CHECK(r.formula < 1e-9);
    CHECK(r.gauge_defect < 1e-9);
  }
}

TEST_CASE("Toda equation as Gauss curvature", "[toda]") {
  auto sph = toda_field("sphere_profile");
  auto one = gauss_curvature_residual(sph, {1, 0.3, -0.2, 0});
  CHECK_THAT(one.gauss, WithinAbs(1.0, 1e-12));
  for (const auto& p : field_points(sph, 50, 8)) {
    auto g = gauss_curvature_residual(sph, p);
    CHECK(g.residual < 1e-9);
    CHECK_THAT(g.gauss, WithinRel(1 / (p[0] * p[0]), 1e-10));
  }
  for (const auto& name : {"kasner", "alh_star"}) {
    auto g = gauss_curvature_residual(toda_field(name), {-3, 0.2, 0.7, 0});
    CHECK_THAT(g.lhs, WithinAbs(0.0, 1e-14));
    CHECK_THAT(g.gauss, WithinAbs(0.0, 1e-14));
  }
}

TEST_CASE("reduction integrals and volumes", "[toda]") {
  std::vector<double> levels{-40, -20, -10, -5, -3};
  auto k = reduction_integrals(toda_field("kasner"), levels);
  CHECK_THAT(k.euler_term, WithinAbs(0.0, 0.0));
  CHECK_THAT(k.a, WithinAbs(-1.0, 1e-8));
  CHECK_THAT(k.b, WithinAbs(0.0, 1e-8));
  for (std::size_t i = 0; i < levels.size(); ++i)
    CHECK_THAT(k.ve_integral[i], WithinRel(6 * levels[i] * levels[i], 1e-12));
  auto a = reduction_integrals(toda_field("alh_star"), levels);
  CHECK_THAT(a.a, WithinAbs(0.0, 1e-8));
  CHECK_THAT(a.b, WithinAbs(1.0, 1e-8));
  auto s = reduction_integrals(toda_field("sphere_profile"), {1, 2, 4, 8, 16});
  CHECK_THAT(s.euler_term, WithinRel(4 * std::numbers::pi, 1e-15));
  CHECK_THAT(s.a, WithinAbs(0.0, 1e-8));
  CHECK_THAT(s.b, WithinAbs(0.0, 1e-8));
  auto sc = reduction_integrals(toda_field("sphere_profile", {{"b", -1.0}, {"c", 0.1}}), {2, 3, 5, 8, 13});
  CHECK_THAT(sc.a, WithinRel(-4 * std::numbers::pi, 1e-8));
  CHECK_THAT(sc.b, WithinRel(0.4 * std::numbers::pi, 1e-8));

  auto notquad = toda_field_from_string("log(-rho) + 0.01*rho^2", Surface::Torus, toda_field("kasner").domain);
  CHECK_THROWS_AS(reduction_integrals(notquad, levels), FitError);
  CHECK_THROWS_AS(reduction_integrals(toda_field("kasner"), {-3, -2}), FitError);

  ReductionIntegrals circ;
  circ.a = -1;
  CHECK_THAT(volume_between(circ, 1, 2, VolumeMode::Circle), WithinRel(28 * std::numbers::pi, 1e-15));
  ReductionIntegrals tor;
  tor.b = 1;
  double pi2 = std::numbers::pi * std::numbers::pi;
  CHECK_THAT(volume_between(tor, -2, -1, VolumeMode::Torus), WithinRel(-96 * pi2 * 3, 1e-15));
  CHECK(volume_between(ReductionIntegrals{}, 1, 2, VolumeMode::Circle) == 0.0);

  double direct = chart_shell_volume(make_metric("kasner"), -4, -2);
  CHECK_THAT(volume_between(k, -4, -2, VolumeMode::Circle), WithinRel(direct, 1e-3));
  CHECK_THAT(direct, WithinRel(224 * std::numbers::pi, 1e-10));
}

TEST_CASE("indicial roots", "[toda]") {
  auto z = indicial_roots(0);
  CHECK(z.exact);
  CHECK(z.roots.first == -1.0);
  CHECK(z.roots.second == -2.0);
  CHECK(indicial_roots(-2).roots == std::pair{0.0, -3.0});
  CHECK(indicial_roots(-6).roots == std::pair{1.0, -4.0});
  for (int k = 0; k <= 10; ++k) {
    auto p = indicial_roots(-k * (k + 1));
    CHECK(p.exact);
    CHECK(indicial_identity_exact(p));
    CHECK(p.roots.first == k - 1);
    CHECK(p.roots.second == -k - 2);
  }
  auto irr = indicial_roots(-1);
  CHECK_FALSE(irr.exact);
  double m = irr.roots.first;
  CHECK_THAT((m + 2) * (m + 1) - 1, WithinAbs(0.0, 1e-14));
  CHECK_THROWS_AS(indicial_roots(1), ParamOutOfRange);
}

TEST_CASE("ALF profile residual", "[toda]") {
  Box box{{10, -2, -2, 0}, {1e4, 2, 2, 2 * std::numbers::pi}};
  std::vector<double> levels{10, 100, 1000, 1e4};
  auto exact = toda_field_from_string("2*log(rho) + log(4/(1+x^2+y^2)^2) - 1/(6*rho)", Surface::Sphere, box);
  auto r0 = alf_profile_residual(exact, 1.0, levels);
  // roundoff in u times rho^{3/2} = 1e6 at the outer level
  CHECK(r0.residual < 1e-7);
  CHECK(r0.v_residual < 1e-9);
  auto extra = toda_field_from_string("2*log(rho) + log(4/(1+x^2+y^2)^2) - 1/(6*rho) + 3/rho^2", Surface::Sphere, box);
  auto r1 = alf_profile_residual(extra, 1.0, levels);
  CHECK(r1.residual > 1e-3);
  CHECK(r1.residual < 3 * std::pow(10.0, -0.5) * 1.01);

  double m = 1;
  double beta = -schwarzschild_b(m);
  std::vector<double> rl;
  for (double r : {20.0, 50.0, 100.0, 200.0, 500.0, 1000.0}) rl.push_back(r / std::cbrt(12 * m));
  auto seed = schwarzschild_seed(m, 10);
  auto samples = extract_profile(seed, rl);
  for (const auto& s : samples) {
    double want = std::log(s.rho * s.rho - beta * s.rho);
    CHECK_THAT(s.u, WithinAbs(want, 1e-4));
    CHECK_THAT(s.V, WithinRel(std::pow(12 * m, 2.0 / 3.0) * s.rho / (s.rho - beta), 1e-4));
  }
  double k0 = fit_k0(samples);
  CHECK(k0 > 0);
  CHECK_THAT(k0, WithinRel(std::cbrt(12 * m), 1e-2));
  auto prof = alf_profile_residual(samples, k0);
  CHECK(std::isfinite(prof.residual));
  CHECK(prof.residual < 10);
}

TEST_CASE("compactification chart", "[toda]") {
  Expr xi = Expr::variable(0);
  Box box{{1e-3, -1, -1, 0}, {0.5, 1, 1, 2 * std::numbers::pi}};
  double eps = 0.5;
  auto alf = ansatz_from_xi("alf", pow(xi, -2), round_sphere_potential() + log(pow(xi, 2)), {}, box);
  auto [ch, rep] = compactification_chart(alf, eps, 9, 1.0 / xi - 1.0 / eps);
  CHECK(rep.w_at_epsilon < 1e-14);
  CHECK(rep.monotone);
  CHECK(rep.w_smallest < std::exp(-200));
  CHECK(rep.zeta_defect < 1e-10);
  CHECK(rep.j_zeta_defect < 1e-8);
  CHECK(rep.jx_variation < 1e-6);
  CHECK(rep.jx_boundary_defect < 1e-8);
  CHECK(ch.phi_shift.is_const(0));

  // eta = dt + df with f = xi^2 x + xi y^2: a pure gauge change with Z != 0.
  Expr x = Expr::variable(kX), y = Expr::variable(kY);
  Connection g{pow(xi, 2), 2.0 * xi * y, 2.0 * xi * x + pow(y, 2)};
  auto gauged = ansatz_from_xi("alf-gauge", pow(xi, -2), round_sphere_potential() + log(pow(xi, 2)), g, box);
  auto [gch, grep] = compactification_chart(gauged, eps);
  CHECK(grep.j_zeta_defect < 1e-8);
  CHECK(grep.jx_variation < 1e-6);
  CHECK(grep.jx_boundary_defect < 1e-8);
  Point q{0.2, 0.3, -0.4, 0};
  CHECK_THAT(gch.phi_shift_value(q), WithinAbs((eps * eps - 0.04) * 0.3 + (eps - 0.2) * 0.16, 1e-12));

  auto neg = ansatz_from_xi("neg", -pow(xi, -2), round_sphere_potential(), {}, box);
  CHECK_THROWS_AS(compactification_chart(neg, eps), IntegrationError);
}

TEST_CASE("extension density", "[toda]") {
  for (double rho : {1.0, 2.0, 4.0, 8.0, 16.0}) {
    double x = 0.3, y = -0.7, vp = round_sphere_potential(x, y);
    CHECK_THAT(extension_density(1 / rho, vp - 2 * std::log(rho)), WithinRel(4 * std::exp(-vp), 1e-14));
    CHECK_THAT(extension_density(1 / rho, vp - 2 * std::log(rho) + 0.5),
               WithinRel(std::exp(-0.5) * 4 * std::exp(-vp), 1e-14));
  }
  auto d = ansatz_from_toda(toda_field("sphere_profile", {{"b", schwarzschild_b(1.0)}}));
  double x = 0.3, y = -0.7, prev = INFINITY, lim = 4 * std::exp(-round_sphere_potential(x, y));
  for (double rho : {10.0, 100.0, 1e3, 1e4}) {
    double dev = std::abs(extension_density(d, {rho, x, y, 0}) - lim);
    CHECK(dev < prev);
    prev = dev;
  }
  CHECK(prev / lim < 1e-3);
}
