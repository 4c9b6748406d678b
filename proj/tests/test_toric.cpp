#include <catch_amalgamated.hpp>

#include <numeric>

#include "instanton/toric.hpp"

using namespace instanton;

namespace {
std::size_t index_of(const Fan2D& f, Ray r) {
  for (std::size_t i = 0; i < f.size(); ++i)
    if (f.rays[i] == r) return i;
  FAIL("ray not found");
  return 0;
}
}  // namespace

TEST_CASE("fan validation", "[toric]") {
  CHECK_THROWS_AS(make_fan({{1, 0}, {0, 1}}), InvalidFan);
  CHECK_THROWS_AS(make_fan({{2, 0}, {0, 1}, {-1, -1}}), InvalidFan);
  CHECK_THROWS_AS(make_fan({{1, 0}, {-1, -1}, {0, 1}}), InvalidFan);
  CHECK_THROWS_AS(make_fan({{1, 0}, {0, 1}, {-1, 0}}), InvalidFan);
  CHECK_THROWS_AS(make_fan({{1, 0}, {0, 1}, {-1, -1}, {1, 0}, {0, 1}, {-1, -1}}), InvalidFan);
  CHECK_NOTHROW(projective_plane());
  CHECK_THROWS_AS(fmn(2, 4), ParamOutOfRange);
  CHECK_THROWS_AS(fmn(3, 2), ParamOutOfRange);
  CHECK_THROWS_AS(standard_fan("dodecahedron"), ParamOutOfRange);
}

TEST_CASE("intersection numbers", "[toric]") {
  for (int k = 0; k <= 5; ++k) {
    auto f = hirzebruch(k);
    auto M = intersection_matrix(f);
    CHECK(M[index_of(f, {0, 1})][index_of(f, {0, 1})] == Rational(-k));
    CHECK(M[index_of(f, {0, -1})][index_of(f, {0, -1})] == Rational(k));
    CHECK(M[0][0] == Rational(0));
    CHECK(canonical_square(f) == Rational(8));
  }
  CHECK(intersection_matrix(projective_plane())[0][0] == Rational(1));
  CHECK(intersection_matrix(projective_plane())[0][1] == Rational(1));
  for (int n = 2; n <= 6; ++n)
    for (int m = 1; m < n; ++m) {
      if (std::gcd(m, n) != 1) continue;
      auto f = fmn(m, n);
      auto M = intersection_matrix(f);
      std::size_t d = index_of(f, {-n, -m});
      CHECK(M[d][f.prev(d)] == Rational(1, n));
      CHECK(M[d][f.next(d)] == Rational(1, n));
      for (int k = 0; k <= 3; ++k) {
        auto g = possible_four(m, n, k);
        auto G = intersection_matrix(g);
        CHECK(G[index_of(g, {0, -1})][index_of(g, {0, -1})] == Rational(-m + n * k, n));
        CHECK(G[index_of(g, {0, 1})][index_of(g, {0, 1})] == Rational(m - n * k, n));
        for (std::size_t i = 0; i < 4; ++i)
          for (std::size_t j = 0; j < 4; ++j) CHECK(G[i][j] == G[j][i]);
      }
    }
}

TEST_CASE("log anticanonical ampleness", "[toric]") {
  for (std::size_t b = 0; b < 3; ++b) CHECK(log_anticanonical_check(projective_plane(), b).ample);
  for (int n = 2; n <= 6; ++n)
    for (int m = 1; m < n; ++m) {
      if (std::gcd(m, n) != 1) continue;
      for (int k = 0; k <= 3; ++k) {
        auto v = log_anticanonical_check(possible_four(m, n, k), 2);
        CHECK(v.ample == ((k - 1) * n < m && m < (k + 1) * n));
        CHECK(v.ample == v.violated.empty());
        auto w = log_anticanonical_check(possible_five(m, n, k), 4);
        CHECK(w.ample == ((k - 1) * n < m && m < k * n));
      }
      CHECK(log_anticanonical_check(fmn(m, n), 2).ample);
      CHECK(log_anticanonical_check(bl_fmn(m, n), 3).ample);
    }
  CHECK_FALSE(log_anticanonical_check(possible_four(1, 3, 2), 2).ample);
  // a -2 curve away from D
  auto chain = blowup(blowup(projective_plane(), 0), 0);
  auto v = log_anticanonical_check(chain, 3);
  CHECK_FALSE(v.ample);
  auto M = intersection_matrix(chain);
  bool minus_two_listed = false;
  for (auto i : v.violated) minus_two_listed |= M[i][i] == Rational(-2);
  CHECK(minus_two_listed);
  CHECK_THROWS_AS(log_anticanonical_check(projective_plane(), 3), InvalidFan);
}

TEST_CASE("blowups and lattice equivalence", "[toric]") {
  auto b = blowup(projective_plane(), 0);
  CHECK(b.rays[1] == Ray{1, 1});
  CHECK(canonical_square(b) == Rational(8));
  CHECK(lattice_equivalent(b, 1, hirzebruch(1), 1));
  auto bl = bl_fmn(1, 2);
  CHECK(bl.size() == 5);
  CHECK(bl.rays[1] == Ray{1, 1});
  CHECK_THROWS_AS(blowup(fmn(1, 2), 1), NonSmoothCorner);
  Fan2D f = hirzebruch(2);
  for (int i = 0; i < 4; ++i) {
    auto before = canonical_square(f);
    f = blowup(f, static_cast<std::size_t>(i));
    CHECK(canonical_square(f) == before - Rational(1));
    CHECK(canonical_square(f) == Rational(12 - static_cast<std::int64_t>(f.size())));
  }
  CHECK(lattice_equivalent(hirzebruch(0), 1, hirzebruch(0), 0));
  CHECK_FALSE(lattice_equivalent(hirzebruch(1), 1, hirzebruch(2), 1));
  for (int n = 2; n <= 6; ++n)
    for (int m = 1; m < n; ++m)
      if (std::gcd(m, n) == 1) {
        CHECK(lattice_equivalent(possible_four(m, n, 1), 2, fmn(n - m, n), 2));
        CHECK(lattice_equivalent(possible_five(m, n, 1), 4, bl_fmn(m, n), 3));
      }
}

TEST_CASE("classification of pairs", "[toric]") {
  auto verdicts = classify_pairs(6, 3);
  auto match = match_classification(verdicts, listed_pairs(6, 3));
  for (const auto& s : match.unexpected) UNSCOPED_INFO("unexpected " << s);
  for (const auto& s : match.missing) UNSCOPED_INFO("missing " << s);
  CHECK(match.exact());
  for (const auto& v : verdicts)
    if (v.family == "H_k C_infinity") CHECK(v.ample);
  CHECK_THROWS_AS(classify_pairs(0, 1), ParamOutOfRange);
}
