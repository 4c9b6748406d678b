#pragma once

#include <boost/rational.hpp>
#include <algorithm>
#include <array>
#include <cstdint>
#include <numeric>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace instanton {

using Rational = boost::rational<std::int64_t>;
using Ray = std::array<std::int64_t, 2>;
using RationalMatrix = std::vector<std::vector<Rational>>;

inline std::int64_t det(const Ray& a, const Ray& b) { return a[0] * b[1] - a[1] * b[0]; }

inline std::string to_string(const Rational& q) {
  return q.denominator() == 1 ? std::to_string(q.numerator())
                              : std::to_string(q.numerator()) + "/" + std::to_string(q.denominator());
}

inline std::string to_string(const Ray& r) { return "(" + std::to_string(r[0]) + "," + std::to_string(r[1]) + ")"; }

/// Complete 2-dimensional fan, rays in counterclockwise order.
struct Fan2D {
  std::vector<Ray> rays;
  std::vector<std::string> labels;

  std::size_t size() const { return rays.size(); }
  std::size_t next(std::size_t i) const { return (i + 1) % rays.size(); }
  std::size_t prev(std::size_t i) const { return (i + rays.size() - 1) % rays.size(); }
  bool smooth() const {
    for (std::size_t i = 0; i < size(); ++i)
      if (det(rays[i], rays[next(i)]) != 1) return false;
    return true;
  }
};

inline void validate(const Fan2D& f) {
  if (f.size() < 3) throw InvalidFan("a complete fan needs at least three rays");
  if (!f.labels.empty() && f.labels.size() != f.size()) throw InvalidFan("one label per ray");
  int crossings = 0;
  auto upper = [](const Ray& v) { return v[1] > 0 || (v[1] == 0 && v[0] > 0); };
  for (std::size_t i = 0; i < f.size(); ++i) {
    const Ray& v = f.rays[i];
    if (std::gcd(v[0], v[1]) != 1) throw InvalidFan("ray " + to_string(v) + " is not primitive");
    if (det(v, f.rays[f.next(i)]) <= 0)
      throw InvalidFan("rays " + to_string(v) + ", " + to_string(f.rays[f.next(i)]) + " are not in counterclockwise order");
    if (!upper(v) && upper(f.rays[f.next(i)])) ++crossings;
  }
  if (crossings != 1) throw InvalidFan("rays wind around the origin more than once");
}

inline Fan2D make_fan(std::vector<Ray> rays, std::vector<std::string> labels = {}) {
  Fan2D f{std::move(rays), std::move(labels)};
  validate(f);
  return f;
}

/// Parses "[(1,0),(0,1),(-1,-1)]"; brackets and parentheses may be round or square.
inline Fan2D parse_fan(const std::string& text) {
  static const std::regex pair_re(R"([\(\[]\s*(-?\d+)\s*,\s*(-?\d+)\s*[\)\]])");
  std::vector<Ray> rays;
  for (auto it = std::sregex_iterator(text.begin(), text.end(), pair_re); it != std::sregex_iterator(); ++it) {
    rays.push_back({std::stoll((*it)[1]), std::stoll((*it)[2])});
  }
  std::string leftover;
  for (char c : std::regex_replace(text, pair_re, "")) {
    if (c != ' ' && c != ',' && c != '[' && c != ']') leftover += c;
  }
  if (rays.empty() || !leftover.empty()) throw ParseError("cannot read fan '" + text + "'");
  return make_fan(std::move(rays));
}

/// D_i . D_{i+1} = 1 / det(v_i, v_{i+1}), D_i^2 = -det(v_{i-1}, v_{i+1}) / (det(v_{i-1}, v_i) det(v_i, v_{i+1})).
inline RationalMatrix intersection_matrix(const Fan2D& f) {
  validate(f);
  std::size_t r = f.size();
  RationalMatrix M(r, std::vector<Rational>(r, Rational(0)));
  for (std::size_t i = 0; i < r; ++i) {
    std::size_t p = f.prev(i), n = f.next(i);
    std::int64_t dn = det(f.rays[i], f.rays[n]), dp = det(f.rays[p], f.rays[i]);
    M[i][n] = M[n][i] = Rational(1, dn);
    M[i][i] = Rational(-det(f.rays[p], f.rays[n]), dp * dn);
  }
  return M;
}

struct ToricDivisor {
  std::vector<Rational> coeffs;
};

inline Rational intersect(const RationalMatrix& M, const ToricDivisor& a, const ToricDivisor& b) {
  Rational s(0);
  for (std::size_t i = 0; i < M.size(); ++i)
    for (std::size_t j = 0; j < M.size(); ++j) s += a.coeffs[i] * M[i][j] * b.coeffs[j];
  return s;
}

/// K = -sum D_j.
inline ToricDivisor canonical_divisor(const Fan2D& f) { return {std::vector<Rational>(f.size(), Rational(-1))}; }

inline ToricDivisor ray_divisor(const Fan2D& f, std::size_t i) {
  ToricDivisor d{std::vector<Rational>(f.size(), Rational(0))};
  d.coeffs.at(i) = 1;
  return d;
}

struct PairVerdict {
  Fan2D fan;
  std::size_t boundary_ray = 0;
  bool ample = false;
  RationalMatrix intersection_table;
  std::vector<Rational> degrees;  // -(K + D) . D_i
  std::vector<std::size_t> violated;
  std::string family;
  std::vector<int> params;
};

inline PairVerdict log_anticanonical_check(const Fan2D& f, std::size_t boundary) {
  validate(f);
  if (boundary >= f.size()) throw InvalidFan("boundary ray index out of range");
  PairVerdict v;
  v.fan = f;
  v.boundary_ray = boundary;
  v.intersection_table = intersection_matrix(f);
  ToricDivisor L{std::vector<Rational>(f.size(), Rational(1))};
  L.coeffs[boundary] = 0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    Rational d = intersect(v.intersection_table, L, ray_divisor(f, i));
    v.degrees.push_back(d);
    if (d <= Rational(0)) v.violated.push_back(i);
  }
  v.ample = v.violated.empty();
  return v;
}

/// Star subdivision of the smooth cone (v_i, v_{i+1}); the new ray sits at index i + 1.
inline Fan2D blowup(const Fan2D& f, std::size_t corner) {
  validate(f);
  if (corner >= f.size()) throw InvalidFan("corner index out of range");
  std::size_t n = f.next(corner);
  if (det(f.rays[corner], f.rays[n]) != 1)
    throw NonSmoothCorner("cone " + to_string(f.rays[corner]) + ", " + to_string(f.rays[n]) + " has determinant " +
                          std::to_string(det(f.rays[corner], f.rays[n])));
  Fan2D out = f;
  Ray e{f.rays[corner][0] + f.rays[n][0], f.rays[corner][1] + f.rays[n][1]};
  out.rays.insert(out.rays.begin() + static_cast<std::ptrdiff_t>(corner + 1), e);
  if (!out.labels.empty()) out.labels.insert(out.labels.begin() + static_cast<std::ptrdiff_t>(corner + 1), "E");
  return out;
}

inline Rational canonical_square(const Fan2D& f) {
  auto K = canonical_divisor(f);
  return intersect(intersection_matrix(f), K, K);
}

inline Fan2D projective_plane() { return make_fan({{1, 0}, {0, 1}, {-1, -1}}); }

/// H_k: the divisor of (0, 1) is C_infinity with square -k, (0, -1) is C_0 with square k.
inline Fan2D hirzebruch(int k) {
  if (k < 0) throw ParamOutOfRange("hirzebruch: k must be nonnegative");
  return make_fan({{1, 0}, {0, 1}, {-1, k}, {0, -1}});
}

inline Fan2D p1xp1() { return hirzebruch(0); }

namespace detail {
inline void check_mn(int m, int n) {
  if (!(0 < m && m < n)) throw ParamOutOfRange("fan parameters need 0 < m < n");
  if (std::gcd(m, n) != 1) throw ParamOutOfRange("(-n, -m) must be primitive: gcd(m, n) = 1");
}
}  // namespace detail

/// F_{m,n}: rays (1,0), (0,1), (-n,-m), (0,-1); D is index 2.
inline Fan2D fmn(int m, int n) {
  detail::check_mn(m, n);
  return make_fan({{1, 0}, {0, 1}, {-n, -m}, {0, -1}});
}

/// Bl_p F_{m,n}: (1,1) inserted between (1,0) and (0,1); D is index 3.
inline Fan2D bl_fmn(int m, int n) { return blowup(fmn(m, n), 0); }

/// Four rays (1,k), (0,1), (-n,-m), (0,-1); D is index 2.
inline Fan2D possible_four(int m, int n, int k) {
  detail::check_mn(m, n);
  if (k < 0) throw ParamOutOfRange("k must be nonnegative");
  return make_fan({{1, k}, {0, 1}, {-n, -m}, {0, -1}});
}

/// Five rays (0,-1), (1,k-1), (1,k), (0,1), (-n,-m); D is index 4.
inline Fan2D possible_five(int m, int n, int k) {
  detail::check_mn(m, n);
  if (k < 0) throw ParamOutOfRange("k must be nonnegative");
  return make_fan({{0, -1}, {1, k - 1}, {1, k}, {0, 1}, {-n, -m}});
}

inline Fan2D standard_fan(const std::string& kind, const std::vector<int>& params = {}) {
  auto need = [&](std::size_t c) {
    if (params.size() != c) throw ParamOutOfRange(kind + ": expected " + std::to_string(c) + " parameters");
  };
  if (kind == "projective_plane") return need(0), projective_plane();
  if (kind == "p1xp1") return need(0), p1xp1();
  if (kind == "hirzebruch") return need(1), hirzebruch(params[0]);
  if (kind == "fmn") return need(2), fmn(params[0], params[1]);
  if (kind == "bl_fmn") return need(2), bl_fmn(params[0], params[1]);
  throw ParamOutOfRange("unknown fan '" + kind + "'");
}

/// Lexicographically least (rays, boundary position) over GL(2,Z), rotations of the start
/// ray and reflection. Each start ray is sent to (1,0) and its successor to (p, d), 0 <= p < d.
inline std::pair<std::vector<Ray>, std::size_t> canonical_form(const Fan2D& f, std::size_t boundary) {
  validate(f);
  std::optional<std::pair<std::vector<Ray>, std::size_t>> best;
  for (int reflect = 0; reflect < 2; ++reflect) {
    std::vector<Ray> rays = f.rays;
    std::size_t b = boundary;
    if (reflect) {
      for (auto& v : rays) std::swap(v[0], v[1]);
      std::reverse(rays.begin(), rays.end());
      b = rays.size() - 1 - b;
    }
    std::size_t r = rays.size();
    for (std::size_t s = 0; s < r; ++s) {
      const Ray& a = rays[s];
      const Ray& c = rays[(s + 1) % r];
      // g = [[x, y], [-a1, a0]] with x a0 + y a1 = 1 sends a to (1, 0).
      std::int64_t x0 = 1, y0 = 0, x1 = 0, y1 = 1, r0 = a[0], r1 = a[1];
      while (r1 != 0) {
        std::int64_t q = r0 / r1;
        std::tie(r0, r1) = std::pair{r1, r0 - q * r1};
        std::tie(x0, x1) = std::pair{x1, x0 - q * x1};
        std::tie(y0, y1) = std::pair{y1, y0 - q * y1};
      }
      if (r0 < 0) x0 = -x0, y0 = -y0;
      auto apply = [&](const Ray& v, std::int64_t t) {
        Ray w{x0 * v[0] + y0 * v[1], -a[1] * v[0] + a[0] * v[1]};
        return Ray{w[0] + t * w[1], w[1]};
      };
      Ray cw = apply(c, 0);
      std::int64_t d = cw[1];
      std::int64_t p = ((cw[0] % d) + d) % d;
      std::int64_t t = (p - cw[0]) / d;
      std::vector<Ray> out;
      for (std::size_t i = 0; i < r; ++i) out.push_back(apply(rays[(s + i) % r], t));
      std::pair cand{out, (b + r - s) % r};
      if (!best || cand < *best) best = cand;
    }
  }
  return *best;
}

inline bool lattice_equivalent(const Fan2D& a, std::size_t ba, const Fan2D& b, std::size_t bb) {
  return canonical_form(a, ba) == canonical_form(b, bb);
}

/// Candidate pairs: P^2 with a line; Bl_p P^2 with the +1 curve, the exceptional curve and a
/// fibre; H_k with C_infinity and with C_0 (k = 0..max_k); the four- and five-ray fans over
/// 0 < m < n <= max_n, gcd(m, n) = 1, 0 <= k <= max_k, with D the ray (-n,-m).
inline std::vector<PairVerdict> classify_pairs(int max_n, int max_k) {
  if (max_n < 1 || max_k < 1) throw ParamOutOfRange("classify_pairs bounds must be at least 1");
  std::vector<PairVerdict> out;
  auto add = [&](const Fan2D& f, std::size_t b, std::string fam, std::vector<int> params) {
    auto v = log_anticanonical_check(f, b);
    v.family = std::move(fam);
    v.params = std::move(params);
    out.push_back(std::move(v));
  };
  add(projective_plane(), 0, "P2 line", {});
  Fan2D blp2 = hirzebruch(1);
  add(blp2, 3, "Bl_p P2 +1 curve", {});
  add(blp2, 1, "Bl_p P2 exceptional curve", {});
  add(blp2, 0, "Bl_p P2 fibre", {});
  for (int k = 0; k <= max_k; ++k) {
    add(hirzebruch(k), 1, "H_k C_infinity", {k});
    add(hirzebruch(k), 3, "H_k C_0", {k});
  }
  for (int n = 2; n <= max_n; ++n)
    for (int m = 1; m < n; ++m) {
      if (std::gcd(m, n) != 1) continue;
      for (int k = 0; k <= max_k; ++k) {
        add(possible_four(m, n, k), 2, "four-ray", {m, n, k});
        add(possible_five(m, n, k), 4, "five-ray", {m, n, k});
      }
    }
  return out;
}

struct ListedPair {
  std::string name;
  Fan2D fan;
  std::size_t boundary_ray;
};

/// The pairs named in the classification: (P^2, line), (Bl_p P^2, +1 curve),
/// (P^1 x P^1, 0 x P^1), (H_k, C_infinity) for 1 <= k <= max_k, and (H_{m,n}, D),
/// (Bl_p H_{m,n}, D) for 0 < m < n <= max_n.
inline std::vector<ListedPair> listed_pairs(int max_n, int max_k) {
  std::vector<ListedPair> out{{"P2", projective_plane(), 0}, {"Bl_p P2", hirzebruch(1), 3}, {"P1xP1", p1xp1(), 1}};
  for (int k = 1; k <= max_k; ++k) out.push_back({"H_" + std::to_string(k), hirzebruch(k), 1});
  for (int n = 2; n <= max_n; ++n)
    for (int m = 1; m < n; ++m) {
      if (std::gcd(m, n) != 1) continue;
      std::string mn = std::to_string(m) + "," + std::to_string(n);
      out.push_back({"H_{" + mn + "}", fmn(m, n), 2});
      out.push_back({"Bl_p H_{" + mn + "}", bl_fmn(m, n), 3});
    }
  return out;
}

struct ClassificationMatch {
  std::size_t ample = 0, listed = 0;
  std::vector<std::string> unexpected;  // ample but not listed
  std::vector<std::string> missing;     // listed but never ample
  bool exact() const { return unexpected.empty() && missing.empty(); }
};

/// Compares the ample verdicts with the listed pairs up to lattice equivalence.
inline ClassificationMatch match_classification(const std::vector<PairVerdict>& verdicts,
                                                const std::vector<ListedPair>& listed) {
  using Key = std::pair<std::vector<Ray>, std::size_t>;
  std::set<Key> lkeys, akeys;
  ClassificationMatch m;
  m.listed = listed.size();
  for (const auto& l : listed) lkeys.insert(canonical_form(l.fan, l.boundary_ray));
  for (const auto& v : verdicts) {
    if (!v.ample) continue;
    ++m.ample;
    Key k = canonical_form(v.fan, v.boundary_ray);
    akeys.insert(k);
    if (!lkeys.count(k)) {
      std::string s = v.family;
      for (int p : v.params) s += " " + std::to_string(p);
      m.unexpected.push_back(s);
    }
  }
  for (const auto& l : listed)
    if (!akeys.count(canonical_form(l.fan, l.boundary_ray))) m.missing.push_back(l.name);
  return m;
}

}  // namespace instanton
