#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <type_traits>
#include <vector>

namespace instanton {

using std::abs;
using std::cbrt;
using std::cos;
using std::exp;
using std::log;
using std::pow;
using std::sin;
using std::sqrt;

constexpr std::size_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::size_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<std::size_t>(n - k + i) / static_cast<std::size_t>(i);
  return r;
}

template <int Dim>
using MultiIndex = std::array<int, Dim>;

template <int Dim>
constexpr int degree(const MultiIndex<Dim>& a) {
  int d = 0;
  for (int v : a) d += v;
  return d;
}

/// Monomial layout of a truncated jet: graded, then descending lexicographic.
/// The layout of order N-1 is a prefix of the layout of order N.
template <int Dim, int Order>
class JetLayout {
 public:
  static constexpr std::size_t size = binomial(Order + Dim, Dim);

  struct Product {
    std::uint16_t lhs, rhs, out;
  };
  struct Shift {
    std::uint16_t from;
    double factor;
  };

  static const JetLayout& get() {
    static const JetLayout layout;
    return layout;
  }

  const MultiIndex<Dim>& index(std::size_t k) const { return indices_[k]; }

  std::size_t position(const MultiIndex<Dim>& a) const {
    auto it = lookup_.find(a);
    return it == lookup_.end() ? size : it->second;
  }

  const std::vector<Product>& products() const { return products_; }

  // Coefficient k of d/dx_v lands at shifts(v)[k] of the order-N layout.
  const std::vector<Shift>& shifts(int v) const { return shifts_[v]; }

 private:
  JetLayout() {
    for (int d = 0; d <= Order; ++d) append_degree(d);
    for (std::size_t k = 0; k < indices_.size(); ++k) lookup_[indices_[k]] = k;
    for (std::size_t i = 0; i < size; ++i) {
      for (std::size_t j = 0; j < size; ++j) {
        if (degree<Dim>(indices_[i]) + degree<Dim>(indices_[j]) > Order) continue;
        MultiIndex<Dim> s{};
        for (int v = 0; v < Dim; ++v) s[v] = indices_[i][v] + indices_[j][v];
        products_.push_back({static_cast<std::uint16_t>(i), static_cast<std::uint16_t>(j),
                             static_cast<std::uint16_t>(lookup_.at(s))});
      }
    }
    for (int v = 0; v < Dim; ++v) {
      for (std::size_t k = 0; k < size; ++k) {
        if (degree<Dim>(indices_[k]) >= Order) break;
        MultiIndex<Dim> s = indices_[k];
        s[v] += 1;
        shifts_[v].push_back({static_cast<std::uint16_t>(lookup_.at(s)), static_cast<double>(s[v])});
      }
    }
  }

  void append_degree(int d) {
    MultiIndex<Dim> a{};
    fill(a, 0, d);
  }

  void fill(MultiIndex<Dim>& a, int v, int remaining) {
    if (v == Dim - 1) {
      a[v] = remaining;
      indices_.push_back(a);
      return;
    }
    for (int k = remaining; k >= 0; --k) {
      a[v] = k;
      fill(a, v + 1, remaining - k);
    }
  }

  std::vector<MultiIndex<Dim>> indices_;
  std::map<MultiIndex<Dim>, std::size_t> lookup_;
  std::vector<Product> products_;
  std::array<std::vector<Shift>, Dim> shifts_;
};

/// Truncated multivariate Taylor polynomial. Coefficients are Taylor
/// coefficients, partial derivatives divided by the multi-index factorial.
template <int Dim, int Order>
struct Jet {
  using Layout = JetLayout<Dim, Order>;
  static constexpr int dim = Dim;
  static constexpr int order = Order;
  static constexpr std::size_t size = Layout::size;

  std::array<double, size> c{};

  Jet() = default;
  Jet(double v) { c[0] = v; }  // NOLINT

  static Jet variable(int i, double v) {
    Jet r(v);
    if constexpr (Order > 0) {
      MultiIndex<Dim> a{};
      a[i] = 1;
      r.c[Layout::get().position(a)] = 1.0;
    }
    return r;
  }

  double value() const { return c[0]; }

  double coefficient(const MultiIndex<Dim>& a) const {
    std::size_t k = Layout::get().position(a);
    return k < size ? c[k] : 0.0;
  }

  double partial(const MultiIndex<Dim>& a) const {
    double f = 1;
    for (int v : a)
      for (int k = 2; k <= v; ++k) f *= k;
    return coefficient(a) * f;
  }

  Jet& operator+=(const Jet& o) {
    for (std::size_t k = 0; k < size; ++k) c[k] += o.c[k];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    for (std::size_t k = 0; k < size; ++k) c[k] -= o.c[k];
    return *this;
  }
  Jet& operator*=(double s) {
    for (double& v : c) v *= s;
    return *this;
  }
  Jet& operator*=(const Jet& o) { return *this = *this * o; }
  Jet& operator/=(const Jet& o) { return *this = *this / o; }

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator-(Jet a) {
    for (double& v : a.c) v = -v;
    return a;
  }
  friend Jet operator+(Jet a, double s) {
    a.c[0] += s;
    return a;
  }
  friend Jet operator+(double s, Jet a) { return a + s; }
  friend Jet operator-(Jet a, double s) {
    a.c[0] -= s;
    return a;
  }
  friend Jet operator-(double s, const Jet& a) { return -a + s; }
  friend Jet operator*(Jet a, double s) { return a *= s; }
  friend Jet operator*(double s, Jet a) { return a *= s; }
  friend Jet operator/(Jet a, double s) { return a *= 1.0 / s; }

  friend Jet operator*(const Jet& a, const Jet& b) {
    Jet r;
    r.c[0] = 0.0;
    for (const auto& t : Layout::get().products()) r.c[t.out] += a.c[t.lhs] * b.c[t.rhs];
    return r;
  }
  friend Jet operator/(const Jet& a, const Jet& b) { return a * reciprocal(b); }
  friend Jet operator/(double s, const Jet& b) { return reciprocal(b) * s; }

  friend bool operator<(const Jet& a, const Jet& b) { return a.value() < b.value(); }
  friend bool operator>(const Jet& a, const Jet& b) { return a.value() > b.value(); }
};

/// f(a) given d[k] = f^(k)(a0) / k!, evaluated by Horner in the nilpotent part.
template <int D, int N>
Jet<D, N> compose(const Jet<D, N>& a, const std::array<double, N + 1>& d) {
  Jet<D, N> t = a;
  t.c[0] = 0.0;
  Jet<D, N> r(d[N]);
  for (int k = N - 1; k >= 0; --k) {
    r = r * t;
    r.c[0] += d[k];
  }
  return r;
}

template <int D, int N>
Jet<D, N> reciprocal(const Jet<D, N>& a) {
  std::array<double, N + 1> d{};
  double x = a.value(), p = 1.0 / x;
  for (int k = 0; k <= N; ++k) {
    d[k] = (k % 2 ? -p : p);
    p /= x;
  }
  return compose(a, d);
}

template <int D, int N>
Jet<D, N> exp(const Jet<D, N>& a) {
  std::array<double, N + 1> d{};
  double e = std::exp(a.value()), f = 1.0;
  for (int k = 0; k <= N; ++k) {
    d[k] = e / f;
    f *= k + 1;
  }
  return compose(a, d);
}

template <int D, int N>
Jet<D, N> log(const Jet<D, N>& a) {
  std::array<double, N + 1> d{};
  double x = a.value();
  d[0] = std::log(x);
  double p = 1.0 / x;
  for (int k = 1; k <= N; ++k) {
    d[k] = (k % 2 ? p : -p) / k;
    p /= x;
  }
  return compose(a, d);
}

template <int D, int N>
Jet<D, N> pow(const Jet<D, N>& a, double e) {
  std::array<double, N + 1> d{};
  double x = a.value(), coef = 1.0;
  for (int k = 0; k <= N; ++k) {
    d[k] = coef * std::pow(x, e - k);
    coef *= (e - k) / (k + 1);
  }
  return compose(a, d);
}

template <int D, int N>
Jet<D, N> sqrt(const Jet<D, N>& a) {
  return pow(a, 0.5);
}

/// Real cube root, valid for negative arguments.
template <int D, int N>
Jet<D, N> cbrt(const Jet<D, N>& a) {
  std::array<double, N + 1> d{};
  double x = a.value(), r = std::cbrt(x), coef = 1.0, p = 1.0;
  for (int k = 0; k <= N; ++k) {
    d[k] = coef * r * p;
    coef *= (1.0 / 3.0 - k) / (k + 1);
    p /= x;
  }
  return compose(a, d);
}

template <int D, int N>
Jet<D, N> sin(const Jet<D, N>& a) {
  std::array<double, N + 1> d{};
  double s = std::sin(a.value()), c = std::cos(a.value()), f = 1.0;
  const double cyc[4] = {s, c, -s, -c};
  for (int k = 0; k <= N; ++k) {
    d[k] = cyc[k % 4] / f;
    f *= k + 1;
  }
  return compose(a, d);
}

template <int D, int N>
Jet<D, N> cos(const Jet<D, N>& a) {
  std::array<double, N + 1> d{};
  double s = std::sin(a.value()), c = std::cos(a.value()), f = 1.0;
  const double cyc[4] = {c, -s, -c, s};
  for (int k = 0; k <= N; ++k) {
    d[k] = cyc[k % 4] / f;
    f *= k + 1;
  }
  return compose(a, d);
}

template <int D, int N>
Jet<D, N> abs(const Jet<D, N>& a) {
  return a.value() < 0 ? -a : a;
}

/// d/dx_v, one order lower.
template <int D, int N>
Jet<D, N - 1> derivative(const Jet<D, N>& a, int v) {
  static_assert(N >= 1);
  Jet<D, N - 1> r;
  const auto& sh = JetLayout<D, N>::get().shifts(v);
  for (std::size_t k = 0; k < Jet<D, N - 1>::size; ++k) r.c[k] = a.c[sh[k].from] * sh[k].factor;
  return r;
}

template <int M, int D, int N>
Jet<D, M> truncate(const Jet<D, N>& a) {
  static_assert(M <= N);
  Jet<D, M> r;
  for (std::size_t k = 0; k < Jet<D, M>::size; ++k) r.c[k] = a.c[k];
  return r;
}

template <class T>
struct is_jet : std::false_type {};
template <int D, int N>
struct is_jet<Jet<D, N>> : std::true_type {};

inline double value_of(double x) { return x; }
template <int D, int N>
double value_of(const Jet<D, N>& x) {
  return x.value();
}

/// Four-variable jet of order N, collapsing to a plain double at order zero.
template <int N>
using Scalar = std::conditional_t<N == 0, double, Jet<4, N>>;

template <int M, int N>
Scalar<M> lower(const Jet<4, N>& a) {
  if constexpr (M == 0)
    return a.value();
  else
    return truncate<M>(a);
}

}  // namespace instanton
