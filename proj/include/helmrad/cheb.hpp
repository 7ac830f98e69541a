#pragma once

// Piecewise Chebyshev expansions on Chebyshev extrema grids.
//
// Nodes are the Chebyshev points of the second kind, listed in ascending
// order, so the first and last node of every piece coincide with the piece
// endpoints.  A piece with n coefficients is the degree n-1 interpolant of the
// values at its n nodes.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "helmrad/errors.hpp"

namespace helmrad {

/// Nodes per piece used by the adaptive routines.
inline constexpr std::size_t kChebNodes = 16;

/// Ascending Chebyshev extrema on [-1, 1].
std::span<const double> cheb_unit_nodes(std::size_t n = kChebNodes);

/// Chebyshev extrema mapped to [a, b], ascending.
std::vector<double> cheb_nodes(double a, double b, std::size_t n = kChebNodes);

/// Maps values at the ascending extrema grid to Chebyshev coefficients.
template <typename T>
std::vector<T> cheb_coeffs_from_values(std::span<const T> values) {
  const std::size_t n = values.size();
  if (n == 0) throw DomainError("cheb_coeffs_from_values: no values");
  if (n == 1) return {values[0]};
  const std::size_t m = n - 1;
  std::vector<T> c(n, T{});
  const double pi = 3.14159265358979323846;
  for (std::size_t k = 0; k < n; ++k) {
    T acc{};
    for (std::size_t j = 0; j < n; ++j) {
      // ascending node j is cos(pi (m - j) / m); T_k there is cos(k pi (m - j) / m)
      const std::size_t idx = (k * (m - j)) % (2 * m);
      double t = std::cos(pi * static_cast<double>(idx) / static_cast<double>(m));
      if (j == 0 || j == m) t *= 0.5;
      acc += values[j] * t;
    }
    c[k] = acc * (2.0 / static_cast<double>(m));
  }
  c[0] *= 0.5;
  c[m] *= 0.5;
  return c;
}

/// Clenshaw evaluation of sum c_k T_k(t) for t in [-1, 1].
template <typename T>
T clenshaw(std::span<const T> c, double t) {
  T b1{}, b2{};
  for (std::size_t k = c.size(); k-- > 1;) {
    T b0 = c[k] + 2.0 * t * b1 - b2;
    b2 = b1;
    b1 = b0;
  }
  return c[0] + t * b1 - b2;
}

template <typename T>
class BasicChebExpansion {
 public:
  BasicChebExpansion(double a, double b, std::vector<T> coeffs)
      : a_(a), b_(b), coeffs_(std::move(coeffs)) {
    if (!(b_ > a_)) throw DomainError("ChebExpansion: requires b > a");
    if (coeffs_.empty()) throw DomainError("ChebExpansion: empty coefficient list");
  }

  /// Builds the interpolant of `values` sampled at cheb_nodes(a, b, values.size()).
  static BasicChebExpansion from_values(double a, double b, std::span<const T> values) {
    return BasicChebExpansion(a, b, cheb_coeffs_from_values<T>(values));
  }

  static BasicChebExpansion fit(double a, double b, const std::function<T(double)>& f,
                                std::size_t n = kChebNodes) {
    std::vector<T> v;
    v.reserve(n);
    for (double x : cheb_nodes(a, b, n)) v.push_back(f(x));
    return from_values(a, b, v);
  }

  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }
  const std::vector<T>& coeffs() const noexcept { return coeffs_; }
  std::size_t size() const noexcept { return coeffs_.size(); }

  /// Evaluates without range checking; points outside [a, b] extrapolate.
  T operator()(double x) const {
    const double t = (2.0 * x - (a_ + b_)) / (b_ - a_);
    return clenshaw<T>(coeffs_, t);
  }

  std::vector<T> node_values() const {
    std::vector<T> v;
    v.reserve(coeffs_.size());
    for (double t : cheb_unit_nodes(coeffs_.size())) v.push_back(clenshaw<T>(coeffs_, t));
    return v;
  }

  BasicChebExpansion derivative() const {
    const std::size_t n = coeffs_.size();
    if (n == 1) return BasicChebExpansion(a_, b_, {T{}});
    std::vector<T> d(n - 1, T{});
    // d_{k-1} = d_{k+1} + 2 k c_k
    T dk1{}, dk2{};
    for (std::size_t k = n - 1; k >= 1; --k) {
      T dk = dk2 + 2.0 * static_cast<double>(k) * coeffs_[k];
      d[k - 1] = dk;
      dk2 = dk1;
      dk1 = dk;
    }
    d[0] *= 0.5;
    const double scale = 2.0 / (b_ - a_);
    for (auto& v : d) v *= scale;
    return BasicChebExpansion(a_, b_, std::move(d));
  }

  /// Antiderivative vanishing at a; one degree higher than *this.
  BasicChebExpansion antiderivative() const {
    const std::size_t n = coeffs_.size();
    std::vector<T> c(coeffs_);
    c.resize(n + 2, T{});
    std::vector<T> out(n + 1, T{});
    for (std::size_t k = 1; k <= n; ++k) {
      const T prev = (k == 1) ? 2.0 * c[0] : c[k - 1];
      out[k] = (prev - c[k + 1]) / (2.0 * static_cast<double>(k));
    }
    T at_left{};
    for (std::size_t k = 1; k <= n; ++k) at_left += (k % 2 == 0 ? 1.0 : -1.0) * out[k];
    out[0] = -at_left;
    const double scale = 0.5 * (b_ - a_);
    for (auto& v : out) v *= scale;
    return BasicChebExpansion(a_, b_, std::move(out));
  }

  /// max |c_k| over the last `count` coefficients.
  double tail_magnitude(std::size_t count = 3) const {
    double m = 0.0;
    const std::size_t n = coeffs_.size();
    for (std::size_t k = (n > count ? n - count : 0); k < n; ++k) m = std::max(m, std::abs(coeffs_[k]));
    return m;
  }

  double max_coeff_magnitude() const {
    double m = 0.0;
    for (const auto& v : coeffs_) m = std::max(m, std::abs(v));
    return m;
  }

  BasicChebExpansion& operator+=(T shift) {
    coeffs_[0] += shift;
    return *this;
  }

 private:
  double a_;
  double b_;
  std::vector<T> coeffs_;
};

template <typename T>
class BasicPiecewiseCheb {
 public:
  BasicPiecewiseCheb() = default;

  explicit BasicPiecewiseCheb(std::vector<BasicChebExpansion<T>> pieces) : pieces_(std::move(pieces)) {
    if (pieces_.empty()) throw DomainError("PiecewiseCheb: no pieces");
    for (std::size_t i = 1; i < pieces_.size(); ++i) {
      if (pieces_[i].a() != pieces_[i - 1].b())
        throw DomainError("PiecewiseCheb: pieces do not tile the interval");
    }
  }

  double a() const { return pieces_.front().a(); }
  double b() const { return pieces_.back().b(); }
  bool empty() const noexcept { return pieces_.empty(); }
  std::size_t size() const noexcept { return pieces_.size(); }
  const std::vector<BasicChebExpansion<T>>& pieces() const noexcept { return pieces_; }
  const BasicChebExpansion<T>& piece(std::size_t i) const { return pieces_.at(i); }

  std::vector<double> breakpoints() const {
    std::vector<double> br;
    br.reserve(pieces_.size() + 1);
    br.push_back(a());
    for (const auto& p : pieces_) br.push_back(p.b());
    return br;
  }

  /// Index of the piece containing x; a shared breakpoint belongs to the left piece.
  std::size_t locate(double x) const {
    if (pieces_.empty() || !(x >= a() && x <= b()))
      throw DomainError("PiecewiseCheb: evaluation point " + std::to_string(x) + " outside [" +
                        std::to_string(pieces_.empty() ? 0.0 : a()) + ", " +
                        std::to_string(pieces_.empty() ? 0.0 : b()) + "]");
    auto it = std::lower_bound(pieces_.begin(), pieces_.end(), x,
                               [](const BasicChebExpansion<T>& p, double v) { return p.b() < v; });
    if (it == pieces_.end()) --it;
    return static_cast<std::size_t>(it - pieces_.begin());
  }

  T operator()(double x) const { return pieces_[locate(x)](x); }

  BasicPiecewiseCheb derivative() const {
    std::vector<BasicChebExpansion<T>> d;
    d.reserve(pieces_.size());
    for (const auto& p : pieces_) d.push_back(p.derivative());
    return BasicPiecewiseCheb(std::move(d));
  }

 private:
  std::vector<BasicChebExpansion<T>> pieces_;
};

using ChebExpansion = BasicChebExpansion<double>;
using PiecewiseCheb = BasicPiecewiseCheb<double>;
using ComplexChebExpansion = BasicChebExpansion<std::complex<double>>;
using ComplexPiecewiseCheb = BasicPiecewiseCheb<std::complex<double>>;

/// Value of f at x.  Throws DomainError outside [f.a(), f.b()].
template <typename T>
T cheb_eval(const BasicPiecewiseCheb<T>& f, double x) {
  return f(x);
}

template <typename T>
BasicChebExpansion<T> cheb_diff(const BasicChebExpansion<T>& f) {
  return f.derivative();
}

/// Continuous antiderivative F of f with F(anchor) = anchor_value.
template <typename T>
BasicPiecewiseCheb<T> cheb_integrate(const BasicPiecewiseCheb<T>& f, double anchor, T anchor_value) {
  if (!(anchor >= f.a() && anchor <= f.b()))
    throw DomainError("cheb_integrate: anchor outside the interval");
  std::vector<BasicChebExpansion<T>> pieces;
  pieces.reserve(f.size());
  T running{};
  for (const auto& p : f.pieces()) {
    auto F = p.antiderivative();
    F += running;
    running = F(p.b());
    pieces.push_back(std::move(F));
  }
  BasicPiecewiseCheb<T> out(std::move(pieces));
  const T shift = anchor_value - out(anchor);
  std::vector<BasicChebExpansion<T>> shifted(out.pieces());
  for (auto& p : shifted) p += shift;
  return BasicPiecewiseCheb<T>(std::move(shifted));
}

struct AdaptiveFitOptions {
  double tol = 1e-12;
  int max_depth = 50;
  std::size_t nodes = kChebNodes;
};

/// Recursive bisection until every piece's trailing coefficients fall below
/// tol relative to that piece's largest coefficient.
PiecewiseCheb adaptive_fit(const std::function<double(double)>& f, double a, double b,
                           const AdaptiveFitOptions& opts = {});

inline PiecewiseCheb adaptive_fit(const std::function<double(double)>& f, double a, double b,
                                  double tol) {
  AdaptiveFitOptions opts;
  opts.tol = tol;
  return adaptive_fit(f, a, b, opts);
}

/// Real roots of a single expansion in [a, b] (colleague-matrix eigenvalues
/// refined by Newton), ascending.
std::vector<double> cheb_roots(const ChebExpansion& f);

/// All real roots on [f.a(), f.b()], ascending, duplicates merged.
std::vector<double> cheb_roots(const PiecewiseCheb& f);

}  // namespace helmrad
