#pragma once

#include <cmath>
#include <complex>
#include <concepts>
#include <string_view>

#include "ntrace/linalg/gaussian_rational.hpp"

namespace ntrace::linalg {

/// Exact backend: Q(i) with decidable equality.
struct ExactField {
  using Scalar = GaussRational;
  static constexpr std::string_view name = "exact";
  static constexpr bool is_exact = true;

  bool is_zero(const Scalar& s) const { return s.is_zero(); }
  bool equal(const Scalar& a, const Scalar& b) const { return a == b; }
  Scalar from_int(long v) const { return Scalar(v); }
  Scalar from_exact(const GaussRational& q) const { return q; }
  std::complex<double> to_complex(const Scalar& s) const { return s.to_complex(); }
};

/// Approximate backend: complex doubles with one ambient tolerance.
/// Every zero/equality decision in the algorithms goes through `eps`.
struct ApproxField {
  using Scalar = std::complex<double>;
  static constexpr std::string_view name = "approx";
  static constexpr bool is_exact = false;

  double eps = 1e-10;

  bool is_zero(const Scalar& s) const { return std::abs(s) <= eps; }
  /// Relative for large magnitudes, absolute near zero.
  bool equal(const Scalar& a, const Scalar& b) const {
    return std::abs(a - b) <= eps * std::max(1.0, std::max(std::abs(a), std::abs(b)));
  }
  Scalar from_int(long v) const { return Scalar(static_cast<double>(v), 0.0); }
  Scalar from_exact(const GaussRational& q) const { return q.to_complex(); }
  std::complex<double> to_complex(const Scalar& s) const { return s; }
};

template <class F>
concept Field = requires(const F& f, const typename F::Scalar& s) {
  typename F::Scalar;
  { f.is_zero(s) } -> std::convertible_to<bool>;
  { f.equal(s, s) } -> std::convertible_to<bool>;
  { f.from_int(1L) } -> std::same_as<typename F::Scalar>;
  { f.to_complex(s) } -> std::same_as<std::complex<double>>;
  { F::is_exact } -> std::convertible_to<bool>;
};

inline std::string scalar_text(const GaussRational& s) { return s.str(); }
std::string scalar_text(const std::complex<double>& s);

}  // namespace ntrace::linalg
