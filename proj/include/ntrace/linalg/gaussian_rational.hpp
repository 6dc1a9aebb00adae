#pragma once

#include <complex>
#include <compare>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <gmpxx.h>

namespace ntrace::linalg {

/// Exact element p + q·i of Q(i) with arbitrary-precision rational parts.
class GaussRational {
 public:
  GaussRational() = default;
  GaussRational(long re) : re_(re), im_(0) {}  // NOLINT: implicit by design of scalar literals
  GaussRational(mpq_class re, mpq_class im = 0) : re_(std::move(re)), im_(std::move(im)) {
    re_.canonicalize();
    im_.canonicalize();
  }

  static GaussRational i() { return {0, 1}; }

  /// Parses "p/q+r/s i" and friends: "3", "-1/2", "i", "-2i", "1-i", "0.25+1/3*i".
  /// Decimal literals are read as exact decimal fractions.
  static GaussRational parse(std::string_view text);

  const mpq_class& real() const { return re_; }
  const mpq_class& imag() const { return im_; }

  bool is_zero() const { return sgn(re_) == 0 && sgn(im_) == 0; }
  bool is_real() const { return sgn(im_) == 0; }

  GaussRational conj() const { return {re_, -im_}; }
  mpq_class norm() const { return re_ * re_ + im_ * im_; }
  GaussRational inverse() const;

  std::complex<double> to_complex() const { return {re_.get_d(), im_.get_d()}; }

  /// Canonical text form, the inverse of `parse`.
  std::string str() const;

  GaussRational& operator+=(const GaussRational& o) {
    re_ += o.re_;
    im_ += o.im_;
    return *this;
  }
  GaussRational& operator-=(const GaussRational& o) {
    re_ -= o.re_;
    im_ -= o.im_;
    return *this;
  }
  GaussRational& operator*=(const GaussRational& o);
  GaussRational& operator/=(const GaussRational& o) { return *this *= o.inverse(); }

  friend GaussRational operator+(GaussRational a, const GaussRational& b) { return a += b; }
  friend GaussRational operator-(GaussRational a, const GaussRational& b) { return a -= b; }
  friend GaussRational operator*(GaussRational a, const GaussRational& b) { return a *= b; }
  friend GaussRational operator/(GaussRational a, const GaussRational& b) { return a /= b; }
  friend GaussRational operator-(const GaussRational& a) { return {-a.re_, -a.im_}; }

  friend bool operator==(const GaussRational& a, const GaussRational& b) {
    return a.re_ == b.re_ && a.im_ == b.im_;
  }

  /// Lexicographic (real, imag). Only used to order spectra deterministically.
  friend bool lex_less(const GaussRational& a, const GaussRational& b) {
    if (a.re_ != b.re_) return a.re_ < b.re_;
    return a.im_ < b.im_;
  }

 private:
  mpq_class re_{0};
  mpq_class im_{0};
};

std::ostream& operator<<(std::ostream& os, const GaussRational& z);

/// Best Gaussian-rational candidates near z, ordered by growing denominators:
/// products of the continued-fraction convergents of Re z and Im z whose error
/// is at most `tolerance`. Used to turn numerical eigenvalue guesses into
/// exact candidates that are then verified exactly.
std::vector<GaussRational> rational_candidates(std::complex<double> z, double tolerance,
                                               std::size_t max_per_part = 12);

}  // namespace ntrace::linalg
