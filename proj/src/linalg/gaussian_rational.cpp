#include "ntrace/linalg/gaussian_rational.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <ostream>

#include "ntrace/errors.hpp"

namespace ntrace::linalg {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// "12", "-3/4", "0.125"; no sign handling here.
mpq_class parse_unsigned_number(std::string_view s, std::string_view whole) {
  auto fail = [&] { throw ParseError("malformed number '" + std::string(s) + "' in scalar '" + std::string(whole) + "'"); };
  if (s.empty()) fail();
  auto digits = [](std::string_view d) {
    return !d.empty() && std::all_of(d.begin(), d.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
  };
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    auto num = s.substr(0, slash);
    auto den = s.substr(slash + 1);
    if (!digits(num) || !digits(den)) fail();
    mpz_class d{std::string(den), 10};
    if (d == 0) throw ParseError("zero denominator in scalar '" + std::string(whole) + "'");
    mpq_class q{mpz_class{std::string(num), 10}, d};
    q.canonicalize();
    return q;
  }
  if (auto dot = s.find('.'); dot != std::string_view::npos) {
    auto ip = s.substr(0, dot);
    auto fp = s.substr(dot + 1);
    if ((!ip.empty() && !digits(ip)) || (!fp.empty() && !digits(fp)) || (ip.empty() && fp.empty())) fail();
    mpz_class scale = 1;
    for (std::size_t k = 0; k < fp.size(); ++k) scale *= 10;
    mpz_class num(std::string(ip.empty() ? "0" : ip) + std::string(fp), 10);
    mpq_class q(num, scale);
    q.canonicalize();
    return q;
  }
  if (!digits(s)) fail();
  return mpq_class(mpz_class(std::string(s), 10));
}

std::vector<mpq_class> convergents(double x, double tolerance, std::size_t max_terms) {
  std::vector<mpq_class> out;
  if (!std::isfinite(x)) return out;
  if (std::abs(x) <= tolerance) out.emplace_back(0);
  // h_{k} = a_k h_{k-1} + h_{k-2}
  mpz_class h_prev = 1, h_prev2 = 0, k_prev = 0, k_prev2 = 1;
  double r = x;
  for (std::size_t n = 0; n < max_terms; ++n) {
    double a = std::floor(r);
    if (std::abs(a) > 1e15) break;
    mpz_class az(a);
    mpz_class h = az * h_prev + h_prev2;
    mpz_class k = az * k_prev + k_prev2;
    h_prev2 = h_prev;
    h_prev = h;
    k_prev2 = k_prev;
    k_prev = k;
    mpq_class q(h, k);
    q.canonicalize();
    if (std::abs(q.get_d() - x) <= tolerance &&
        std::find(out.begin(), out.end(), q) == out.end())
      out.push_back(q);
    double frac = r - a;
    if (std::abs(frac) < 1e-15 || k > mpz_class(1000000000)) break;
    r = 1.0 / frac;
  }
  return out;
}

}  // namespace

GaussRational GaussRational::parse(std::string_view text) {
  const std::string_view whole = text;
  std::string compact;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) compact.push_back(c);
  if (compact.empty()) throw ParseError("empty scalar");

  // Split into signed terms at top-level '+'/'-'.
  std::vector<std::string> terms;
  std::string cur;
  for (std::size_t k = 0; k < compact.size(); ++k) {
    char c = compact[k];
    if ((c == '+' || c == '-') && !cur.empty() && cur != "+" && cur != "-") {
      terms.push_back(cur);
      cur.clear();
    }
    cur.push_back(c);
  }
  terms.push_back(cur);

  mpq_class re = 0, im = 0;
  for (const auto& term_str : terms) {
    std::string_view term = term_str;
    bool negative = false;
    if (!term.empty() && (term.front() == '+' || term.front() == '-')) {
      negative = term.front() == '-';
      term.remove_prefix(1);
    }
    if (term.empty()) throw ParseError("dangling sign in scalar '" + std::string(whole) + "'");
    bool imaginary = false;
    if (term.back() == 'i') {
      imaginary = true;
      term.remove_suffix(1);
      if (!term.empty() && term.back() == '*') term.remove_suffix(1);
    } else if (term.front() == 'i') {
      imaginary = true;
      term.remove_prefix(1);
      if (!term.empty() && term.front() == '*') term.remove_prefix(1);
    }
    mpq_class value = term.empty() ? mpq_class(imaginary ? 1 : 0) : parse_unsigned_number(trim(term), whole);
    if (term.empty() && !imaginary) throw ParseError("malformed scalar '" + std::string(whole) + "'");
    if (negative) value = -value;
    (imaginary ? im : re) += value;
  }
  return {re, im};
}

GaussRational& GaussRational::operator*=(const GaussRational& o) {
  mpq_class r = re_ * o.re_ - im_ * o.im_;
  mpq_class m = re_ * o.im_ + im_ * o.re_;
  re_ = std::move(r);
  im_ = std::move(m);
  return *this;
}

GaussRational GaussRational::inverse() const {
  if (is_zero()) throw SingularMatrix("division by exact zero");
  mpq_class n = norm();
  return {re_ / n, -im_ / n};
}

std::string GaussRational::str() const {
  if (sgn(im_) == 0) return re_.get_str();
  std::string imag_part;
  if (im_ == 1)
    imag_part = "i";
  else if (im_ == -1)
    imag_part = "-i";
  else
    imag_part = im_.get_str() + "i";
  if (sgn(re_) == 0) return imag_part;
  return re_.get_str() + (sgn(im_) > 0 ? "+" : "") + imag_part;
}

std::ostream& operator<<(std::ostream& os, const GaussRational& z) { return os << z.str(); }

std::vector<GaussRational> rational_candidates(std::complex<double> z, double tolerance,
                                               std::size_t max_per_part) {
  auto res = convergents(z.real(), tolerance, max_per_part);
  auto ims = convergents(z.imag(), tolerance, max_per_part);
  std::vector<std::pair<mpz_class, GaussRational>> scored;
  for (const auto& a : res)
    for (const auto& b : ims) scored.emplace_back(a.get_den() * b.get_den(), GaussRational(a, b));
  std::stable_sort(scored.begin(), scored.end(),
                   [](const auto& x, const auto& y) { return x.first < y.first; });
  std::vector<GaussRational> out;
  out.reserve(scored.size());
  for (auto& s : scored) out.push_back(std::move(s.second));
  return out;
}

}  // namespace ntrace::linalg
