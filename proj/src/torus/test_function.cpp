#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/differentiation/autodiff.hpp>
#include <boost/math/quadrature/gauss.hpp>

#include "ntrace/torus/torus.hpp"

namespace ntrace::torus {

namespace {

constexpr double pi = std::numbers::pi;
constexpr unsigned kMaxDerivative = 10;

using Rule = boost::math::quadrature::gauss<double, 30>;

// exp(1 − 1/(1 − u²)) for |u| < 1, written for both doubles and autodiff variables.
template <class T>
T bump_profile(const T& u) {
  using std::exp;
  return exp(1 - 1 / (1 - u * u));
}

}  // namespace

AnalyticTestFunction AnalyticTestFunction::gaussian(double width, double center) {
  if (!(width > 0) || !std::isfinite(center)) throw InvalidModel("Gaussian width must be positive");
  AnalyticTestFunction f;
  f.kind_ = Kind::Gaussian;
  f.width_ = width;
  f.center_ = center;
  return f;
}

AnalyticTestFunction AnalyticTestFunction::bump(double radius) {
  if (!(radius > 0) || !std::isfinite(radius)) throw InvalidModel("bump radius must be positive");
  AnalyticTestFunction f;
  f.kind_ = Kind::Bump;
  f.radius_ = radius;
  return f;
}

std::string AnalyticTestFunction::describe() const {
  std::ostringstream out;
  out.precision(17);
  if (kind_ == Kind::Gaussian)
    out << "gaussian exp(-pi((x-c)/s)^2), s = " << width_ << ", c = " << center_;
  else
    out << "bump exp(1-1/(1-(x/B)^2)) on (-B,B), B = " << radius_;
  return out.str();
}

double AnalyticTestFunction::operator()(double x) const {
  if (kind_ == Kind::Gaussian) {
    const double u = (x - center_) / width_;
    return std::exp(-pi * u * u);
  }
  const double u = x / radius_;
  return std::abs(u) < 1 ? bump_profile(u) : 0.0;
}

AnalyticTestFunction::Transform AnalyticTestFunction::transform(C xi, Pairing pairing) const {
  if (pairing == Pairing::Minus) xi = -xi;
  if (kind_ == Kind::Gaussian) {
    // ∫ exp(−π((x−c)/s)²)·exp(2πiξx) dx = s·exp(−πs²ξ²)·exp(2πiξc), entire in ξ.
    return {width_ * std::exp(-pi * width_ * width_ * xi * xi + C(0, 2 * pi) * xi * center_), 0};
  }
  // Composite 30-point Gauss–Legendre with at least four panels per period of
  // exp(2πi·Re ξ·x). The integrand is C^∞ with compact support, so the rule
  // converges fast; the change from n to 2n panels is the error estimate.
  const double re = xi.real(), im = xi.imag();
  const auto base = static_cast<std::size_t>(std::ceil(8 * radius_ * std::abs(re))) + 8;
  auto part = [&](bool imaginary) {
    auto g = [&](double x) {
      const double w = (*this)(x) * std::exp(-2 * pi * im * x);
      return imaginary ? w * std::sin(2 * pi * re * x) : w * std::cos(2 * pi * re * x);
    };
    auto composite = [&](std::size_t panels) {
      const double width = 2 * radius_ / static_cast<double>(panels);
      double v = 0;
      for (std::size_t p = 0; p < panels; ++p) {
        const double a = -radius_ + width * static_cast<double>(p);
        v += Rule::integrate(g, a, a + width);
      }
      return v;
    };
    const double coarse = composite(base), fine = composite(2 * base);
    return std::make_pair(fine, std::abs(fine - coarse));
  };
  auto [vr, er] = part(false);
  auto [vi, ei] = part(true);
  // The estimate is relative to the integrand scale; keep an absolute floor.
  const double scale = 2 * radius_ * std::exp(2 * pi * std::abs(im) * radius_);
  return {C(vr, vi), er + ei + 4 * std::numeric_limits<double>::epsilon() * scale};
}

const std::vector<double>& AnalyticTestFunction::derivative_norms() const {
  if (kind_ != Kind::Bump) throw InvalidModel("derivative norms are only tabulated for bumps");
  if (!derivative_norms_.empty()) return derivative_norms_;
  using boost::math::differentiation::make_fvar;
  // One autodiff pass per node gives every order at once. Trapezoid sums on
  // two grids; the integrand and all its derivatives vanish at ±B, and the
  // difference between grids is added as the error allowance.
  auto trapezoid = [&](std::size_t nodes) {
    std::vector<double> sums(kMaxDerivative + 1, 0.0);
    const double h = 2.0 / static_cast<double>(nodes);
    for (std::size_t i = 1; i < nodes; ++i) {
      const double u = -1 + h * static_cast<double>(i);
      auto v = bump_profile(make_fvar<double, kMaxDerivative>(u));
      for (unsigned p = 0; p <= kMaxDerivative; ++p) {
        const double d = v.derivative(p);
        if (std::isfinite(d)) sums[p] += std::abs(d);
      }
    }
    // d^p/dx^p = B^{−p}·d^p/du^p and dx = B·du.
    for (unsigned p = 0; p <= kMaxDerivative; ++p) sums[p] *= h * std::pow(radius_, 1.0 - p);
    return sums;
  };
  const auto coarse = trapezoid(4000), fine = trapezoid(8000);
  for (unsigned p = 0; p <= kMaxDerivative; ++p)
    derivative_norms_.push_back(fine[p] + 2 * std::abs(fine[p] - coarse[p]) + 1e-12 * fine[p]);
  return derivative_norms_;
}

}  // namespace ntrace::torus
