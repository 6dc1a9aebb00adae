#include <algorithm>
#include <cmath>
#include <numbers>
#include <limits>
#include <optional>

#include "ntrace/linalg/dense.hpp"
#include "ntrace/torus/torus.hpp"

namespace ntrace::torus {

namespace {

const linalg::ApproxField af;
constexpr double two_pi = 2 * std::numbers::pi;
const C two_pi_i(0, two_pi);

C theta_of(C a) {
  double arg = std::arg(a);
  if (std::abs(arg) < 1e-13) arg = 0;  // a on the positive axis up to rounding
  if (arg < 0) arg += two_pi;
  return {arg / two_pi, -std::log(std::abs(a)) / two_pi};
}

// Finite exponential series of a nilpotent matrix.
ApproxMatrix exp_nilpotent(const ApproxMatrix& n) {
  ApproxMatrix out = ApproxMatrix::identity(n.rows()), term = out;
  for (std::size_t k = 1; k <= n.rows(); ++k) {
    term = term * n;
    term *= C(1.0 / static_cast<double>(k), 0);
    out += term;
  }
  return out;
}

ApproxMatrix block_diagonal(const std::vector<ApproxMatrix>& blocks) {
  std::size_t n = 0;
  for (const auto& b : blocks) n += b.rows();
  ApproxMatrix out(n, n);
  std::size_t at = 0;
  for (const auto& b : blocks) {
    out.set_block(at, at, b);
    at += b.rows();
  }
  return out;
}

}  // namespace

TorusTwist TorusTwist::from_monodromy(const ApproxMatrix& m) {
  if (!m.is_square() || m.rows() == 0) throw InvalidModel("monodromy must be square and nonempty, got " + m.shape());
  if (!linalg::is_invertible(af, m)) throw InvalidModel("monodromy singular");
  TorusTwist t;
  t.monodromy_ = m;
  t.monodromy_inverse_ = linalg::inverse(af, m);
  std::vector<ApproxMatrix> spaces;
  for (const auto& ev : linalg::eigenvalues(af, m)) {
    t.data_.push_back({ev.value, ev.multiplicity, theta_of(ev.value)});
    auto shifted = linalg::shifted(af, m, ev.value);
    spaces.push_back(linalg::nullspace_of_dim(af, linalg::power(shifted, ev.multiplicity), ev.multiplicity));
  }
  ApproxMatrix basis(m.rows(), 0);
  for (const auto& s : spaces) basis = ApproxMatrix::hstack(basis, s);
  t.basis_ = basis;
  t.build_logarithm();
  return t;
}

TorusTwist TorusTwist::from_monodromy(const ExactMatrix& m) {
  const linalg::ExactField ef;
  if (!m.is_square() || m.rows() == 0) throw InvalidModel("monodromy must be square and nonempty, got " + m.shape());
  if (!linalg::is_invertible(ef, m)) throw InvalidModel("monodromy singular");
  std::vector<linalg::EigenvalueCount<linalg::GaussRational>> exact;
  try {
    exact = linalg::eigenvalues(ef, m);
  } catch (const ExactEigenvalueNotInField&) {
    return from_monodromy(linalg::to_approx(m));
  }
  TorusTwist t;
  t.monodromy_ = linalg::to_approx(m);
  t.monodromy_inverse_ = linalg::to_approx(linalg::inverse(ef, m));
  ExactMatrix basis(m.rows(), 0);
  for (const auto& ev : exact) {
    const C a = ev.value.to_complex();
    t.data_.push_back({a, ev.multiplicity, theta_of(a)});
    auto shifted = linalg::shifted(ef, m, ev.value);
    basis = ExactMatrix::hstack(basis, linalg::nullspace(ef, linalg::power(shifted, ev.multiplicity)));
  }
  t.basis_ = linalg::to_approx(basis);
  t.build_logarithm();
  return t;
}

void TorusTwist::build_logarithm() {
  basis_inverse_ = linalg::inverse(af, basis_);
  const ApproxMatrix restricted = basis_inverse_ * monodromy_ * basis_;
  nilpotent_.clear();
  std::size_t at = 0;
  for (const auto& d : data_) {
    // log(a + N) = log a + Σ (−1)^{k+1} (N/a)^k / k on the block.
    ApproxMatrix x = linalg::shifted(af, restricted.block(at, at, d.m, d.m), d.a);
    x *= 1.0 / d.a;
    ApproxMatrix sum(d.m, d.m), term = ApproxMatrix::identity(d.m);
    for (std::size_t k = 1; k < d.m; ++k) {
      term = term * x;
      ApproxMatrix add = term;
      add *= C((k % 2 ? 1.0 : -1.0) / static_cast<double>(k), 0);
      sum += add;
    }
    sum *= 1.0 / two_pi_i;
    nilpotent_.push_back(std::move(sum));
    at += d.m;
  }
}

ApproxMatrix TorusTwist::monodromy_power(long n) const {
  return linalg::power(n < 0 ? monodromy_inverse_ : monodromy_, static_cast<unsigned long>(std::labs(n)));
}

ApproxMatrix TorusTwist::log_generator() const {
  std::vector<ApproxMatrix> blocks;
  for (std::size_t j = 0; j < data_.size(); ++j) {
    ApproxMatrix b = nilpotent_[j];
    for (std::size_t i = 0; i < b.rows(); ++i) b(i, i) += data_[j].theta;
    blocks.push_back(std::move(b));
  }
  return basis_ * block_diagonal(blocks) * basis_inverse_;
}

ApproxMatrix TorusTwist::exp_generator(double t) const {
  std::vector<ApproxMatrix> blocks;
  for (std::size_t j = 0; j < data_.size(); ++j) {
    ApproxMatrix n = nilpotent_[j];
    n *= two_pi_i * t;
    ApproxMatrix b = exp_nilpotent(n);
    b *= std::exp(two_pi_i * t * data_[j].theta);
    blocks.push_back(std::move(b));
  }
  return basis_ * block_diagonal(blocks) * basis_inverse_;
}

TorusTwist TorusTwist::with_theta_shift(std::size_t j, long shift) const {
  TorusTwist t = *this;
  t.data_.at(j).theta += static_cast<double>(shift);
  return t;
}

std::vector<CharacterTerm> spectral_characters(const TorusTwist& twist, long k_lo, long k_hi) {
  std::vector<CharacterTerm> out;
  for (const auto& d : twist.jordan_data())
    for (long k = k_lo; k <= k_hi; ++k) out.push_back({d.theta + static_cast<double>(k), d.m});
  return out;
}

spectral::AdmissibleModel<linalg::ApproxField> twisted_laplacian_model(const TorusTwist& twist, std::size_t K) {
  const std::size_t n = twist.dim(), modes = 2 * K + 1;
  if (n * modes > 2000)
    throw ScenarioTooLarge("twisted Laplacian model of dimension " + std::to_string(n * modes) + " exceeds 2000");
  const ApproxMatrix l = twist.log_generator();
  const double t = 1.0 / static_cast<double>(2 * K + 2);
  const ApproxMatrix shift = twist.exp_generator(t);
  spectral::AdmissibleModel<linalg::ApproxField> model;
  model.delta = ApproxMatrix(n * modes, n * modes);
  ApproxMatrix translate(n * modes, n * modes);
  for (std::size_t i = 0; i < modes; ++i) {
    const long k = static_cast<long>(i) - static_cast<long>(K);
    ApproxMatrix a = linalg::shifted(af, l, C(-static_cast<double>(k), 0));
    a *= C(two_pi, 0);
    model.delta.set_block(i * n, i * n, a * a);
    ApproxMatrix tr = shift;
    tr *= std::exp(two_pi_i * t * static_cast<double>(k));
    translate.set_block(i * n, i * n, tr);
  }
  model.gens.push_back(std::move(translate));
  model.label = "twisted Laplacian, K = " + std::to_string(K);
  return model;
}

LaplacianSpectrumCheck check_laplacian_spectrum(const TorusTwist& twist, std::size_t K, double tolerance) {
  struct Expected {
    C value;
    std::size_t m;
  };
  std::vector<Expected> expected;
  const long k_max = static_cast<long>(K);
  for (const auto& term : spectral_characters(twist, -k_max, k_max)) {
    const C lambda = std::pow(two_pi * term.parameter, 2);
    bool merged = false;
    for (auto& e : expected)
      if (std::abs(e.value - lambda) <= 1e-12 * std::max(1.0, std::abs(lambda))) {
        e.m += term.multiplicity;
        merged = true;
        break;
      }
    if (!merged) expected.push_back({lambda, term.multiplicity});
  }
  // Δ is block diagonal in the mode basis. Each mode block is factored on its
  // own: the Jordan-ring radius of the clustering scales with the norm of the
  // matrix factored, and the full Δ (norm ~ (2πK)²) would merge distinct
  // eigenvalues of neighbouring modes.
  auto model = twisted_laplacian_model(twist, K);
  const std::size_t n = twist.dim();
  std::vector<linalg::EigenvalueCount<C>> found;
  for (std::size_t i = 0; i < 2 * K + 1; ++i)
    for (const auto& e : linalg::eigenvalues(af, model.delta.block(i * n, i * n, n, n))) {
      auto same = std::find_if(found.begin(), found.end(), [&](const auto& f) {
        return std::abs(f.value - e.value) <= 1e-12 * std::max(1.0, std::abs(e.value));
      });
      if (same == found.end())
        found.push_back(e);
      else
        same->multiplicity += e.multiplicity;
    }

  LaplacianSpectrumCheck out;
  out.expected_values = expected.size();
  out.found_values = found.size();
  out.pass = expected.size() == found.size();
  for (const auto& e : expected) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t mult = 0;
    for (const auto& f : found) {
      const double err = std::abs(f.value - e.value) / std::max(1.0, std::abs(e.value));
      if (err < best) {
        best = err;
        mult = f.multiplicity;
      }
    }
    out.worst_error = std::max(out.worst_error, best);
    if (best > tolerance || mult != e.m) {
      out.pass = false;
      if (out.detail.empty())
        out.detail = "eigenvalue " + linalg::scalar_text(e.value) + " expected with multiplicity " +
                     std::to_string(e.m) + ", nearest computed value at relative distance " + std::to_string(best) +
                     " has multiplicity " + std::to_string(mult);
    }
  }
  if (out.pass && out.worst_error > tolerance) out.pass = false;
  return out;
}

}  // namespace ntrace::torus
