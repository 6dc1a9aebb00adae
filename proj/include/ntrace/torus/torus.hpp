#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "ntrace/spectral/model.hpp"
#include "ntrace/trace_report.hpp"

namespace ntrace::torus {

using C = std::complex<double>;
using linalg::ApproxMatrix;
using linalg::ExactMatrix;

/// One eigenvalue a of ω(1) with generalized multiplicity m and
/// θ = log(a)/(2πi) on the branch Re θ ∈ [0, 1).
struct JordanDatum {
  C a;
  std::size_t m = 0;
  C theta;
};

/// Monodromy ω(1) of a flat bundle over ℝ/ℤ, with a logarithm L
/// (exp(2πiL) = ω(1), spectrum {θ_j}) built on generalized eigenspaces.
class TorusTwist {
 public:
  /// Throws InvalidModel for singular or non-square monodromy.
  static TorusTwist from_monodromy(const ApproxMatrix& m);
  /// Exact eigenvalues are used when they lie in Q(i).
  static TorusTwist from_monodromy(const ExactMatrix& m);

  std::size_t dim() const { return monodromy_.rows(); }
  const ApproxMatrix& monodromy() const { return monodromy_; }
  const std::vector<JordanDatum>& jordan_data() const { return data_; }

  /// ω(1)ⁿ for any integer n.
  ApproxMatrix monodromy_power(long n) const;
  /// L with exp(2πiL) = ω(1).
  ApproxMatrix log_generator() const;
  /// exp(2πi·t·L), the translation by t on the k = 0 modes.
  ApproxMatrix exp_generator(double t) const;

  /// Same bundle with θ_j moved to θ_j + shift (a different branch).
  TorusTwist with_theta_shift(std::size_t j, long shift) const;

 private:
  ApproxMatrix monodromy_, monodromy_inverse_;
  std::vector<JordanDatum> data_;
  ApproxMatrix basis_, basis_inverse_;   // columns: generalized eigenspaces in data_ order
  std::vector<ApproxMatrix> nilpotent_;  // L − θ_j on each generalized eigenspace
  void build_logarithm();
};

/// Character parameters θ_j + k of the composition factors x ↦ exp(2πi(θ_j+k)x)
/// for k_lo ≤ k ≤ k_hi, each of multiplicity m_j.
struct CharacterTerm {
  C parameter;
  std::size_t multiplicity = 0;
};
std::vector<CharacterTerm> spectral_characters(const TorusTwist& twist, long k_lo, long k_hi);

/// F(ξ) = ∫ f(x)·exp(sign·2πiξx) dx. Plus reproduces classical Poisson
/// summation for the trivial twist; Minus exists for audit.
enum class Pairing { Plus, Minus };

class AnalyticTestFunction {
 public:
  enum class Kind { Gaussian, Bump };

  /// exp(−π((x−c)/s)²).
  static AnalyticTestFunction gaussian(double width = 1.0, double center = 0.0);
  /// exp(1 − 1/(1 − (x/B)²)) on (−B, B), zero outside; f(0) = 1.
  static AnalyticTestFunction bump(double radius = 1.0);

  Kind kind() const { return kind_; }
  double width() const { return width_; }
  double center() const { return center_; }
  double radius() const { return radius_; }
  std::string describe() const;

  double operator()(double x) const;

  struct Transform {
    C value;
    double error = 0;  // quadrature error estimate; 0 for closed forms
  };
  Transform transform(C xi, Pairing pairing = Pairing::Plus) const;

  /// Bump only: ‖f^(p)‖₁ for p = 0, …, 10, by quadrature.
  const std::vector<double>& derivative_norms() const;

 private:
  Kind kind_ = Kind::Gaussian;
  double width_ = 1, center_ = 0, radius_ = 1;
  mutable std::vector<double> derivative_norms_;
};

/// A truncated side of the formula: the partial sum up to `cutoff` and a
/// bound on everything omitted (tails plus quadrature error).
struct SideValue {
  C value;
  double tail_bound = 0;
  long cutoff = 0;
};

/// Σ_j m_j Σ_{|k|≤K} F(θ_j + k). K < 0 picks the smallest K whose tail bound
/// is at most `target_tail`. Throws TailBoundExceedsTolerance when the bound
/// stays above target_tail.
SideValue spectral_side_torus(const TorusTwist& twist, const AnalyticTestFunction& f, long K, double target_tail,
                              Pairing pairing = Pairing::Plus);

/// Σ_{|n|≤N} f(n)·tr(ω(1)ⁿ), with the trace taken from matrix powers. N < 0
/// picks N automatically. Throws GrowthInadmissible if the terms overflow or
/// peak beyond any reachable N, TailBoundExceedsTolerance as above.
SideValue geometric_side_torus(const TorusTwist& twist, const AnalyticTestFunction& f, long N, double target_tail);

struct TorusOptions {
  std::string scenario_id;
  double tolerance = 1e-10;
  long K = -1;  // negative: automatic
  long N = -1;
  Pairing pairing = Pairing::Plus;
};

/// Residual |spectral − geometric|; PASS iff residual ≤ tolerance + both tails.
/// Module errors are recorded in the report.
TraceReport evaluate_torus(const TorusTwist& twist, const AnalyticTestFunction& f, const TorusOptions& options);

/// evaluate_torus, throwing TraceMismatch with the report dump unless it passes.
TraceReport verify_torus(const TorusTwist& twist, const AnalyticTestFunction& f, const TorusOptions& options);

/// Modes exp(2πi(L + k)x)·v, |k| ≤ K, basis index (k + K)·dim + v. Δ = −d²/dx²
/// acts on mode k by (2π(L + k))²; the generator is translation by 1/(2K + 2).
/// Throws ScenarioTooLarge above dimension 2000.
spectral::AdmissibleModel<linalg::ApproxField> twisted_laplacian_model(const TorusTwist& twist, std::size_t K);

struct LaplacianSpectrumCheck {
  bool pass = false;
  double worst_error = 0;        // relative to max(1, |λ|)
  std::size_t expected_values = 0;
  std::size_t found_values = 0;
  std::string detail;
};

/// Compares the eigenvalues of Δ in the truncated model with (2π(θ_j + k))²
/// and their generalized multiplicities.
LaplacianSpectrumCheck check_laplacian_spectrum(const TorusTwist& twist, std::size_t K, double tolerance = 1e-9);

}  // namespace ntrace::torus
