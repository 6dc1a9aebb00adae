#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ntrace/spectral/model.hpp"

namespace ntrace::spectral {

template <Field F>
struct SpectralValue {
  typename F::Scalar value;
  linalg::GenEigenData<typename F::Scalar> data;
};

/// Generalized eigenspace decomposition of Δ.
template <Field F>
std::vector<SpectralValue<F>> spectrum(const F& f, const AdmissibleModel<F>& model);

/// Idempotent onto V(Δ,σ₀) along the other generalized eigenspaces.
/// Throws SigmaNotSpectral.
template <Field F>
MatrixOf<F> spectral_projection_direct(const F& f, const AdmissibleModel<F>& model,
                                       const typename F::Scalar& sigma0);

struct PowerIterationInfo {
  std::uint64_t steps = 0;      // the exponent n of the final Tⁿ
  double contraction = 0;       // max |T| on the complement, from the spectrum
  std::size_t nilpotent_depth = 0;
};

/// Projector onto V(Δ,σ₀) rebuilt from powers of T = (σ₀−λ)(Δ−λ)⁻¹.
/// Tⁿ = Σ_j binom(n,j) RʲP + Tⁿ(1−P) with R nilpotent on V(Δ,σ₀); once the
/// second term is negligible the RʲP are peeled off from j = N−1 down to 0.
/// Throws BadLambda, SlowContraction.
MatrixOf<ApproxField> spectral_projection_power_iteration(const ApproxField& f,
                                                          const AdmissibleModel<ApproxField>& model,
                                                          std::complex<double> sigma0, std::complex<double> lambda,
                                                          std::uint64_t n_max, double tol,
                                                          PowerIterationInfo* info = nullptr);

/// Composition series with the deterministic pivot rule; isomorphic factors
/// are grouped into classes.
template <Field F>
Filtration<F> composition_series(const F& f, const AdmissibleModel<F>& model);

template <Field F>
CanonicalKey<F> canonical_key(const F& f, const AdmissibleModel<F>& model);

/// Decides isomorphism of two irreducible modules (same generator count).
template <Field F>
bool isomorphic(const F& f, const AdmissibleModel<F>& a, const AdmissibleModel<F>& b);

/// Throws NonIrreduciblePi unless π is certified irreducible.
template <Field F>
PiClass<F> make_pi_class(const F& f, const AdmissibleModel<F>& pi);

template <Field F>
MultiplicityTable<F> multiplicity_table(const F& f, const Filtration<F>& series);

template <Field F>
std::size_t multiplicity(const F& f, const AdmissibleModel<F>& model, const PiClass<F>& pi);

template <Field F>
struct RandomFiltrationResult {
  std::size_t length = 0;           // longest certified π-filtration found
  bool certified = false;           // some trial reached a certified maximal filtration
  std::size_t trials_certified = 0;
  std::vector<std::size_t> trial_lengths;
};

/// Builds randomized composition series, trial t seeded from (seed, t), and
/// reads off the π-filtration F_j' ⊂ F_j given by its π-steps. Maximality of a
/// trial is certified when every recorded step is isomorphic to π and no gap
/// subquotient contains π as a factor.
template <Field F>
RandomFiltrationResult<F> random_pi_filtration_length(const F& f, const AdmissibleModel<F>& model,
                                                      const PiClass<F>& pi, std::size_t trials, std::uint64_t seed);

/// Σ_π N(π)·tr π(f) read off the flag without comparing to tr f_op. Throws
/// NotStable if f_op does not preserve the flag.
template <Field F>
typename F::Scalar spectral_sum(const F& f, const Filtration<F>& series, const MatrixOf<F>& f_op);

/// Σ_π N(π)·tr π(f) from the composition series, checked against tr f_op.
/// Throws NotStable if f_op does not preserve the flag and TraceMismatch if
/// the two traces disagree (exactly, or beyond 1e-9 relative).
template <Field F>
typename F::Scalar spectral_trace(const F& f, const AdmissibleModel<F>& model, const MatrixOf<F>& f_op);

/// Same, reusing a computed series.
template <Field F>
typename F::Scalar spectral_trace(const F& f, const Filtration<F>& series, const MatrixOf<F>& f_op);

template <Field F>
struct SubquotientRow {
  typename F::Scalar lambda;
  std::size_t dim_v1 = 0, dim_v0 = 0, dim_s = 0;
};

template <Field F>
struct SubquotientReport {
  std::vector<SubquotientRow<F>> rows;
  bool pass = true;
};

/// For V0 ⊆ V1 stable under the generators and Δ, compares dim S(Δ,λ) of
/// V1/V0 with dim V1(Δ,λ) − dim V0(Δ,λ) for every λ. Throws NotStable.
template <Field F>
SubquotientReport<F> subquotient_spectrum_check(const F& f, const AdmissibleModel<F>& model, const MatrixOf<F>& v0,
                                                const MatrixOf<F>& v1);

}  // namespace ntrace::spectral
