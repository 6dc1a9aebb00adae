#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ntrace/linalg/eigenspaces.hpp"

namespace ntrace::spectral {

using linalg::ApproxField;
using linalg::ExactField;
using linalg::Field;
using linalg::MatrixOf;

/// Finite-dimensional representation with a distinguished operator Δ.
template <Field F>
struct AdmissibleModel {
  using Scalar = typename F::Scalar;
  using Mat = MatrixOf<F>;

  std::vector<Mat> gens;                  // images R(g) of the generators
  Mat delta;                              // may be empty (0×0) on quotients where Δ is not induced
  std::vector<Scalar> resolvent_sample;   // points off Spec(Δ)
  std::vector<Scalar> spectrum_hint;      // optional eigenvalue candidates for Δ and generators
  std::string label;

  std::size_t dim() const { return gens.empty() ? delta.rows() : gens.front().rows(); }
  bool has_delta() const { return delta.rows() == dim() && dim() > 0; }

  /// Throws InvalidModel on non-square or singular generator images, shape
  /// mismatches, or resolvent samples on the spectrum.
  void validate(const F& f) const;
};

/// Full flag 0 = F_0 ⊂ … ⊂ F_k = V. In the basis `basis` every generator is
/// block upper triangular and F_i is spanned by the first dims[i] columns.
template <Field F>
struct Filtration {
  MatrixOf<F> basis;
  std::vector<std::size_t> dims;               // dims[0] = 0, dims.back() = dim V
  std::vector<AdmissibleModel<F>> factors;     // F_i / F_{i-1}, i = 1..k
  std::vector<std::size_t> factor_class;       // index into `classes`
  std::vector<std::size_t> class_rep;          // factor index representing each class
  std::vector<std::string> certificates;       // how each factor's irreducibility was certified

  std::size_t length() const { return factors.size(); }
  /// Basis of F_i: the first dims[i] columns.
  MatrixOf<F> step_basis(std::size_t i) const { return basis.block(0, 0, basis.rows(), dims[i]); }
};

/// Invariants used to rule out isomorphism cheaply.
template <Field F>
struct CanonicalKey {
  std::size_t dim = 0;
  std::vector<typename F::Scalar> gen_traces;
  std::vector<typename F::Scalar> pair_traces;  // tr(g_i g_j), i <= j
  std::vector<linalg::EigenvalueCount<typename F::Scalar>> delta_spectrum;  // display only
};

template <Field F>
struct PiClass {
  AdmissibleModel<F> rep;
  CanonicalKey<F> key;
};

template <Field F>
struct MultiplicityTable {
  std::vector<PiClass<F>> classes;
  std::vector<std::size_t> counts;
};

}  // namespace ntrace::spectral
