#pragma once

#include <optional>
#include <random>
#include <span>
#include <string>

#include "ntrace/spectral/model.hpp"

namespace ntrace::spectral {

/// Smallest subspace containing the columns of `seeds` and stable under `gens`.
/// Exact: reduced column echelon basis. Approx: orthonormal basis.
template <Field F>
MatrixOf<F> spin(const F& f, std::span<const MatrixOf<F>> gens, const MatrixOf<F>& seeds);

/// Whether span(basis) is mapped into itself by every matrix in `ops`.
template <Field F>
bool is_stable(const F& f, std::span<const MatrixOf<F>> ops, const MatrixOf<F>& basis);

/// Action of `op` on the stable subspace span(basis), in basis coordinates.
template <Field F>
MatrixOf<F> restrict_to(const F& f, const MatrixOf<F>& basis, const MatrixOf<F>& op);

/// [U | C] with C a complement of span(U): the first columns span the
/// submodule, so generators become block upper triangular.
template <Field F>
MatrixOf<F> adapted_basis(const F& f, const MatrixOf<F>& u);

/// Lower-right block of B^{-1}·op·B, the action on V / span(first k columns).
template <Field F>
MatrixOf<F> quotient_action(const F& f, const MatrixOf<F>& b, std::size_t k, const MatrixOf<F>& op);

/// Either a proper nonzero stable subspace (columns, in module coordinates),
/// or nullopt with `cert` naming the irreducibility certificate.
/// `delta` may be empty. Probes run in
/// a fixed order so results are reproducible. Throws
/// ExactEigenvalueNotInField (exact) or NonConvergence (approx) when neither
/// outcome can be certified.
template <Field F>
std::optional<MatrixOf<F>> find_proper_submodule(const F& f, std::span<const MatrixOf<F>> gens,
                                                 const MatrixOf<F>& delta, std::string& cert);

/// Randomized variant used for random filtrations: seeds are drawn from
/// random combinations of probe kernels. Falls back to the deterministic search.
template <Field F>
std::optional<MatrixOf<F>> random_proper_submodule(const F& f, std::span<const MatrixOf<F>> gens,
                                                   const MatrixOf<F>& delta, std::mt19937_64& rng,
                                                   std::string& cert);

}  // namespace ntrace::spectral
