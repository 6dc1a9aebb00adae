#pragma once

#include <algorithm>
#include <optional>
#include <span>
#include <vector>

#include "ntrace/linalg/dense.hpp"

namespace ntrace::linalg {

template <class S>
struct EigenvalueCount {
  S value;
  std::size_t multiplicity = 0;  // algebraic
};

/// One generalized eigenspace V(M, λ) = ∪ ker(M − λ)^n.
template <class S>
struct GenEigenData {
  S eigenvalue;
  Matrix<S> basis;                       // columns span the space
  std::vector<std::size_t> block_sizes;  // Jordan block sizes, descending
  std::size_t index = 0;                 // smallest n with ker(M − λ)^n stable

  std::size_t dim() const { return basis.cols(); }
};

/// Distinct eigenvalues with algebraic multiplicities. Exact: roots of the
/// characteristic polynomial that lie in Q(i); hints are tried first, then
/// candidates rationalized from a floating-point eigensolve, each verified
/// by exact polynomial evaluation. Throws ExactEigenvalueNotInField when
/// some root is not found.
std::vector<EigenvalueCount<GaussRational>> eigenvalues(const ExactField& f, const ExactMatrix& m,
                                                        std::span<const GaussRational> hints = {});

/// Same search, but returns whatever in-field roots were certified.
std::vector<EigenvalueCount<GaussRational>> in_field_eigenvalues(const ExactField& f, const ExactMatrix& m,
                                                                 std::span<const GaussRational> hints = {});

/// Approx: eigenvalues clustered so that values within 10·eps (relative) are
/// one eigenvalue; nearby clusters produced by a defective eigenvalue are
/// merged further when the merged space passes a nilpotency check.
std::vector<EigenvalueCount<std::complex<double>>> eigenvalues(const ApproxField& f, const ApproxMatrix& m,
                                                               std::span<const std::complex<double>> hints = {});

inline std::vector<EigenvalueCount<std::complex<double>>> in_field_eigenvalues(
    const ApproxField& f, const ApproxMatrix& m, std::span<const std::complex<double>> hints = {}) {
  return eigenvalues(f, m, hints);
}

/// dim ker N^k for k = 1..n on a nilpotent (up to tolerance) n×n matrix.
/// `scale` bounds ‖M‖ for the matrix N was derived from; approx rank
/// decisions for N^k use cut-off eps·scale^k.
std::vector<std::size_t> kernel_dims_of_powers(const ExactField& f, const ExactMatrix& n, double scale);
std::vector<std::size_t> kernel_dims_of_powers(const ApproxField& f, const ApproxMatrix& n, double scale);

/// Deterministic order of spectral values.
bool spectral_less(const GaussRational& a, const GaussRational& b);
bool spectral_less(const std::complex<double>& a, const std::complex<double>& b);

/// Full generalized eigenspace decomposition; its spaces are M-stable and
/// their direct sum is the whole space.
template <Field F>
std::vector<GenEigenData<typename F::Scalar>> generalized_eigenspaces(
    const F& f, const MatrixOf<F>& m, std::span<const typename F::Scalar> hints = {}) {
  using S = typename F::Scalar;
  if (!m.is_square()) throw DimensionMismatch("generalized eigenspaces of non-square " + m.shape());
  std::vector<GenEigenData<S>> out;
  for (const auto& ev : eigenvalues(f, m, hints)) {
    auto shifted_m = shifted(f, m, ev.value);
    auto basis = nullspace_of_dim(f, power(shifted_m, ev.multiplicity), ev.multiplicity);
    auto restricted = coordinates(f, basis, m * basis);
    auto nil = shifted(f, restricted, ev.value);
    auto dims = kernel_dims_of_powers(f, nil, std::max(1.0, frobenius_norm(restricted)));

    GenEigenData<S> data{ev.value, basis, {}, 0};
    std::size_t prev = 0;
    std::vector<std::size_t> at_least;  // blocks of size >= k
    for (std::size_t k = 0; k < dims.size(); ++k) {
      at_least.push_back(dims[k] - prev);
      prev = dims[k];
      if (dims[k] == ev.multiplicity) {
        data.index = k + 1;
        break;
      }
    }
    for (std::size_t k = 0; k < at_least.size(); ++k) {
      std::size_t next = k + 1 < at_least.size() ? at_least[k + 1] : 0;
      for (std::size_t c = 0; c < at_least[k] - next; ++c) data.block_sizes.push_back(k + 1);
    }
    std::sort(data.block_sizes.rbegin(), data.block_sizes.rend());
    out.push_back(std::move(data));
  }
  return out;
}

/// (M − λI)^{-1}; throws SpectralPole when λ is (within tolerance) an eigenvalue.
template <Field F>
MatrixOf<F> resolvent(const F& f, const MatrixOf<F>& m, const typename F::Scalar& lambda) {
  try {
    return inverse(f, shifted(f, m, lambda));
  } catch (const SingularMatrix&) {
    throw SpectralPole("resolvent requested at spectral value " + scalar_text(lambda));
  }
}

/// Basis of {T : T·A_i = B_i·T for all i}, T of shape dim(B)×dim(A).
template <Field F>
std::vector<MatrixOf<F>> intertwiner_space(const F& f, std::span<const MatrixOf<F>> a_gens,
                                           std::span<const MatrixOf<F>> b_gens) {
  using S = typename F::Scalar;
  if (a_gens.size() != b_gens.size())
    throw DimensionMismatch("intertwiner generator lists differ in length");
  if (a_gens.empty()) throw DimensionMismatch("intertwiner needs at least one generator");
  const std::size_t da = a_gens[0].rows(), db = b_gens[0].rows();
  for (std::size_t i = 0; i < a_gens.size(); ++i)
    if (!a_gens[i].is_square() || !b_gens[i].is_square() || a_gens[i].rows() != da || b_gens[i].rows() != db)
      throw DimensionMismatch("intertwiner generators have inconsistent shapes");
  const std::size_t unknowns = da * db;
  MatrixOf<F> system(a_gens.size() * unknowns, unknowns);
  // Unknown T(p,q) sits at column p*da + q; equation (i,p,q) is (T A_i − B_i T)(p,q) = 0.
  for (std::size_t i = 0; i < a_gens.size(); ++i) {
    const auto& a = a_gens[i];
    const auto& b = b_gens[i];
    for (std::size_t p = 0; p < db; ++p)
      for (std::size_t q = 0; q < da; ++q) {
        const std::size_t row = i * unknowns + p * da + q;
        for (std::size_t r = 0; r < da; ++r)
          if (!(a(r, q) == S(0))) system(row, p * da + r) += a(r, q);
        for (std::size_t r = 0; r < db; ++r)
          if (!(b(p, r) == S(0))) system(row, r * da + q) -= b(p, r);
      }
  }
  auto kernel = nullspace(f, system);
  std::vector<MatrixOf<F>> out;
  for (std::size_t k = 0; k < kernel.cols(); ++k) {
    MatrixOf<F> t(db, da);
    for (std::size_t p = 0; p < db; ++p)
      for (std::size_t q = 0; q < da; ++q) t(p, q) = kernel(p * da + q, k);
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace ntrace::linalg
