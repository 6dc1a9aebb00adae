#pragma once

// Field-dispatched dense kernels. The exact overloads run fraction-exact
// Gauss-Jordan elimination; the approximate overloads use SVD/QR from Eigen
// and decide rank through the field's tolerance.

#include <complex>
#include <cstddef>
#include <vector>

#include "ntrace/linalg/field.hpp"
#include "ntrace/linalg/matrix.hpp"

namespace ntrace::linalg {

using ExactMatrix = Matrix<GaussRational>;
using ApproxMatrix = Matrix<std::complex<double>>;

template <class F>
using MatrixOf = Matrix<typename F::Scalar>;

/// Reduced row echelon form; `pivots[r]` is the pivot column of row r.
struct ExactEchelon {
  ExactMatrix reduced;
  std::vector<std::size_t> pivots;
};
ExactEchelon row_reduce(const ExactMatrix& m);

/// Kernel basis, one vector per column.
ExactMatrix nullspace(const ExactField&, const ExactMatrix& m);
ApproxMatrix nullspace(const ApproxField& f, const ApproxMatrix& m);

/// Kernel basis of a prescribed dimension. Approx: the `dim` right singular
/// vectors with smallest singular values. Exact: the kernel, which must
/// have exactly that dimension.
ExactMatrix nullspace_of_dim(const ExactField&, const ExactMatrix& m, std::size_t dim);
ApproxMatrix nullspace_of_dim(const ApproxField&, const ApproxMatrix& m, std::size_t dim);

std::size_t rank(const ExactField&, const ExactMatrix& m);
std::size_t rank(const ApproxField& f, const ApproxMatrix& m);

ExactMatrix inverse(const ExactField&, const ExactMatrix& m);
ApproxMatrix inverse(const ApproxField& f, const ApproxMatrix& m);

/// X with basis·X = targets; throws NotInSpan if some target column is not
/// in the span of the (independent) basis columns.
ExactMatrix coordinates(const ExactField&, const ExactMatrix& basis, const ExactMatrix& targets);
ApproxMatrix coordinates(const ApproxField& f, const ApproxMatrix& basis, const ApproxMatrix& targets);

/// Independent columns with the same span. Exact: the canonical reduced
/// echelon basis. Approx: an orthonormal basis.
ExactMatrix column_basis(const ExactField&, const ExactMatrix& m);
ApproxMatrix column_basis(const ApproxField& f, const ApproxMatrix& m);

/// Columns C such that [basis C] is invertible. Exact: unit vectors in index
/// order. Approx: an orthonormal complement.
ExactMatrix complement(const ExactField&, const ExactMatrix& basis);
ApproxMatrix complement(const ApproxField& f, const ApproxMatrix& basis);

double frobenius_norm(const ApproxMatrix& m);
double frobenius_norm(const ExactMatrix& m);

/// Characteristic polynomial det(xI − M), coefficients lowest degree first.
std::vector<GaussRational> characteristic_polynomial(const ExactMatrix& m);

/// Numerical eigenvalues (unclustered), via Eigen's complex eigensolver.
std::vector<std::complex<double>> raw_eigenvalues(const ApproxMatrix& m);

ApproxMatrix to_approx(const ExactMatrix& m);

template <Field F>
bool is_zero(const F& f, const MatrixOf<F>& m) {
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      if (!f.is_zero(m(i, j))) return false;
  return true;
}

/// Entrywise comparison through the field. For the approx backend the
/// difference is measured against the field tolerance scaled by the size
/// of the operands.
bool equal(const ExactField&, const ExactMatrix& a, const ExactMatrix& b);
bool equal(const ApproxField& f, const ApproxMatrix& a, const ApproxMatrix& b);

template <Field F>
MatrixOf<F> shifted(const F& f, const MatrixOf<F>& m, const typename F::Scalar& lambda) {
  (void)f;
  MatrixOf<F> out = m;
  for (std::size_t i = 0; i < m.rows(); ++i) out(i, i) -= lambda;
  return out;
}

template <Field F>
bool is_invertible(const F& f, const MatrixOf<F>& m) {
  return m.is_square() && rank(f, m) == m.rows();
}

/// Incremental span with membership tests; the workhorse of spinning.
template <Field F>
class SpanBuilder;

template <>
class SpanBuilder<ExactField> {
 public:
  SpanBuilder(const ExactField&, std::size_t ambient) : n_(ambient) {}

  /// Adds v (n×1) if it is outside the current span; returns whether it was.
  bool add(const ExactMatrix& v);
  bool contains(const ExactMatrix& v) const;
  std::size_t dim() const { return rows_.size(); }
  std::size_t ambient() const { return n_; }
  /// Basis vectors as columns, in insertion order (as originally supplied).
  ExactMatrix basis() const;
  /// The same span in reduced column echelon form (pivot entries 1).
  ExactMatrix reduced_basis() const;

 private:
  std::vector<GaussRational> reduce(const ExactMatrix& v) const;

  std::size_t n_;
  std::vector<std::vector<GaussRational>> rows_;  // echelon rows, pivot entry 1
  std::vector<std::size_t> pivots_;
  std::vector<ExactMatrix> originals_;
};

template <>
class SpanBuilder<ApproxField> {
 public:
  SpanBuilder(const ApproxField& f, std::size_t ambient) : f_(f), n_(ambient) {}

  bool add(const ApproxMatrix& v);
  bool contains(const ApproxMatrix& v) const;
  std::size_t dim() const { return q_.size(); }
  std::size_t ambient() const { return n_; }
  /// Orthonormal basis as columns.
  ApproxMatrix basis() const;

 private:
  std::vector<std::complex<double>> residual(const ApproxMatrix& v, double& input_norm) const;

  ApproxField f_;
  std::size_t n_;
  std::vector<std::vector<std::complex<double>>> q_;
};

}  // namespace ntrace::linalg
