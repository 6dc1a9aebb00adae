#include <algorithm>
#include <cmath>
#include <cstdio>

#include <Eigen/Dense>

#include "ntrace/linalg/dense.hpp"
#include "ntrace/linalg/eigen_bridge.hpp"

namespace ntrace::linalg {

namespace {

// Rank cut-off: singular values at or below eps·max(1, σ_max) count as zero.
double rank_cutoff(const ApproxField& f, const Eigen::VectorXd& sv) {
  double smax = sv.size() ? sv(0) : 0.0;
  return f.eps * std::max(1.0, smax);
}

}  // namespace

Eigen::MatrixXcd to_eigen(const ApproxMatrix& m) {
  Eigen::MatrixXcd e(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) e(i, j) = m(i, j);
  return e;
}

ApproxMatrix from_eigen(const Eigen::MatrixXcd& e) {
  ApproxMatrix m(e.rows(), e.cols());
  for (Eigen::Index i = 0; i < e.rows(); ++i)
    for (Eigen::Index j = 0; j < e.cols(); ++j) m(i, j) = e(i, j);
  return m;
}

ApproxMatrix to_approx(const ExactMatrix& m) {
  return m.map([](const GaussRational& q) { return q.to_complex(); });
}

std::string scalar_text(const std::complex<double>& s) {
  char buf[96];
  // + 0.0 turns −0 into 0, so equal values print identically.
  std::snprintf(buf, sizeof buf, "%.17g%+.17gi", s.real() + 0.0, s.imag() + 0.0);
  return buf;
}

ApproxMatrix nullspace(const ApproxField& f, const ApproxMatrix& m) {
  const auto n = static_cast<Eigen::Index>(m.cols());
  if (n == 0) return ApproxMatrix(0, 0);
  if (m.rows() == 0) return ApproxMatrix::identity(m.cols());
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(to_eigen(m), Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  double cut = rank_cutoff(f, sv);
  Eigen::Index r = 0;
  while (r < sv.size() && sv(r) > cut) ++r;
  return from_eigen(svd.matrixV().rightCols(n - r));
}

ApproxMatrix nullspace_of_dim(const ApproxField&, const ApproxMatrix& m, std::size_t dim) {
  if (dim == 0) return ApproxMatrix(m.cols(), 0);
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(to_eigen(m), Eigen::ComputeFullV);
  return from_eigen(svd.matrixV().rightCols(static_cast<Eigen::Index>(dim)));
}

std::size_t rank(const ApproxField& f, const ApproxMatrix& m) {
  if (m.empty()) return 0;
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(to_eigen(m));
  const auto& sv = svd.singularValues();
  double cut = rank_cutoff(f, sv);
  std::size_t r = 0;
  while (r < static_cast<std::size_t>(sv.size()) && sv(r) > cut) ++r;
  return r;
}

ApproxMatrix inverse(const ApproxField& f, const ApproxMatrix& m) {
  if (!m.is_square()) throw DimensionMismatch("inverse of non-square " + m.shape());
  if (m.rows() == 0) return m;
  auto e = to_eigen(m);
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(e, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (sv(sv.size() - 1) <= rank_cutoff(f, sv)) throw SingularMatrix("matrix is singular within tolerance");
  Eigen::MatrixXcd inv = e.partialPivLu().inverse();
  return from_eigen(inv);
}

ApproxMatrix coordinates(const ApproxField& f, const ApproxMatrix& basis, const ApproxMatrix& targets) {
  if (basis.cols() == 0) {
    if (frobenius_norm(targets) > f.eps) throw NotInSpan("vector outside the zero subspace");
    return ApproxMatrix(0, targets.cols());
  }
  auto b = to_eigen(basis);
  auto t = to_eigen(targets);
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXcd> cod(b);
  Eigen::MatrixXcd x = cod.solve(t);
  double resid = (b * x - t).norm();
  double scale = std::max(1.0, t.norm());
  if (resid > 10.0 * f.eps * scale)
    throw NotInSpan("vector outside the span of the basis (residual " + std::to_string(resid) + ")");
  return from_eigen(x);
}

ApproxMatrix column_basis(const ApproxField& f, const ApproxMatrix& m) {
  if (m.cols() == 0) return ApproxMatrix(m.rows(), 0);
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(to_eigen(m), Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  double cut = rank_cutoff(f, sv);
  Eigen::Index r = 0;
  while (r < sv.size() && sv(r) > cut) ++r;
  return from_eigen(svd.matrixU().leftCols(r));
}

ApproxMatrix complement(const ApproxField&, const ApproxMatrix& basis) {
  const auto n = static_cast<Eigen::Index>(basis.rows());
  const auto k = static_cast<Eigen::Index>(basis.cols());
  if (k == 0) return ApproxMatrix::identity(basis.rows());
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(to_eigen(basis));
  Eigen::MatrixXcd q = qr.householderQ() * Eigen::MatrixXcd::Identity(n, n);
  return from_eigen(q.rightCols(n - k));
}

double frobenius_norm(const ApproxMatrix& m) {
  double s = 0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) s += std::norm(m(i, j));
  return std::sqrt(s);
}

bool equal(const ApproxField& f, const ApproxMatrix& a, const ApproxMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  double scale = std::max({1.0, frobenius_norm(a), frobenius_norm(b)});
  return frobenius_norm(a - b) <= f.eps * scale;
}

std::vector<std::complex<double>> raw_eigenvalues(const ApproxMatrix& m) {
  if (!m.is_square()) throw DimensionMismatch("eigenvalues of non-square " + m.shape());
  if (m.rows() == 0) return {};
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(to_eigen(m), false);
  if (es.info() != Eigen::Success) throw NonConvergence("complex eigensolver did not converge");
  std::vector<std::complex<double>> out(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  return out;
}

bool SpanBuilder<ApproxField>::add(const ApproxMatrix& v) {
  double in_norm = 0;
  auto w = residual(v, in_norm);
  double rn = 0;
  for (const auto& x : w) rn += std::norm(x);
  rn = std::sqrt(rn);
  if (rn <= f_.eps * std::max(1.0, in_norm)) return false;
  for (auto& x : w) x /= rn;
  q_.push_back(std::move(w));
  return true;
}

bool SpanBuilder<ApproxField>::contains(const ApproxMatrix& v) const {
  double in_norm = 0;
  auto w = residual(v, in_norm);
  double rn = 0;
  for (const auto& x : w) rn += std::norm(x);
  return std::sqrt(rn) <= f_.eps * std::max(1.0, in_norm);
}

std::vector<std::complex<double>> SpanBuilder<ApproxField>::residual(const ApproxMatrix& v,
                                                                      double& input_norm) const {
  if (v.rows() != n_ || v.cols() != 1) throw DimensionMismatch("span vector has shape " + v.shape());
  std::vector<std::complex<double>> w(n_);
  input_norm = 0;
  for (std::size_t i = 0; i < n_; ++i) {
    w[i] = v(i, 0);
    input_norm += std::norm(w[i]);
  }
  input_norm = std::sqrt(input_norm);
  // Two passes of modified Gram-Schmidt.
  for (int pass = 0; pass < 2; ++pass)
    for (const auto& q : q_) {
      std::complex<double> dot = 0;
      for (std::size_t i = 0; i < n_; ++i) dot += std::conj(q[i]) * w[i];
      for (std::size_t i = 0; i < n_; ++i) w[i] -= dot * q[i];
    }
  return w;
}

ApproxMatrix SpanBuilder<ApproxField>::basis() const {
  ApproxMatrix b(n_, q_.size());
  for (std::size_t j = 0; j < q_.size(); ++j)
    for (std::size_t i = 0; i < n_; ++i) b(i, j) = q_[j][i];
  return b;
}

}  // namespace ntrace::linalg
