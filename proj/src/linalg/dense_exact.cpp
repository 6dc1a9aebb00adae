#include <algorithm>

#include "ntrace/linalg/dense.hpp"

namespace ntrace::linalg {

namespace {

using Q = GaussRational;

// row_i -= factor * row_p, touching only the listed nonzero columns of row_p.
void eliminate(ExactMatrix& m, std::size_t i, std::size_t p, const Q& factor,
               const std::vector<std::size_t>& support) {
  for (std::size_t j : support) m(i, j) -= factor * m(p, j);
}

}  // namespace

ExactEchelon row_reduce(const ExactMatrix& m) {
  ExactEchelon out{m, {}};
  ExactMatrix& r = out.reduced;
  const std::size_t rows = r.rows(), cols = r.cols();
  std::size_t lead = 0;
  for (std::size_t c = 0; c < cols && lead < rows; ++c) {
    std::size_t p = lead;
    while (p < rows && r(p, c).is_zero()) ++p;
    if (p == rows) continue;
    if (p != lead)
      for (std::size_t j = c; j < cols; ++j) std::swap(r(p, j), r(lead, j));
    Q inv = r(lead, c).inverse();
    std::vector<std::size_t> support;
    for (std::size_t j = c; j < cols; ++j) {
      if (r(lead, j).is_zero()) continue;
      r(lead, j) *= inv;
      support.push_back(j);
    }
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == lead || r(i, c).is_zero()) continue;
      Q factor = r(i, c);
      eliminate(r, i, lead, factor, support);
    }
    out.pivots.push_back(c);
    ++lead;
  }
  return out;
}

ExactMatrix nullspace(const ExactField&, const ExactMatrix& m) {
  auto ech = row_reduce(m);
  const std::size_t n = m.cols();
  std::vector<bool> is_pivot(n, false);
  for (auto c : ech.pivots) is_pivot[c] = true;
  std::vector<std::size_t> free;
  for (std::size_t c = 0; c < n; ++c)
    if (!is_pivot[c]) free.push_back(c);
  ExactMatrix basis(n, free.size());
  for (std::size_t k = 0; k < free.size(); ++k) {
    basis(free[k], k) = Q(1);
    for (std::size_t r = 0; r < ech.pivots.size(); ++r) basis(ech.pivots[r], k) = -ech.reduced(r, free[k]);
  }
  return basis;
}

ExactMatrix nullspace_of_dim(const ExactField& f, const ExactMatrix& m, std::size_t dim) {
  auto ns = nullspace(f, m);
  if (ns.cols() != dim)
    throw NotInSpan("expected kernel of dimension " + std::to_string(dim) + ", found " +
                    std::to_string(ns.cols()));
  return ns;
}

std::size_t rank(const ExactField&, const ExactMatrix& m) { return row_reduce(m).pivots.size(); }

ExactMatrix inverse(const ExactField&, const ExactMatrix& m) {
  if (!m.is_square()) throw DimensionMismatch("inverse of non-square " + m.shape());
  const std::size_t n = m.rows();
  auto aug = ExactMatrix::hstack(m, ExactMatrix::identity(n));
  auto ech = row_reduce(aug);
  if (ech.pivots.size() < n || ech.pivots[n - 1] != n - 1) throw SingularMatrix("matrix is singular");
  return ech.reduced.block(0, n, n, n);
}

ExactMatrix coordinates(const ExactField&, const ExactMatrix& basis, const ExactMatrix& targets) {
  const std::size_t k = basis.cols();
  auto ech = row_reduce(ExactMatrix::hstack(basis, targets));
  for (std::size_t r = 0; r < ech.pivots.size(); ++r)
    if (ech.pivots[r] >= k) throw NotInSpan("vector outside the span of the basis");
  if (ech.pivots.size() != k) throw DimensionMismatch("basis columns are dependent");
  return ech.reduced.block(0, k, k, targets.cols());
}

ExactMatrix column_basis(const ExactField&, const ExactMatrix& m) {
  auto ech = row_reduce(m.transpose());
  return ech.reduced.block(0, 0, ech.pivots.size(), m.rows()).transpose();
}

ExactMatrix complement(const ExactField& f, const ExactMatrix& basis) {
  const std::size_t n = basis.rows();
  SpanBuilder<ExactField> span(f, n);
  for (std::size_t j = 0; j < basis.cols(); ++j) span.add(basis.col(j));
  std::vector<ExactMatrix> extra;
  for (std::size_t k = 0; k < n && span.dim() < n; ++k) {
    auto e = ExactMatrix::unit_vector(n, k);
    if (span.add(e)) extra.push_back(e);
  }
  return ExactMatrix::hstack(std::span<const ExactMatrix>(extra), n);
}

double frobenius_norm(const ExactMatrix& m) { return frobenius_norm(to_approx(m)); }

bool equal(const ExactField&, const ExactMatrix& a, const ExactMatrix& b) { return a == b; }

std::vector<GaussRational> characteristic_polynomial(const ExactMatrix& m) {
  if (!m.is_square()) throw DimensionMismatch("characteristic polynomial of " + m.shape());
  const std::size_t n = m.rows();
  ExactMatrix h = m;
  // Similarity reduction to upper Hessenberg form.
  for (std::size_t col = 0; col + 2 < n; ++col) {
    std::size_t piv = col + 1;
    while (piv < n && h(piv, col).is_zero()) ++piv;
    if (piv == n) continue;
    const std::size_t m1 = col + 1;
    if (piv != m1) {
      for (std::size_t j = 0; j < n; ++j) std::swap(h(piv, j), h(m1, j));
      for (std::size_t i = 0; i < n; ++i) std::swap(h(i, piv), h(i, m1));
    }
    Q t_inv = h(m1, col).inverse();
    for (std::size_t i = m1 + 1; i < n; ++i) {
      if (h(i, col).is_zero()) continue;
      Q u = h(i, col) * t_inv;
      for (std::size_t j = 0; j < n; ++j) h(i, j) -= u * h(m1, j);
      for (std::size_t r = 0; r < n; ++r) h(r, m1) += u * h(r, i);
    }
  }
  // Recurrence on leading principal minors of xI − H.
  std::vector<std::vector<Q>> p(n + 1);
  p[0] = {Q(1)};
  for (std::size_t k = 1; k <= n; ++k) {
    const auto& prev = p[k - 1];
    std::vector<Q> cur(k + 1, Q(0));
    for (std::size_t d = 0; d < prev.size(); ++d) {
      cur[d + 1] += prev[d];
      cur[d] -= h(k - 1, k - 1) * prev[d];
    }
    Q t(1);
    for (std::size_t i = 1; i < k; ++i) {
      t *= h(k - i, k - i - 1);
      if (t.is_zero()) break;
      Q coef = t * h(k - i - 1, k - 1);
      if (coef.is_zero()) continue;
      const auto& lower = p[k - i - 1];
      for (std::size_t d = 0; d < lower.size(); ++d) cur[d] -= coef * lower[d];
    }
    p[k] = std::move(cur);
  }
  return p[n];
}

bool SpanBuilder<ExactField>::add(const ExactMatrix& v) {
  auto w = reduce(v);
  auto it = std::find_if(w.begin(), w.end(), [](const Q& x) { return !x.is_zero(); });
  if (it == w.end()) return false;
  std::size_t piv = static_cast<std::size_t>(it - w.begin());
  Q inv = w[piv].inverse();
  for (std::size_t j = piv; j < n_; ++j)
    if (!w[j].is_zero()) w[j] *= inv;
  rows_.push_back(std::move(w));
  pivots_.push_back(piv);
  originals_.push_back(v);
  return true;
}

bool SpanBuilder<ExactField>::contains(const ExactMatrix& v) const {
  auto w = reduce(v);
  return std::all_of(w.begin(), w.end(), [](const Q& x) { return x.is_zero(); });
}

std::vector<GaussRational> SpanBuilder<ExactField>::reduce(const ExactMatrix& v) const {
  if (v.rows() != n_ || v.cols() != 1) throw DimensionMismatch("span vector has shape " + v.shape());
  std::vector<Q> w(n_);
  for (std::size_t i = 0; i < n_; ++i) w[i] = v(i, 0);
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    const std::size_t p = pivots_[r];
    if (w[p].is_zero()) continue;
    Q factor = w[p];
    const auto& row = rows_[r];
    for (std::size_t j = p; j < n_; ++j)
      if (!row[j].is_zero()) w[j] -= factor * row[j];
  }
  return w;
}

ExactMatrix SpanBuilder<ExactField>::basis() const {
  return ExactMatrix::hstack(std::span<const ExactMatrix>(originals_), n_);
}

ExactMatrix SpanBuilder<ExactField>::reduced_basis() const {
  std::vector<std::size_t> order(rows_.size());
  for (std::size_t r = 0; r < order.size(); ++r) order[r] = r;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return pivots_[a] < pivots_[b]; });
  std::vector<std::vector<Q>> rref;
  for (std::size_t r : order) rref.push_back(rows_[r]);
  // Clear each pivot column above its pivot, last pivot first.
  for (std::size_t r = rref.size(); r-- > 0;) {
    const std::size_t p = pivots_[order[r]];
    for (std::size_t above = 0; above < r; ++above) {
      if (rref[above][p].is_zero()) continue;
      Q factor = rref[above][p];
      for (std::size_t j = p; j < n_; ++j)
        if (!rref[r][j].is_zero()) rref[above][j] -= factor * rref[r][j];
    }
  }
  ExactMatrix out(n_, rref.size());
  for (std::size_t c = 0; c < rref.size(); ++c)
    for (std::size_t i = 0; i < n_; ++i) out(i, c) = rref[c][i];
  return out;
}

}  // namespace ntrace::linalg
