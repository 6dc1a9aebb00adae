#include "ntrace/spectral/subspace.hpp"

#include <algorithm>
#include <cmath>

namespace ntrace::spectral {

using linalg::SpanBuilder;

namespace {

template <Field F>
using Mat = MatrixOf<F>;

// Approx spinning queues unit vectors so repeated products cannot overflow.
template <Field F>
Mat<F> normalized(const Mat<F>& v) {
  if constexpr (F::is_exact) {
    return v;
  } else {
    double n = linalg::frobenius_norm(v);
    if (n == 0) return v;
    Mat<F> w = v;
    w *= std::complex<double>(1.0 / n, 0.0);
    return w;
  }
}

// Per eigenvalue, a list of candidates to try in order. Exact candidates
// come from rationalizing a floating-point solve and are confirmed by the
// caller through a nonzero kernel.
template <Field F>
std::vector<std::vector<typename F::Scalar>> eigenvalue_guesses(const F& f, const Mat<F>& op) {
  std::vector<std::vector<typename F::Scalar>> out;
  if constexpr (F::is_exact) {
    (void)f;
    try {
      // Each miss costs an exact nullspace, so only the simplest few are kept;
      // the deterministic search behind this one is exhaustive.
      for (const auto& ev : linalg::eigenvalues(ApproxField{}, linalg::to_approx(op))) {
        auto c = linalg::rational_candidates(ev.value, 1e-3 * std::max(1.0, std::abs(ev.value)));
        if (c.size() > 4) c.resize(4);
        out.push_back(std::move(c));
      }
    } catch (const NonConvergence&) {
    }
  } else {
    for (const auto& ev : linalg::eigenvalues(f, op)) out.push_back({ev.value});
  }
  return out;
}

template <Field F>
Mat<F> random_combination(const F& f, const Mat<F>& basis, std::mt19937_64& rng) {
  std::uniform_int_distribution<long> coef(-3, 3);
  for (;;) {
    Mat<F> v(basis.rows(), 1);
    bool any = false;
    for (std::size_t j = 0; j < basis.cols(); ++j) {
      long c = coef(rng);
      if (c == 0) continue;
      any = true;
      for (std::size_t i = 0; i < basis.rows(); ++i) v(i, 0) += f.from_int(c) * basis(i, j);
    }
    if (any && !linalg::is_zero(f, v)) return v;
  }
}

template <Field F>
std::vector<Mat<F>> transposes(std::span<const Mat<F>> gens) {
  std::vector<Mat<F>> out;
  for (const auto& g : gens) out.push_back(g.transpose());
  return out;
}

template <Field F>
struct Prober {
  const F& f;
  std::span<const Mat<F>> gens;
  std::vector<Mat<F>> gens_t;
  std::size_t d;

  Prober(const F& field, std::span<const Mat<F>> g) : f(field), gens(g), gens_t(transposes<F>(g)), d(g[0].rows()) {}

  std::optional<Mat<F>> spin_seed(const Mat<F>& v) const {
    auto s = spin<F>(f, gens, v);
    if (s.cols() > 0 && s.cols() < d) return s;
    return std::nullopt;
  }

  // Annihilator of a proper dual submodule spun from w.
  std::optional<Mat<F>> dual_seed(const Mat<F>& w) const {
    auto s = spin<F>(f, gens_t, w);
    if (s.cols() > 0 && s.cols() < d) return linalg::nullspace(f, s.transpose());
    return std::nullopt;
  }

  std::optional<Mat<F>> eigenvector_seeds(const Mat<F>& op) const {
    for (const auto& ev : linalg::in_field_eigenvalues(f, op)) {
      auto k = linalg::nullspace(f, linalg::shifted(f, op, ev.value));
      for (std::size_t j = 0; j < k.cols(); ++j)
        if (auto s = spin_seed(k.col(j))) return s;
    }
    return std::nullopt;
  }

  // Norton's test on θ: a submodule, or a proof of irreducibility when some
  // eigenvalue has one-dimensional kernels for θ and θᵀ.
  std::optional<Mat<F>> norton(const Mat<F>& theta, bool& irreducible) const {
    for (const auto& ev : linalg::in_field_eigenvalues(f, theta)) {
      auto shifted = linalg::shifted(f, theta, ev.value);
      auto k = linalg::nullspace(f, shifted);
      if (k.cols() == 0) continue;
      for (std::size_t j = 0; j < k.cols(); ++j)
        if (auto s = spin_seed(k.col(j))) return s;
      auto kt = linalg::nullspace(f, shifted.transpose());
      for (std::size_t j = 0; j < kt.cols(); ++j)
        if (auto s = dual_seed(kt.col(j))) return s;
      if (k.cols() == 1 && kt.cols() == 1) {
        irreducible = true;
        return std::nullopt;
      }
    }
    return std::nullopt;
  }

  std::vector<Mat<F>> short_words() const {
    std::vector<Mat<F>> words{Mat<F>::identity(d)};
    for (const auto& g : gens) words.push_back(g);
    for (const auto& g : gens)
      for (const auto& h : gens) words.push_back(g * h);
    return words;
  }

  std::vector<Mat<F>> theta_candidates() const {
    std::vector<Mat<F>> out;
    for (const auto& g : gens) out.push_back(g);
    for (std::size_t i = 0; i < gens.size(); ++i)
      for (std::size_t j = 0; j < gens.size(); ++j) {
        out.push_back(gens[i] * gens[j]);
        if (i < j) out.push_back(gens[i] + gens[j]);
      }
    auto words = short_words();
    std::mt19937_64 rng(0x6e6f72746f6eULL);
    std::uniform_int_distribution<long> coef(-3, 3);
    for (int t = 0; t < 24; ++t) {
      Mat<F> theta(d, d);
      for (const auto& w : words) {
        auto c = f.from_int(coef(rng));
        Mat<F> term = w;
        term *= c;
        theta += term;
      }
      out.push_back(std::move(theta));
    }
    return out;
  }

  // Burnside: W is absolutely irreducible iff the generated algebra is End(W).
  bool algebra_is_full() const {
    const std::size_t n = d * d;
    auto vec = [&](const Mat<F>& m) {
      Mat<F> v(n, 1);
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) v(i * d + j, 0) = m(i, j);
      return v;
    };
    SpanBuilder<F> span(f, n);
    std::vector<Mat<F>> queue{Mat<F>::identity(d)};
    span.add(vec(queue[0]));
    for (std::size_t k = 0; k < queue.size() && span.dim() < n; ++k)
      for (const auto& g : gens) {
        Mat<F> w = g * queue[k];
        if constexpr (!F::is_exact) w = normalized<F>(w);
        if (span.add(vec(w))) queue.push_back(std::move(w));
      }
    return span.dim() == n;
  }

  std::optional<Mat<F>> commutant_probe() const {
    auto comm = linalg::intertwiner_space<F>(f, gens, gens);
    for (const auto& c : comm) {
      if (linalg::is_zero(f, linalg::shifted(f, c, c(0, 0))) && c.rows() > 0) continue;
      for (const auto& ev : linalg::in_field_eigenvalues(f, c)) {
        auto k = linalg::nullspace(f, linalg::shifted(f, c, ev.value));
        if (k.cols() > 0 && k.cols() < d) return k;
      }
    }
    return std::nullopt;
  }
};

// Rationalizes an approximate subspace through its reduced row echelon form,
// which is unique and has entries in Q(i) whenever the subspace is defined there.
std::optional<linalg::ExactMatrix> rationalize_subspace(const linalg::ApproxMatrix& u) {
  const std::size_t k = u.cols(), n = u.rows();
  linalg::ApproxMatrix r = u.transpose();
  std::vector<std::size_t> pivots;
  std::size_t lead = 0;
  for (std::size_t c = 0; c < n && lead < k; ++c) {
    std::size_t p = lead;
    for (std::size_t i = lead; i < k; ++i)
      if (std::abs(r(i, c)) > std::abs(r(p, c))) p = i;
    if (std::abs(r(p, c)) < 1e-8) continue;
    for (std::size_t j = 0; j < n; ++j) std::swap(r(p, j), r(lead, j));
    auto inv = 1.0 / r(lead, c);
    for (std::size_t j = 0; j < n; ++j) r(lead, j) *= inv;
    for (std::size_t i = 0; i < k; ++i) {
      if (i == lead) continue;
      auto factor = r(i, c);
      for (std::size_t j = 0; j < n; ++j) r(i, j) -= factor * r(lead, j);
    }
    pivots.push_back(c);
    ++lead;
  }
  if (lead != k) return std::nullopt;
  linalg::ExactMatrix out(n, k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      auto cands = linalg::rational_candidates(r(i, j), 1e-9, 24);
      if (cands.empty()) return std::nullopt;
      auto best = cands.front();
      if (std::abs(best.to_complex() - r(i, j)) > 1e-7) return std::nullopt;
      out(j, i) = best;
    }
  return out;
}

}  // namespace

template <Field F>
MatrixOf<F> spin(const F& f, std::span<const MatrixOf<F>> gens, const MatrixOf<F>& seeds) {
  const std::size_t n = seeds.rows();
  SpanBuilder<F> span(f, n);
  std::vector<Mat<F>> queue;
  for (std::size_t j = 0; j < seeds.cols(); ++j) {
    auto v = normalized<F>(seeds.col(j));
    if (span.add(v)) queue.push_back(std::move(v));
  }
  for (std::size_t k = 0; k < queue.size() && span.dim() < n; ++k)
    for (const auto& g : gens) {
      auto w = normalized<F>(g * queue[k]);
      if (span.add(w)) queue.push_back(std::move(w));
    }
  // Krylov vectors have entries growing with each product; the echelon form does not.
  if constexpr (F::is_exact) {
    return span.reduced_basis();
  } else {
    return span.basis();
  }
}

template <Field F>
bool is_stable(const F& f, std::span<const MatrixOf<F>> ops, const MatrixOf<F>& basis) {
  SpanBuilder<F> span(f, basis.rows());
  for (std::size_t j = 0; j < basis.cols(); ++j) span.add(normalized<F>(basis.col(j)));
  for (const auto& op : ops)
    for (std::size_t j = 0; j < basis.cols(); ++j)
      if (!span.contains(normalized<F>(op * basis.col(j)))) return false;
  return true;
}

template <Field F>
MatrixOf<F> restrict_to(const F& f, const MatrixOf<F>& basis, const MatrixOf<F>& op) {
  return linalg::coordinates(f, basis, op * basis);
}

template <Field F>
MatrixOf<F> adapted_basis(const F& f, const MatrixOf<F>& u) {
  return MatrixOf<F>::hstack(u, linalg::complement(f, u));
}

template <Field F>
MatrixOf<F> quotient_action(const F& f, const MatrixOf<F>& b, std::size_t k, const MatrixOf<F>& op) {
  auto full = linalg::coordinates(f, b, op * b);
  const std::size_t n = b.cols();
  return full.block(k, k, n - k, n - k);
}

template <Field F>
std::optional<MatrixOf<F>> find_proper_submodule(const F& f, std::span<const MatrixOf<F>> gens,
                                                 const MatrixOf<F>& delta, std::string& cert) {
  if (gens.empty()) throw InvalidModel("submodule search needs at least one generator");
  const std::size_t d = gens[0].rows();
  if (d == 0) throw InvalidModel("submodule search on the zero module");
  if (d == 1) {
    cert = "dimension 1";
    return std::nullopt;
  }
  Prober<F> p(f, gens);

  if (delta.rows() == d)
    if (auto s = p.eigenvector_seeds(delta)) return s;
  for (const auto& g : gens)
    if (auto s = p.eigenvector_seeds(g)) return s;

  for (const auto& theta : p.theta_candidates()) {
    bool irreducible = false;
    if (auto s = p.norton(theta, irreducible)) return s;
    if (irreducible) {
      cert = "Norton test";
      return std::nullopt;
    }
  }

  if (d <= 16 && p.algebra_is_full()) {
    cert = "Burnside (algebra is End)";
    return std::nullopt;
  }
  if (auto s = p.commutant_probe()) return s;

  if constexpr (F::is_exact) {
    // A submodule may exist over Q(i) although no probe exposed an in-field
    // eigenvector. Locate one numerically and certify it exactly.
    ApproxField af;
    std::vector<linalg::ApproxMatrix> agens;
    for (const auto& g : gens) agens.push_back(linalg::to_approx(g));
    linalg::ApproxMatrix adelta = delta.rows() == d ? linalg::to_approx(delta) : linalg::ApproxMatrix();
    std::string acert;
    std::optional<linalg::ApproxMatrix> approx_sub;
    try {
      approx_sub = find_proper_submodule<ApproxField>(af, agens, adelta, acert);
    } catch (const NonConvergence&) {
    }
    if (approx_sub) {
      if (auto exact = rationalize_subspace(*approx_sub); exact && is_stable<F>(f, gens, *exact)) return exact;
      throw ExactEigenvalueNotInField("module of dimension " + std::to_string(d) +
                                      " is reducible but no submodule is defined over Q(i)");
    }
    throw ExactEigenvalueNotInField("irreducibility of a module of dimension " + std::to_string(d) +
                                    " could not be certified over Q(i) (" + acert + ")");
  } else {
    throw NonConvergence("no submodule found and irreducibility not certified in dimension " + std::to_string(d));
  }
}

template <Field F>
std::optional<MatrixOf<F>> random_proper_submodule(const F& f, std::span<const MatrixOf<F>> gens,
                                                   const MatrixOf<F>& delta, std::mt19937_64& rng,
                                                   std::string& cert) {
  const std::size_t d = gens.empty() ? 0 : gens[0].rows();
  if (d > 1) {
    // Operators and eigenvalues are visited lazily in random order; the first
    // eigenvector spinning to a proper subspace wins.
    std::vector<const Mat<F>*> ops;
    if (delta.rows() == d) ops.push_back(&delta);
    for (const auto& g : gens) ops.push_back(&g);
    std::shuffle(ops.begin(), ops.end(), rng);
    Prober<F> p(f, gens);
    for (const Mat<F>* op : ops) {
      auto values = eigenvalue_guesses(f, *op);
      std::shuffle(values.begin(), values.end(), rng);
      for (const auto& candidates : values)
        for (const auto& c : candidates) {
          auto k = linalg::nullspace(f, linalg::shifted(f, *op, c));
          if (k.cols() == 0) continue;
          if (auto s = p.spin_seed(random_combination(f, k, rng))) return s;
          break;
        }
    }
  }
  return find_proper_submodule<F>(f, gens, delta, cert);
}

#define NTRACE_INSTANTIATE(F)                                                                               \
  template MatrixOf<F> spin<F>(const F&, std::span<const MatrixOf<F>>, const MatrixOf<F>&);                  \
  template bool is_stable<F>(const F&, std::span<const MatrixOf<F>>, const MatrixOf<F>&);                   \
  template MatrixOf<F> restrict_to<F>(const F&, const MatrixOf<F>&, const MatrixOf<F>&);                    \
  template MatrixOf<F> adapted_basis<F>(const F&, const MatrixOf<F>&);                                      \
  template MatrixOf<F> quotient_action<F>(const F&, const MatrixOf<F>&, std::size_t, const MatrixOf<F>&);   \
  template std::optional<MatrixOf<F>> find_proper_submodule<F>(const F&, std::span<const MatrixOf<F>>,      \
                                                               const MatrixOf<F>&, std::string&);           \
  template std::optional<MatrixOf<F>> random_proper_submodule<F>(const F&, std::span<const MatrixOf<F>>,    \
                                                                 const MatrixOf<F>&, std::mt19937_64&,      \
                                                                 std::string&);

NTRACE_INSTANTIATE(ExactField)
NTRACE_INSTANTIATE(ApproxField)

}  // namespace ntrace::spectral
