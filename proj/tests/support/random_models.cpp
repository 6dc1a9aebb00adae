#include "random_models.hpp"

#include <algorithm>

namespace ntrace::testing {

namespace {

using Q = GaussRational;

long uniform(std::mt19937_64& rng, long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng); }

Q gaussian_int(std::mt19937_64& rng, long bound) { return Q(mpq_class(uniform(rng, -bound, bound)), mpq_class(uniform(rng, -bound, bound))); }

Q nonzero_gaussian_int(std::mt19937_64& rng, long bound) {
  for (;;) {
    Q q = gaussian_int(rng, bound);
    if (!q.is_zero()) return q;
  }
}

AdmissibleModel<linalg::ExactField> character(std::mt19937_64& rng, std::size_t n_gens) {
  AdmissibleModel<linalg::ExactField> m;
  for (std::size_t g = 0; g < n_gens; ++g) m.gens.push_back(ExactMatrix{{nonzero_gaussian_int(rng, 2)}});
  m.label = "character";
  return m;
}

// diag(a, b) with a ≠ b together with [[c, 1], [1, e]] leaves no line invariant.
AdmissibleModel<linalg::ExactField> plane(std::mt19937_64& rng, std::size_t n_gens) {
  AdmissibleModel<linalg::ExactField> m;
  Q a = nonzero_gaussian_int(rng, 2), b;
  do b = nonzero_gaussian_int(rng, 2);
  while (b == a);
  m.gens.push_back(ExactMatrix{{a, Q(0)}, {Q(0), b}});
  for (;;) {
    Q c = gaussian_int(rng, 2), e = gaussian_int(rng, 2);
    if (c * e == Q(1)) continue;
    m.gens.push_back(ExactMatrix{{c, Q(1)}, {Q(1), e}});
    break;
  }
  for (std::size_t g = 2; g < n_gens; ++g) m.gens.push_back(random_unimodular(rng, 2));
  m.label = "plane";
  return m;
}

}  // namespace

ExactMatrix random_unimodular(std::mt19937_64& rng, std::size_t n) {
  ExactMatrix s = ExactMatrix::identity(n);
  if (n < 2) return s;
  for (std::size_t k = 0; k < 2 * n; ++k) {
    auto i = static_cast<std::size_t>(uniform(rng, 0, static_cast<long>(n) - 1));
    auto j = static_cast<std::size_t>(uniform(rng, 0, static_cast<long>(n) - 2));
    if (j >= i) ++j;
    Q c(uniform(rng, 0, 1) ? 1 : -1);
    for (std::size_t col = 0; col < n; ++col) s(i, col) += c * s(j, col);
  }
  return s;
}

RandomModel random_module(std::mt19937_64& rng, std::size_t max_dim, std::size_t n_gens) {
  RandomModel out;
  const std::size_t pool = static_cast<std::size_t>(uniform(rng, 1, 3));
  for (std::size_t t = 0; t < pool; ++t)
    out.types.push_back(n_gens >= 2 && uniform(rng, 0, 1) ? plane(rng, n_gens) : character(rng, n_gens));
  const auto target = static_cast<std::size_t>(uniform(rng, 2, static_cast<long>(max_dim)));
  std::size_t dim = 0;
  for (;;) {
    auto t = static_cast<std::size_t>(uniform(rng, 0, static_cast<long>(pool) - 1));
    std::size_t td = out.types[t].dim();
    if (dim + td > target) {
      if (dim == 0) continue;
      break;
    }
    out.block_types.push_back(t);
    dim += td;
    if (dim == target) break;
  }

  std::vector<ExactMatrix> gens(n_gens, ExactMatrix(dim, dim));
  std::size_t row = 0;
  for (std::size_t t : out.block_types) {
    const auto& type = out.types[t];
    const std::size_t td = type.dim();
    for (std::size_t g = 0; g < n_gens; ++g) {
      gens[g].set_block(row, row, type.gens[g]);
      for (std::size_t r = row; r < row + td; ++r)
        for (std::size_t c = row + td; c < dim; ++c)
          if (uniform(rng, 0, 2) == 0) gens[g](r, c) = Q(uniform(rng, -2, 2));
    }
    row += td;
  }
  auto s = random_unimodular(rng, dim);
  auto s_inv = linalg::inverse(linalg::ExactField{}, s);
  for (auto& g : gens) g = s * g * s_inv;
  out.model.gens = gens;
  out.model.delta = gens[0];
  out.model.label = "random-module";
  return out;
}

RandomDelta random_delta(std::mt19937_64& rng, std::size_t max_dim, bool nilpotent) {
  RandomDelta out;
  std::vector<std::size_t> sizes;
  std::size_t dim = 0;
  const auto target = static_cast<std::size_t>(uniform(rng, nilpotent ? 3 : 2, static_cast<long>(max_dim)));
  while (dim < target) {
    std::size_t k = static_cast<std::size_t>(uniform(rng, 1, 3));
    if (sizes.empty() && nilpotent) k = static_cast<std::size_t>(uniform(rng, 2, 3));
    k = std::min(k, target - dim);
    sizes.push_back(k);
    dim += k;
  }
  ExactMatrix j(dim, dim);
  std::size_t row = 0;
  for (std::size_t k : sizes) {
    Q sigma;
    do sigma = gaussian_int(rng, 4);
    while (std::find(out.sigmas.begin(), out.sigmas.end(), sigma) != out.sigmas.end());
    out.sigmas.push_back(sigma);
    for (std::size_t i = 0; i < k; ++i) {
      j(row + i, row + i) = sigma;
      if (i + 1 < k) j(row + i, row + i + 1) = Q(1);
    }
    row += k;
  }
  auto s = random_unimodular(rng, dim);
  out.delta = s * j * linalg::inverse(linalg::ExactField{}, s);
  return out;
}

ExactMatrix random_algebra_element(std::mt19937_64& rng, const std::vector<ExactMatrix>& gens) {
  const std::size_t d = gens.at(0).rows();
  ExactMatrix out = ExactMatrix::identity(d);
  out *= Q(uniform(rng, -3, 3));
  for (const auto& g : gens) {
    ExactMatrix t = g;
    t *= Q(uniform(rng, -3, 3));
    out += t;
    for (const auto& h : gens) {
      ExactMatrix gh = g * h;
      gh *= Q(uniform(rng, -2, 2));
      out += gh;
    }
  }
  return out;
}

AdmissibleModel<linalg::ApproxField> to_approx(const AdmissibleModel<linalg::ExactField>& m) {
  AdmissibleModel<linalg::ApproxField> a;
  for (const auto& g : m.gens) a.gens.push_back(linalg::to_approx(g));
  if (m.delta.rows()) a.delta = linalg::to_approx(m.delta);
  for (const auto& s : m.resolvent_sample) a.resolvent_sample.push_back(s.to_complex());
  for (const auto& s : m.spectrum_hint) a.spectrum_hint.push_back(s.to_complex());
  a.label = m.label;
  return a;
}

}  // namespace ntrace::testing
