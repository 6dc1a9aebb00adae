#include <algorithm>
#include <cmath>
#include <functional>

#include "ntrace/spectral/spectral.hpp"
#include "ntrace/spectral/subspace.hpp"

namespace ntrace::spectral {

namespace {

template <Field F>
using Mat = MatrixOf<F>;

template <Field F>
using Finder = std::function<std::optional<Mat<F>>(std::span<const Mat<F>>, const Mat<F>&, std::string&)>;

template <Field F>
std::vector<Mat<F>> action_list(const AdmissibleModel<F>& m) {
  if (!m.gens.empty()) return m.gens;
  return {Mat<F>::identity(m.dim())};
}

template <Field F>
bool near_equal(const F& f, const typename F::Scalar& a, const typename F::Scalar& b) {
  if constexpr (F::is_exact) {
    return a == b;
  } else {
    return std::abs(a - b) <= 1e-8 * std::max({1.0, std::abs(a), std::abs(b)}) || f.equal(a, b);
  }
}

template <Field F>
bool keys_match(const F& f, const CanonicalKey<F>& a, const CanonicalKey<F>& b) {
  if (a.dim != b.dim || a.gen_traces.size() != b.gen_traces.size() || a.pair_traces.size() != b.pair_traces.size())
    return false;
  for (std::size_t i = 0; i < a.gen_traces.size(); ++i)
    if (!near_equal(f, a.gen_traces[i], b.gen_traces[i])) return false;
  for (std::size_t i = 0; i < a.pair_traces.size(); ++i)
    if (!near_equal(f, a.pair_traces[i], b.pair_traces[i])) return false;
  return true;
}

template <Field F>
Filtration<F> build_series(const F& f, const AdmissibleModel<F>& model, const Finder<F>& find, bool classify = true) {
  const std::size_t d = model.dim();
  Filtration<F> out;
  out.basis = Mat<F>::identity(d);
  out.dims = {0};
  std::vector<Mat<F>> wg = action_list(model);
  Mat<F> wdelta = model.has_delta() ? model.delta : Mat<F>();
  std::size_t offset = 0;
  while (offset < d) {
    const std::size_t w = d - offset;
    Mat<F> u = Mat<F>::identity(w);
    std::vector<Mat<F>> ug = wg;
    Mat<F> udelta = wdelta;
    std::string cert;
    // Descend to an irreducible submodule; the dimension drops each round.
    while (auto sub = find(ug, udelta, cert)) {
      u = u * *sub;
      for (auto& g : ug) g = restrict_to(f, *sub, g);
      std::vector<Mat<F>> dl{udelta};
      udelta = (udelta.rows() > 0 && is_stable<F>(f, dl, *sub)) ? restrict_to(f, *sub, udelta) : Mat<F>();
    }
    AdmissibleModel<F> factor;
    factor.gens = ug;
    factor.delta = udelta;
    factor.label = model.label + "/factor" + std::to_string(out.factors.size() + 1);
    out.factors.push_back(std::move(factor));
    out.certificates.push_back(cert);

    const std::size_t k = u.cols();
    Mat<F> p = adapted_basis(f, u);
    out.basis.set_block(0, offset, out.basis.block(0, offset, d, w) * p);
    for (auto& g : wg) g = quotient_action(f, p, k, g);
    std::vector<Mat<F>> dl{wdelta};
    wdelta = (wdelta.rows() > 0 && is_stable<F>(f, dl, u)) ? quotient_action(f, p, k, wdelta) : Mat<F>();
    offset += k;
    out.dims.push_back(offset);
  }
  if (!classify) return out;

  std::vector<CanonicalKey<F>> keys;
  for (std::size_t i = 0; i < out.factors.size(); ++i) {
    auto key = canonical_key(f, out.factors[i]);
    std::size_t cls = out.class_rep.size();
    for (std::size_t c = 0; c < out.class_rep.size(); ++c)
      if (keys_match(f, keys[c], key) && isomorphic(f, out.factors[out.class_rep[c]], out.factors[i])) {
        cls = c;
        break;
      }
    if (cls == out.class_rep.size()) {
      out.class_rep.push_back(i);
      keys.push_back(std::move(key));
    }
    out.factor_class.push_back(cls);
  }
  return out;
}

// The model's operators in the series basis, computed once per series.
template <Field F>
struct SeriesCoordinates {
  std::vector<Mat<F>> gens;
  Mat<F> delta;  // 0×0 when the model has none

  SeriesCoordinates(const F& f, const AdmissibleModel<F>& model, const Filtration<F>& s) {
    for (const auto& g : action_list(model)) gens.push_back(linalg::coordinates(f, s.basis, g * s.basis));
    if (model.has_delta()) delta = linalg::coordinates(f, s.basis, model.delta * s.basis);
  }
};

// Action of the model on F_hi / F_lo; Δ is kept when it preserves both.
template <Field F>
AdmissibleModel<F> section(const F& f, const SeriesCoordinates<F>& x, const Filtration<F>& s, std::size_t lo,
                           std::size_t hi, const std::string& label) {
  const std::size_t a = s.dims[lo], b = s.dims[hi];
  AdmissibleModel<F> out;
  for (const auto& g : x.gens) out.gens.push_back(g.block(a, a, b - a, b - a));
  if (x.delta.rows() > 0) {
    const auto& full = x.delta;
    bool triangular = true;
    for (std::size_t r = a; r < b && triangular; ++r)
      for (std::size_t c = 0; c < a; ++c)
        if (!f.is_zero(full(r, c))) {
          triangular = false;
          break;
        }
    for (std::size_t r = b; r < full.rows() && triangular; ++r)
      for (std::size_t c = a; c < b; ++c)
        if (!f.is_zero(full(r, c))) {
          triangular = false;
          break;
        }
    if (triangular) out.delta = full.block(a, a, b - a, b - a);
  }
  out.label = label + "/section";
  return out;
}

}  // namespace

template <Field F>
CanonicalKey<F> canonical_key(const F& f, const AdmissibleModel<F>& model) {
  CanonicalKey<F> key;
  key.dim = model.dim();
  for (const auto& g : model.gens) key.gen_traces.push_back(g.trace());
  for (std::size_t i = 0; i < model.gens.size(); ++i)
    for (std::size_t j = i; j < model.gens.size(); ++j) key.pair_traces.push_back((model.gens[i] * model.gens[j]).trace());
  if (model.has_delta()) {
    try {
      key.delta_spectrum = linalg::eigenvalues(f, model.delta, std::span<const typename F::Scalar>(model.spectrum_hint));
    } catch (const ExactEigenvalueNotInField&) {
    }
  }
  return key;
}

template <Field F>
bool isomorphic(const F& f, const AdmissibleModel<F>& a, const AdmissibleModel<F>& b) {
  if (a.dim() != b.dim() || a.gens.size() != b.gens.size()) return false;
  if (a.gens.empty()) return true;  // no action: only the dimension matters
  auto space = linalg::intertwiner_space<F>(f, a.gens, b.gens);
  if (space.empty()) return false;
  Mat<F> generic(b.dim(), a.dim());
  for (std::size_t k = 0; k < space.size(); ++k) {
    Mat<F> t = space[k];
    t *= f.from_int(static_cast<long>(2 * k + 1));
    generic += t;
  }
  if (linalg::is_invertible(f, generic)) return true;
  for (const auto& t : space)
    if (linalg::is_invertible(f, t)) return true;
  return false;
}

template <Field F>
PiClass<F> make_pi_class(const F& f, const AdmissibleModel<F>& pi) {
  pi.validate(f);
  std::string cert;
  std::optional<Mat<F>> sub;
  auto gens = action_list(pi);
  try {
    sub = find_proper_submodule<F>(f, gens, pi.has_delta() ? pi.delta : Mat<F>(), cert);
  } catch (const Error& e) {
    throw NonIrreduciblePi("irreducibility of '" + pi.label + "' not certified: " + e.what());
  }
  if (sub)
    throw NonIrreduciblePi("'" + pi.label + "' has a stable subspace of dimension " + std::to_string(sub->cols()));
  return {pi, canonical_key(f, pi)};
}

template <Field F>
Filtration<F> composition_series(const F& f, const AdmissibleModel<F>& model) {
  model.validate(f);
  Finder<F> find = [&f](std::span<const Mat<F>> g, const Mat<F>& delta, std::string& cert) {
    return find_proper_submodule<F>(f, g, delta, cert);
  };
  return build_series(f, model, find);
}

template <Field F>
MultiplicityTable<F> multiplicity_table(const F& f, const Filtration<F>& series) {
  MultiplicityTable<F> table;
  for (std::size_t c = 0; c < series.class_rep.size(); ++c) {
    const auto& rep = series.factors[series.class_rep[c]];
    table.classes.push_back({rep, canonical_key(f, rep)});
    table.counts.push_back(
        static_cast<std::size_t>(std::count(series.factor_class.begin(), series.factor_class.end(), c)));
  }
  return table;
}

template <Field F>
std::size_t multiplicity(const F& f, const AdmissibleModel<F>& model, const PiClass<F>& pi) {
  auto series = composition_series(f, model);
  for (std::size_t c = 0; c < series.class_rep.size(); ++c) {
    const auto& rep = series.factors[series.class_rep[c]];
    if (keys_match(f, canonical_key(f, rep), pi.key) && isomorphic(f, pi.rep, rep))
      return static_cast<std::size_t>(std::count(series.factor_class.begin(), series.factor_class.end(), c));
  }
  return 0;
}

template <Field F>
RandomFiltrationResult<F> random_pi_filtration_length(const F& f, const AdmissibleModel<F>& model,
                                                      const PiClass<F>& pi, std::size_t trials, std::uint64_t seed) {
  model.validate(f);
  RandomFiltrationResult<F> result;
  for (std::size_t t = 0; t < trials; ++t) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(t)};
    std::mt19937_64 rng(seq);
    Finder<F> find = [&f, &rng](std::span<const Mat<F>> g, const Mat<F>& delta, std::string& cert) {
      return random_proper_submodule<F>(f, g, delta, rng, cert);
    };
    auto series = build_series(f, model, find, false);

    std::vector<std::size_t> pi_steps;  // step i means F_i / F_{i-1} ≅ π
    for (std::size_t i = 0; i < series.length(); ++i)
      if (keys_match(f, canonical_key(f, series.factors[i]), pi.key) && isomorphic(f, pi.rep, series.factors[i]))
        pi_steps.push_back(i + 1);

    const SeriesCoordinates<F> coords(f, model, series);
    bool certified = true;
    for (std::size_t s : pi_steps) {
      auto sq = section(f, coords, series, s - 1, s, model.label);
      if (!isomorphic(f, pi.rep, sq)) certified = false;
    }
    std::size_t lo = 0;
    auto gap_clean = [&](std::size_t a, std::size_t b) {
      if (a >= b) return true;
      auto gap = section(f, coords, series, a, b, model.label);
      auto gs = composition_series(f, gap);
      for (const auto& fac : gs.factors)
        if (isomorphic(f, pi.rep, fac)) return false;
      return true;
    };
    for (std::size_t s : pi_steps) {
      if (!gap_clean(lo, s - 1)) certified = false;
      lo = s;
    }
    if (!gap_clean(lo, series.length())) certified = false;

    result.trial_lengths.push_back(pi_steps.size());
    if (certified) {
      ++result.trials_certified;
      result.certified = true;
      result.length = std::max(result.length, pi_steps.size());
    }
  }
  return result;
}

template <Field F>
typename F::Scalar spectral_sum(const F& f, const Filtration<F>& series, const MatrixOf<F>& f_op) {
  const std::size_t d = series.basis.rows();
  if (f_op.rows() != d || f_op.cols() != d) throw DimensionMismatch("operator shape " + f_op.shape());
  auto x = linalg::coordinates(f, series.basis, f_op * series.basis);
  const double scale = std::max(1.0, linalg::frobenius_norm(x));
  auto negligible = [&](const typename F::Scalar& v) {
    if constexpr (F::is_exact) {
      return v.is_zero();
    } else {
      return std::abs(v) <= 1e-9 * scale;
    }
  };
  for (std::size_t i = 1; i < series.dims.size(); ++i)
    for (std::size_t r = series.dims[i]; r < d; ++r)
      for (std::size_t c = series.dims[i - 1]; c < series.dims[i]; ++c)
        if (!negligible(x(r, c))) throw NotStable("operator does not preserve the composition series");

  typename F::Scalar spectral = f.from_int(0);
  for (std::size_t c = 0; c < series.class_rep.size(); ++c) {
    const std::size_t i = series.class_rep[c] + 1;
    const std::size_t a = series.dims[i - 1], b = series.dims[i];
    auto n = static_cast<long>(std::count(series.factor_class.begin(), series.factor_class.end(), c));
    spectral += f.from_int(n) * x.block(a, a, b - a, b - a).trace();
  }
  return spectral;
}

template <Field F>
typename F::Scalar spectral_trace(const F& f, const Filtration<F>& series, const MatrixOf<F>& f_op) {
  auto spectral = spectral_sum(f, series, f_op);
  auto direct = f_op.trace();
  bool agree;
  if constexpr (F::is_exact) {
    agree = spectral == direct;
  } else {
    agree = std::abs(spectral - direct) <= 1e-9 * std::max({1.0, std::abs(direct)});
  }
  if (!agree)
    throw TraceMismatch("spectral side " + linalg::scalar_text(spectral) + " differs from direct trace " +
                        linalg::scalar_text(direct));
  return spectral;
}

template <Field F>
typename F::Scalar spectral_trace(const F& f, const AdmissibleModel<F>& model, const MatrixOf<F>& f_op) {
  return spectral_trace(f, composition_series(f, model), f_op);
}

#define NTRACE_INSTANTIATE(F)                                                                                       \
  template CanonicalKey<F> canonical_key<F>(const F&, const AdmissibleModel<F>&);                                    \
  template bool isomorphic<F>(const F&, const AdmissibleModel<F>&, const AdmissibleModel<F>&);                       \
  template PiClass<F> make_pi_class<F>(const F&, const AdmissibleModel<F>&);                                        \
  template Filtration<F> composition_series<F>(const F&, const AdmissibleModel<F>&);                                \
  template MultiplicityTable<F> multiplicity_table<F>(const F&, const Filtration<F>&);                              \
  template std::size_t multiplicity<F>(const F&, const AdmissibleModel<F>&, const PiClass<F>&);                     \
  template RandomFiltrationResult<F> random_pi_filtration_length<F>(const F&, const AdmissibleModel<F>&,            \
                                                                    const PiClass<F>&, std::size_t, std::uint64_t); \
  template typename F::Scalar spectral_sum<F>(const F&, const Filtration<F>&, const MatrixOf<F>&);                  \
  template typename F::Scalar spectral_trace<F>(const F&, const Filtration<F>&, const MatrixOf<F>&);                \
  template typename F::Scalar spectral_trace<F>(const F&, const AdmissibleModel<F>&, const MatrixOf<F>&);

NTRACE_INSTANTIATE(ExactField)
NTRACE_INSTANTIATE(ApproxField)

}  // namespace ntrace::spectral
