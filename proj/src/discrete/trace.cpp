#include "ntrace/discrete/trace.hpp"

#include <algorithm>
#include <chrono>
#include <deque>
#include <set>

#include "ntrace/linalg/dense.hpp"
#include "ntrace/spectral/spectral.hpp"

namespace ntrace::discrete {

namespace {

using Kind = FiniteIndexSubgroup::Kind;

Element word_inverse(const Element& w) {
  Element out(w.rbegin(), w.rend());
  for (auto& l : out) l = -l;
  return out;
}

Element concat(std::initializer_list<Element> parts) {
  Element out;
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return reduce_word(out);
}

// Some g with g⁻¹·u·g = v, for conjugate nontrivial words u, v.
Element free_conjugator(const Element& u, const Element& v) {
  auto [a, cu] = cyclic_form(u);
  auto [b, cv] = cyclic_form(v);
  // cv = r⁻¹·cu·r for the rotation cu = r·s, cv = s·r; then g = a·r·b⁻¹.
  for (std::size_t p = 0; p < cu.size(); ++p) {
    Element rot(cu.begin() + static_cast<std::ptrdiff_t>(p), cu.end());
    rot.insert(rot.end(), cu.begin(), cu.begin() + static_cast<std::ptrdiff_t>(p));
    if (rot == cv) return concat({a, Element(cu.begin(), cu.begin() + static_cast<std::ptrdiff_t>(p)), word_inverse(b)});
  }
  throw InvalidElement("words are not conjugate");
}

std::size_t quotient_order(const DiscreteGroup& q, const Element& x) {
  std::size_t n = 1;
  for (Element y = x; !q.is_identity(y); y = q.multiply(y, x)) ++n;
  return n;
}

template <Field F>
double magnitude(const F& f, const typename F::Scalar& s) {
  return std::abs(f.to_complex(s));
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

bool gamma_conjugate(const FiniteIndexSubgroup& gamma, const Element& u, const Element& v) {
  const auto& g = gamma.ambient();
  if (!gamma.contains(u) || !gamma.contains(v)) throw NotInSubgroup("Gamma-conjugacy of elements outside Gamma");
  if (!g.are_conjugate(u, v)) return false;
  switch (gamma.kind()) {
    case Kind::Lattice:
      return true;  // are_conjugate already means equality
    case Kind::Generated: {
      std::set<Element> seen{u};
      std::deque<Element> queue{u};
      while (!queue.empty()) {
        Element x = std::move(queue.front());
        queue.pop_front();
        if (x == v) return true;
        for (const auto& s : gamma.generators()) {
          Element y = g.conjugate(x, s);
          if (seen.insert(y).second) queue.push_back(std::move(y));
        }
      }
      return false;
    }
    case Kind::Kernel: {
      if (u.empty()) return v.empty();
      // Every conjugator is ρ^t·g0 with ρ the primitive root of u.
      const Element g0 = free_conjugator(u, v);
      const auto& q = gamma.quotient();
      const Element rho = gamma.quotient_image(primitive_root(u));
      Element x = gamma.quotient_image(g0);
      for (std::size_t t = 0, n = quotient_order(q, rho); t < n; ++t, x = q.multiply(rho, x))
        if (q.is_identity(x)) return true;
      return false;
    }
  }
  return false;
}

std::vector<GammaClass> conjugacy_classes_meeting(const FiniteIndexSubgroup& gamma, const std::vector<Element>& support) {
  const auto& g = gamma.ambient();
  std::vector<GammaClass> out;
  switch (gamma.kind()) {
    case Kind::Lattice:
      for (const auto& x : support)
        if (gamma.contains(x)) out.push_back({x, "singleton"});
      break;
    case Kind::Generated: {
      std::set<std::size_t> g_classes;
      for (const auto& x : support) g_classes.insert(g.class_of(x));
      std::set<Element> assigned;
      for (const auto& x : g.elements()) {
        if (!g_classes.count(g.class_of(x)) || !gamma.contains(x) || assigned.count(x)) continue;
        // Orbit of x under conjugation by the generators of Γ.
        std::deque<Element> queue{x};
        assigned.insert(x);
        std::size_t size = 0;
        while (!queue.empty()) {
          Element y = std::move(queue.front());
          queue.pop_front();
          ++size;
          for (const auto& s : gamma.generators()) {
            Element z = g.conjugate(y, s);
            if (assigned.insert(z).second) queue.push_back(std::move(z));
          }
        }
        std::size_t g_size = 0;
        for (const auto& y : g.elements()) g_size += g.class_of(y) == g.class_of(x);
        out.push_back({x, "Gamma-class of size " + std::to_string(size) + " in a G-class of size " + std::to_string(g_size)});
      }
      break;
    }
    case Kind::Kernel: {
      // Γ is normal, so the G-class of x ∈ Γ is the union of the Γ-classes of
      // rep_i⁻¹·x·rep_i.
      for (const auto& x : support) {
        if (!gamma.contains(x)) continue;
        for (const auto& r : gamma.coset_reps()) {
          Element c = g.conjugate(x, r);
          bool known = false;
          for (const auto& cls : out) known = known || gamma_conjugate(gamma, cls.rep, c);
          if (!known) out.push_back({c, "Gamma-class of " + g.format(c)});
        }
      }
      break;
    }
  }
  return out;
}

std::size_t centralizer_volume(const FiniteIndexSubgroup& gamma, const Element& x) {
  const auto& g = gamma.ambient();
  if (!gamma.contains(x)) throw NotInSubgroup(g.format(x) + " is not in the subgroup");
  switch (gamma.kind()) {
    case Kind::Lattice:
      return gamma.index();
    case Kind::Generated: {
      std::size_t in_g = 0, in_gamma = 0;
      for (const auto& y : g.elements())
        if (g.multiply(x, y) == g.multiply(y, x)) {
          ++in_g;
          in_gamma += gamma.contains(y);
        }
      return in_g / in_gamma;
    }
    case Kind::Kernel:
      if (x.empty()) return gamma.index();
      // G_γ = ⟨ρ⟩ and Γ_γ = ⟨ρ^e⟩ with e the order of ρ in the quotient.
      return quotient_order(gamma.quotient(), gamma.quotient_image(primitive_root(x)));
  }
  return 0;
}

template <Field F>
typename F::Scalar orbital_sum(const F& f, const DiscreteGroup& g, const Element& x, const DiscreteTestFunction<F>& fn) {
  auto total = f.from_int(0);
  for (const auto& [y, c] : fn.support)
    if (g.are_conjugate(x, y)) total += c;
  return total;
}

template <Field F>
GeometricSide<F> geometric_side_discrete(const F& f, const Twist<F>& omega, const DiscreteTestFunction<F>& fn) {
  const auto& gamma = omega.subgroup();
  std::vector<Element> support;
  for (const auto& [x, c] : fn.support) support.push_back(x);
  GeometricSide<F> out{f.from_int(0), {}};
  for (auto& cls : conjugacy_classes_meeting(gamma, support)) {
    typename GeometricSide<F>::Term term{cls, centralizer_volume(gamma, cls.rep),
                                         orbital_sum(f, gamma.ambient(), cls.rep, fn), omega(cls.rep).trace()};
    out.value += f.from_int(static_cast<long>(term.volume)) * term.orbital * term.trace_omega;
    out.terms.push_back(std::move(term));
  }
  return out;
}

template <Field F>
typename F::Scalar kernel_diagonal_trace(const F& f, const Twist<F>& omega, const DiscreteTestFunction<F>& fn) {
  const auto& gamma = omega.subgroup();
  auto total = f.from_int(0);
  for (const auto& [x, c] : fn.support)
    for (std::size_t i = 0; i < gamma.index(); ++i) {
      auto step = gamma.act(i, x);
      if (step.coset == i) total += c * omega(step.gamma).trace();
    }
  return total;
}

template <Field F>
TraceReport evaluate_discrete(const F& f, const InducedRep<F>& rep, const DiscreteTestFunction<F>& fn,
                              const DiscreteOptions& options) {
  using linalg::scalar_text;
  TraceReport report;
  report.scenario_id = options.scenario_id;
  report.case_kind = "discrete";
  report.backend = std::string(F::name);
  report.normalization = {
      {"measure", "counting measure on G, Gamma and all quotients"},
      {"volume", "vol(Gamma_g \\ G_g) = number of cosets of Gamma_g in G_g"},
      {"cosets", "right cosets Gamma rep_j, rep_i g = gamma rep_j"},
  };
  const auto& gamma = rep.subgroup();
  report.parameters = {{"group", gamma.ambient().name()},
                       {"index", std::to_string(gamma.index())},
                       {"twist_dim", std::to_string(rep.twist.dim())},
                       {"rep_dim", std::to_string(rep.model.dim())}};
  try {
    auto t0 = std::chrono::steady_clock::now();
    const auto r_f = operator_of_test_function(f, rep, fn);
    const auto direct = r_f.trace();
    const auto diagonal = kernel_diagonal_trace(f, rep.twist, fn);
    report.timings.emplace_back("direct", seconds_since(t0));

    t0 = std::chrono::steady_clock::now();
    const auto series = spectral::composition_series(f, rep.model);
    const auto spectral_value = spectral::spectral_sum(f, series, r_f);
    const auto table = spectral::multiplicity_table(f, series);
    const auto coords = linalg::coordinates(f, series.basis, r_f * series.basis);
    for (std::size_t c = 0; c < table.classes.size(); ++c) {
      const auto& pi = table.classes[c];
      MultiplicityRow row;
      row.dim = pi.key.dim;
      row.multiplicity = table.counts[c];
      std::string traces;
      for (const auto& t : pi.key.gen_traces) traces += (traces.empty() ? "" : ", ") + scalar_text(t);
      row.label = "dim " + std::to_string(row.dim) + ", tr pi(generators) = (" + traces + ")";
      // tr π(f) on the factor representing this class.
      const std::size_t i = series.class_rep[c] + 1;
      const std::size_t a = series.dims[i - 1], b = series.dims[i];
      row.trace = scalar_text(coords.block(a, a, b - a, b - a).trace());
      report.multiplicities.push_back(std::move(row));
    }
    report.timings.emplace_back("spectral", seconds_since(t0));

    t0 = std::chrono::steady_clock::now();
    const auto geometric = geometric_side_discrete(f, rep.twist, fn);
    for (const auto& term : geometric.terms)
      report.geometric_terms.push_back(
          {gamma.ambient().format(term.cls.rep) + " (" + term.cls.description + ")", std::to_string(term.volume),
           scalar_text(term.orbital), scalar_text(term.trace_omega),
           scalar_text(f.from_int(static_cast<long>(term.volume)) * term.orbital * term.trace_omega)});
    report.timings.emplace_back("geometric", seconds_since(t0));

    report.direct_trace = scalar_text(direct);
    report.spectral_side = scalar_text(spectral_value);
    report.geometric_side = scalar_text(geometric.value);

    auto check = [&](std::string name, const typename F::Scalar& lhs, const typename F::Scalar& rhs) {
      TraceCheck c;
      c.name = std::move(name);
      c.lhs = scalar_text(lhs);
      c.rhs = scalar_text(rhs);
      c.residual = magnitude(f, lhs - rhs);
      if constexpr (F::is_exact) {
        c.pass = lhs == rhs;
        c.provenance = "exact equality in Q(i)";
      } else {
        c.tolerance = options.tolerance * std::max(1.0, magnitude(f, lhs));
        c.pass = options.tolerance > 0 && c.residual <= c.tolerance;
        c.provenance = options.tolerance > 0
                           ? "approx backend: tolerance relative to max(1, |lhs|)"
                           : "tolerance 0 demands exact equality, which the approx backend cannot certify";
      }
      report.checks.push_back(std::move(c));
    };
    check("direct = kernel diagonal", direct, diagonal);
    check("direct = spectral", direct, spectral_value);
    check("direct = geometric", direct, geometric.value);
    report.pass = std::all_of(report.checks.begin(), report.checks.end(), [](const auto& c) { return c.pass; });
    if (!report.pass) {
      for (const auto& c : report.checks)
        if (!c.pass) {
          report.error = "TraceMismatch: " + c.name + " fails (" + c.lhs + " vs " + c.rhs + "; " + c.provenance + ")";
          break;
        }
    }
  } catch (const Error& e) {
    report.pass = false;
    report.error = e.what();
  }
  return report;
}

template <Field F>
TraceReport verify_discrete(const F& f, const InducedRep<F>& rep, const DiscreteTestFunction<F>& fn,
                            const DiscreteOptions& options) {
  auto report = evaluate_discrete(f, rep, fn, options);
  if (!report.pass) throw TraceMismatch(report.dump());
  return report;
}

#define NTRACE_INSTANTIATE(F)                                                                                 \
  template typename F::Scalar orbital_sum<F>(const F&, const DiscreteGroup&, const Element&,                  \
                                             const DiscreteTestFunction<F>&);                                 \
  template GeometricSide<F> geometric_side_discrete<F>(const F&, const Twist<F>&, const DiscreteTestFunction<F>&); \
  template typename F::Scalar kernel_diagonal_trace<F>(const F&, const Twist<F>&, const DiscreteTestFunction<F>&); \
  template TraceReport evaluate_discrete<F>(const F&, const InducedRep<F>&, const DiscreteTestFunction<F>&,    \
                                            const DiscreteOptions&);                                          \
  template TraceReport verify_discrete<F>(const F&, const InducedRep<F>&, const DiscreteTestFunction<F>&,      \
                                          const DiscreteOptions&);

NTRACE_INSTANTIATE(linalg::ExactField)
NTRACE_INSTANTIATE(linalg::ApproxField)

}  // namespace ntrace::discrete
