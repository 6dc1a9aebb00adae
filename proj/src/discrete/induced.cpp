#include "ntrace/discrete/induced.hpp"

#include <algorithm>
#include <cstdlib>
#include <deque>

#include "ntrace/linalg/dense.hpp"

namespace ntrace::discrete {

namespace {

template <Field F>
void check_images(const F& f, const std::vector<MatrixOf<F>>& images, std::size_t expected, const char* what) {
  if (images.size() != expected)
    throw RelationViolation(std::string(what) + ": expected " + std::to_string(expected) + " images, got " +
                            std::to_string(images.size()));
  if (images.empty()) throw RelationViolation(std::string(what) + ": no images, so the twist has no dimension");
  const std::size_t d = images[0].rows();
  for (std::size_t k = 0; k < images.size(); ++k) {
    if (!images[k].is_square() || images[k].rows() != d || d == 0)
      throw RelationViolation(std::string(what) + ": image " + std::to_string(k) + " has shape " + images[k].shape());
    if (!linalg::is_invertible(f, images[k]))
      throw RelationViolation(std::string(what) + ": image " + std::to_string(k) + " is not invertible");
  }
}

template <Field F>
std::vector<MatrixOf<F>> inverses_of(const F& f, const std::vector<MatrixOf<F>>& images) {
  std::vector<MatrixOf<F>> out;
  for (const auto& m : images) out.push_back(linalg::inverse(f, m));
  return out;
}

// Images of every element reachable from e, checking each Cayley-graph edge:
// every relation among the generators is a product of such cycles.
template <Field F>
std::map<Element, MatrixOf<F>> cayley_table(const F& f, const DiscreteGroup& g, const std::vector<Element>& gens,
                                            const std::vector<MatrixOf<F>>& images) {
  std::map<Element, MatrixOf<F>> table;
  const std::size_t d = images[0].rows();
  table.emplace(g.identity(), MatrixOf<F>::identity(d));
  std::deque<Element> queue{g.identity()};
  while (!queue.empty()) {
    Element x = std::move(queue.front());
    queue.pop_front();
    const auto mx = table.at(x);
    for (std::size_t k = 0; k < gens.size(); ++k) {
      Element y = g.multiply(x, gens[k]);
      auto my = mx * images[k];
      auto it = table.find(y);
      if (it == table.end()) {
        table.emplace(y, std::move(my));
        queue.push_back(std::move(y));
      } else if (!linalg::equal(f, it->second, my)) {
        throw RelationViolation("images do not respect the relations: two words for " + g.format(y) +
                                " have different images");
      }
    }
  }
  return table;
}

template <Field F>
void check_commuting(const F& f, const std::vector<MatrixOf<F>>& images) {
  for (std::size_t a = 0; a < images.size(); ++a)
    for (std::size_t b = a + 1; b < images.size(); ++b)
      if (!linalg::equal(f, images[a] * images[b], images[b] * images[a]))
        throw RelationViolation("images " + std::to_string(a) + " and " + std::to_string(b) + " do not commute");
}

template <class M>
M signed_power(const M& m, const M& inv, long n) {
  return linalg::power(n < 0 ? inv : m, static_cast<unsigned long>(std::labs(n)));
}

}  // namespace

template <Field F>
Twist<F> Twist<F>::on_generators(const F& f, const FiniteIndexSubgroup& gamma, std::vector<Mat> images) {
  check_images(f, images, gamma.generators().size(), "twist on subgroup generators");
  Twist t;
  t.gamma_ = gamma;
  t.dim_ = images[0].rows();
  t.inverses_ = inverses_of(f, images);
  t.images_ = std::move(images);
  switch (gamma.kind()) {
    case FiniteIndexSubgroup::Kind::Generated:
      t.table_ = cayley_table(f, gamma.ambient(), gamma.generators(), t.images_);
      break;
    case FiniteIndexSubgroup::Kind::Lattice:
      check_commuting(f, t.images_);
      break;
    case FiniteIndexSubgroup::Kind::Kernel:
      break;  // Γ is free on its Schreier generators
  }
  return t;
}

template <Field F>
Twist<F> Twist<F>::restricted(const F& f, const FiniteIndexSubgroup& gamma, std::vector<Mat> ambient_images) {
  const auto& g = gamma.ambient();
  check_images(f, ambient_images, g.generators().size(), "representation of the ambient group");
  Twist t;
  t.gamma_ = gamma;
  t.ambient_ = true;
  t.dim_ = ambient_images[0].rows();
  t.inverses_ = inverses_of(f, ambient_images);
  t.images_ = std::move(ambient_images);
  switch (g.family()) {
    case Family::Finite:
      t.table_ = cayley_table(f, g, g.generators(), t.images_);
      break;
    case Family::FreeAbelian:
      check_commuting(f, t.images_);
      break;
    case Family::Free:
      break;
  }
  return t;
}

template <Field F>
typename Twist<F>::Mat Twist<F>::word_image(const std::vector<std::pair<std::size_t, int>>& word) const {
  Mat out = Mat::identity(dim_);
  for (const auto& [k, sign] : word) out = out * (sign > 0 ? images_[k] : inverses_[k]);
  return out;
}

template <Field F>
typename Twist<F>::Mat Twist<F>::operator()(const Element& gamma) const {
  if (!gamma_.contains(gamma)) throw NotInSubgroup(gamma_.ambient().format(gamma) + " is not in the subgroup");
  const auto& g = gamma_.ambient();
  if (g.family() == Family::Finite) return table_.at(gamma);
  if (ambient_) {
    if (g.family() == Family::FreeAbelian) {
      Mat out = Mat::identity(dim_);
      for (std::size_t k = 0; k < gamma.size(); ++k) out = out * signed_power(images_[k], inverses_[k], gamma[k]);
      return out;
    }
    std::vector<std::pair<std::size_t, int>> word;
    for (long l : gamma) word.push_back({static_cast<std::size_t>(std::labs(l) - 1), l > 0 ? 1 : -1});
    return word_image(word);
  }
  if (gamma_.kind() == FiniteIndexSubgroup::Kind::Lattice) {
    auto c = gamma_.lattice_coordinates(gamma);
    Mat out = Mat::identity(dim_);
    for (std::size_t k = 0; k < c.size(); ++k) out = out * signed_power(images_[k], inverses_[k], c[k]);
    return out;
  }
  return word_image(gamma_.schreier_word(gamma));
}

template <Field F>
DiscreteTestFunction<F> DiscreteTestFunction<F>::make(const F& f, const DiscreteGroup& g,
                                                      std::vector<std::pair<Element, typename F::Scalar>> terms) {
  (void)f;
  std::map<Element, typename F::Scalar> merged;
  for (auto& [x, c] : terms) {
    g.check(x);
    auto [it, fresh] = merged.emplace(x, c);
    if (!fresh) it->second += c;
  }
  DiscreteTestFunction out;
  for (auto& [x, c] : merged)
    if (!(c == typename F::Scalar(0))) out.support.emplace_back(x, c);
  return out;
}

template <Field F>
typename F::Scalar DiscreteTestFunction<F>::operator()(const F& f, const Element& x) const {
  auto it = std::lower_bound(support.begin(), support.end(), x,
                             [](const auto& term, const Element& y) { return term.first < y; });
  return it != support.end() && it->first == x ? it->second : f.from_int(0);
}

template <Field F>
MatrixOf<F> InducedRep<F>::operator()(const Element& g) const {
  const auto& gamma = subgroup();
  const std::size_t d = twist.dim(), n = gamma.index();
  MatrixOf<F> r(n * d, n * d);
  for (std::size_t i = 0; i < n; ++i) {
    auto step = gamma.act(i, g);
    r.set_block(i * d, step.coset * d, twist(step.gamma));
  }
  return r;
}

template <Field F>
InducedRep<F> induce(const F& f, const Twist<F>& twist, std::string label) {
  const auto& gamma = twist.subgroup();
  const std::size_t dim = gamma.index() * twist.dim();
  if (dim > 2000)
    throw ScenarioTooLarge("induced representation of dimension " + std::to_string(dim) + " exceeds 2000");
  gamma.check_action();
  InducedRep<F> rep{twist, {}};
  const auto& g = gamma.ambient();
  rep.model.delta = MatrixOf<F>(dim, dim);
  for (const auto& s : g.generators()) {
    rep.model.gens.push_back(rep(s));
    rep.model.delta += rep.model.gens.back();
    rep.model.delta += rep(g.inverse(s));
  }
  rep.model.label = label.empty() ? "Ind " + g.name() : std::move(label);
  rep.model.validate(f);
  return rep;
}

template <Field F>
MatrixOf<F> operator_of_test_function(const F& f, const InducedRep<F>& rep, const DiscreteTestFunction<F>& fn) {
  (void)f;
  const std::size_t dim = rep.model.dim();
  MatrixOf<F> out(dim, dim);
  for (const auto& [x, c] : fn.support) {
    auto term = rep(x);
    term *= c;
    out += term;
  }
  return out;
}

#define NTRACE_INSTANTIATE(F)                                                                             \
  template class Twist<F>;                                                                                \
  template struct DiscreteTestFunction<F>;                                                                \
  template struct InducedRep<F>;                                                                          \
  template InducedRep<F> induce<F>(const F&, const Twist<F>&, std::string);                               \
  template MatrixOf<F> operator_of_test_function<F>(const F&, const InducedRep<F>&, const DiscreteTestFunction<F>&);

NTRACE_INSTANTIATE(linalg::ExactField)
NTRACE_INSTANTIATE(linalg::ApproxField)

}  // namespace ntrace::discrete
