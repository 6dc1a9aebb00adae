#include "ntrace/discrete/subgroup.hpp"

#include <cstdlib>
#include <deque>
#include <numeric>
#include <tuple>

namespace ntrace::discrete {

namespace {

// Floor division for possibly negative numerators, b > 0.
long floor_div(long a, long b) { return a / b - ((a % b != 0) && (a < 0)); }

void require_family(const DiscreteGroup& g, Family fam, const char* what) {
  if (g.family() != fam) throw InvalidElement(std::string(what) + " is not supported for " + g.name());
}

}  // namespace

FiniteIndexSubgroup FiniteIndexSubgroup::generated(const DiscreteGroup& g, std::vector<Element> gens) {
  require_family(g, Family::Finite, "a generated subgroup");
  FiniteIndexSubgroup s;
  s.kind_ = Kind::Generated;
  s.ambient_ = g;
  for (const auto& x : gens) g.check(x);
  s.gens_ = std::move(gens);

  const std::size_t n = g.order();
  s.member_.assign(n, false);
  std::deque<Element> queue{g.identity()};
  s.member_[g.index_of(g.identity())] = true;
  while (!queue.empty()) {
    Element x = std::move(queue.front());
    queue.pop_front();
    for (const auto& y : s.gens_) {
      Element z = g.multiply(x, y);
      const std::size_t k = g.index_of(z);
      if (s.member_[k]) continue;
      s.member_[k] = true;
      queue.push_back(std::move(z));
    }
  }
  std::vector<Element> members;
  for (std::size_t k = 0; k < n; ++k)
    if (s.member_[k]) members.push_back(g.elements()[k]);

  // Elements are in breadth-first order from e, so rep_0 = e.
  constexpr std::size_t unset = static_cast<std::size_t>(-1);
  s.coset_id_.assign(n, unset);
  for (std::size_t k = 0; k < n; ++k) {
    if (s.coset_id_[k] != unset) continue;
    const Element& rep = g.elements()[k];
    for (const auto& m : members) s.coset_id_[g.index_of(g.multiply(m, rep))] = s.reps_.size();
    s.reps_.push_back(rep);
  }
  return s;
}

FiniteIndexSubgroup FiniteIndexSubgroup::lattice(const DiscreteGroup& g, std::vector<Element> basis) {
  require_family(g, Family::FreeAbelian, "a lattice subgroup");
  const std::size_t n = g.degree();
  if (basis.size() != n)
    throw NotInSubgroup("a finite-index sublattice of Z^" + std::to_string(n) + " needs " + std::to_string(n) +
                        " basis vectors, got " + std::to_string(basis.size()));
  for (const auto& b : basis) g.check(b);
  FiniteIndexSubgroup s;
  s.kind_ = Kind::Lattice;
  s.ambient_ = g;
  s.gens_ = basis;

  // Row-style Hermite normal form by extended Euclid, tracking H = U·B.
  auto h = basis;
  std::vector<std::vector<long>> u(n, std::vector<long>(n, 0));
  for (std::size_t i = 0; i < n; ++i) u[i][i] = 1;
  auto combine = [&](std::size_t r, std::size_t t, long a, long b, long c, long d) {
    // rows (r, t) ← (a·r + b·t, c·r + d·t), a unimodular 2×2 step
    for (auto* m : {&h, &u}) {
      auto& rows = *m;
      for (std::size_t j = 0; j < rows[r].size(); ++j) {
        const long x = rows[r][j], y = rows[t][j];
        rows[r][j] = a * x + b * y;
        rows[t][j] = c * x + d * y;
      }
    }
  };
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t t = c + 1; t < n; ++t) {
      if (h[t][c] == 0) continue;
      // Extended gcd of h[c][c], h[t][c].
      long a0 = h[c][c], b0 = h[t][c];
      long x0 = 1, y0 = 0, x1 = 0, y1 = 1;
      while (b0 != 0) {
        const long q = a0 / b0;
        std::tie(a0, b0) = std::make_pair(b0, a0 - q * b0);
        std::tie(x0, x1) = std::make_pair(x1, x0 - q * x1);
        std::tie(y0, y1) = std::make_pair(y1, y0 - q * y1);
      }
      // a0 = x0·h[c][c] + y0·h[t][c]; the second row becomes zero in column c.
      const long p = h[c][c] / a0, q = h[t][c] / a0;
      combine(c, t, x0, y0, -q, p);
    }
    if (h[c][c] == 0) throw NotInSubgroup("lattice basis is not of full rank: infinite index");
    if (h[c][c] < 0) {
      for (auto& v : h[c]) v = -v;
      for (auto& v : u[c]) v = -v;
    }
    for (std::size_t r = 0; r < c; ++r) {
      const long q = floor_div(h[r][c], h[c][c]);
      if (q == 0) continue;
      for (std::size_t j = 0; j < n; ++j) {
        h[r][j] -= q * h[c][j];
        u[r][j] -= q * u[c][j];
      }
    }
  }
  s.hnf_ = std::move(h);
  s.unimodular_ = std::move(u);

  std::size_t index = 1;
  for (std::size_t c = 0; c < n; ++c) index *= static_cast<std::size_t>(s.hnf_[c][c]);
  if (index > 100000) throw ScenarioTooLarge("lattice index " + std::to_string(index) + " is too large");
  // Coset reps are the boxes 0 ≤ r_c < H_cc, in mixed radix with the last coordinate fastest.
  for (std::size_t k = 0; k < index; ++k) {
    Element r(n, 0);
    std::size_t rest = k;
    for (std::size_t c = n; c-- > 0;) {
      const auto d = static_cast<std::size_t>(s.hnf_[c][c]);
      r[c] = static_cast<long>(rest % d);
      rest /= d;
    }
    s.reps_.push_back(std::move(r));
  }
  return s;
}

FiniteIndexSubgroup FiniteIndexSubgroup::kernel(const DiscreteGroup& g, const DiscreteGroup& quotient,
                                                std::vector<Element> images) {
  require_family(g, Family::Free, "a kernel subgroup");
  require_family(quotient, Family::Finite, "a quotient");
  if (images.size() != g.degree())
    throw InvalidElement("F" + std::to_string(g.degree()) + " needs " + std::to_string(g.degree()) +
                         " generator images, got " + std::to_string(images.size()));
  for (const auto& x : images) quotient.check(x);
  FiniteIndexSubgroup s;
  s.kind_ = Kind::Kernel;
  s.ambient_ = g;
  s.quotient_ = quotient;
  s.images_ = std::move(images);

  // Breadth-first Schreier transversal: every rep is a shortest word, and
  // prefixes of reps are reps.
  const long k = static_cast<long>(g.degree());
  std::deque<std::size_t> queue{0};
  s.reps_.push_back(g.identity());
  s.image_coset_[quotient.identity()] = 0;
  while (!queue.empty()) {
    const std::size_t i = queue.front();
    queue.pop_front();
    for (long l = 1; l <= 2 * k; ++l) {
      const long letter = l <= k ? l : k - l;
      Element w = g.multiply(s.reps_[i], {letter});
      Element img = s.quotient_image(w);
      if (s.image_coset_.count(img)) continue;
      if (s.reps_.size() >= 100000) throw ScenarioTooLarge("kernel index exceeds 100000");
      s.image_coset_[img] = s.reps_.size();
      queue.push_back(s.reps_.size());
      s.reps_.push_back(std::move(w));
    }
  }

  s.schreier_index_.assign(s.reps_.size(), std::vector<long>(g.degree(), -1));
  for (std::size_t i = 0; i < s.reps_.size(); ++i)
    for (long x = 1; x <= k; ++x) {
      auto step = s.act(i, {x});
      if (step.gamma.empty()) continue;
      s.schreier_index_[i][static_cast<std::size_t>(x - 1)] = static_cast<long>(s.gens_.size());
      s.gens_.push_back(std::move(step.gamma));
    }
  return s;
}

Element FiniteIndexSubgroup::quotient_image(const Element& g) const {
  Element out = quotient_.identity();
  for (long l : g) {
    const auto& img = images_[static_cast<std::size_t>(std::labs(l) - 1)];
    out = quotient_.multiply(out, l > 0 ? img : quotient_.inverse(img));
  }
  return out;
}

std::vector<long> FiniteIndexSubgroup::lattice_reduce(Element& x) const {
  // Subtracts q_c·H_c column by column; returns the q (coordinates in H).
  const std::size_t n = x.size();
  std::vector<long> q(n, 0);
  for (std::size_t c = 0; c < n; ++c) {
    q[c] = floor_div(x[c], hnf_[c][c]);
    if (q[c] == 0) continue;
    for (std::size_t j = c; j < n; ++j) x[j] -= q[c] * hnf_[c][j];
  }
  return q;
}

bool FiniteIndexSubgroup::contains(const Element& g) const { return coset_of(g) == 0; }

std::size_t FiniteIndexSubgroup::coset_of(const Element& g) const {
  ambient_.check(g);
  switch (kind_) {
    case Kind::Generated:
      return coset_id_[ambient_.index_of(g)];
    case Kind::Lattice: {
      Element r = g;
      lattice_reduce(r);
      std::size_t k = 0;
      for (std::size_t c = 0; c < r.size(); ++c) k = k * static_cast<std::size_t>(hnf_[c][c]) + static_cast<std::size_t>(r[c]);
      return k;
    }
    case Kind::Kernel:
      return image_coset_.at(quotient_image(g));
  }
  return 0;
}

FiniteIndexSubgroup::Step FiniteIndexSubgroup::act(std::size_t i, const Element& g) const {
  const Element x = ambient_.multiply(reps_.at(i), g);
  const std::size_t j = coset_of(x);
  return {j, ambient_.multiply(x, ambient_.inverse(reps_[j]))};
}

std::vector<long> FiniteIndexSubgroup::lattice_coordinates(const Element& gamma) const {
  if (kind_ != Kind::Lattice) throw InvalidElement("lattice coordinates of a non-lattice subgroup");
  Element r = gamma;
  ambient_.check(r);
  auto q = lattice_reduce(r);
  if (r != ambient_.identity()) throw NotInSubgroup(ambient_.format(gamma) + " is not in the lattice");
  // γ = q·H = (q·U)·B.
  const std::size_t n = q.size();
  std::vector<long> c(n, 0);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) c[b] += q[a] * unimodular_[a][b];
  return c;
}

std::vector<std::pair<std::size_t, int>> FiniteIndexSubgroup::schreier_word(const Element& gamma) const {
  if (kind_ != Kind::Kernel) throw InvalidElement("Schreier rewriting of a non-kernel subgroup");
  ambient_.check(gamma);
  // Reidemeister–Schreier: walk the coset graph, recording the Γ-part of each edge.
  std::vector<std::pair<std::size_t, int>> word;
  std::size_t i = 0;
  for (long l : gamma) {
    const long x = std::labs(l);
    if (l > 0) {
      const long s = schreier_index_[i][static_cast<std::size_t>(x - 1)];
      if (s >= 0) word.push_back({static_cast<std::size_t>(s), 1});
      i = coset_of(ambient_.multiply(reps_[i], {l}));
    } else {
      const std::size_t j = coset_of(ambient_.multiply(reps_[i], {l}));
      const long s = schreier_index_[j][static_cast<std::size_t>(x - 1)];
      if (s >= 0) word.push_back({static_cast<std::size_t>(s), -1});
      i = j;
    }
  }
  if (i != 0) throw NotInSubgroup(ambient_.format(gamma) + " is not in the kernel");
  return word;
}

void FiniteIndexSubgroup::check_action() const {
  const std::size_t n = reps_.size();
  if (n == 0 || !ambient_.is_identity(reps_[0])) throw IllFormedCosetAction("rep_0 must be the identity");
  std::vector<bool> reached(n, false);
  reached[0] = true;
  std::deque<std::size_t> queue{0};
  while (!queue.empty()) {
    const std::size_t i = queue.front();
    queue.pop_front();
    std::vector<std::size_t> targets;
    for (const auto& s : ambient_.generators()) {
      auto step = act(i, s);
      if (step.coset >= n) throw IllFormedCosetAction("coset index out of range");
      if (!contains(step.gamma)) throw IllFormedCosetAction("Gamma-part is not in the subgroup");
      if (ambient_.multiply(reps_[i], s) != ambient_.multiply(step.gamma, reps_[step.coset]))
        throw IllFormedCosetAction("rep_i g differs from gamma rep_j");
      if (!reached[step.coset]) {
        reached[step.coset] = true;
        queue.push_back(step.coset);
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    if (!reached[i]) throw IllFormedCosetAction("coset action is not transitive");
}

}  // namespace ntrace::discrete
