#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "ntrace/discrete/trace.hpp"
#include "ntrace/linalg/dense.hpp"

using namespace ntrace;
using namespace ntrace::discrete;
using linalg::ApproxField;
using linalg::ApproxMatrix;
using linalg::ExactField;
using linalg::ExactMatrix;
using linalg::GaussRational;

namespace {

const ExactField ef;
const ApproxField af;

GaussRational q(long v) { return GaussRational(v); }

DiscreteGroup s3() { return DiscreteGroup::permutations({{1, 0, 2}, {1, 2, 0}}, "S3"); }

ExactMatrix omega2() { return ExactMatrix{{q(1), q(1)}, {q(0), q(1)}}; }

// G = ℤ, Γ = 2ℤ, ω(2) a unipotent Jordan block.
InducedRep<ExactField> z_mod_2z_jordan() {
  auto g = DiscreteGroup::free_abelian(1);
  auto gamma = FiniteIndexSubgroup::lattice(g, {{2}});
  return induce(ef, Twist<ExactField>::on_generators(ef, gamma, {omega2()}));
}

DiscreteTestFunction<ExactField> delta_fn(const DiscreteGroup& g, std::vector<Element> xs) {
  std::vector<std::pair<Element, GaussRational>> terms;
  for (auto& x : xs) terms.emplace_back(std::move(x), q(1));
  return DiscreteTestFunction<ExactField>::make(ef, g, std::move(terms));
}

long sign(const Element& p) {
  long s = 1;
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = i + 1; j < p.size(); ++j)
      if (p[i] > p[j]) s = -s;
  return s;
}

}  // namespace

TEST_CASE("finite groups: enumeration, classes and table input") {
  auto g = s3();
  CHECK(g.order() == 6);
  std::set<std::size_t> classes;
  for (const auto& x : g.elements()) classes.insert(g.class_of(x));
  CHECK(classes.size() == 3);
  CHECK(g.multiply(g.elements()[3], g.inverse(g.elements()[3])) == g.identity());

  // ℤ/3 by table; elements 1 and 2 are inverse.
  auto c3 = DiscreteGroup::from_table({{0, 1, 2}, {1, 2, 0}, {2, 0, 1}}, "C3");
  CHECK(c3.order() == 3);
  CHECK(c3.multiply(c3.table_element(1), c3.table_element(2)) == c3.table_element(0));
  CHECK(c3.multiply(c3.table_element(1), c3.table_element(1)) == c3.table_element(2));
  CHECK_THROWS_AS(DiscreteGroup::from_table({{0, 1}, {1, 1}}), InvalidElement);
  CHECK_THROWS_AS(g.check({0, 0, 1}), InvalidElement);
}

TEST_CASE("free group words: reduction, cyclic form and roots") {
  CHECK(reduce_word({1, 2, -2, -1, 1}) == Element{1});
  CHECK(reduce_word(reduce_word({1, -1, 2})) == reduce_word({1, -1, 2}));
  auto cf = cyclic_form({1, 2, -1});
  CHECK(cf.conjugator == Element{1});
  CHECK(cf.core == Element{2});
  auto f2 = DiscreteGroup::free_group(2);
  CHECK(f2.are_conjugate({1, 2, -1}, {2}));
  CHECK(f2.are_conjugate({1, 2}, {2, 1}));
  CHECK_FALSE(f2.are_conjugate({1, 2}, {1, -2}));
  CHECK(primitive_root({1, 2, 1, 2, 1, 2}) == Element{1, 2});
  CHECK(primitive_root({2, 1, 1, -2}) == Element{2, 1, -2});
  CHECK_THROWS_AS(f2.check({1, -1}), InvalidElement);
}

TEST_CASE("finite-index subgroups: coset actions") {
  auto g = s3();
  auto a3 = FiniteIndexSubgroup::generated(g, {{1, 2, 0}});
  CHECK(a3.index() == 2);
  CHECK(a3.coset_reps()[0] == g.identity());
  CHECK_NOTHROW(a3.check_action());
  for (std::size_t i = 0; i < a3.index(); ++i)
    for (const auto& x : g.elements()) {
      auto step = a3.act(i, x);
      CHECK(a3.contains(step.gamma));
      CHECK(g.multiply(a3.coset_reps()[i], x) == g.multiply(step.gamma, a3.coset_reps()[step.coset]));
    }

  auto z2 = DiscreteGroup::free_abelian(2);
  auto lat = FiniteIndexSubgroup::lattice(z2, {{2, 1}, {0, 3}});
  CHECK(lat.index() == 6);
  CHECK(lat.contains({2, 4}));
  CHECK_FALSE(lat.contains({1, 0}));
  CHECK(lat.lattice_coordinates({4, -1}) == std::vector<long>{2, -1});
  CHECK_THROWS_AS(FiniteIndexSubgroup::lattice(z2, {{1, 1}, {2, 2}}), NotInSubgroup);

  // Kernel of F₂ → S₃, a ↦ (01), b ↦ (012): index 6 and rank 6·(2−1)+1 = 7.
  auto f2 = DiscreteGroup::free_group(2);
  auto ker = FiniteIndexSubgroup::kernel(f2, g, {{1, 0, 2}, {1, 2, 0}});
  CHECK(ker.index() == 6);
  CHECK(ker.generators().size() == 7);
  CHECK_NOTHROW(ker.check_action());
  CHECK(ker.contains({1, 1}));
  CHECK(ker.contains({2, 2, 2}));
  CHECK_FALSE(ker.contains({2}));
  // Rewriting a Schreier generator gives that generator.
  for (std::size_t k = 0; k < ker.generators().size(); ++k) {
    auto w = ker.schreier_word(ker.generators()[k]);
    REQUIRE(w.size() == 1);
    CHECK(w[0].first == k);
    CHECK(w[0].second == 1);
  }
}

TEST_CASE("Z/2Z Jordan twist: induced representation") {
  auto rep = z_mod_2z_jordan();
  CHECK(rep.model.dim() == 4);
  auto r1 = rep({1});
  ExactMatrix expected(4, 4);
  expected.set_block(0, 0, omega2());
  expected.set_block(2, 2, omega2());
  CHECK(r1 * r1 == expected);
  // Homomorphism on sampled pairs.
  for (long a = -3; a <= 3; ++a)
    for (long b = -3; b <= 3; ++b) CHECK(rep({a}) * rep({b}) == rep({a + b}));
  CHECK(rep({0}) == ExactMatrix::identity(4));
}

TEST_CASE("Z/2Z Jordan twist: three sides of the trace formula") {
  auto rep = z_mod_2z_jordan();
  const auto& g = rep.subgroup().ambient();
  DiscreteOptions opt{"z-mod-2z-jordan"};

  auto r = verify_discrete(ef, rep, delta_fn(g, {{2}}), opt);
  CHECK(*r.direct_trace == "4");
  CHECK(r.spectral_side == "4");
  CHECK(r.geometric_side == "4");
  // Factors n ↦ (±1)ⁿ, each with N = 2.
  REQUIRE(r.multiplicities.size() == 2);
  for (const auto& row : r.multiplicities) {
    CHECK(row.dim == 1);
    CHECK(row.multiplicity == 2);
  }

  auto r8 = verify_discrete(ef, rep, delta_fn(g, {{2}, {-2}}), opt);
  CHECK(r8.geometric_side == "8");
  CHECK(rep.twist({-2}).trace() == q(2));

  auto r0 = verify_discrete(ef, rep, delta_fn(g, {{1}}), opt);
  CHECK(r0.geometric_side == "0");
  CHECK(*r0.direct_trace == "0");
  CHECK(r0.geometric_terms.empty());
}

TEST_CASE("S3 over A3 with a nontrivial character") {
  auto g = s3();
  auto a3 = FiniteIndexSubgroup::generated(g, {{1, 2, 0}});
  const std::complex<double> zeta(-0.5, std::sqrt(3.0) / 2);
  auto omega = Twist<ApproxField>::on_generators(af, a3, {ApproxMatrix{{zeta}}});
  auto rep = induce(af, omega);
  CHECK(rep.model.dim() == 2);
  auto fn = DiscreteTestFunction<ApproxField>::make(af, g, {{g.identity(), {1, 0}}});
  auto r = verify_discrete(af, rep, fn, {"s3-a3"});
  CHECK(std::stod(*r.direct_trace) == doctest::Approx(2));
  CHECK(r.pass);
  // A relation that fails: ζ ≠ a cube root of unity.
  CHECK_THROWS_AS(Twist<ApproxField>::on_generators(af, a3, {ApproxMatrix{{{2, 0}}}}), RelationViolation);
  // The same in exact arithmetic: -1 is not of order 3.
  CHECK_THROWS_AS(Twist<ExactField>::on_generators(ef, a3, {ExactMatrix{{q(-1)}}}), RelationViolation);
}

TEST_CASE("conjugacy classes meeting a support") {
  auto g = s3();
  auto a3 = FiniteIndexSubgroup::generated(g, {{1, 2, 0}});
  auto classes = conjugacy_classes_meeting(a3, g.elements());
  CHECK(classes.size() == 3);  // {e}, {(012)}, {(021)}: the 3-cycles split in A3

  auto z = DiscreteGroup::free_abelian(1);
  auto two_z = FiniteIndexSubgroup::lattice(z, {{2}});
  CHECK(conjugacy_classes_meeting(two_z, {{1}, {2}, {4}}).size() == 2);

  // F₂ with Γ = ker(a ↦ (01), b ↦ e) ∋ b. The G-class of a·b·a⁻¹ is two Γ-classes, one of them b's.
  auto f2 = DiscreteGroup::free_group(2);
  auto c2 = DiscreteGroup::permutations({{1, 0}}, "C2");
  auto ker = FiniteIndexSubgroup::kernel(f2, c2, {{1, 0}, {0, 1}});
  auto found = conjugacy_classes_meeting(ker, {{1, 2, -1}});
  CHECK(found.size() == 2);
  CHECK(std::any_of(found.begin(), found.end(), [&](const auto& c) { return gamma_conjugate(ker, c.rep, {2}); }));
  CHECK_FALSE(gamma_conjugate(ker, {1, 2, -1}, {2}));
  CHECK(gamma_conjugate(ker, {1, 2, -1}, {-2, 1, 2, -1, 2}));
}

TEST_CASE("centralizer volumes and orbital sums") {
  auto z = DiscreteGroup::free_abelian(1);
  auto two_z = FiniteIndexSubgroup::lattice(z, {{2}});
  CHECK(centralizer_volume(two_z, {2}) == 2);
  CHECK(centralizer_volume(two_z, {0}) == 2);
  CHECK_THROWS_AS(centralizer_volume(two_z, {1}), NotInSubgroup);

  auto f2 = DiscreteGroup::free_group(2);
  auto c2 = DiscreteGroup::permutations({{1, 0}}, "C2");
  auto ker = FiniteIndexSubgroup::kernel(f2, c2, {{1, 0}, {1, 0}});
  CHECK(centralizer_volume(ker, {1, 1}) == 2);
  CHECK(centralizer_volume(ker, {}) == 2);
  CHECK(centralizer_volume(ker, {1, 2}) == 1);

  auto g = s3();
  auto a3 = FiniteIndexSubgroup::generated(g, {{1, 2, 0}});
  CHECK(centralizer_volume(a3, g.identity()) == 2);
  CHECK(centralizer_volume(a3, {1, 2, 0}) == 1);

  std::vector<Element> transpositions{{1, 0, 2}, {2, 1, 0}, {0, 2, 1}};
  auto ind = delta_fn(g, transpositions);
  CHECK(orbital_sum(ef, g, {1, 0, 2}, ind) == q(3));
  CHECK(orbital_sum(ef, z, {5}, delta_fn(z, {{5}, {6}})) == q(1));
  CHECK(orbital_sum(ef, g, g.identity(), delta_fn(g, {g.identity()})) == q(1));

  // f = δ_e: only γ = e contributes, giving [G:Γ]·dim V.
  auto omega = Twist<ExactField>::restricted(ef, a3, {ExactMatrix::identity(3), ExactMatrix::identity(3)});
  CHECK(geometric_side_discrete(ef, omega, delta_fn(g, {g.identity()})).value == q(6));
}

TEST_CASE("unfolding identity on finite groups") {
  for (const auto& g : {s3(), DiscreteGroup::permutations({{1, 2, 3, 0}, {0, 3, 2, 1}}, "D4"),
                        DiscreteGroup::permutations({{1, 0, 2, 3}, {1, 2, 3, 0}}, "S4")}) {
    std::mt19937_64 rng(g.order());
    std::uniform_int_distribution<long> coef(-3, 3);
    std::vector<std::pair<Element, GaussRational>> terms;
    for (const auto& x : g.elements()) terms.emplace_back(x, q(coef(rng)));
    auto fn = DiscreteTestFunction<ExactField>::make(ef, g, terms);
    for (const auto& gamma : g.elements()) {
      GaussRational brute(0);
      for (const auto& x : g.elements()) brute += fn(ef, g.conjugate(gamma, x));
      std::size_t centralizer = 0;
      for (const auto& x : g.elements()) centralizer += g.multiply(x, gamma) == g.multiply(gamma, x);
      CHECK(brute == q(static_cast<long>(centralizer)) * orbital_sum(ef, g, gamma, fn));
    }
  }
}

TEST_CASE("randomized finite scenarios: three-way equality, conjugation invariance, twist additivity") {
  const std::vector<DiscreteGroup> groups{
      s3(),
      DiscreteGroup::permutations({{1, 2, 3, 0}, {0, 3, 2, 1}}, "D4"),
      DiscreteGroup::permutations({{1, 0, 2, 3}, {1, 2, 3, 0}}, "S4"),
      DiscreteGroup::permutations({{1, 0, 2, 3, 4, 5}, {1, 2, 3, 0, 4, 5}, {0, 1, 2, 3, 5, 4}}, "S4xC2"),
  };
  std::mt19937_64 rng(0xd15c);
  std::uniform_int_distribution<long> coef(-2, 2);
  int scenarios = 0;
  for (int trial = 0; scenarios < 8 && trial < 200; ++trial) {
    const auto& g = groups[static_cast<std::size_t>(trial) % groups.size()];
    std::uniform_int_distribution<std::size_t> pick(0, g.order() - 1);
    auto gamma = FiniteIndexSubgroup::generated(g, {g.elements()[pick(rng)], g.elements()[pick(rng)]});
    if (gamma.index() > 8 || gamma.index() < 2) continue;
    ++scenarios;
    // ω = P·(sign ⊕ 1 ⊕ …)·P⁻¹ restricted to Γ, of dimension 1 to 3.
    const std::size_t d = 1 + static_cast<std::size_t>(trial) % 3;
    ExactMatrix p = ExactMatrix::identity(d);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = i + 1; j < d; ++j) p(i, j) = q(coef(rng));
    auto rho = [&](std::size_t dim, const ExactMatrix& conj) {
      std::vector<ExactMatrix> images;
      for (const auto& s : g.generators()) {
        ExactMatrix m = ExactMatrix::identity(dim);
        m(0, 0) = q(sign(s));
        images.push_back(conj * m * linalg::inverse(ef, conj));
      }
      return Twist<ExactField>::restricted(ef, gamma, images);
    };
    auto omega = rho(d, p);
    auto rep = induce(ef, omega);

    std::vector<std::pair<Element, GaussRational>> terms;
    for (int k = 0; k < 10; ++k) terms.emplace_back(g.elements()[pick(rng)], q(coef(rng)));
    auto fn = DiscreteTestFunction<ExactField>::make(ef, g, terms);
    auto report = evaluate_discrete(ef, rep, fn, {g.name()});
    INFO(report.dump());
    CHECK(report.pass);

    // x ↦ f(h⁻¹xh) leaves the geometric side unchanged.
    const auto& h = g.elements()[pick(rng)];
    std::vector<std::pair<Element, GaussRational>> moved;
    for (const auto& [x, c] : fn.support) moved.emplace_back(g.conjugate(x, g.inverse(h)), c);
    auto fn_moved = DiscreteTestFunction<ExactField>::make(ef, g, moved);
    for (const auto& x : g.elements()) REQUIRE(fn_moved(ef, x) == fn(ef, g.conjugate(x, h)));
    CHECK(geometric_side_discrete(ef, omega, fn).value == geometric_side_discrete(ef, omega, fn_moved).value);

    // ω ⊕ ω′ adds the geometric sides.
    auto omega1 = rho(1, ExactMatrix::identity(1));
    std::vector<ExactMatrix> sum_images;
    for (std::size_t k = 0; k < g.generators().size(); ++k) {
      const auto& s = g.generators()[k];
      ExactMatrix m = ExactMatrix::identity(d + 1);
      ExactMatrix a = ExactMatrix::identity(d);
      a(0, 0) = q(sign(s));
      m.set_block(0, 0, p * a * linalg::inverse(ef, p));
      m(d, d) = q(sign(s));
      sum_images.push_back(m);
    }
    auto omega_sum = Twist<ExactField>::restricted(ef, gamma, sum_images);
    CHECK(geometric_side_discrete(ef, omega_sum, fn).value ==
          geometric_side_discrete(ef, omega, fn).value + geometric_side_discrete(ef, omega1, fn).value);
  }
  CHECK(scenarios == 8);
}

TEST_CASE("free group kernel: three sides agree") {
  auto f2 = DiscreteGroup::free_group(2);
  auto ker = FiniteIndexSubgroup::kernel(f2, s3(), {{1, 0, 2}, {1, 2, 0}});
  // ρ(a) unipotent, ρ(b) diagonal: a non-unitary representation of F₂ restricted to Γ.
  auto omega = Twist<ExactField>::restricted(ef, ker, {omega2(), ExactMatrix{{q(2), q(0)}, {q(0), q(1)}}});
  auto rep = induce(ef, omega);
  CHECK(rep.model.dim() == 12);
  for (const auto& w : std::vector<Element>{{1}, {2}, {1, -2}, {2, 1, 2, -1}})
    for (const auto& v : std::vector<Element>{{-1}, {2, 2}, {1, 2, -1, -2}})
      CHECK(rep(w) * rep(v) == rep(f2.multiply(w, v)));
  auto fn = delta_fn(f2, {{1, 1}, {2, 2, 2}, {1, 2, -1}, {}, {1, 2}, {2, 1, 2, 1}});
  auto r = evaluate_discrete(ef, rep, fn, {"f2-kernel"});
  INFO(r.dump());
  CHECK(r.pass);
  CHECK(r.geometric_terms.size() >= 4);

  // Twist given on the Schreier generators instead: no relations to check.
  std::vector<ExactMatrix> images;
  for (std::size_t k = 0; k < ker.generators().size(); ++k)
    images.push_back(k % 2 ? omega2() : ExactMatrix{{q(1), q(0)}, {q(k), q(1)}});
  auto rep2 = induce(ef, Twist<ExactField>::on_generators(ef, ker, images));
  auto r2 = evaluate_discrete(ef, rep2, fn, {"f2-kernel-schreier"});
  INFO(r2.dump());
  CHECK(r2.pass);
}
