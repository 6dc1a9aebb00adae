#pragma once

#include <map>
#include <utility>
#include <vector>

#include "ntrace/discrete/subgroup.hpp"
#include "ntrace/spectral/model.hpp"

namespace ntrace::discrete {

using linalg::Field;
using linalg::MatrixOf;

/// ω: Γ → GL(V). Relations are checked when the twist is built: the Cayley
/// graph of Γ (finite), commutativity (ℤⁿ), none (F_k).
template <Field F>
class Twist {
 public:
  using Mat = MatrixOf<F>;

  /// Images of gamma.generators(), in that order.
  static Twist on_generators(const F& f, const FiniteIndexSubgroup& gamma, std::vector<Mat> images);
  /// Restriction to Γ of a representation of G given on G's generators.
  static Twist restricted(const F& f, const FiniteIndexSubgroup& gamma, std::vector<Mat> ambient_images);

  std::size_t dim() const { return dim_; }
  const FiniteIndexSubgroup& subgroup() const { return gamma_; }
  /// ω(γ); throws NotInSubgroup for γ ∉ Γ.
  Mat operator()(const Element& gamma) const;

 private:
  Mat word_image(const std::vector<std::pair<std::size_t, int>>& word) const;

  FiniteIndexSubgroup gamma_;
  std::size_t dim_ = 0;
  bool ambient_ = false;
  std::vector<Mat> images_, inverses_;   // on Γ generators, or on G generators when ambient_
  std::map<Element, Mat> table_;         // finite groups: ω on all of Γ (or ρ on all of G)
};

/// Finitely supported f: G → scalars, kept merged and sorted by element.
template <Field F>
struct DiscreteTestFunction {
  std::vector<std::pair<Element, typename F::Scalar>> support;

  static DiscreteTestFunction make(const F& f, const DiscreteGroup& g,
                                   std::vector<std::pair<Element, typename F::Scalar>> terms);
  typename F::Scalar operator()(const F& f, const Element& x) const;
};

/// Right translation on sections φ(γx) = ω(γ)φ(x), in the basis of values at
/// coset reps: index (coset i, coordinate v) ↦ i·dim V + v.
template <Field F>
struct InducedRep {
  Twist<F> twist;
  spectral::AdmissibleModel<F> model;  // gens R(s); Δ = Σ_s R(s) + R(s)⁻¹

  const FiniteIndexSubgroup& subgroup() const { return twist.subgroup(); }
  /// R(g): block (i, j) is ω(γ) where rep_i·g = γ·rep_j.
  MatrixOf<F> operator()(const Element& g) const;
};

/// Throws ScenarioTooLarge above dimension 2000 and IllFormedCosetAction.
template <Field F>
InducedRep<F> induce(const F& f, const Twist<F>& twist, std::string label = "");

/// R(f) = Σ f(x)·R(x).
template <Field F>
MatrixOf<F> operator_of_test_function(const F& f, const InducedRep<F>& rep, const DiscreteTestFunction<F>& fn);

}  // namespace ntrace::discrete
