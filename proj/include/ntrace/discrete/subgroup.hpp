#pragma once

#include <cstddef>
#include <vector>

#include "ntrace/discrete/group.hpp"

namespace ntrace::discrete {

/// Γ ⊂ G of finite index, presented through right cosets Γ·rep_j with
/// rep_0 = e. Supported families: any subgroup of a finite group, full-rank
/// sublattices of ℤⁿ, and kernels of F_k → finite group.
class FiniteIndexSubgroup {
 public:
  enum class Kind { Generated, Lattice, Kernel };

  /// rep_i·g = gamma·rep_coset with gamma ∈ Γ.
  struct Step {
    std::size_t coset = 0;
    Element gamma;
  };

  /// Subgroup of a finite group generated by `gens`.
  static FiniteIndexSubgroup generated(const DiscreteGroup& g, std::vector<Element> gens);
  /// Sublattice of ℤⁿ spanned by n independent vectors.
  static FiniteIndexSubgroup lattice(const DiscreteGroup& g, std::vector<Element> basis);
  /// Kernel of the homomorphism F_k → `quotient` sending generator k to images[k].
  static FiniteIndexSubgroup kernel(const DiscreteGroup& g, const DiscreteGroup& quotient, std::vector<Element> images);

  Kind kind() const { return kind_; }
  const DiscreteGroup& ambient() const { return ambient_; }
  std::size_t index() const { return reps_.size(); }
  const std::vector<Element>& coset_reps() const { return reps_; }

  /// Generators of Γ on which twists are specified: the given generators
  /// (finite), the given basis (ℤⁿ), or the nontrivial Schreier generators
  /// rep_i·x·rep_j⁻¹ ordered by (coset i, letter x) (F_k).
  const std::vector<Element>& generators() const { return gens_; }

  bool contains(const Element& g) const;
  /// j with g ∈ Γ·rep_j.
  std::size_t coset_of(const Element& g) const;
  Step act(std::size_t i, const Element& g) const;

  /// Integer coordinates of γ ∈ Γ in the lattice basis. Throws NotInSubgroup.
  std::vector<long> lattice_coordinates(const Element& gamma) const;
  /// γ ∈ Γ as a word in the Schreier generators: pairs (generator index, ±1).
  /// Throws NotInSubgroup.
  std::vector<std::pair<std::size_t, int>> schreier_word(const Element& gamma) const;
  /// Image of g ∈ F_k in the finite quotient.
  Element quotient_image(const Element& g) const;
  const DiscreteGroup& quotient() const { return quotient_; }

  /// Throws IllFormedCosetAction unless act() is a transitive action whose Γ-parts
  /// lie in Γ and satisfy rep_i·g = γ·rep_j, checked on the ambient generators.
  void check_action() const;

 private:
  Kind kind_ = Kind::Generated;
  DiscreteGroup ambient_;
  std::vector<Element> gens_;
  std::vector<Element> reps_;

  // Generated: coset of every ambient element, by element index.
  std::vector<std::size_t> coset_id_;
  std::vector<bool> member_;

  // Lattice: Hermite normal form rows H = U·B, upper triangular, positive diagonal.
  std::vector<std::vector<long>> hnf_, unimodular_;

  // Kernel: quotient, generator images, and image element → coset.
  DiscreteGroup quotient_;
  std::vector<Element> images_;
  std::map<Element, std::size_t> image_coset_;
  std::vector<std::vector<long>> schreier_index_;  // [coset][letter] → generator index or −1

  std::vector<long> lattice_reduce(Element& x) const;
};

}  // namespace ntrace::discrete
