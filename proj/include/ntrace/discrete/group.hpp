#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "ntrace/errors.hpp"

namespace ntrace::discrete {

/// An element of any supported family: the image list of a permutation
/// (finite), integer coordinates (ℤⁿ), or a freely reduced word in F_k with
/// letters ±1, …, ±k standing for generator k and its inverse.
using Element = std::vector<long>;

enum class Family { Finite, FreeAbelian, Free };

class DiscreteGroup {
 public:
  /// Group generated by permutations of {0, …, n−1}.
  static DiscreteGroup permutations(std::vector<Element> gens, std::string name = "");
  /// Group given by a multiplication table on {0, …, n−1}; stored through its
  /// right regular representation. Checks identity, inverses and associativity.
  static DiscreteGroup from_table(const std::vector<std::vector<long>>& table, std::string name = "");
  static DiscreteGroup free_abelian(std::size_t rank);
  static DiscreteGroup free_group(std::size_t rank);

  Family family() const { return family_; }
  const std::string& name() const { return name_; }
  const std::vector<Element>& generators() const { return gens_; }
  /// Permutation degree, lattice rank or number of free generators.
  std::size_t degree() const { return degree_; }

  Element identity() const;
  Element multiply(const Element& a, const Element& b) const;
  Element inverse(const Element& a) const;
  /// g⁻¹·x·g.
  Element conjugate(const Element& x, const Element& g) const;
  Element power(const Element& a, long n) const;
  bool is_identity(const Element& a) const { return a == identity(); }

  /// Throws InvalidElement unless `a` is a canonical element of this group.
  void check(const Element& a) const;
  bool are_conjugate(const Element& a, const Element& b) const;
  std::string format(const Element& a) const;

  // Finite family only.
  std::size_t order() const { return elements_.size(); }
  const std::vector<Element>& elements() const { return elements_; }
  std::size_t index_of(const Element& a) const;
  std::size_t class_of(const Element& a) const { return class_id_[index_of(a)]; }
  /// Element number k of a group built from a table.
  const Element& table_element(std::size_t k) const;

 private:
  void enumerate();

  Family family_ = Family::Finite;
  std::string name_;
  std::vector<Element> gens_;
  std::size_t degree_ = 0;
  std::vector<Element> elements_;  // breadth-first from the identity
  std::map<Element, std::size_t> lookup_;
  std::vector<std::size_t> class_id_;
  std::vector<Element> table_elements_;
};

/// Free reduction of a word with letters ±1, …, ±k.
Element reduce_word(const Element& w);

/// w = conjugator · core · conjugator⁻¹ with `core` cyclically reduced.
struct CyclicForm {
  Element conjugator;
  Element core;
};
CyclicForm cyclic_form(const Element& reduced);

/// Least rotation (lexicographic) of a cyclically reduced word; equal exactly
/// for conjugate words.
Element least_rotation(const Element& core);

/// Shortest root r of a word, w = r^m with m maximal.
Element primitive_root(const Element& reduced);

}  // namespace ntrace::discrete
