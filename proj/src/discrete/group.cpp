#include "ntrace/discrete/group.hpp"

#include <algorithm>
#include <cstdlib>
#include <deque>
#include <numeric>

namespace ntrace::discrete {

namespace {

constexpr std::size_t kMaxFiniteOrder = 100000;

std::string join(const Element& a, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (i) out += sep;
    out += std::to_string(a[i]);
  }
  return out;
}

}  // namespace

DiscreteGroup DiscreteGroup::permutations(std::vector<Element> gens, std::string name) {
  if (gens.empty()) throw InvalidElement("a permutation group needs at least one generator");
  DiscreteGroup g;
  g.family_ = Family::Finite;
  g.name_ = std::move(name);
  g.degree_ = gens[0].size();
  if (g.degree_ == 0) throw InvalidElement("permutation of degree 0");
  g.gens_ = std::move(gens);
  for (const auto& p : g.gens_) g.check(p);
  g.enumerate();
  return g;
}

DiscreteGroup DiscreteGroup::from_table(const std::vector<std::vector<long>>& table, std::string name) {
  const std::size_t n = table.size();
  if (n == 0) throw InvalidElement("empty multiplication table");
  for (const auto& row : table) {
    if (row.size() != n) throw InvalidElement("multiplication table is not square");
    for (long v : row)
      if (v < 0 || static_cast<std::size_t>(v) >= n) throw InvalidElement("table entry " + std::to_string(v) + " out of range");
  }
  auto mul = [&](std::size_t a, std::size_t b) { return static_cast<std::size_t>(table[a][b]); };
  std::size_t e = n;
  for (std::size_t c = 0; c < n && e == n; ++c) {
    bool ok = true;
    for (std::size_t x = 0; x < n && ok; ++x) ok = mul(c, x) == x && mul(x, c) == x;
    if (ok) e = c;
  }
  if (e == n) throw InvalidElement("multiplication table has no identity");
  for (std::size_t a = 0; a < n; ++a) {
    bool has_inverse = false;
    for (std::size_t b = 0; b < n && !has_inverse; ++b) has_inverse = mul(a, b) == e && mul(b, a) == e;
    if (!has_inverse) throw InvalidElement("element " + std::to_string(a) + " has no inverse in the table");
  }
  // Associativity on all triples is cheap at the sizes supported here.
  if (n <= 64) {
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b)
        for (std::size_t c = 0; c < n; ++c)
          if (mul(mul(a, b), c) != mul(a, mul(b, c)))
            throw InvalidElement("table is not associative at (" + std::to_string(a) + "," + std::to_string(b) + "," +
                                 std::to_string(c) + ")");
  }
  // Right regular representation x ↦ x·a respects left-to-right composition.
  std::vector<Element> gens;
  for (std::size_t a = 0; a < n; ++a) {
    Element p(n);
    for (std::size_t x = 0; x < n; ++x) p[x] = static_cast<long>(mul(x, a));
    gens.push_back(std::move(p));
  }
  auto g = permutations(gens, std::move(name));
  g.table_elements_ = std::move(gens);
  return g;
}

DiscreteGroup DiscreteGroup::free_abelian(std::size_t rank) {
  if (rank == 0) throw InvalidElement("free abelian group of rank 0");
  DiscreteGroup g;
  g.family_ = Family::FreeAbelian;
  g.degree_ = rank;
  g.name_ = "Z^" + std::to_string(rank);
  for (std::size_t k = 0; k < rank; ++k) {
    Element e(rank, 0);
    e[k] = 1;
    g.gens_.push_back(std::move(e));
  }
  return g;
}

DiscreteGroup DiscreteGroup::free_group(std::size_t rank) {
  if (rank == 0) throw InvalidElement("free group of rank 0");
  DiscreteGroup g;
  g.family_ = Family::Free;
  g.degree_ = rank;
  g.name_ = "F" + std::to_string(rank);
  for (std::size_t k = 0; k < rank; ++k) g.gens_.push_back({static_cast<long>(k + 1)});
  return g;
}

void DiscreteGroup::enumerate() {
  elements_.clear();
  lookup_.clear();
  std::deque<Element> queue{identity()};
  lookup_[identity()] = 0;
  elements_.push_back(identity());
  while (!queue.empty()) {
    Element x = std::move(queue.front());
    queue.pop_front();
    for (const auto& s : gens_) {
      Element y = multiply(x, s);
      if (lookup_.count(y)) continue;
      if (elements_.size() >= kMaxFiniteOrder)
        throw ScenarioTooLarge("finite group exceeds " + std::to_string(kMaxFiniteOrder) + " elements");
      lookup_[y] = elements_.size();
      elements_.push_back(y);
      queue.push_back(std::move(y));
    }
  }
  // Conjugacy classes by orbit enumeration under the generators.
  constexpr std::size_t unset = static_cast<std::size_t>(-1);
  class_id_.assign(elements_.size(), unset);
  std::size_t next = 0;
  for (std::size_t i = 0; i < elements_.size(); ++i) {
    if (class_id_[i] != unset) continue;
    std::vector<std::size_t> stack{i};
    class_id_[i] = next;
    while (!stack.empty()) {
      const Element x = elements_[stack.back()];
      stack.pop_back();
      for (const auto& s : gens_) {
        const std::size_t j = lookup_.at(conjugate(x, s));
        if (class_id_[j] == unset) {
          class_id_[j] = next;
          stack.push_back(j);
        }
      }
    }
    ++next;
  }
}

Element DiscreteGroup::identity() const {
  switch (family_) {
    case Family::Finite: {
      Element e(degree_);
      std::iota(e.begin(), e.end(), 0L);
      return e;
    }
    case Family::FreeAbelian:
      return Element(degree_, 0);
    case Family::Free:
      return {};
  }
  return {};
}

// Permutations compose left to right: (a·b)(x) = b(a(x)), so that products
// of words read like products of matrices acting on row vectors.
Element DiscreteGroup::multiply(const Element& a, const Element& b) const {
  switch (family_) {
    case Family::Finite: {
      Element c(degree_);
      for (std::size_t x = 0; x < degree_; ++x) c[x] = b[static_cast<std::size_t>(a[x])];
      return c;
    }
    case Family::FreeAbelian: {
      Element c(degree_);
      for (std::size_t k = 0; k < degree_; ++k) c[k] = a[k] + b[k];
      return c;
    }
    case Family::Free: {
      Element c = a;
      c.insert(c.end(), b.begin(), b.end());
      return reduce_word(c);
    }
  }
  return {};
}

Element DiscreteGroup::inverse(const Element& a) const {
  switch (family_) {
    case Family::Finite: {
      Element c(degree_);
      for (std::size_t x = 0; x < degree_; ++x) c[static_cast<std::size_t>(a[x])] = static_cast<long>(x);
      return c;
    }
    case Family::FreeAbelian: {
      Element c(degree_);
      for (std::size_t k = 0; k < degree_; ++k) c[k] = -a[k];
      return c;
    }
    case Family::Free: {
      Element c(a.rbegin(), a.rend());
      for (auto& l : c) l = -l;
      return c;
    }
  }
  return {};
}

Element DiscreteGroup::conjugate(const Element& x, const Element& g) const {
  return multiply(multiply(inverse(g), x), g);
}

Element DiscreteGroup::power(const Element& a, long n) const {
  Element base = n < 0 ? inverse(a) : a;
  Element out = identity();
  for (unsigned long k = static_cast<unsigned long>(std::labs(n)); k; k >>= 1) {
    if (k & 1) out = multiply(out, base);
    if (k > 1) base = multiply(base, base);
  }
  return out;
}

void DiscreteGroup::check(const Element& a) const {
  switch (family_) {
    case Family::Finite: {
      if (a.size() != degree_)
        throw InvalidElement("permutation [" + join(a, ",") + "] has degree " + std::to_string(a.size()) +
                             ", expected " + std::to_string(degree_));
      std::vector<bool> seen(degree_, false);
      for (long v : a) {
        if (v < 0 || static_cast<std::size_t>(v) >= degree_ || seen[static_cast<std::size_t>(v)])
          throw InvalidElement("[" + join(a, ",") + "] is not a permutation");
        seen[static_cast<std::size_t>(v)] = true;
      }
      if (!elements_.empty() && !lookup_.count(a))
        throw InvalidElement("[" + join(a, ",") + "] is not in the group " + name_);
      return;
    }
    case Family::FreeAbelian:
      if (a.size() != degree_)
        throw InvalidElement("vector of length " + std::to_string(a.size()) + " in Z^" + std::to_string(degree_));
      return;
    case Family::Free:
      for (long l : a)
        if (l == 0 || static_cast<std::size_t>(std::labs(l)) > degree_)
          throw InvalidElement("letter " + std::to_string(l) + " outside F" + std::to_string(degree_));
      if (reduce_word(a) != a) throw InvalidElement("word [" + join(a, ",") + "] is not freely reduced");
      return;
  }
}

bool DiscreteGroup::are_conjugate(const Element& a, const Element& b) const {
  switch (family_) {
    case Family::Finite:
      return class_of(a) == class_of(b);
    case Family::FreeAbelian:
      return a == b;
    case Family::Free:
      return least_rotation(cyclic_form(a).core) == least_rotation(cyclic_form(b).core);
  }
  return false;
}

std::string DiscreteGroup::format(const Element& a) const {
  switch (family_) {
    case Family::Finite:
      return "[" + join(a, " ") + "]";
    case Family::FreeAbelian:
      return "(" + join(a, ",") + ")";
    case Family::Free: {
      if (a.empty()) return "e";
      std::string out;
      for (long l : a) {
        const auto k = static_cast<std::size_t>(std::labs(l) - 1);
        out += degree_ <= 26 ? std::string(1, static_cast<char>('a' + k)) : "x" + std::to_string(k + 1);
        if (l < 0) out += "^-1";
        out += ' ';
      }
      out.pop_back();
      return out;
    }
  }
  return {};
}

std::size_t DiscreteGroup::index_of(const Element& a) const {
  auto it = lookup_.find(a);
  if (it == lookup_.end()) throw InvalidElement(format(a) + " is not an element of " + name_);
  return it->second;
}

const Element& DiscreteGroup::table_element(std::size_t k) const {
  if (k >= table_elements_.size()) throw InvalidElement("table element " + std::to_string(k) + " does not exist");
  return table_elements_[k];
}

Element reduce_word(const Element& w) {
  Element out;
  for (long l : w) {
    if (!out.empty() && out.back() == -l)
      out.pop_back();
    else
      out.push_back(l);
  }
  return out;
}

CyclicForm cyclic_form(const Element& reduced) {
  std::size_t lo = 0, hi = reduced.size();
  while (hi - lo >= 2 && reduced[lo] == -reduced[hi - 1]) {
    ++lo;
    --hi;
  }
  return {Element(reduced.begin(), reduced.begin() + static_cast<std::ptrdiff_t>(lo)),
          Element(reduced.begin() + static_cast<std::ptrdiff_t>(lo), reduced.begin() + static_cast<std::ptrdiff_t>(hi))};
}

Element least_rotation(const Element& core) {
  Element best = core;
  for (std::size_t r = 1; r < core.size(); ++r) {
    Element rot(core.begin() + static_cast<std::ptrdiff_t>(r), core.end());
    rot.insert(rot.end(), core.begin(), core.begin() + static_cast<std::ptrdiff_t>(r));
    best = std::min(best, rot);
  }
  return best;
}

Element primitive_root(const Element& reduced) {
  auto [conj, core] = cyclic_form(reduced);
  const std::size_t n = core.size();
  std::size_t period = n;
  for (std::size_t p = 1; p < n; ++p) {
    if (n % p) continue;
    bool periodic = true;
    for (std::size_t i = p; i < n && periodic; ++i) periodic = core[i] == core[i - p];
    if (periodic) {
      period = p;
      break;
    }
  }
  Element root = conj;
  root.insert(root.end(), core.begin(), core.begin() + static_cast<std::ptrdiff_t>(period));
  Element inv(conj.rbegin(), conj.rend());
  for (auto& l : inv) l = -l;
  root.insert(root.end(), inv.begin(), inv.end());
  return reduce_word(root);
}

}  // namespace ntrace::discrete
