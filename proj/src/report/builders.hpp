#pragma once

// Typed views of normalized scenario JSON. Every failure names the field.

#include <initializer_list>
#include <string>

#include "ntrace/discrete/induced.hpp"
#include "ntrace/report/scenario.hpp"
#include "ntrace/torus/torus.hpp"

namespace ntrace::report {

struct Field {
  const json& value;
  std::string path;
  std::string origin;

  [[noreturn]] void fail(const std::string& message) const {
    throw SchemaError(origin + ": field '" + (path.empty() ? "<root>" : path) + "': " + message);
  }

  Field key(const char* k) const {
    const std::string child = path.empty() ? std::string(k) : path + "." + k;
    if (!value.is_object() || !value.contains(k)) Field{value, child, origin}.fail("missing");
    return {value.at(k), child, origin};
  }
  Field index(std::size_t i) const { return {value.at(i), path + "[" + std::to_string(i) + "]", origin}; }

  std::string text() const {
    if (!value.is_string()) fail("expected a string");
    return value.get<std::string>();
  }
  std::string text(std::initializer_list<const char*> allowed) const {
    const std::string s = text();
    std::string list;
    for (const char* a : allowed) {
      if (s == a) return s;
      list += (list.empty() ? "" : ", ") + std::string(a);
    }
    fail("'" + s + "' is not one of " + list);
  }
  long count(long lo, long hi) const {
    if (!value.is_number_integer()) fail("expected an integer");
    const long v = value.get<long>();
    if (v < lo || v > hi) fail("value " + std::to_string(v) + " outside [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return v;
  }
  linalg::GaussRational scalar() const {
    const std::string s = value.is_string() ? value.get<std::string>() : value.dump();
    try {
      return linalg::GaussRational::parse(s);
    } catch (const ParseError& e) {
      throw ParseError(origin + ": field '" + path + "': " + e.what());
    }
  }
  double real() const {
    const auto q = scalar();
    if (!q.is_real()) fail("expected a real number");
    return q.to_complex().real();
  }

  /// Tolerances are plain decimals ("1e-9"), as strings or numbers.
  double decimal() const {
    const std::string s = value.is_string() ? value.get<std::string>() : value.dump();
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size() || s.empty()) throw ParseError(origin + ": field '" + path + "': malformed decimal '" + s + "'");
    return v;
  }

  /// Runs `build`, turning module errors into SchemaError on this field.
  template <class Build>
  auto guard(Build build) const -> decltype(build()) {
    try {
      return build();
    } catch (const SchemaError&) {
      throw;
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      fail(e.what());
    }
  }
};

inline std::vector<long> int_list(const Field& at) {
  if (!at.value.is_array()) at.fail("expected an array of integers");
  std::vector<long> out;
  for (std::size_t i = 0; i < at.value.size(); ++i) {
    const auto v = at.index(i);
    if (!v.value.is_number_integer()) v.fail("expected an integer");
    out.push_back(v.value.get<long>());
  }
  return out;
}

inline discrete::DiscreteGroup build_group(const Field& at) {
  using discrete::DiscreteGroup;
  const std::string family = at.key("family").text();
  const std::string name = at.value.contains("name") ? at.key("name").text() : "";
  if (family == "permutations") {
    const auto gens = at.key("generators");
    if (!gens.value.is_array() || gens.value.empty()) gens.fail("expected a non-empty array of permutations");
    std::vector<discrete::Element> perms;
    for (std::size_t i = 0; i < gens.value.size(); ++i) perms.push_back(int_list(gens.index(i)));
    return gens.guard([&] { return DiscreteGroup::permutations(perms, name); });
  }
  if (family == "table") {
    const auto t = at.key("table");
    if (!t.value.is_array() || t.value.empty()) t.fail("expected a square array of integers");
    std::vector<std::vector<long>> table;
    for (std::size_t i = 0; i < t.value.size(); ++i) table.push_back(int_list(t.index(i)));
    return t.guard([&] { return DiscreteGroup::from_table(table, name); });
  }
  const auto rank = static_cast<std::size_t>(at.key("rank").count(1, 16));
  return family == "free" ? DiscreteGroup::free_group(rank) : DiscreteGroup::free_abelian(rank);
}

/// Integer arrays are canonical elements; a bare integer k names table element k.
inline discrete::Element build_element(const discrete::DiscreteGroup& g, const Field& at) {
  discrete::Element e;
  if (at.value.is_number_integer()) {
    if (g.family() != discrete::Family::Finite) at.fail("bare integers name elements of table groups only");
    e = at.guard([&] { return g.table_element(static_cast<std::size_t>(at.value.get<long>())); });
  } else {
    e = int_list(at);
  }
  at.guard([&] {
    g.check(e);
    return 0;
  });
  return e;
}

inline std::vector<discrete::Element> build_elements(const discrete::DiscreteGroup& g, const Field& at) {
  if (!at.value.is_array()) at.fail("expected an array of elements");
  std::vector<discrete::Element> out;
  for (std::size_t i = 0; i < at.value.size(); ++i) out.push_back(build_element(g, at.index(i)));
  return out;
}

inline discrete::FiniteIndexSubgroup build_subgroup(const discrete::DiscreteGroup& g, const Field& at) {
  using discrete::FiniteIndexSubgroup;
  const std::string kind = at.key("kind").text();
  if (kind == "generated") {
    auto gens = build_elements(g, at.key("generators"));
    return at.guard([&] { return FiniteIndexSubgroup::generated(g, gens); });
  }
  if (kind == "lattice") {
    const auto b = at.key("basis");
    if (!b.value.is_array()) b.fail("expected an array of vectors");
    std::vector<discrete::Element> basis;
    for (std::size_t i = 0; i < b.value.size(); ++i) basis.push_back(int_list(b.index(i)));
    return b.guard([&] { return FiniteIndexSubgroup::lattice(g, basis); });
  }
  const auto q = build_group(at.key("quotient"));
  auto images = build_elements(q, at.key("images"));
  return at.guard([&] { return FiniteIndexSubgroup::kernel(g, q, images); });
}

template <linalg::Field F>
linalg::MatrixOf<F> build_matrix(const F& f, const Field& at) {
  const std::size_t rows = at.value.size(), cols = at.value.at(0).size();
  linalg::MatrixOf<F> m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = f.from_exact(at.index(i).index(j).scalar());
  return m;
}

template <linalg::Field F>
discrete::Twist<F> build_twist(const F& f, const discrete::FiniteIndexSubgroup& gamma, const Field& at) {
  const auto im = at.key("images");
  std::vector<linalg::MatrixOf<F>> images;
  for (std::size_t i = 0; i < im.value.size(); ++i) images.push_back(build_matrix(f, im.index(i)));
  if (at.key("on").text() == "ambient") return im.guard([&] { return discrete::Twist<F>::restricted(f, gamma, images); });
  return im.guard([&] { return discrete::Twist<F>::on_generators(f, gamma, images); });
}

template <linalg::Field F>
discrete::DiscreteTestFunction<F> build_test_function(const F& f, const discrete::DiscreteGroup& g, const Field& at) {
  std::vector<std::pair<discrete::Element, typename F::Scalar>> terms;
  for (std::size_t i = 0; i < at.value.size(); ++i) {
    const auto t = at.index(i);
    terms.emplace_back(build_element(g, t.key("element")), f.from_exact(t.key("value").scalar()));
  }
  return at.guard([&] { return discrete::DiscreteTestFunction<F>::make(f, g, terms); });
}

inline torus::TorusTwist build_torus_twist(const std::string& backend, const Field& at) {
  const linalg::ExactField ef;
  const auto m = build_matrix(ef, at);
  if (backend == "exact") return at.guard([&] { return torus::TorusTwist::from_monodromy(m); });
  return at.guard([&] { return torus::TorusTwist::from_monodromy(linalg::to_approx(m)); });
}

inline torus::AnalyticTestFunction build_analytic(const Field& at) {
  if (at.key("kind").text() == "bump") {
    const double b = at.key("radius").real();
    return at.guard([&] { return torus::AnalyticTestFunction::bump(b); });
  }
  const double s = at.key("width").real(), c = at.key("center").real();
  return at.guard([&] { return torus::AnalyticTestFunction::gaussian(s, c); });
}

template <linalg::Field F>
spectral::AdmissibleModel<F> build_model(const F& f, const Field& at, const std::string& label) {
  spectral::AdmissibleModel<F> model;
  const auto g = at.key("generators");
  for (std::size_t i = 0; i < g.value.size(); ++i) model.gens.push_back(build_matrix(f, g.index(i)));
  if (at.value.contains("delta")) model.delta = build_matrix(f, at.key("delta"));
  model.label = label;
  at.guard([&] {
    model.validate(f);
    return 0;
  });
  return model;
}

/// Builds every object the scenario describes, short of inducing.
void validate(const Scenario& s);

}  // namespace ntrace::report
