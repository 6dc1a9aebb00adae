#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "ntrace/report/scenario.hpp"
#include "builders.hpp"

namespace ntrace::report {

namespace {

std::pair<std::size_t, std::size_t> line_and_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

void only_keys(const Field& at, std::initializer_list<const char*> allowed) {
  for (const auto& [k, v] : at.value.items())
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) { return k == a; }) == allowed.end())
      at.fail("unknown field '" + k + "'");
}

// Scalars may be written as strings (preferred) or integers; both normalize to strings.
json normalize_scalar(const Field& at) {
  if (at.value.is_number_integer()) return std::to_string(at.value.get<long long>());
  if (!at.value.is_string()) at.fail("expected a scalar string such as \"1/2+3/4 i\"");
  at.scalar();  // throws on malformed text
  return at.value;
}

json normalize_matrix(const Field& at) {
  if (!at.value.is_array() || at.value.empty()) at.fail("expected a non-empty array of rows");
  json out = json::array();
  std::size_t cols = 0;
  for (std::size_t i = 0; i < at.value.size(); ++i) {
    auto row = at.index(i);
    if (!row.value.is_array() || row.value.empty()) row.fail("expected a non-empty row");
    if (i == 0) cols = row.value.size();
    if (row.value.size() != cols) row.fail("row length " + std::to_string(row.value.size()) + " differs from " + std::to_string(cols));
    json r = json::array();
    for (std::size_t j = 0; j < cols; ++j) r.push_back(normalize_scalar(row.index(j)));
    out.push_back(std::move(r));
  }
  return out;
}

json normalize_group(const Field& at) {
  if (!at.value.is_object()) at.fail("expected an object");
  const std::string family = at.key("family").text({"permutations", "table", "free_abelian", "free"});
  json out = {{"family", family}};
  if (family == "permutations") {
    only_keys(at, {"family", "generators", "name"});
    out["generators"] = at.key("generators").value;
  } else if (family == "table") {
    only_keys(at, {"family", "table", "name"});
    out["table"] = at.key("table").value;
  } else {
    only_keys(at, {"family", "rank"});
    out["rank"] = at.key("rank").value;
  }
  if (at.value.contains("name")) out["name"] = at.key("name").text();
  return out;
}

json normalize_discrete(const Field& at) {
  only_keys(at, {"group", "subgroup", "twist", "test_function"});
  json out;
  out["group"] = normalize_group(at.key("group"));
  const auto sub = at.key("subgroup");
  const std::string kind = sub.key("kind").text({"generated", "lattice", "kernel"});
  if (kind == "generated") {
    only_keys(sub, {"kind", "generators"});
    out["subgroup"] = {{"kind", kind}, {"generators", sub.key("generators").value}};
  } else if (kind == "lattice") {
    only_keys(sub, {"kind", "basis"});
    out["subgroup"] = {{"kind", kind}, {"basis", sub.key("basis").value}};
  } else {
    only_keys(sub, {"kind", "quotient", "images"});
    out["subgroup"] = {{"kind", kind}, {"quotient", normalize_group(sub.key("quotient"))}, {"images", sub.key("images").value}};
  }
  const auto tw = at.key("twist");
  only_keys(tw, {"on", "images"});
  const std::string on = tw.value.contains("on") ? tw.key("on").text({"subgroup", "ambient"}) : "subgroup";
  json images = json::array();
  const auto im = tw.key("images");
  if (!im.value.is_array()) im.fail("expected an array of matrices");
  for (std::size_t i = 0; i < im.value.size(); ++i) images.push_back(normalize_matrix(im.index(i)));
  out["twist"] = {{"on", on}, {"images", images}};
  const auto fn = at.key("test_function");
  if (!fn.value.is_array() || fn.value.empty()) fn.fail("expected a non-empty array of {element, value}");
  json terms = json::array();
  for (std::size_t i = 0; i < fn.value.size(); ++i) {
    const auto t = fn.index(i);
    only_keys(t, {"element", "value"});
    terms.push_back({{"element", t.key("element").value}, {"value", normalize_scalar(t.key("value"))}});
  }
  out["test_function"] = terms;
  return out;
}

json normalize_torus(const Field& at) {
  only_keys(at, {"monodromy", "test_function", "K", "N", "pairing"});
  json out;
  out["monodromy"] = at.value.contains("monodromy") ? normalize_matrix(at.key("monodromy")) : json::array({json::array({"1"})});
  json fn = {{"kind", "gaussian"}, {"width", "1"}, {"center", "0"}};
  if (at.value.contains("test_function")) {
    const auto f = at.key("test_function");
    const std::string kind = f.key("kind").text({"gaussian", "bump"});
    if (kind == "gaussian") {
      only_keys(f, {"kind", "width", "center"});
      if (f.value.contains("width")) fn["width"] = normalize_scalar(f.key("width"));
      if (f.value.contains("center")) fn["center"] = normalize_scalar(f.key("center"));
    } else {
      only_keys(f, {"kind", "radius"});
      fn = {{"kind", "bump"}, {"radius", f.value.contains("radius") ? normalize_scalar(f.key("radius")) : json("1")}};
    }
  }
  out["test_function"] = fn;
  for (const char* c : {"K", "N"})
    if (at.value.contains(c)) out[c] = at.key(c).count(0, 100000);
  out["pairing"] = at.value.contains("pairing") ? at.key("pairing").text({"plus", "minus"}) : "plus";
  return out;
}

json normalize_model(const Field& at) {
  only_keys(at, {"generators", "delta", "trials", "seeds"});
  json out;
  json gens = json::array();
  const auto g = at.key("generators");
  if (!g.value.is_array() || g.value.empty()) g.fail("expected a non-empty array of matrices");
  for (std::size_t i = 0; i < g.value.size(); ++i) gens.push_back(normalize_matrix(g.index(i)));
  out["generators"] = gens;
  if (at.value.contains("delta")) out["delta"] = normalize_matrix(at.key("delta"));
  out["trials"] = at.value.contains("trials") ? at.key("trials").count(1, 64) : 4;
  out["seeds"] = at.value.contains("seeds") ? at.key("seeds").count(1, 1000) : 3;
  return out;
}

}  // namespace

Scenario parse_scenario(std::string_view text, const std::string& origin) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    auto [line, col] = line_and_column(text, e.byte == 0 ? 0 : e.byte - 1);
    throw ParseError(origin + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + e.what());
  }
  const Field root{doc, "", origin};
  if (!doc.is_object()) root.fail("expected a JSON object");
  only_keys(root, {"id", "case", "backend", "tolerance", "description", "discrete", "torus", "model"});

  Scenario s;
  s.origin = origin;
  s.id = root.key("id").text();
  if (s.id.empty() || !std::all_of(s.id.begin(), s.id.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
      }))
    root.key("id").fail("ids use letters, digits, '-', '_' and '.' only");
  s.case_kind = root.key("case").text({"discrete", "torus", "spectral-model"});
  const std::string section = s.case_kind == "spectral-model" ? "model" : s.case_kind;
  for (const char* other : {"discrete", "torus", "model"})
    if (other != section && doc.contains(other)) root.key(other).fail("not allowed for case '" + s.case_kind + "'");
  s.backend = doc.contains("backend") ? root.key("backend").text({"exact", "approx"})
                                      : (s.case_kind == "torus" ? "approx" : "exact");
  if (doc.contains("tolerance")) {
    const auto t = root.key("tolerance");
    const double v = t.decimal();
    if (!(v >= 0)) t.fail("tolerance must be non-negative");
    s.tolerance = t.value.is_string() ? t.value.get<std::string>() : t.value.dump();
  }
  const Field body = root.key(section.c_str());
  if (!body.value.is_object()) body.fail("expected an object");
  if (s.case_kind == "discrete")
    s.body = normalize_discrete(body);
  else if (s.case_kind == "torus")
    s.body = normalize_torus(body);
  else
    s.body = normalize_model(body);
  if (doc.contains("description")) s.body["description"] = root.key("description").text();
  validate(s);
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string() + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path.string());
}

std::string serialize_scenario(const Scenario& s) {
  json doc;
  doc["id"] = s.id;
  doc["case"] = s.case_kind;
  doc["backend"] = s.backend;
  if (s.tolerance) doc["tolerance"] = *s.tolerance;
  json body = s.body;
  if (body.contains("description")) {
    doc["description"] = body["description"];
    body.erase("description");
  }
  doc[s.case_kind == "spectral-model" ? "model" : s.case_kind] = body;
  return doc.dump(2) + "\n";
}

std::vector<std::filesystem::path> scenario_files(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> out;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".json") out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace ntrace::report
