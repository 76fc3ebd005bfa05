#include "sbjo/io.hpp"

#include <fstream>
#include <sstream>

namespace sbjo {

namespace {

[[noreturn]] void parse_error(const std::string& msg) { throw Error(ErrorKind::Parse, msg); }

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) parse_error(std::string("missing field '") + key + "'");
  return j.at(key);
}

std::vector<int> dims_from_json(const json& j) {
  if (!j.is_array() || j.empty()) parse_error("dims must be a non-empty array");
  std::vector<int> dims;
  for (const json& d : j) {
    if (!d.is_number_integer() || d.get<long long>() < 1) parse_error("dims must be positive integers");
    dims.push_back(d.get<int>());
  }
  return dims;
}

Vector vector_from_json(const json& j) {
  if (!j.is_array()) parse_error("vector must be an array of [re,im] pairs");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = complex_from_json(j[i]);
  return v;
}

json vector_to_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(complex_to_json(v(i)));
  return out;
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(complex_to_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& j, Eigen::Index rows, Eigen::Index cols) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows)
    throw Error(ErrorKind::ShapeMismatch, "matrix has wrong number of rows");
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      throw Error(ErrorKind::ShapeMismatch, "matrix row has wrong length");
    for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = complex_from_json(row[static_cast<std::size_t>(c)]);
  }
  return m;
}

}  // namespace

json complex_to_json(Complex c) { return json::array({c.real(), c.imag()}); }

Complex complex_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    parse_error("complex entries must be [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

json element_to_json(const Element& a) {
  json blocks = json::array();
  for (const Matrix& b : a.blocks()) blocks.push_back(matrix_to_json(b));
  return {{"dims", a.structure().dims()}, {"blocks", blocks}};
}

Element element_from_json(const json& j) {
  const BlockStructure st(dims_from_json(field(j, "dims")));
  const json& blocks = field(j, "blocks");
  if (!blocks.is_array()) parse_error("blocks must be an array");
  if (static_cast<int>(blocks.size()) != st.num_blocks())
    throw Error(ErrorKind::ShapeMismatch, "expected " + std::to_string(st.num_blocks()) + " blocks, got " +
                                              std::to_string(blocks.size()));
  std::vector<Matrix> raw;
  for (int k = 0; k < st.num_blocks(); ++k) raw.push_back(matrix_from_json(blocks[k], st.dim(k), st.dim(k)));
  return validate(st, std::move(raw));
}

json spec_to_json(const PreserverSpec& spec) {
  json out;
  out["type"] = spec_name(spec);
  if (const auto* s = std::get_if<Sandwich>(&spec.kind)) {
    out["u"] = element_to_json(s->u);
    out["v"] = element_to_json(s->v);
    out["alpha"] = complex_to_json(s->alpha);
  } else if (const auto* p = std::get_if<BlockPermutation>(&spec.kind)) {
    out["perm"] = p->perm;
  } else if (const auto* w = std::get_if<Wild>(&spec.kind)) {
    out["seed"] = w->seed;
    out["delta"] = w->policy.delta;
    out["floor"] = w->policy.floor;
  } else if (const auto* d = std::get_if<Dim2Induced>(&spec.kind)) {
    json lines = json::array();
    for (const auto& [from, to] : d->lines) lines.push_back({{"from", vector_to_json(from)}, {"to", vector_to_json(to)}});
    out["lines"] = lines;
  } else if (const auto* t = std::get_if<Table>(&spec.kind)) {
    json pairs = json::array();
    for (const auto& [in, o] : t->pairs) pairs.push_back({{"in", element_to_json(in)}, {"out", element_to_json(o)}});
    out["pairs"] = pairs;
  } else if (const auto* c = std::get_if<Composite>(&spec.kind)) {
    json parts = json::array();
    for (const auto& part : c->parts) parts.push_back(spec_to_json(part));
    out["parts"] = parts;
  }
  return out;
}

PreserverSpec spec_from_json(const json& j) {
  const json& type = field(j, "type");
  if (!type.is_string()) parse_error("spec type must be a string");
  const std::string t = type.get<std::string>();
  if (t == "sandwich") {
    Complex alpha = j.contains("alpha") ? complex_from_json(j.at("alpha")) : Complex(1.0);
    return PreserverSpec{Sandwich{element_from_json(field(j, "u")), element_from_json(field(j, "v")), alpha}};
  }
  if (t == "block_permutation") {
    const json& p = field(j, "perm");
    if (!p.is_array()) parse_error("perm must be an array");
    BlockPermutation bp;
    for (const json& x : p) {
      if (!x.is_number_integer()) parse_error("perm entries must be integers");
      bp.perm.push_back(x.get<int>());
    }
    return PreserverSpec{bp};
  }
  if (t == "conjugation") return PreserverSpec{Conjugation{}};
  if (t == "wild") {
    Wild w;
    if (j.contains("seed")) w.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("delta")) w.policy.delta = j.at("delta").get<double>();
    if (j.contains("floor")) w.policy.floor = j.at("floor").get<double>();
    return PreserverSpec{w};
  }
  if (t == "dim2_induced") {
    std::vector<std::pair<Vector, Vector>> lines;
    for (const json& l : field(j, "lines")) {
      Vector from = vector_from_json(field(l, "from")), to = vector_from_json(field(l, "to"));
      if (from.size() != 2 || to.size() != 2 || from.norm() == 0.0 || to.norm() == 0.0)
        parse_error("lines must be nonzero 2-vectors");
      lines.emplace_back(from, to);
    }
    return PreserverSpec{close_lines(lines)};
  }
  if (t == "table") {
    Table table;
    for (const json& p : field(j, "pairs"))
      table.pairs.emplace_back(element_from_json(field(p, "in")), element_from_json(field(p, "out")));
    return PreserverSpec{table};
  }
  if (t == "composite") {
    Composite c;
    for (const json& p : field(j, "parts")) c.parts.push_back(spec_from_json(p));
    return PreserverSpec{c};
  }
  parse_error("unknown spec type '" + t + "'");
}

json linear_map_to_json(const BlockStructure& structure, const Matrix& m) {
  return {{"dims", structure.dims()}, {"matrix", matrix_to_json(m)}};
}

std::pair<BlockStructure, Matrix> linear_map_from_json(const json& j) {
  BlockStructure st(dims_from_json(field(j, "dims")));
  const int d = st.algebra_dim();
  Matrix m = matrix_from_json(field(j, "matrix"), d, d);
  for (Eigen::Index i = 0; i < m.size(); ++i)
    if (!std::isfinite(m.data()[i].real()) || !std::isfinite(m.data()[i].imag()))
      throw Error(ErrorKind::NonFiniteEntry, "linear map has a non-finite entry");
  return {st, m};
}

json tolerances_to_json(const ToleranceConfig& tol) {
  return {{"eps_rank", tol.eps_rank}, {"eps_norm", tol.eps_norm}, {"eps_frame", tol.eps_frame}};
}

json graph_to_json(const OrthoGraph& g) {
  json vertices = json::array();
  for (const GraphVertex& v : g.vertices) {
    json jv = {{"name", v.name},     {"rank", v.rank},         {"norm_blocks", v.norm_blocks},
               {"key", v.key},       {"injected", v.injected}, {"element", element_to_json(v.rep)}};
    vertices.push_back(std::move(jv));
  }
  json edges = json::array();
  for (const auto& [i, j] : g.edges) edges.push_back({g.vertices[i].name, g.vertices[j].name});
  return {{"mode", to_string(g.mode)},
          {"dims", g.structure.dims()},
          {"seed", g.seed},
          {"tolerances", tolerances_to_json(g.tol)},
          {"injected", g.injected},
          {"vertices", vertices},
          {"edges", edges},
          {"note", "vertex set is a finite sample; classes are only as fine as the sample"}};
}

json verify_report_to_json(const VerifyReport& r) {
  auto list = [](const std::vector<Counterexample>& cs) {
    json out = json::array();
    for (const Counterexample& c : cs)
      out.push_back({{"direction", c.direction},
                     {"before", c.before},
                     {"after", c.after},
                     {"margin_before", c.margin_before},
                     {"margin_after", c.margin_after},
                     {"x", element_to_json(c.x)},
                     {"y", element_to_json(c.y)}});
    return out;
  };
  const VerifyCoverage& c = r.coverage;
  return {{"map", r.map_name},
          {"verdict", to_string(r.verdict)},
          {"pairs_tested", r.pairs_tested},
          {"fragile_pairs", r.fragile_pairs},
          {"fragile_disagreements", r.fragile_disagreements},
          {"coverage",
           {{"random", c.random},
            {"engineered", c.engineered},
            {"rank_one", c.rank_one},
            {"projection", c.projection},
            {"extra", c.extra},
            {"restriction", c.restriction},
            {"backward", c.backward},
            {"orthogonal", c.orthogonal},
            {"non_orthogonal", c.non_orthogonal}}},
          {"forward_failures", list(r.forward_failures)},
          {"backward_failures", list(r.backward_failures)}};
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) parse_error("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    parse_error(path + ": " + e.what());
  }
}

void write_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) parse_error("cannot write " + path);
  out << j.dump(2) << '\n';
  if (!out) parse_error("write failed for " + path);
}

Element read_element(const std::string& path) {
  const json j = read_json(path);
  try {
    return element_from_json(j);
  } catch (const json::exception& e) {
    parse_error(path + ": " + e.what());
  }
}

void write_element(const std::string& path, const Element& a) { write_json(path, element_to_json(a)); }

}  // namespace sbjo
