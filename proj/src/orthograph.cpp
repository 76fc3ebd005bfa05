#include "sbjo/orthograph.hpp"

#include "sbjo/orthogonality.hpp"
#include "sbjo/structure.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

namespace sbjo {

const char* to_string(GraphMode mode) {
  switch (mode) {
    case GraphMode::Mutual: return "mutual";
    case GraphMode::Directed: return "directed";
    case GraphMode::Reduced: return "reduced";
  }
  return "unknown";
}

GraphMode parse_graph_mode(const std::string& text) {
  if (text == "mutual") return GraphMode::Mutual;
  if (text == "directed") return GraphMode::Directed;
  if (text == "reduced") return GraphMode::Reduced;
  throw Error(ErrorKind::Parse, "unknown graph mode '" + text + "'");
}

Element phase_gauge(const Element& a) {
  const double n = a.norm();
  if (n == 0.0) return a;
  Element out = Complex(1.0 / n) * a;
  for (const Matrix& b : out.blocks())
    for (Eigen::Index i = 0; i < b.rows(); ++i)
      for (Eigen::Index j = 0; j < b.cols(); ++j)
        if (std::abs(b(i, j)) > 1e-8) return (std::conj(b(i, j)) / std::abs(b(i, j))) * out;
  return out;
}

namespace {

std::string class_key(const SpectralData& d) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&](const Matrix& p) {
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      const long long re = std::llround(p.data()[i].real() * 1e6), im = std::llround(p.data()[i].imag() * 1e6);
      for (long long v : {re, im}) {
        h ^= static_cast<std::uint64_t>(v);
        h *= 0x100000001b3ULL;
      }
    }
  };
  feed(d.m_left.projector());
  feed(d.ker_left.projector());
  char buf[17];
  std::snprintf(buf, sizeof buf, "%08llx", static_cast<unsigned long long>(h & 0xffffffffULL));
  return buf;
}

bool coordinates_less(const Element& a, const Element& b) {
  for (int k = 0; k < a.structure().num_blocks(); ++k) {
    const Matrix& x = a.block(k);
    const Matrix& y = b.block(k);
    for (Eigen::Index i = 0; i < x.rows(); ++i)
      for (Eigen::Index j = 0; j < x.cols(); ++j) {
        if (x(i, j).real() != y(i, j).real()) return x(i, j).real() < y(i, j).real();
        if (x(i, j).imag() != y(i, j).imag()) return x(i, j).imag() < y(i, j).imag();
      }
  }
  return false;
}

struct Candidate {
  Element rep;
  SpectralData data;
  bool injected = false;
  std::vector<int> sources;
};

}  // namespace

OrthoGraph build(const std::vector<Element>& elements, GraphMode mode, const ToleranceConfig& tol, bool inject) {
  OrthoGraph g;
  g.mode = mode;
  g.tol = tol;
  if (elements.empty()) return g;
  g.structure = elements.front().structure();
  for (const Element& e : elements)
    if (!(e.structure() == g.structure))
      throw Error(ErrorKind::StructureMismatch, "graph elements live in different structures");

  std::vector<Candidate> cands;
  auto find = [&](const Element& rep, const SpectralData& d) -> int {
    for (std::size_t c = 0; c < cands.size(); ++c) {
      if (mode == GraphMode::Reduced) {
        if (frame_equal(cands[c].data.m_left, d.m_left, tol) && frame_equal(cands[c].data.ker_left, d.ker_left, tol))
          return static_cast<int>(c);
      } else if ((cands[c].rep - rep).norm() <= 1e-9) {
        return static_cast<int>(c);
      }
    }
    return -1;
  };
  auto add = [&](const Element& e, bool injected, int source) {
    Element rep = phase_gauge(e);
    SpectralData d = decompose(rep, tol);
    int at = find(rep, d);
    if (at < 0) {
      cands.push_back({std::move(rep), std::move(d), injected, {}});
      at = static_cast<int>(cands.size()) - 1;
    }
    if (source >= 0) cands[at].sources.push_back(source);
  };
  for (std::size_t i = 0; i < elements.size(); ++i) add(elements[i], false, static_cast<int>(i));

  if (mode == GraphMode::Mutual && inject) {
    const std::size_t sampled = cands.size();
    for (std::size_t c = 0; c < sampled; ++c) {
      if (cands[c].rep.is_zero() || is_right_symmetric(cands[c].rep, tol)) continue;
      const std::size_t before = cands.size();
      add(*mutual_edge_witness(cands[c].rep, tol), true, -1);
      if (cands.size() > before) ++g.injected;
    }
  }

  std::vector<int> order(cands.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return coordinates_less(cands[a].rep, cands[b].rep); });

  g.source.assign(elements.size(), -1);
  for (std::size_t v = 0; v < order.size(); ++v) {
    Candidate& c = cands[order[v]];
    GraphVertex gv;
    gv.rep = c.rep;
    gv.injected = c.injected;
    gv.zero = c.rep.is_zero();
    gv.rank = c.data.rank;
    for (int k = 0; k < g.structure.num_blocks(); ++k)
      if (!gv.zero && c.data.block_norms[k] >= c.data.top_cutoff) gv.norm_blocks.push_back(k);
    gv.key = class_key(c.data);
    gv.name = gv.zero ? "0" : "v" + std::to_string(v);
    for (int s : c.sources) g.source[s] = static_cast<int>(v);
    g.vertices.push_back(std::move(gv));
  }

  const int n = static_cast<int>(order.size());
  std::vector<std::vector<char>> rel(n, std::vector<char>(n, 0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) rel[i][j] = strong_bj(cands[order[i]].data, cands[order[j]].data, tol).value;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (mode == GraphMode::Mutual) {
        if (i <= j && rel[i][j] && rel[j][i]) g.edges.emplace_back(i, j);
      } else if (rel[i][j]) {
        g.edges.emplace_back(i, j);
      }
    }
  return g;
}

std::vector<int> isolated_vertices(const OrthoGraph& g) {
  if (g.mode != GraphMode::Mutual) throw Error(ErrorKind::WrongMode, "isolated vertices need a mutual graph");
  std::vector<char> touched(g.vertices.size(), 0);
  for (const auto& [i, j] : g.edges) touched[i] = touched[j] = 1;
  std::vector<int> out;
  for (std::size_t v = 0; v < g.vertices.size(); ++v)
    if (!touched[v]) out.push_back(static_cast<int>(v));
  return out;
}

bool has_edge(const OrthoGraph& g, int i, int j) {
  if (g.mode == GraphMode::Mutual && i > j) std::swap(i, j);
  return std::binary_search(g.edges.begin(), g.edges.end(), std::make_pair(i, j));
}

bool isomorphic_under(const OrthoGraph& a, const OrthoGraph& b, const std::vector<int>& vertex_map) {
  if (a.mode != b.mode || a.vertices.size() != b.vertices.size() || vertex_map.size() != a.vertices.size())
    return false;
  std::vector<char> hit(b.vertices.size(), 0);
  for (int v : vertex_map) {
    if (v < 0 || v >= static_cast<int>(b.vertices.size()) || hit[v]) return false;
    hit[v] = 1;
  }
  if (a.edges.size() != b.edges.size()) return false;
  for (const auto& [i, j] : a.edges)
    if (!has_edge(b, vertex_map[i], vertex_map[j])) return false;
  return true;
}

std::string export_dot(const OrthoGraph& g) {
  std::ostringstream os;
  const bool undirected = g.mode == GraphMode::Mutual;
  os << (undirected ? "graph" : "digraph") << " ortho {\n";
  for (const GraphVertex& v : g.vertices) {
    os << "  \"" << v.name << "\" [label=\"rank=" << v.rank << " blocks={";
    for (std::size_t k = 0; k < v.norm_blocks.size(); ++k) os << (k ? "," : "") << v.norm_blocks[k];
    os << "} key=" << v.key << "\"";
    if (v.injected) os << " injected=true";
    os << "];\n";
  }
  for (const auto& [i, j] : g.edges)
    os << "  \"" << g.vertices[i].name << "\" " << (undirected ? "--" : "->") << " \"" << g.vertices[j].name
       << "\";\n";
  os << "}\n";
  return os.str();
}

}  // namespace sbjo
