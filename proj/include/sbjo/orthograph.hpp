#ifndef SBJO_ORTHOGRAPH_HPP
#define SBJO_ORTHOGRAPH_HPP

// Sampled ortho-graphs: mutual (undirected), directed, and the reduced digraph
// whose vertices are classes of equal (m_left, ker_left).

#include "sbjo/algebra.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace sbjo {

enum class GraphMode { Mutual, Directed, Reduced };

const char* to_string(GraphMode mode);
GraphMode parse_graph_mode(const std::string& text);

struct GraphVertex {
  Element rep;  // norm 1, first significant coordinate real-positive (0 stays 0)
  bool injected = false;
  bool zero = false;
  int rank = 0;
  std::vector<int> norm_blocks;  // blocks attaining the norm
  std::string key;               // hash of the (m_left, ker_left) projectors
  std::string name;              // DOT identifier
};

struct OrthoGraph {
  GraphMode mode = GraphMode::Mutual;
  BlockStructure structure;
  ToleranceConfig tol;
  std::uint64_t seed = 0;
  std::vector<GraphVertex> vertices;
  std::vector<std::pair<int, int>> edges;  // sorted; i < j for mutual
  std::vector<int> source;                 // input index -> vertex
  int injected = 0;
};

/// Scales to norm 1 and rotates the first coordinate above 1e-8 onto the positive axis.
Element phase_gauge(const Element& a);

/// Builds the graph over `elements`.  In mutual mode every non-right-symmetric
/// vertex gets its mutual-edge witness added unless `inject` is false.
OrthoGraph build(const std::vector<Element>& elements, GraphMode mode, const ToleranceConfig& tol = {},
                 bool inject = true);

/// Vertices without incident edges.  Mutual mode only (WrongMode otherwise).
std::vector<int> isolated_vertices(const OrthoGraph& g);

bool has_edge(const OrthoGraph& g, int i, int j);

/// Edge sets agree under vertex_map (a-vertex -> b-vertex), which must be a bijection.
bool isomorphic_under(const OrthoGraph& a, const OrthoGraph& b, const std::vector<int>& vertex_map);

std::string export_dot(const OrthoGraph& g);

}  // namespace sbjo

#endif
