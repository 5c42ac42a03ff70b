#pragma once

// GF(2) stabilizer tableaus, graph states, local complementation, LC orbits,
// exact colouring and stabilizer entanglement.
//
// Graphs store adjacency as bitmasks with vertex v at bit (1 << v), so they
// are limited to 64 vertices. Canonical labelling supports up to 11.

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include <json.hpp>

#include "rep/pauli.hpp"
#include "rep/qsim.hpp"

namespace rep::graphstab {

using Edge = std::pair<int, int>;

class Graph {
 public:
  Graph() = default;
  explicit Graph(int num_vertices);
  static Graph from_edges(int num_vertices, std::span<const Edge> edges);

  int size() const { return n_; }
  bool adjacent(int a, int b) const;
  void add_edge(int a, int b);
  void toggle_edge(int a, int b);
  std::uint64_t neighbors(int v) const { return adj_.at(static_cast<std::size_t>(v)); }
  int degree(int v) const;
  std::vector<Edge> edges() const;
  bool operator==(const Graph&) const = default;

  nlohmann::json to_json() const;
  /// {n, edges:[[i,j],...]}; throws std::invalid_argument on malformed input.
  static Graph from_json(const nlohmann::json& j);

 private:
  void check_vertex(int v) const;
  int n_ = 0;
  std::vector<std::uint64_t> adj_;
};

bool is_bipartite(const Graph& g);

/// Complements the subgraph induced on the neighbourhood of v.
Graph local_complement(const Graph& g, int v);

/// Isomorphism-invariant code of the graph (minimum upper-triangle
/// adjacency word over vertex orders compatible with colour refinement).
/// Exact; supports up to 11 vertices.
std::uint64_t canonical_code(const Graph& g);

struct OrbitResult {
  std::vector<Graph> graphs;  // one representative per class found
  bool complete = true;       // false if max_size stopped the search
};

/// LC orbit up to isomorphism (breadth first).
OrbitResult lc_orbit(const Graph& g, std::size_t max_size = 100000);

/// LC orbit with vertex labels kept (no isomorphism reduction).
OrbitResult labelled_lc_orbit(const Graph& g, std::size_t max_size = 100000);

struct LcSearch {
  bool found = false;
  bool complete = true;
  std::vector<int> sequence;  // vertices to complement, in order
  Graph result;
  std::size_t explored = 0;
};

/// Shortest sequence of labelled local complementations reaching a graph
/// that satisfies `goal`.
LcSearch find_lc_sequence(const Graph& g, const std::function<bool(const Graph&)>& goal,
                          std::size_t max_size = 100000);

/// True iff g2 is isomorphic to a member of g1's LC orbit. Throws
/// std::runtime_error if the orbit exceeds max_size.
bool is_lc_equivalent(const Graph& g1, const Graph& g2, std::size_t max_size = 100000);

struct ColoringResult {
  int chromatic_number = 0;
  std::vector<int> colors;  // colour of each vertex, 0-based
};

/// Exact chromatic number by backtracking; practical up to ~20 vertices.
ColoringResult chromatic_info(const Graph& g);

/// All proper colourings with exactly k colours, up to renaming colours
/// (colours numbered by first appearance).
std::vector<std::vector<int>> enumerate_colorings(const Graph& g, int k);

/// Vertex sets of each colour, as bitmasks.
std::vector<std::uint64_t> color_classes(std::span<const int> colors);

bool is_proper_coloring(const Graph& g, std::span<const int> colors);

struct StabilizerTableau {
  int num_qubits = 0;
  std::vector<pauli::PauliString> generators;
};

/// Stabilizers of the circuit applied to |0...0>. Throws
/// std::invalid_argument on a non-Clifford gate.
StabilizerTableau tableau_from_circuit(int num_qubits, std::span<const qsim::Gate> circuit);

/// Generators X_v Z_{N(v)}.
StabilizerTableau tableau_of_graph(const Graph& g);

/// True iff the generators commute pairwise and are independent.
bool is_valid_tableau(const StabilizerTableau& t);

/// The stabilized state (global phase arbitrary).
qsim::StateVector tableau_state(const StabilizerTableau& t);

struct GraphForm {
  Graph graph;
  std::vector<int> hadamards;  // qubits needing H to reach graph form
};

/// LC-equivalent graph obtained by Gaussian elimination after Hadamards on
/// the free columns of the X block.
GraphForm to_graph(const StabilizerTableau& t);

/// GF(2) rank of the generators restricted to `cut`, minus |cut|.
int stabilizer_entanglement(const StabilizerTableau& t, std::span<const int> cut);

/// Graph state |G> = prod CZ |+>^n.
qsim::StateVector graph_state(const Graph& g);

/// Edge set of the eight-qubit resource of the three-qubit scheme, qubits
/// 0..4 kept by the sender and 5..7 sent.
Graph rep8();
/// Graph of the compiled six-qubit resource (ancillas 0..2, wires 3..5).
Graph mes6();

}  // namespace rep::graphstab
