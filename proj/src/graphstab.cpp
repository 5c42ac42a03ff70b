#include "rep/graphstab.hpp"

#include <algorithm>
#include <bit>
#include <deque>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>

namespace rep::graphstab {

using pauli::Pauli;
using pauli::PauliString;

namespace {

std::uint64_t bit(int v) { return std::uint64_t{1} << v; }

// Exact labelled code: upper triangle, column-major (j = 1.., i < j), first
// pair in the most significant position.
std::uint64_t labelled_code(const Graph& g) {
  std::uint64_t code = 0;
  for (int j = 1; j < g.size(); ++j) {
    for (int i = 0; i < j; ++i) code = (code << 1) | (g.adjacent(i, j) ? 1 : 0);
  }
  return code;
}

// Colour refinement; returns cells (vertex lists) in canonical order.
std::vector<std::vector<int>> refined_cells(const Graph& g) {
  const int n = g.size();
  std::vector<int> color(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) color[static_cast<std::size_t>(v)] = g.degree(v);
  for (int round = 0; round < n; ++round) {
    std::vector<std::vector<int>> sig(static_cast<std::size_t>(n));
    for (int v = 0; v < n; ++v) {
      auto& s = sig[static_cast<std::size_t>(v)];
      s.push_back(color[static_cast<std::size_t>(v)]);
      std::vector<int> nb;
      for (int u = 0; u < n; ++u) {
        if (g.adjacent(u, v)) nb.push_back(color[static_cast<std::size_t>(u)]);
      }
      std::sort(nb.begin(), nb.end());
      s.insert(s.end(), nb.begin(), nb.end());
    }
    std::map<std::vector<int>, int> ids;
    for (const auto& s : sig) ids.emplace(s, 0);
    int next = 0;
    for (auto& [s, id] : ids) id = next++;
    std::vector<int> refined(static_cast<std::size_t>(n));
    for (int v = 0; v < n; ++v) refined[static_cast<std::size_t>(v)] = ids[sig[static_cast<std::size_t>(v)]];
    const bool stable = static_cast<int>(ids.size()) ==
                        static_cast<int>(std::set<int>(color.begin(), color.end()).size());
    color = std::move(refined);
    if (stable) break;
  }
  const int num_cells = *std::max_element(color.begin(), color.end()) + 1;
  std::vector<std::vector<int>> cells(static_cast<std::size_t>(num_cells));
  for (int v = 0; v < n; ++v) cells[static_cast<std::size_t>(color[static_cast<std::size_t>(v)])].push_back(v);
  return cells;
}

struct CanonSearch {
  const Graph& g;
  std::vector<int> slot_cell;  // cell index of each position
  std::vector<std::vector<int>> cells;
  std::vector<int> order;
  std::vector<bool> used;
  std::uint64_t best = ~std::uint64_t{0};
  int total_bits = 0;

  // prefix: code bits for positions < pos, aligned at the top of total_bits.
  void search(int pos, std::uint64_t prefix, int bits) {
    const int n = g.size();
    if (pos == n) {
      best = std::min(best, prefix);
      return;
    }
    const auto& cell = cells[static_cast<std::size_t>(slot_cell[static_cast<std::size_t>(pos)])];
    for (int v : cell) {
      if (used[static_cast<std::size_t>(v)]) continue;
      std::uint64_t p = prefix;
      for (int i = 0; i < pos; ++i) p = (p << 1) | (g.adjacent(order[static_cast<std::size_t>(i)], v) ? 1 : 0);
      const int nbits = bits + pos;
      // Compare against the best code's prefix of the same length.
      if (best != ~std::uint64_t{0} && nbits > 0) {
        const std::uint64_t best_prefix = best >> (total_bits - nbits);
        if (p > best_prefix) continue;
      }
      used[static_cast<std::size_t>(v)] = true;
      order[static_cast<std::size_t>(pos)] = v;
      search(pos + 1, p, nbits);
      used[static_cast<std::size_t>(v)] = false;
    }
  }
};

std::uint64_t independent_rank(std::vector<std::uint64_t> rows) {
  std::uint64_t rank = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] == 0) continue;
    const std::uint64_t pivot = rows[i] & (~rows[i] + 1);
    ++rank;
    for (std::size_t k = i + 1; k < rows.size(); ++k) {
      if (rows[k] & pivot) rows[k] ^= rows[i];
    }
  }
  return rank;
}

struct BitRow {
  std::uint64_t x = 0;
  std::uint64_t z = 0;
};

BitRow to_bits(const PauliString& p) {
  BitRow r;
  for (int q = 0; q < p.size(); ++q) {
    const Pauli l = p.at(q);
    if (l == Pauli::X || l == Pauli::Y) r.x |= bit(q);
    if (l == Pauli::Z || l == Pauli::Y) r.z |= bit(q);
  }
  return r;
}

}  // namespace

// ---------------------------------------------------------------------------
// Graph

Graph::Graph(int num_vertices) : n_(num_vertices), adj_(static_cast<std::size_t>(std::max(num_vertices, 0)), 0) {
  if (num_vertices < 0 || num_vertices > 64) throw std::invalid_argument("graph size outside [0, 64]");
}

Graph Graph::from_edges(int num_vertices, std::span<const Edge> edges) {
  Graph g(num_vertices);
  for (const auto& [a, b] : edges) g.add_edge(a, b);
  return g;
}

void Graph::check_vertex(int v) const {
  if (v < 0 || v >= n_) throw std::out_of_range("vertex " + std::to_string(v) + " outside the graph");
}

bool Graph::adjacent(int a, int b) const {
  check_vertex(a);
  check_vertex(b);
  return (adj_[static_cast<std::size_t>(a)] & bit(b)) != 0;
}

void Graph::add_edge(int a, int b) {
  check_vertex(a);
  check_vertex(b);
  if (a == b) throw std::invalid_argument("self-loops are not allowed");
  adj_[static_cast<std::size_t>(a)] |= bit(b);
  adj_[static_cast<std::size_t>(b)] |= bit(a);
}

void Graph::toggle_edge(int a, int b) {
  check_vertex(a);
  check_vertex(b);
  if (a == b) throw std::invalid_argument("self-loops are not allowed");
  adj_[static_cast<std::size_t>(a)] ^= bit(b);
  adj_[static_cast<std::size_t>(b)] ^= bit(a);
}

int Graph::degree(int v) const {
  check_vertex(v);
  return std::popcount(adj_[static_cast<std::size_t>(v)]);
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  for (int a = 0; a < n_; ++a) {
    for (int b = a + 1; b < n_; ++b) {
      if (adjacent(a, b)) out.emplace_back(a, b);
    }
  }
  return out;
}

nlohmann::json Graph::to_json() const {
  nlohmann::json e = nlohmann::json::array();
  for (const auto& [a, b] : edges()) e.push_back({a, b});
  return {{"n", n_}, {"edges", std::move(e)}};
}

Graph Graph::from_json(const nlohmann::json& j) {
  try {
    Graph g(j.at("n").get<int>());
    for (const auto& e : j.at("edges")) {
      if (!e.is_array() || e.size() != 2) throw std::invalid_argument("edge must be a pair");
      g.add_edge(e[0].get<int>(), e[1].get<int>());
    }
    return g;
  } catch (const nlohmann::json::exception& ex) {
    throw std::invalid_argument(std::string("malformed graph JSON: ") + ex.what());
  } catch (const std::out_of_range& ex) {
    throw std::invalid_argument(std::string("malformed graph JSON: ") + ex.what());
  }
}

bool is_bipartite(const Graph& g) {
  std::vector<int> side(static_cast<std::size_t>(g.size()), -1);
  for (int s = 0; s < g.size(); ++s) {
    if (side[static_cast<std::size_t>(s)] >= 0) continue;
    side[static_cast<std::size_t>(s)] = 0;
    std::deque<int> queue{s};
    while (!queue.empty()) {
      const int v = queue.front();
      queue.pop_front();
      for (int u = 0; u < g.size(); ++u) {
        if (!g.adjacent(u, v)) continue;
        auto& su = side[static_cast<std::size_t>(u)];
        if (su < 0) {
          su = 1 - side[static_cast<std::size_t>(v)];
          queue.push_back(u);
        } else if (su == side[static_cast<std::size_t>(v)]) {
          return false;
        }
      }
    }
  }
  return true;
}

Graph local_complement(const Graph& g, int v) {
  if (v < 0 || v >= g.size()) throw std::out_of_range("vertex outside the graph");
  Graph out = g;
  const std::uint64_t nb = g.neighbors(v);
  for (int a = 0; a < g.size(); ++a) {
    if (!(nb & bit(a))) continue;
    for (int b = a + 1; b < g.size(); ++b) {
      if (nb & bit(b)) out.toggle_edge(a, b);
    }
  }
  return out;
}

std::uint64_t canonical_code(const Graph& g) {
  const int n = g.size();
  if (n > 11) throw std::invalid_argument("canonical labelling supports at most 11 vertices");
  if (n <= 1) return 0;
  CanonSearch s{g, {}, refined_cells(g), std::vector<int>(static_cast<std::size_t>(n)),
                std::vector<bool>(static_cast<std::size_t>(n), false)};
  for (std::size_t c = 0; c < s.cells.size(); ++c) {
    for (std::size_t k = 0; k < s.cells[c].size(); ++k) s.slot_cell.push_back(static_cast<int>(c));
  }
  s.total_bits = n * (n - 1) / 2;
  s.search(0, 0, 0);
  return s.best;
}

OrbitResult lc_orbit(const Graph& g, std::size_t max_size) {
  OrbitResult r;
  std::unordered_set<std::uint64_t> seen{canonical_code(g)};
  std::deque<Graph> frontier{g};
  r.graphs.push_back(g);
  while (!frontier.empty()) {
    const Graph cur = frontier.front();
    frontier.pop_front();
    for (int v = 0; v < cur.size(); ++v) {
      if (cur.degree(v) < 2) continue;  // complementing fewer than two neighbours is a no-op
      Graph next = local_complement(cur, v);
      if (!seen.insert(canonical_code(next)).second) continue;
      if (r.graphs.size() >= max_size) {
        r.complete = false;
        return r;
      }
      r.graphs.push_back(next);
      frontier.push_back(std::move(next));
    }
  }
  return r;
}

OrbitResult labelled_lc_orbit(const Graph& g, std::size_t max_size) {
  OrbitResult r;
  std::unordered_set<std::uint64_t> seen{labelled_code(g)};
  std::deque<Graph> frontier{g};
  r.graphs.push_back(g);
  while (!frontier.empty()) {
    const Graph cur = frontier.front();
    frontier.pop_front();
    for (int v = 0; v < cur.size(); ++v) {
      if (cur.degree(v) < 2) continue;
      Graph next = local_complement(cur, v);
      if (!seen.insert(labelled_code(next)).second) continue;
      if (r.graphs.size() >= max_size) {
        r.complete = false;
        return r;
      }
      r.graphs.push_back(next);
      frontier.push_back(std::move(next));
    }
  }
  return r;
}

LcSearch find_lc_sequence(const Graph& g, const std::function<bool(const Graph&)>& goal, std::size_t max_size) {
  if (g.size() > 11) throw std::invalid_argument("labelled LC search supports at most 11 vertices");
  LcSearch r;
  struct Node {
    Graph graph;
    std::size_t parent;
    int vertex;
  };
  std::vector<Node> nodes{{g, 0, -1}};
  std::unordered_set<std::uint64_t> seen{labelled_code(g)};
  for (std::size_t head = 0; head < nodes.size(); ++head) {
    if (goal(nodes[head].graph)) {
      r.found = true;
      r.result = nodes[head].graph;
      for (std::size_t k = head; k != 0; k = nodes[k].parent) r.sequence.push_back(nodes[k].vertex);
      std::reverse(r.sequence.begin(), r.sequence.end());
      r.explored = head + 1;
      return r;
    }
    for (int v = 0; v < g.size(); ++v) {
      if (nodes[head].graph.degree(v) < 2) continue;
      Graph next = local_complement(nodes[head].graph, v);
      if (!seen.insert(labelled_code(next)).second) continue;
      if (nodes.size() >= max_size) {
        r.complete = false;
        r.explored = nodes.size();
        return r;
      }
      nodes.push_back({std::move(next), head, v});
    }
  }
  r.explored = nodes.size();
  return r;
}

bool is_lc_equivalent(const Graph& g1, const Graph& g2, std::size_t max_size) {
  if (g1.size() != g2.size()) return false;
  if (g1.edges().size() == 0 || g2.edges().size() == 0) return g1.edges().size() == g2.edges().size();
  const std::uint64_t target = canonical_code(g2);
  const OrbitResult orbit = lc_orbit(g1, max_size);
  for (const Graph& h : orbit.graphs) {
    if (canonical_code(h) == target) return true;
  }
  if (!orbit.complete) throw std::runtime_error("LC orbit exceeded the size limit");
  return false;
}

// ---------------------------------------------------------------------------
// Colouring

namespace {

bool color_backtrack(const Graph& g, const std::vector<int>& order, std::size_t pos, int k, int used,
                     std::vector<int>& colors) {
  if (pos == order.size()) return true;
  const int v = order[pos];
  for (int c = 0; c < std::min(k, used + 1); ++c) {
    bool ok = true;
    for (int u = 0; u < g.size() && ok; ++u) {
      if (colors[static_cast<std::size_t>(u)] == c && g.adjacent(u, v)) ok = false;
    }
    if (!ok) continue;
    colors[static_cast<std::size_t>(v)] = c;
    if (color_backtrack(g, order, pos + 1, k, std::max(used, c + 1), colors)) return true;
    colors[static_cast<std::size_t>(v)] = -1;
  }
  return false;
}

void enumerate_backtrack(const Graph& g, int v, int k, int used, std::vector<int>& colors,
                         std::vector<std::vector<int>>& out) {
  if (v == g.size()) {
    if (used == k) out.push_back(colors);
    return;
  }
  for (int c = 0; c < std::min(k, used + 1); ++c) {
    bool ok = true;
    for (int u = 0; u < v && ok; ++u) {
      if (colors[static_cast<std::size_t>(u)] == c && g.adjacent(u, v)) ok = false;
    }
    if (!ok) continue;
    colors[static_cast<std::size_t>(v)] = c;
    enumerate_backtrack(g, v + 1, k, std::max(used, c + 1), colors, out);
  }
  colors[static_cast<std::size_t>(v)] = -1;
}

}  // namespace

ColoringResult chromatic_info(const Graph& g) {
  ColoringResult r;
  if (g.size() == 0) return r;
  std::vector<int> order(static_cast<std::size_t>(g.size()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return g.degree(a) > g.degree(b); });
  for (int k = 1; k <= g.size(); ++k) {
    std::vector<int> colors(static_cast<std::size_t>(g.size()), -1);
    if (color_backtrack(g, order, 0, k, 0, colors)) {
      r.chromatic_number = k;
      r.colors = std::move(colors);
      break;
    }
  }
  if (!is_proper_coloring(g, r.colors)) throw std::logic_error("colouring search produced an improper colouring");
  return r;
}

std::vector<std::vector<int>> enumerate_colorings(const Graph& g, int k) {
  std::vector<std::vector<int>> out;
  std::vector<int> colors(static_cast<std::size_t>(g.size()), -1);
  enumerate_backtrack(g, 0, k, 0, colors, out);
  return out;
}

std::vector<std::uint64_t> color_classes(std::span<const int> colors) {
  int k = 0;
  for (int c : colors) k = std::max(k, c + 1);
  std::vector<std::uint64_t> classes(static_cast<std::size_t>(k), 0);
  for (std::size_t v = 0; v < colors.size(); ++v) classes[static_cast<std::size_t>(colors[v])] |= bit(static_cast<int>(v));
  return classes;
}

bool is_proper_coloring(const Graph& g, std::span<const int> colors) {
  if (static_cast<int>(colors.size()) != g.size()) return false;
  for (int c : colors) {
    if (c < 0) return false;
  }
  for (const auto& [a, b] : g.edges()) {
    if (colors[static_cast<std::size_t>(a)] == colors[static_cast<std::size_t>(b)]) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Stabilizers

StabilizerTableau tableau_from_circuit(int num_qubits, std::span<const qsim::Gate> circuit) {
  StabilizerTableau t;
  t.num_qubits = num_qubits;
  for (int q = 0; q < num_qubits; ++q) t.generators.push_back(PauliString::single(num_qubits, q, Pauli::Z));
  for (const qsim::Gate& g : circuit) {
    if (!qsim::is_clifford(g)) throw std::invalid_argument("non-Clifford gate in a stabilizer circuit");
    for (PauliString& p : t.generators) p = pauli::conjugate(p, g);
  }
  return t;
}

StabilizerTableau tableau_of_graph(const Graph& g) {
  StabilizerTableau t;
  t.num_qubits = g.size();
  for (int v = 0; v < g.size(); ++v) {
    PauliString p = PauliString::single(g.size(), v, Pauli::X);
    for (int u = 0; u < g.size(); ++u) {
      if (g.adjacent(u, v)) p.set(u, Pauli::Z);
    }
    t.generators.push_back(std::move(p));
  }
  return t;
}

bool is_valid_tableau(const StabilizerTableau& t) {
  if (static_cast<int>(t.generators.size()) != t.num_qubits) return false;
  std::vector<std::uint64_t> rows;
  for (std::size_t i = 0; i < t.generators.size(); ++i) {
    if (t.generators[i].phase() % 2 != 0) return false;  // must be Hermitian
    for (std::size_t k = i + 1; k < t.generators.size(); ++k) {
      if (!t.generators[i].commutes_with(t.generators[k])) return false;
    }
    const BitRow b = to_bits(t.generators[i]);
    rows.push_back(b.x | (b.z << t.num_qubits));
  }
  return t.num_qubits <= 32 && independent_rank(rows) == static_cast<std::uint64_t>(t.num_qubits);
}

qsim::StateVector tableau_state(const StabilizerTableau& t) {
  if (!is_valid_tableau(t)) throw std::invalid_argument("invalid stabilizer tableau");
  const int n = t.num_qubits;
  for (std::uint64_t start = 0; start < (std::uint64_t{1} << n); ++start) {
    Eigen::VectorXcd v = qsim::StateVector::basis(n, start).amplitudes();
    bool alive = true;
    for (const PauliString& g : t.generators) {
      const qsim::StateVector sv = qsim::StateVector::from_amplitudes(v.normalized());
      const Eigen::VectorXcd gv = pauli::apply_pauli(sv, g).amplitudes();
      Eigen::VectorXcd next = (sv.amplitudes() + gv) / 2.0;
      if (next.norm() < 1e-6) {
        alive = false;
        break;
      }
      v = std::move(next);
    }
    if (alive) return qsim::StateVector::from_amplitudes(v.normalized());
  }
  throw std::logic_error("no basis state overlaps the stabilizer state");
}

GraphForm to_graph(const StabilizerTableau& t) {
  if (!is_valid_tableau(t)) throw std::invalid_argument("invalid stabilizer tableau");
  const int n = t.num_qubits;
  std::vector<BitRow> rows;
  for (const PauliString& p : t.generators) rows.push_back(to_bits(p));

  // Row-reduce the X block; pivot columns are recorded.
  auto reduce_x = [&](std::vector<int>& pivots) {
    pivots.clear();
    std::size_t r = 0;
    for (int c = 0; c < n && r < rows.size(); ++c) {
      std::size_t k = r;
      while (k < rows.size() && !(rows[k].x & bit(c))) ++k;
      if (k == rows.size()) continue;
      std::swap(rows[r], rows[k]);
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (i != r && (rows[i].x & bit(c))) {
          rows[i].x ^= rows[r].x;
          rows[i].z ^= rows[r].z;
        }
      }
      pivots.push_back(c);
      ++r;
    }
  };
  std::vector<int> pivots;
  reduce_x(pivots);
  GraphForm form;
  // Rows without X part commute with the reduced rows, so their Z parts are
  // invertible on the non-pivot columns; Hadamards there give full X rank.
  for (int c = 0; c < n; ++c) {
    if (std::find(pivots.begin(), pivots.end(), c) != pivots.end()) continue;
    form.hadamards.push_back(c);
    for (BitRow& r : rows) {
      const bool x = r.x & bit(c);
      const bool z = r.z & bit(c);
      r.x = (r.x & ~bit(c)) | (z ? bit(c) : 0);
      r.z = (r.z & ~bit(c)) | (x ? bit(c) : 0);
    }
  }
  reduce_x(pivots);
  if (static_cast<int>(pivots.size()) != n) throw std::logic_error("X block not invertible after Hadamards");
  form.graph = Graph(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const bool gij = rows[static_cast<std::size_t>(i)].z & bit(j);
      const bool gji = rows[static_cast<std::size_t>(j)].z & bit(i);
      if (gij != gji) throw std::logic_error("reduced Z block is not symmetric");
      if (gij) form.graph.add_edge(i, j);
    }
  }
  return form;
}

int stabilizer_entanglement(const StabilizerTableau& t, std::span<const int> cut) {
  const int n = t.num_qubits;
  std::vector<bool> in(static_cast<std::size_t>(n), false);
  for (int q : cut) {
    if (q < 0 || q >= n) throw std::out_of_range("cut qubit outside the tableau");
    in[static_cast<std::size_t>(q)] = true;
  }
  const int a = static_cast<int>(std::count(in.begin(), in.end(), true));
  if (a == 0 || a == n) throw std::invalid_argument("bipartition must be non-trivial");
  std::vector<std::uint64_t> rows;
  for (const PauliString& p : t.generators) {
    const BitRow b = to_bits(p);
    std::uint64_t r = 0;
    int k = 0;
    for (int q = 0; q < n; ++q) {
      if (!in[static_cast<std::size_t>(q)]) continue;
      if (b.x & bit(q)) r |= bit(2 * k);
      if (b.z & bit(q)) r |= bit(2 * k + 1);
      ++k;
    }
    rows.push_back(r);
  }
  return static_cast<int>(independent_rank(rows)) - a;
}

qsim::StateVector graph_state(const Graph& g) {
  qsim::StateVector s = qsim::StateVector::plus(g.size());
  for (const auto& [a, b] : g.edges()) s = qsim::apply_gate(std::move(s), qsim::Gate::cz(a, b));
  return s;
}

Graph rep8() {
  const Edge e[] = {{0, 1}, {1, 2}, {2, 6}, {1, 3}, {1, 4}, {1, 6}, {3, 5}, {3, 7}, {4, 7}, {5, 6}, {6, 7}};
  return Graph::from_edges(8, e);
}

Graph mes6() {
  const Edge e[] = {{0, 4}, {0, 5}, {1, 3}, {1, 4}, {2, 3}, {2, 5}, {4, 5}};
  return Graph::from_edges(6, e);
}

}  // namespace rep::graphstab
