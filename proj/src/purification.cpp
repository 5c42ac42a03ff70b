#include "rep/purification.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "rep/qsim.hpp"

namespace rep::purification {

namespace {

std::uint64_t vertex_bit(int v, int n) { return std::uint64_t{1} << (n - 1 - v); }

std::uint64_t neighbourhood_mask(const Graph& g, int v) {
  std::uint64_t m = 0;
  for (int u = 0; u < g.size(); ++u) {
    if (g.adjacent(u, v)) m |= vertex_bit(u, g.size());
  }
  return m;
}

}  // namespace

std::uint64_t index_mask(std::span<const int> vertices, int n) {
  std::uint64_t m = 0;
  for (int v : vertices) {
    if (v < 0 || v >= n) throw std::out_of_range("vertex outside the graph");
    m |= vertex_bit(v, n);
  }
  return m;
}

GraphDiagonalState noisy_graph_state(const Graph& g, std::span<const double> survival) {
  const int n = g.size();
  if (static_cast<int>(survival.size()) != n) throw std::invalid_argument("one survival parameter per vertex required");
  if (n > 16) throw std::invalid_argument("graph-diagonal states limited to 16 vertices");
  for (double p : survival) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("survival parameter outside [0, 1]");
  }
  const std::size_t dim = std::size_t{1} << n;
  std::vector<double> lam(dim, 0.0);
  lam[0] = 1.0;
  std::vector<double> next(dim);
  for (int j = 0; j < n; ++j) {
    const double p = survival[static_cast<std::size_t>(j)];
    if (p == 1.0) continue;
    const double w = (1.0 - p) / 4.0;
    // Z_j flips label j, X_j flips the neighbourhood, Y_j both.
    const std::uint64_t ez = vertex_bit(j, n);
    const std::uint64_t ex = neighbourhood_mask(g, j);
    for (std::size_t mu = 0; mu < dim; ++mu) {
      next[mu] = (p + w) * lam[mu] + w * (lam[mu ^ ez] + lam[mu ^ ex] + lam[mu ^ ez ^ ex]);
    }
    lam.swap(next);
  }
  return {g, std::move(lam)};
}

SubprotocolResult subprotocol(const GraphDiagonalState& state, std::span<const int> color_class) {
  const Graph& g = state.graph;
  const int n = g.size();
  for (int a : color_class) {
    for (int b : color_class) {
      if (g.adjacent(a, b)) throw std::invalid_argument("colour class is not an independent set");
    }
  }
  const std::size_t dim = std::size_t{1} << n;
  if (state.probs.size() != dim) throw std::invalid_argument("population vector has the wrong size");
  const std::uint64_t c = index_mask(color_class, n);
  const std::uint64_t rest = (dim - 1) & ~c;
  std::vector<double> out(dim, 0.0);
  const auto& lam = state.probs;
  for (std::size_t mu = 0; mu < dim; ++mu) {
    if (lam[mu] == 0.0) continue;
    const std::uint64_t mu_c = mu & c;
    // Enumerate nu with nu_C = mu_C: iterate over subsets of `rest`.
    std::uint64_t sub = 0;
    do {
      const std::uint64_t nu = mu_c | sub;
      out[mu_c | ((mu ^ nu) & rest)] += lam[mu] * lam[nu];
      sub = (sub - rest) & rest;
    } while (sub != 0);
  }
  double k = 0.0;
  for (double v : out) k += v;
  if (!(k > 0.0)) throw std::domain_error("purification round has zero success probability");
  SubprotocolResult r;
  for (double& v : out) {
    if (v < 0.0) {
      if (v < -1e-14) throw std::logic_error("negative population in purification round");
      r.clamped += -v;
      v = 0.0;
    }
    v /= k;
  }
  r.success_probability = k;
  r.state = {g, std::move(out)};
  return r;
}

PurifyResult purify_iterate(const GraphDiagonalState& initial, const std::vector<std::vector<int>>& cycle,
                            const PurifySettings& settings, std::size_t offset) {
  if (cycle.empty()) throw std::invalid_argument("empty colour cycle");
  PurifyResult r;
  GraphDiagonalState cur = initial;
  const double f0 = initial.fidelity();
  int below = 0;
  r.trajectory.push_back(f0);
  for (int it = 0; it < settings.max_iterations; ++it) {
    if (cur.fidelity() >= settings.target) {
      r.converged = true;
      r.iterations = it;
      return r;
    }
    cur = subprotocol(cur, cycle[(offset + static_cast<std::size_t>(it)) % cycle.size()]).state;
    r.trajectory.push_back(cur.fidelity());
    below = cur.fidelity() < f0 ? below + 1 : 0;
    if (below >= settings.divergence_window) {
      r.early_failure = true;
      r.iterations = it + 1;
      return r;
    }
  }
  r.iterations = settings.max_iterations;
  r.converged = cur.fidelity() >= settings.target;
  return r;
}

std::vector<std::vector<int>> color_cycle(const Graph& g, std::span<const int> colors, std::span<const double> survival,
                                          CycleRule rule) {
  const int n = g.size();
  if (static_cast<int>(colors.size()) != n || static_cast<int>(survival.size()) != n) {
    throw std::invalid_argument("colouring and noise sizes must match the graph");
  }
  int k = 0;
  for (int c : colors) k = std::max(k, c + 1);
  std::vector<bool> pick(static_cast<std::size_t>(k), rule == CycleRule::AllClasses);
  for (int v = 0; v < n; ++v) {
    if (survival[static_cast<std::size_t>(v)] >= 1.0) continue;
    pick[static_cast<std::size_t>(colors[static_cast<std::size_t>(v)])] = true;
    if (rule == CycleRule::NoisyOrNeighbour) {
      for (int u = 0; u < n; ++u) {
        if (g.adjacent(u, v)) pick[static_cast<std::size_t>(colors[static_cast<std::size_t>(u)])] = true;
      }
    }
  }
  // A single class on its own only XORs the other labels together.
  if (rule == CycleRule::NoisyClasses && std::count(pick.begin(), pick.end(), true) == 1) {
    std::fill(pick.begin(), pick.end(), true);
  }
  std::vector<std::vector<int>> cycle;
  for (int c = 0; c < k; ++c) {
    if (!pick[static_cast<std::size_t>(c)]) continue;
    std::vector<int> cls;
    for (int v = 0; v < n; ++v) {
      if (colors[static_cast<std::size_t>(v)] == c) cls.push_back(v);
    }
    cycle.push_back(std::move(cls));
  }
  return cycle;
}

namespace {

std::vector<double> survival_for(const ThresholdProblem& problem, double p) {
  std::vector<double> s(static_cast<std::size_t>(problem.graph.size()), problem.q);
  for (int v : problem.transmitted) s.at(static_cast<std::size_t>(v)) = p;
  return s;
}

std::vector<std::vector<int>> cycle_for(const ThresholdProblem& problem) {
  // Classes are chosen with a generic p < 1 on the transmitted vertices.
  return color_cycle(problem.graph, problem.colors, survival_for(problem, 0.5), problem.rule);
}

}  // namespace

PredicateOutcome purification_succeeds(const ThresholdProblem& problem, double p, const PurifySettings& settings) {
  if (!graphstab::is_proper_coloring(problem.graph, problem.colors)) {
    throw std::invalid_argument("threshold problem needs a proper colouring");
  }
  const auto cycle = cycle_for(problem);
  const GraphDiagonalState start = noisy_graph_state(problem.graph, survival_for(problem, p));
  const std::size_t rotations = problem.policy == CyclePolicy::BestRotation ? cycle.size() : 1;
  PredicateOutcome out;
  for (std::size_t r = 0; r < rotations; ++r) {
    PurifyResult run = purify_iterate(start, cycle, settings, r);
    if (run.converged || r == 0) {
      out.run = std::move(run);
      out.rotation = static_cast<int>(r);
      out.converged = out.run.converged;
    }
    if (out.converged) break;
  }
  return out;
}

ThresholdResult threshold_search(const ThresholdProblem& problem, double tol, const PurifySettings& settings) {
  if (!(tol > 0.0)) throw std::invalid_argument("bisection tolerance must be positive");
  const auto start = std::chrono::steady_clock::now();
  ThresholdResult r;
  r.cycle = cycle_for(problem);
  for (int k = 0; k <= 10; ++k) {
    const double p = k / 10.0;
    r.spot_checks.push_back({p, purification_succeeds(problem, p, settings).converged});
  }
  for (std::size_t k = 1; k < r.spot_checks.size(); ++k) {
    if (r.spot_checks[k - 1].converged && !r.spot_checks[k].converged) r.monotone = false;
  }
  PredicateOutcome top = purification_succeeds(problem, 1.0, settings);
  if (top.converged) {
    double lo = 0.0;
    double hi = 1.0;
    if (purification_succeeds(problem, 0.0, settings).converged) {
      hi = 0.0;
    } else {
      while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        PredicateOutcome o = purification_succeeds(problem, mid, settings);
        if (o.converged) {
          hi = mid;
          top = std::move(o);
        } else {
          lo = mid;
        }
      }
    }
    r.p_star = 0.5 * (lo + hi);
    r.rotation = top.rotation;
    r.iterations_at_threshold = top.run.iterations;
    r.trajectory_at_threshold = top.run.trajectory;
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

std::vector<int> rep8_coloring() {
  const Graph g = graphstab::rep8();
  for (const auto& colors : graphstab::enumerate_colorings(g, 3)) {
    for (int c = 0; c < 3; ++c) {
      int count = 0;
      int where = -1;
      for (int v = 0; v < g.size(); ++v) {
        if (colors[static_cast<std::size_t>(v)] == c) {
          ++count;
          where = v;
        }
      }
      if (count != 1 || where > 4) continue;
      // Renumber so the singleton colour is last.
      std::vector<int> out = colors;
      for (int& x : out) x = x == c ? 2 : (x > c ? x - 1 : x);
      return out;
    }
  }
  throw std::logic_error("rep8 has no 3-colouring with a singleton kept-side colour");
}

Graph mes6_bipartite() {
  const auto split = [](const Graph& h) {
    for (const auto& [a, b] : h.edges()) {
      if ((a < 3) == (b < 3)) return false;
    }
    return true;
  };
  const graphstab::LcSearch s = graphstab::find_lc_sequence(graphstab::mes6(), split);
  if (!s.found) throw std::logic_error("no ancilla/wire bipartite graph in the mes6 orbit");
  return s.result;
}

std::vector<int> mes6_bipartite_coloring() { return {0, 0, 0, 1, 1, 1}; }

ThresholdProblem rep8_problem(std::vector<int> transmitted, double q) {
  ThresholdProblem p;
  p.name = "rep8";
  p.graph = graphstab::rep8();
  p.colors = rep8_coloring();
  p.transmitted = std::move(transmitted);
  p.q = q;
  return p;
}

ThresholdProblem mes6_problem(std::vector<int> transmitted, double q) {
  ThresholdProblem p;
  p.name = "mes6";
  p.graph = mes6_bipartite();
  p.colors = mes6_bipartite_coloring();
  p.transmitted = std::move(transmitted);
  p.q = q;
  return p;
}

std::vector<VariantRow> variant_thresholds(double tol) {
  std::vector<VariantRow> rows;
  auto add = [&](const std::string& name, double q, const std::vector<int>& receivers, bool rep8) {
    for (int keep : receivers) {
      std::vector<int> sent;
      for (int v : receivers) {
        if (v != keep) sent.push_back(v);
      }
      ThresholdProblem problem = rep8 ? rep8_problem(sent, q) : mes6_problem(sent, q);
      rows.push_back({name, q, keep, sent, threshold_search(problem, tol)});
    }
  };
  add("rep8", 0.99, {5, 6, 7}, true);
  add("rep8", 0.97, {5, 6, 7}, true);
  add("mes6", 1.0, {3, 4, 5}, false);
  return rows;
}

double one_sided_fidelity(double p) { return p + (1.0 - p) / 4.0; }

BipartiteThreshold bipartite_teleport_threshold() {
  using R = boost::rational<long long>;
  // p + (1 - p)/4 = 1/2  <=>  (3/4) p = 1/2 - 1/4.
  const R slope(3, 4);
  const R offset(1, 4);
  BipartiteThreshold t;
  t.threshold = (R(1, 2) - offset) / slope;
  const double p = boost::rational_cast<double>(t.threshold);
  qsim::StateVector phi = qsim::apply_circuit(
      qsim::StateVector(2), std::vector<qsim::Gate>{qsim::Gate::h(0), qsim::Gate::cnot(0, 1)});
  const qsim::DensityMatrix rho = qsim::DensityMatrix::from_pure(phi).depolarized(1, p);
  t.numeric_fidelity = (phi.amplitudes().adjoint() * rho.matrix() * phi.amplitudes())(0, 0).real();
  return t;
}

double w_state_min_pt_eigenvalue(double p) {
  Eigen::VectorXcd w = Eigen::VectorXcd::Zero(8);
  w[1] = w[2] = w[4] = 1.0 / std::sqrt(3.0);
  qsim::DensityMatrix rho = qsim::DensityMatrix::from_pure(qsim::StateVector::from_amplitudes(w));
  for (int q = 0; q < 3; ++q) rho = rho.depolarized(q, p);
  const int cut[] = {0};
  return qsim::ppt_min_eigenvalue(rho, cut);
}

double w_ppt_boundary(double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("bisection tolerance must be positive");
  double lo = 0.0;  // PPT
  double hi = 1.0;  // NPT
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (w_state_min_pt_eigenvalue(mid) < 0.0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace rep::purification
