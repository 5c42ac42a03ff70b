#pragma once

// Graph-diagonal noise model, two-copy parity-check purification rounds,
// threshold bisection, and the comparison computations (W-state PPT
// boundary, one-sided bipartite fidelity threshold).
//
// Graph-basis index convention follows qsim: vertex v is bit (n-1-v) of the
// index mu, and mu labels the state Z^mu |G>.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <boost/rational.hpp>

#include "rep/graphstab.hpp"

namespace rep::purification {

using graphstab::Graph;

struct GraphDiagonalState {
  Graph graph;
  std::vector<double> probs;  // 2^n populations

  double fidelity() const { return probs.at(0); }
};

/// Index mask of a vertex set under the graph-basis convention.
std::uint64_t index_mask(std::span<const int> vertices, int n);

/// Local depolarizing noise with per-vertex survival parameter applied to
/// |G><G|, in the graph basis. Throws std::invalid_argument for a parameter
/// outside [0, 1] or a length mismatch.
GraphDiagonalState noisy_graph_state(const Graph& g, std::span<const double> survival);

struct SubprotocolResult {
  GraphDiagonalState state;
  double success_probability = 0.0;
  double clamped = 0.0;  // total magnitude of tiny negative populations set to zero
};

/// One two-copy round checking colour class `color_class`: populations of
/// the surviving copy are sums of lambda_mu lambda_nu over pairs that agree
/// on the class; outside the class the labels add mod 2. Throws if the
/// class is not independent or the success probability vanishes.
SubprotocolResult subprotocol(const GraphDiagonalState& state, std::span<const int> color_class);

struct PurifyResult {
  bool converged = false;
  bool early_failure = false;
  int iterations = 0;
  std::vector<double> trajectory;  // fidelity before each round and at the end
};

struct PurifySettings {
  int max_iterations = 500;
  double target = 1.0 - 1e-6;
  int divergence_window = 50;  // consecutive rounds below the initial fidelity
};

/// Applies rounds over `cycle` (cyclically, starting at `offset`) until the
/// fidelity reaches the target or the round budget is exhausted.
PurifyResult purify_iterate(const GraphDiagonalState& initial, const std::vector<std::vector<int>>& cycle,
                            const PurifySettings& settings = {}, std::size_t offset = 0);

enum class CycleRule {
  /// Classes holding a noisy vertex (survival < 1); if that leaves a single
  /// class, the other classes are added so at least two are checked.
  NoisyClasses,
  /// Classes holding a noisy vertex or a neighbour of one.
  NoisyOrNeighbour,
  AllClasses,
};

/// Colour classes selected by `rule`, in colour order.
std::vector<std::vector<int>> color_cycle(const Graph& g, std::span<const int> colors, std::span<const double> survival,
                                          CycleRule rule = CycleRule::NoisyClasses);

enum class CyclePolicy {
  Fixed,         // run the cycle from its first class only
  BestRotation,  // success if any rotation of the cycle converges
};

struct ThresholdProblem {
  std::string name;
  Graph graph;
  std::vector<int> colors;       // proper colouring of the graph
  std::vector<int> transmitted;  // vertices with survival p
  double q = 1.0;                // survival of the other vertices
  CyclePolicy policy = CyclePolicy::BestRotation;
  CycleRule rule = CycleRule::NoisyClasses;
};

struct SpotCheck {
  double p = 0.0;
  bool converged = false;
};

struct ThresholdResult {
  std::optional<double> p_star;  // empty when even p = 1 fails
  bool monotone = true;
  std::vector<SpotCheck> spot_checks;
  std::vector<std::vector<int>> cycle;
  int rotation = 0;                 // rotation that converged at the upper bracket
  int iterations_at_threshold = 0;  // rounds used at the upper bracket
  std::vector<double> trajectory_at_threshold;
  double seconds = 0.0;
};

struct PredicateOutcome {
  bool converged = false;
  int rotation = 0;
  PurifyResult run;
};

/// Converged/failed predicate at survival p for the transmitted vertices.
PredicateOutcome purification_succeeds(const ThresholdProblem& problem, double p, const PurifySettings& settings = {});

/// Bisection of the predicate on [0, 1] down to `tol`, plus a monotonicity
/// spot check on an 11-point grid. Throws std::invalid_argument for tol <= 0.
ThresholdResult threshold_search(const ThresholdProblem& problem, double tol = 1e-3, const PurifySettings& settings = {});

/// Proper 3-colouring of rep8 whose third colour is a single vertex among
/// the kept qubits 0..4 (first in enumeration order).
std::vector<int> rep8_coloring();

/// Bipartite member of the mes6 LC orbit (labels kept) and its 2-colouring
/// (ancillas {0,1,2} colour 0).
Graph mes6_bipartite();
std::vector<int> mes6_bipartite_coloring();

/// Named threshold scenarios: "rep8" / "mes6" with transmitted set and q.
ThresholdProblem rep8_problem(std::vector<int> transmitted, double q);
ThresholdProblem mes6_problem(std::vector<int> transmitted, double q);

struct VariantRow {
  std::string graph;
  double q = 1.0;
  int retained = -1;  // transmitted-set vertex kept by the receiver's side
  std::vector<int> transmitted;
  ThresholdResult result;
};

/// Two-transmitted scenarios: rep8 with q in {0.99, 0.97} and mes6 with
/// q = 1, for each choice of retained receiver qubit.
std::vector<VariantRow> variant_thresholds(double tol = 1e-3);

struct BipartiteThreshold {
  boost::rational<long long> threshold;  // exact solution of p + (1-p)/4 = 1/2
  double numeric_fidelity = 0.0;          // density-matrix fidelity at the threshold
};

/// Fidelity p + (1-p)/4 of |Phi+> with one side depolarized.
double one_sided_fidelity(double p);
BipartiteThreshold bipartite_teleport_threshold();

/// Minimum eigenvalue of the single-qubit partial transpose of
/// E_p^{(x)3}(|W><W|).
double w_state_min_pt_eigenvalue(double p);

/// Bisection on the sign of w_state_min_pt_eigenvalue.
double w_ppt_boundary(double tol = 1e-3);

}  // namespace rep::purification
