// Command-line front end: remote preparation runs, compilation, graph tools,
// purification thresholds, the W-state PPT boundary and the LMES channel.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rep/canonical_form.hpp"
#include "rep/compiler.hpp"
#include "rep/graphstab.hpp"
#include "rep/lme_classical.hpp"
#include "rep/purification.hpp"
#include "rep/rep_protocol.hpp"

namespace {

using nlohmann::json;
using namespace rep;

constexpr const char* kCsvVersion = "# repctl-csv v1";

struct Output {
  std::string path;
  std::ostringstream buffer;

  void flush() {
    if (path.empty()) {
      std::cout << buffer.str();
    } else {
      std::ofstream f(path);
      if (!f) throw std::runtime_error("cannot open output file " + path);
      f << buffer.str();
    }
  }
};

std::string fmt(double v, const char* spec = "%.6f") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

json read_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::invalid_argument("cannot read " + path);
  try {
    return json::parse(f);
  } catch (const json::exception& ex) {
    throw std::invalid_argument("invalid JSON in " + path + ": " + ex.what());
  }
}

graphstab::Graph load_graph(const std::string& id) {
  if (id == "rep8") return graphstab::rep8();
  if (id == "mes6") return graphstab::mes6();
  return graphstab::Graph::from_json(read_json_file(id));
}

std::vector<double> random_angles(std::size_t count, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-std::numbers::pi, std::numbers::pi);
  std::vector<double> a(count);
  for (double& x : a) x = u(rng);
  return a;
}

int worker_count() {
  if (const char* env = std::getenv("REPCTL_WORKERS")) {
    const int w = std::atoi(env);
    if (w > 0) return w;
  }
  return 1;
}

std::string join_ints(const std::vector<int>& v, char sep = ' ') {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += sep;
    s += std::to_string(v[i]);
  }
  return s;
}

// --- purification rows -----------------------------------------------------

struct PurifyJob {
  std::string graph_id;
  double q = 1.0;
  std::vector<int> transmitted;
};

purification::ThresholdProblem make_problem(const PurifyJob& job, purification::CycleRule rule,
                                            purification::CyclePolicy policy) {
  purification::ThresholdProblem p;
  if (job.graph_id == "rep8") {
    p = purification::rep8_problem(job.transmitted, job.q);
  } else if (job.graph_id == "mes6") {
    p = purification::mes6_problem(job.transmitted, job.q);
  } else {
    p.name = job.graph_id;
    p.graph = load_graph(job.graph_id);
    p.colors = graphstab::chromatic_info(p.graph).colors;
    p.transmitted = job.transmitted;
    p.q = job.q;
  }
  for (int v : p.transmitted) {
    if (v < 0 || v >= p.graph.size()) throw std::invalid_argument("transmitted vertex outside the graph");
  }
  p.rule = rule;
  p.policy = policy;
  return p;
}

std::string purify_csv_header() { return "graph,q,transmitted,p_star,iterations_at_threshold,monotone,seconds"; }

std::string purify_csv_row(const PurifyJob& job, const purification::ThresholdResult& r, bool timing) {
  return job.graph_id + ',' + fmt(job.q, "%.4g") + ',' + join_ints(job.transmitted) + ',' +
         (r.p_star ? fmt(*r.p_star, "%.4f") : std::string("NA")) + ',' + std::to_string(r.iterations_at_threshold) +
         ',' + (r.monotone ? "1" : "0") + ',' + (timing ? fmt(r.seconds, "%.3f") : std::string("0"));
}

// Evaluates jobs on a small worker pool; results keep job order.
std::vector<purification::ThresholdResult> run_jobs(const std::vector<PurifyJob>& jobs, double tol,
                                                    purification::CycleRule rule, purification::CyclePolicy policy) {
  std::vector<purification::ThresholdResult> results(jobs.size());
  std::vector<std::exception_ptr> errors(jobs.size());
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(worker_count()), jobs.size());
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < std::max<std::size_t>(workers, 1); ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < jobs.size(); i += std::max<std::size_t>(workers, 1)) {
        try {
          results[i] = purification::threshold_search(make_problem(jobs[i], rule, policy), tol);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

purification::CycleRule parse_rule(const std::string& s) {
  if (s == "noisy") return purification::CycleRule::NoisyClasses;
  if (s == "noisy-neighbour") return purification::CycleRule::NoisyOrNeighbour;
  if (s == "all") return purification::CycleRule::AllClasses;
  throw std::invalid_argument("unknown cycle rule " + s);
}

purification::CyclePolicy parse_policy(const std::string& s) {
  if (s == "best-rotation") return purification::CyclePolicy::BestRotation;
  if (s == "fixed") return purification::CyclePolicy::Fixed;
  throw std::invalid_argument("unknown cycle policy " + s);
}

std::vector<int> parse_hex_bits(const std::string& hex, int nbits) {
  std::vector<int> bits;
  for (char c : hex) {
    int v = 0;
    if (c >= '0' && c <= '9') {
      v = c - '0';
    } else if (c >= 'a' && c <= 'f') {
      v = c - 'a' + 10;
    } else if (c >= 'A' && c <= 'F') {
      v = c - 'A' + 10;
    } else {
      throw std::invalid_argument("bad hex digit in --bits");
    }
    for (int b = 3; b >= 0; --b) bits.push_back((v >> b) & 1);
  }
  if (nbits >= 0) {
    if (nbits > static_cast<int>(bits.size())) throw std::invalid_argument("--nbits exceeds the hex payload");
    bits.erase(bits.begin(), bits.end() - nbits);
  }
  return bits;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Remote entanglement preparation toolkit"};
  app.require_subcommand(1);
  Output out;
  std::uint64_t seed = 1;
  bool ok = true;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--seed", seed, "RNG seed")->capture_default_str();
    cmd->add_option("-o,--output", out.path, "Write to a file instead of stdout");
  };

  // rep run | mes | audit
  auto* rep_cmd = app.add_subcommand("rep", "Remote preparation runs");
  rep_cmd->require_subcommand(1);
  int rep_n = 3;
  std::vector<double> angles;
  bool random_params = false;
  int runs = 1;
  std::string format = "json";
  auto* rep_run = rep_cmd->add_subcommand("run", "Prepare a canonical-form state (n = 2 or 3)");
  rep_run->add_option("-n", rep_n, "Number of receiver qubits")->capture_default_str();
  rep_run->add_option("--angles", angles, "Canonical-form angles (1 for n=2, 5 for n=3)")->delimiter(',');
  rep_run->add_flag("--random", random_params, "Draw angles uniformly from [-pi, pi)");
  rep_run->add_option("--runs", runs, "Number of runs")->check(CLI::PositiveNumber)->capture_default_str();
  rep_run->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
  add_common(rep_run);

  auto* rep_mes = rep_cmd->add_subcommand("mes", "Prepare a state of the alpha3 = alpha4 = pi/4 family");
  rep_mes->add_option("--angles", angles, "alpha1,alpha2,alpha5")->delimiter(',');
  rep_mes->add_flag("--random", random_params, "Draw angles uniformly from [-pi, pi)");
  rep_mes->add_option("--runs", runs, "Number of runs")->check(CLI::PositiveNumber)->capture_default_str();
  rep_mes->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
  add_common(rep_mes);

  std::vector<double> angles_b;
  int audit_runs = 8192;
  auto* rep_audit = rep_cmd->add_subcommand("audit", "Check that messages do not depend on the prepared state");
  rep_audit->add_option("-n", rep_n, "Number of receiver qubits")->capture_default_str();
  rep_audit->add_option("--angles-a", angles, "First parameter set (random if omitted)")->delimiter(',');
  rep_audit->add_option("--angles-b", angles_b, "Second parameter set (random if omitted)")->delimiter(',');
  rep_audit->add_option("--runs", audit_runs, "Runs per parameter set")->check(CLI::PositiveNumber)->capture_default_str();
  add_common(rep_audit);

  // compile
  auto* compile_cmd = app.add_subcommand("compile", "Compile a gate sequence into a resource and schedule");
  int compile_n = 3;
  bool compile_mes = false;
  std::string sequence_file;
  compile_cmd->add_option("-n", compile_n, "Canonical-form circuit size (2 or 3)")->capture_default_str();
  compile_cmd->add_flag("--mes", compile_mes, "Use the alpha3 = alpha4 = pi/4 circuit");
  compile_cmd->add_option("--sequence", sequence_file, "Gate sequence JSON file")->check(CLI::ExistingFile);
  add_common(compile_cmd);

  // graph color | lc-orbit | lc-equiv
  auto* graph_cmd = app.add_subcommand("graph", "Graph tools");
  graph_cmd->require_subcommand(1);
  std::string graph_id = "rep8";
  std::string other_id;
  bool find_bipartite = false;
  std::size_t max_size = 100000;
  auto* graph_color = graph_cmd->add_subcommand("color", "Chromatic number and an optimal colouring");
  graph_color->add_option("--graph", graph_id, "rep8, mes6 or a JSON file")->capture_default_str();
  add_common(graph_color);
  auto* graph_orbit = graph_cmd->add_subcommand("lc-orbit", "Local-complementation orbit");
  graph_orbit->add_option("--graph", graph_id, "rep8, mes6 or a JSON file")->capture_default_str();
  graph_orbit->add_flag("--find-bipartite", find_bipartite, "Search the labelled orbit for a bipartite graph");
  graph_orbit->add_option("--max-size", max_size, "Orbit size limit")->capture_default_str();
  add_common(graph_orbit);
  auto* graph_equiv = graph_cmd->add_subcommand("lc-equiv", "Test LC equivalence up to isomorphism");
  graph_equiv->add_option("--graph", graph_id, "rep8, mes6 or a JSON file")->capture_default_str();
  graph_equiv->add_option("--other", other_id, "rep8, mes6 or a JSON file")->required();
  graph_equiv->add_option("--max-size", max_size, "Orbit size limit")->capture_default_str();
  add_common(graph_equiv);

  // purify threshold | sweep | variants
  auto* purify_cmd = app.add_subcommand("purify", "Purification thresholds");
  purify_cmd->require_subcommand(1);
  PurifyJob job{"rep8", 1.0, {5, 6, 7}};
  double tol = 1e-3;
  std::string rule = "noisy";
  std::string policy = "best-rotation";
  bool timing = false;
  std::vector<double> q_list{1.0, 0.99, 0.97};
  auto add_purify_common = [&](CLI::App* cmd) {
    cmd->add_option("--tol", tol, "Bisection tolerance")->capture_default_str();
    cmd->add_option("--cycle-rule", rule, "noisy, noisy-neighbour or all")->capture_default_str();
    cmd->add_option("--policy", policy, "best-rotation or fixed")->capture_default_str();
    cmd->add_flag("--timing", timing, "Fill the seconds column (otherwise 0)");
    add_common(cmd);
  };
  auto* purify_threshold = purify_cmd->add_subcommand("threshold", "Threshold for one scenario");
  purify_threshold->add_option("--graph", job.graph_id, "rep8, mes6 (its bipartite LC form) or a JSON file")
      ->capture_default_str();
  purify_threshold->add_option("--q", job.q, "Survival parameter of the kept qubits")->capture_default_str();
  purify_threshold->add_option("--transmitted", job.transmitted, "Transmitted vertices (0-based)")->delimiter(',');
  add_purify_common(purify_threshold);
  auto* purify_sweep = purify_cmd->add_subcommand("sweep", "Thresholds over a list of q values");
  purify_sweep->add_option("--graph", job.graph_id, "rep8, mes6 or a JSON file")->capture_default_str();
  purify_sweep->add_option("--q-list", q_list, "q values")->delimiter(',');
  purify_sweep->add_option("--transmitted", job.transmitted, "Transmitted vertices (0-based)")->delimiter(',');
  add_purify_common(purify_sweep);
  auto* purify_variants = purify_cmd->add_subcommand("variants", "Two-transmitted-qubit scenarios");
  add_purify_common(purify_variants);

  // ppt wstate
  auto* ppt_cmd = app.add_subcommand("ppt", "PPT boundaries");
  ppt_cmd->require_subcommand(1);
  double ppt_tol = 1e-3;
  auto* ppt_w = ppt_cmd->add_subcommand("wstate", "Noise level where the noisy W state becomes PPT");
  ppt_w->add_option("--tol", ppt_tol, "Bisection tolerance")->capture_default_str();
  add_common(ppt_w);

  // lme send
  auto* lme_cmd = app.add_subcommand("lme", "Classical information over LMES preparation");
  lme_cmd->require_subcommand(1);
  std::string spec_id = "path3";
  std::string hex_bits = "0";
  int nbits = -1;
  auto* lme_send = lme_cmd->add_subcommand("send", "Send payload bits through one prepared copy");
  lme_send->add_option("--spec", spec_id, "path3, triple or a JSON spec file")->capture_default_str();
  lme_send->add_option("--bits", hex_bits, "Payload as hex")->capture_default_str();
  lme_send->add_option("--nbits", nbits, "Keep only the last n payload bits");
  add_common(lme_send);

  CLI11_PARSE(app, argc, argv);

  try {
    std::mt19937_64 rng(seed);
    if (rep_run->parsed() || rep_mes->parsed()) {
      const bool mes = rep_mes->parsed();
      const std::size_t count = mes ? 3 : static_cast<std::size_t>(cf::param_count(rep_n));
      if (!mes && rep_n != 2 && rep_n != 3) throw std::invalid_argument("-n must be 2 or 3");
      if (!random_params && angles.size() != count) {
        throw std::invalid_argument("expected " + std::to_string(count) + " angles (or --random)");
      }
      if (format == "csv") out.buffer << kCsvVersion << '\n' << protocol::csv_header() << '\n';
      json list = json::array();
      qsim::OutcomeSource src = qsim::OutcomeSource::sampled(rng);
      for (int k = 0; k < runs; ++k) {
        const std::vector<double> a = random_params ? random_angles(count, rng) : angles;
        const protocol::REPRun run = mes ? protocol::run_mes_rep(a[0], a[1], a[2], src) : protocol::run_rep(rep_n, a, src);
        ok = ok && run.fidelity >= 1.0 - 1e-9;
        if (format == "csv") {
          out.buffer << protocol::csv_row(run) << '\n';
        } else {
          list.push_back(run.to_json());
        }
      }
      if (format == "json") out.buffer << (runs == 1 ? list[0] : list).dump(2) << '\n';
    } else if (rep_audit->parsed()) {
      if (rep_n != 2 && rep_n != 3) throw std::invalid_argument("-n must be 2 or 3");
      const auto count = static_cast<std::size_t>(cf::param_count(rep_n));
      if (angles.empty()) angles = random_angles(count, rng);
      if (angles_b.empty()) angles_b = random_angles(count, rng);
      if (angles.size() != count || angles_b.size() != count) throw std::invalid_argument("wrong number of angles");
      const protocol::AuditReport r = protocol::obliviousness_audit(rep_n, angles, angles_b, audit_runs, rng);
      json j = r.to_json();
      j["params_a"] = angles;
      j["params_b"] = angles_b;
      out.buffer << j.dump(2) << '\n';
      ok = r.p_value > 0.01 && r.resource_identical();
    } else if (compile_cmd->parsed()) {
      cf::GateSequence seq;
      if (!sequence_file.empty()) {
        seq = cf::GateSequence::from_json(read_json_file(sequence_file));
      } else if (compile_mes) {
        seq = cf::mes_circuit();
      } else {
        seq = cf::cf_circuit(compile_n);
      }
      const compiler::CompiledProtocol cp = compiler::compile(seq);
      json j = cp.to_json();
      j["circuit_hash"] = cp.circuit_hash();
      out.buffer << j.dump(2) << '\n';
    } else if (graph_color->parsed()) {
      const graphstab::Graph g = load_graph(graph_id);
      const graphstab::ColoringResult c = graphstab::chromatic_info(g);
      out.buffer << json{{"graph", g.to_json()}, {"chromatic_number", c.chromatic_number}, {"colors", c.colors}}.dump(2)
                 << '\n';
    } else if (graph_orbit->parsed()) {
      const graphstab::Graph g = load_graph(graph_id);
      const graphstab::OrbitResult orbit = graphstab::lc_orbit(g, max_size);
      json j{{"graph", g.to_json()}, {"orbit_size_up_to_isomorphism", orbit.graphs.size()}, {"complete", orbit.complete}};
      if (find_bipartite) {
        const graphstab::LcSearch s = graphstab::find_lc_sequence(g, graphstab::is_bipartite, max_size);
        j["bipartite_found"] = s.found;
        j["search_complete"] = s.complete;
        j["explored"] = s.explored;
        if (s.found) {
          j["sequence"] = s.sequence;
          j["bipartite_graph"] = s.result.to_json();
        }
      }
      out.buffer << j.dump(2) << '\n';
    } else if (graph_equiv->parsed()) {
      const graphstab::Graph g1 = load_graph(graph_id);
      const graphstab::Graph g2 = load_graph(other_id);
      out.buffer << json{{"lc_equivalent", graphstab::is_lc_equivalent(g1, g2, max_size)}}.dump(2) << '\n';
    } else if (purify_threshold->parsed() || purify_sweep->parsed() || purify_variants->parsed()) {
      if (!(tol > 0.0)) throw std::invalid_argument("--tol must be positive");
      const auto r = parse_rule(rule);
      const auto pol = parse_policy(policy);
      std::vector<PurifyJob> jobs;
      if (purify_threshold->parsed()) {
        jobs.push_back(job);
      } else if (purify_sweep->parsed()) {
        for (double q : q_list) jobs.push_back({job.graph_id, q, job.transmitted});
      } else {
        for (double q : {0.99, 0.97}) {
          for (int keep : {5, 6, 7}) {
            std::vector<int> t;
            for (int v : {5, 6, 7}) {
              if (v != keep) t.push_back(v);
            }
            jobs.push_back({"rep8", q, t});
          }
        }
        for (int keep : {3, 4, 5}) {
          std::vector<int> t;
          for (int v : {3, 4, 5}) {
            if (v != keep) t.push_back(v);
          }
          jobs.push_back({"mes6", 1.0, t});
        }
      }
      const auto results = run_jobs(jobs, tol, r, pol);
      out.buffer << kCsvVersion << '\n' << purify_csv_header() << '\n';
      for (std::size_t i = 0; i < jobs.size(); ++i) out.buffer << purify_csv_row(jobs[i], results[i], timing) << '\n';
    } else if (ppt_w->parsed()) {
      if (!(ppt_tol > 0.0)) throw std::invalid_argument("--tol must be positive");
      out.buffer << json{{"p_boundary", purification::w_ppt_boundary(ppt_tol)}, {"tol", ppt_tol}}.dump(2) << '\n';
    } else if (lme_send->parsed()) {
      lme::LmesSpec spec;
      if (spec_id == "path3") {
        spec = lme::path_lmes(3);
      } else if (spec_id == "triple") {
        spec = lme::triple_pi_lmes();
      } else {
        spec = lme::LmesSpec::from_json(read_json_file(spec_id));
      }
      const std::vector<int> payload = parse_hex_bits(hex_bits, nbits);
      const lme::ChannelRun run = lme::classical_channel_demo(spec, payload, rng);
      ok = run.received == payload;
      out.buffer << json{{"payload", payload},
                         {"channel", run.channel},
                         {"frame_bits", run.frame_bits},
                         {"announced", run.announced},
                         {"received", run.received},
                         {"recovered", ok}}
                        .dump(2)
                 << '\n';
    }
    out.flush();
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return 2;
  }
  return ok ? 0 : 1;
}
