// targetflow command-line tool: gen, solve, verify, sweep, matching.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "targetflow/graph.hpp"
#include "targetflow/matching.hpp"
#include "targetflow/mftp.hpp"
#include "targetflow/sweep.hpp"
#include "targetflow/verify.hpp"

namespace tf = targetflow;
using nlohmann::json;

namespace {

enum ExitCode : int { kOk = 0, kParse = 1, kSemantic = 2, kNumeric = 3 };

// Error opening or writing a file. Reported like a parse failure.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

double sig6(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return std::stod(buf);
}

tf::LabeledGraph load_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open graph file '" + path + "'");
  return tf::parse_edge_list(in);
}

tf::TargetSet load_targets(const std::string& path, const tf::LabeledGraph& g) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open target file '" + path + "'");
  return tf::parse_target_list(in, g);
}

// Writes to `path`, or standard output when empty.
template <typename Fn>
void emit(const std::string& path, Fn&& write) {
  if (path.empty()) {
    write(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  write(out);
  if (!out) throw IoError("failed writing '" + path + "'");
}

json labelled(const std::vector<std::vector<tf::NodeId>>& seqs, const tf::LabeledGraph& g) {
  json out = json::array();
  for (const auto& seq : seqs) {
    json row = json::array();
    for (tf::NodeId v : seq) row.push_back(g.label(v));
    out.push_back(row);
  }
  return out;
}

json solution_json(const tf::Solution& sol, const tf::DriverAllocation& alloc, const tf::LabeledGraph& g) {
  json att = json::array();
  for (const auto& a : alloc.attachments) att.push_back({a.driver, g.label(a.node)});
  return json{{"min_drivers", sol.min_drivers},
              {"paths", labelled(sol.cover.paths, g)},
              {"cycles", labelled(sol.cover.cycles, g)},
              {"attachments", att},
              {"flow_value", sol.flow_value}};
}

std::vector<double> default_fractions() {
  std::vector<double> f;
  for (int i = 1; i <= 10; ++i) f.push_back(i / 10.0);
  return f;
}

struct Options {
  std::uint64_t seed = 1;
  std::string out;
  std::string format = "json";

  std::string graph;
  std::string targets;

  std::string model = "er";
  std::size_t n = 1000;
  double mu = 3.0;
  double gamma = 3.0;

  double t_final = 3.0;
  std::size_t gramian_steps = 2000;
  std::size_t sim_steps = 4000;
  double tolerance = 1e-3;
  std::vector<tf::Label> attach;
  std::string trajectory;

  std::vector<double> fractions = default_fractions();
  std::size_t trials = 20;
};

tf::GeneratorSpec generator_spec(const Options& o) {
  tf::GeneratorSpec spec;
  spec.kind = o.model == "sf" ? tf::GeneratorSpec::Kind::kSf : tf::GeneratorSpec::Kind::kEr;
  spec.n = o.n;
  spec.mu = o.mu;
  spec.gamma = o.gamma;
  return spec;
}

int cmd_gen(const Options& o) {
  tf::DiGraph g = tf::generate(generator_spec(o), o.seed);
  emit(o.out, [&](std::ostream& os) { tf::write_edge_list(os, g); });
  return kOk;
}

int cmd_solve(const Options& o) {
  auto g = load_graph(o.graph);
  auto s = load_targets(o.targets, g);
  auto sol = tf::solve(g.graph, s);
  auto alloc = tf::allocate_drivers(sol.cover);
  emit(o.out, [&](std::ostream& os) { os << solution_json(sol, alloc, g).dump() << '\n'; });
  return kOk;
}

int cmd_matching(const Options& o) {
  auto g = load_graph(o.graph);
  std::size_t nd = tf::driver_count_mm(g.graph);
  emit(o.out, [&](std::ostream& os) {
    if (o.format == "json") {
      os << json{{"N_D", nd}, {"nodes", g.graph.node_count()}}.dump() << '\n';
    } else {
      os << nd << '\n';
    }
  });
  return kOk;
}

int cmd_verify(const Options& o) {
  auto g = load_graph(o.graph);
  auto s = load_targets(o.targets, g);
  auto sol = tf::solve(g.graph, s);
  tf::DriverAllocation alloc = tf::allocate_drivers(sol.cover);
  if (!o.attach.empty()) {
    alloc = tf::DriverAllocation{1, {}};
    for (tf::Label l : o.attach) {
      auto it = g.ids.find(l);
      if (it == g.ids.end()) throw tf::InvalidInput("attachment label " + std::to_string(l) + " is not a node");
      alloc.attachments.push_back({0, it->second});
    }
  }

  auto sys = tf::realize_system(g.graph, s, alloc, o.seed);
  std::size_t rank = tf::kalman_target_rank(sys);
  json report{{"min_drivers", sol.min_drivers},
              {"drivers_used", alloc.driver_count},
              {"rank", rank},
              {"targets", s.size()},
              {"t_f", o.t_final},
              {"tolerance", o.tolerance}};

  if (rank != s.size()) {
    report["controllable"] = false;
    report["pass"] = false;
  } else {
    std::mt19937_64 rng(o.seed ^ 0x9e3779b97f4a7c15ULL);
    std::normal_distribution<double> gauss;
    std::vector<double> x0(g.graph.node_count());
    for (double& v : x0) v = gauss(rng);
    double norm = tf::norm2(x0);
    for (double& v : x0) v /= norm;

    auto u = tf::design_input(sys, x0, o.t_final, o.gramian_steps);
    auto traj = tf::simulate(sys, u, x0, o.t_final, o.sim_steps);
    double residual = tf::norm2(traj.final_output);
    report["controllable"] = true;
    report["output_norm"] = residual;
    report["pass"] = residual <= o.tolerance;
    if (!o.trajectory.empty()) {
      emit(o.trajectory, [&](std::ostream& os) { tf::write_output_csv(os, traj); });
    }
  }
  emit(o.out, [&](std::ostream& os) { os << report.dump() << '\n'; });
  return kOk;
}

int cmd_sweep(const Options& o) {
  tf::DiGraph g = o.graph.empty() ? tf::generate(generator_spec(o), o.seed) : load_graph(o.graph).graph;
  auto result = tf::run_sweep(g, o.fractions, o.trials, o.seed);
  emit(o.out, [&](std::ostream& os) {
    if (o.format == "csv") {
      tf::write_sweep_csv(os, result);
      return;
    }
    json rows = json::array();
    for (const auto& r : result.rows) {
      rows.push_back({{"f", sig6(r.fraction)},
                      {"trials", r.trials},
                      {"mean_nD", sig6(r.mean_drivers)},
                      {"ratio", sig6(r.ratio)},
                      {"std", sig6(r.std_ratio)}});
    }
    os << json{{"N_D", result.network_drivers}, {"nodes", g.node_count()}, {"rows", rows}}.dump() << '\n';
  });
  return kOk;
}

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--seed", o.seed, "RNG seed");
  cmd->add_option("--out", o.out, "Output path (default: stdout)");
}

void add_generator(CLI::App* cmd, Options& o) {
  cmd->add_option("--model", o.model, "Random graph model")->check(CLI::IsMember({"er", "sf"}));
  cmd->add_option("--n", o.n, "Node count");
  cmd->add_option("--mu", o.mu, "Mean total degree");
  cmd->add_option("--gamma", o.gamma, "Scale-free tail exponent");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Minimum control sources for target controllability"};
  app.require_subcommand(1);
  Options o;

  auto* gen = app.add_subcommand("gen", "Generate a random ER or SF network as an edge list");
  add_common(gen, o);
  add_generator(gen, o);

  auto* solve = app.add_subcommand("solve", "Minimum driver allocation for a target set (JSON)");
  add_common(solve, o);
  solve->add_option("--graph", o.graph, "Edge-list file")->required();
  solve->add_option("--targets", o.targets, "Target-set file")->required();

  auto* verify = app.add_subcommand("verify", "Numerically certify the allocation");
  add_common(verify, o);
  verify->add_option("--graph", o.graph, "Edge-list file")->required();
  verify->add_option("--targets", o.targets, "Target-set file")->required();
  verify->add_option("--tf", o.t_final, "Final time");
  verify->add_option("--gramian-steps", o.gramian_steps, "Simpson steps (even)");
  verify->add_option("--sim-steps", o.sim_steps, "RK4 steps");
  verify->add_option("--tolerance", o.tolerance, "Pass threshold on ||y(t_f)||");
  verify->add_option("--attach", o.attach, "Override B: attach these labels to a single driver");
  verify->add_option("--trajectory", o.trajectory, "Write t,y_1..y_p CSV here");

  auto* sweep = app.add_subcommand("sweep", "n_D / N_D against the target fraction");
  add_common(sweep, o);
  add_generator(sweep, o);
  sweep->add_option("--graph", o.graph, "Edge-list file (instead of a generator)");
  sweep->add_option("--fractions", o.fractions, "Target fractions in (0, 1]")->delimiter(',');
  sweep->add_option("--trials", o.trials, "Trials per fraction")->check(CLI::PositiveNumber);
  sweep->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}));

  auto* matching = app.add_subcommand("matching", "Whole-network driver count N_D");
  add_common(matching, o);
  matching->add_option("--graph", o.graph, "Edge-list file")->required();
  matching->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) return cmd_gen(o);
    if (*solve) return cmd_solve(o);
    if (*verify) return cmd_verify(o);
    if (*sweep) return cmd_sweep(o);
    if (*matching) return cmd_matching(o);
  } catch (const tf::ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kParse;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kParse;
  } catch (const tf::InvalidInput& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kSemantic;
  } catch (const tf::NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kNumeric;
  }
  return kOk;
}
