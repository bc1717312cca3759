// Acceptance suite: one PASS/FAIL line per criterion; nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "targetflow/flow.hpp"
#include "targetflow/graph.hpp"
#include "targetflow/matching.hpp"
#include "targetflow/mftp.hpp"
#include "targetflow/sweep.hpp"
#include "targetflow/verify.hpp"

namespace tf = targetflow;
namespace oracle = targetflow::testing;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

// Labels of the canonical fixture are id + 1.
std::vector<std::vector<int>> as_labels(const std::vector<std::vector<tf::NodeId>>& seqs) {
  std::vector<std::vector<int>> out;
  for (const auto& s : seqs) {
    std::vector<int> row;
    for (tf::NodeId v : s) row.push_back(static_cast<int>(v) + 1);
    out.push_back(row);
  }
  return out;
}

Outcome canonical_exact() {
  const tf::DiGraph g = oracle::canonical_graph();
  const tf::TargetSet s = oracle::canonical_targets();
  tf::solve(g, s);  // warm-up
  double best = 1e9;
  tf::Solution sol;
  for (int i = 0; i < 5; ++i) {
    auto start = Clock::now();
    sol = tf::solve(g, s);
    best = std::min(best, seconds_since(start));
  }
  auto alloc = tf::allocate_drivers(sol.cover);
  std::vector<std::vector<int>> want_paths{{9, 7}}, want_cycles{{2, 3, 6}};
  std::vector<int> b(9, 0);
  for (const auto& a : alloc.attachments)
    if (a.driver == 0) b[a.node] = 1;
  std::vector<int> want_b{0, 1, 0, 0, 0, 0, 0, 0, 1};

  bool ok = sol.min_drivers == 1 && sol.flow_value == 3 && as_labels(sol.cover.paths) == want_paths &&
            as_labels(sol.cover.cycles) == want_cycles && alloc.driver_count == 1 && b == want_b &&
            best < 1e-3;
  char buf[160];
  std::snprintf(buf, sizeof buf, "min_drivers=%zu flow=%lld paths=%zu cycles=%zu runtime=%.3g ms",
                sol.min_drivers, static_cast<long long>(sol.flow_value), sol.cover.paths.size(),
                sol.cover.cycles.size(), best * 1e3);
  return {ok, buf};
}

Outcome brute_force_equivalence() {
  auto start = Clock::now();
  std::mt19937_64 rng(20240601);
  std::size_t mismatches = 0, instances = 0;
  for (int trial = 0; trial < 2400; ++trial) {
    std::size_t n = 1 + trial % 7;
    std::size_t m = std::uniform_int_distribution<std::size_t>(0, 10)(rng);
    tf::DiGraph g = oracle::random_graph(n, m, rng);
    tf::TargetSet s = oracle::random_targets(n, rng);
    auto sol = tf::solve(g, s);
    if (!tf::verify_cover(g, s, sol.cover) || sol.min_drivers != oracle::brute_force_min_drivers(g, s)) {
      ++mismatches;
    }
    ++instances;
  }
  double elapsed = seconds_since(start);
  char buf[128];
  std::snprintf(buf, sizeof buf, "%zu instances, %zu mismatches, %.2f s", instances, mismatches, elapsed);
  return {mismatches == 0 && instances >= 2000 && elapsed < 60.0, buf};
}

Outcome dual_route_agreement() {
  std::mt19937_64 rng(77);
  std::size_t mismatches = 0;
  for (int trial = 0; trial < 500; ++trial) {
    std::size_t n = 1 + trial % 12;
    std::size_t m = std::uniform_int_distribution<std::size_t>(0, 3 * n)(rng);
    tf::DiGraph g = oracle::random_graph(n, m, rng);
    tf::TargetSet s = oracle::random_targets(n, rng);
    if (tf::solve(g, s).min_drivers != tf::solve_via_circulation(g, s).min_drivers) ++mismatches;
  }
  return {mismatches == 0, "500 instances, " + std::to_string(mismatches) + " mismatches"};
}

Outcome whole_network_consistency() {
  std::mt19937_64 rng(88);
  std::size_t mismatches = 0;
  for (int trial = 0; trial < 500; ++trial) {
    std::size_t n = 1 + trial % 50;
    std::size_t m = std::uniform_int_distribution<std::size_t>(0, 3 * n)(rng);
    tf::DiGraph g = oracle::random_graph(n, m, rng);
    if (tf::solve(g, tf::TargetSet::all(n)).min_drivers != tf::driver_count_mm(g)) ++mismatches;
  }
  return {mismatches == 0, "500 graphs, " + std::to_string(mismatches) + " mismatches"};
}

Outcome max_flow_correctness() {
  std::mt19937_64 rng(99);
  std::size_t mismatches = 0;
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t n = 2 + trial % 11;
    std::size_t arcs = std::uniform_int_distribution<std::size_t>(0, 4 * n)(rng);
    auto net = oracle::random_network(n, arcs, 3, rng);
    auto f = tf::max_flow_dinic(net, net.source, net.sink);
    if (f.value != oracle::reference_max_flow(net, net.source, net.sink) ||
        !tf::is_feasible_flow(net, f.flow, net.source, net.sink)) {
      ++mismatches;
    }
  }
  return {mismatches == 0, "200 networks, " + std::to_string(mismatches) + " mismatches"};
}

Outcome circulation_existence() {
  std::mt19937_64 rng(111);
  std::size_t found = 0;
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t n = 1 + trial % 20;
    std::size_t m = std::uniform_int_distribution<std::size_t>(0, 3 * n)(rng);
    tf::DiGraph g = oracle::random_graph(n, m, rng);
    tf::TargetSet s = oracle::random_targets(n, rng);
    auto t = tf::build_split_network(g, s);
    auto net = tf::with_return_arc(t.network);
    auto circ = tf::feasible_circulation(net);
    if (circ && tf::is_feasible_flow(net, circ->flow, 0, 0)) ++found;
  }
  return {found == 200, std::to_string(found) + "/200 feasible"};
}

Outcome numeric_certification() {
  auto start = Clock::now();
  const tf::DiGraph g = oracle::canonical_graph();
  const tf::TargetSet s = oracle::canonical_targets();
  auto alloc = tf::allocate_drivers(tf::solve(g, s).cover);

  std::size_t full_rank = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    if (tf::kalman_target_rank(tf::realize_system(g, s, alloc, seed)) == s.size()) ++full_rank;
  }

  auto sys = tf::realize_system(g, s, alloc, 1);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> gauss;
  double worst = 0.0;
  for (int k = 0; k < 5; ++k) {
    std::vector<double> x0(g.node_count());
    for (double& v : x0) v = gauss(rng);
    double norm = tf::norm2(x0);
    for (double& v : x0) v /= norm;
    auto u = tf::design_input(sys, x0, 3.0);
    auto traj = tf::simulate(sys, u, x0, 3.0);
    worst = std::max(worst, tf::norm2(traj.final_output));
  }
  double elapsed = seconds_since(start);
  char buf[160];
  std::snprintf(buf, sizeof buf, "rank 4 on %zu/100 seeds, max ||y(3)||=%.3g over 5 x0, %.2f s", full_rank,
                worst, elapsed);
  return {full_rank >= 99 && worst <= 1e-3 && elapsed < 5.0, buf};
}

Outcome er_sweep() {
  auto start = Clock::now();
  tf::DiGraph g = tf::generate_er(1000, 3.0, 2024);
  std::vector<double> fractions;
  for (int i = 1; i <= 10; ++i) fractions.push_back(i / 10.0);
  auto result = tf::run_sweep(g, fractions, 20, 7);
  double elapsed = seconds_since(start);

  bool ok = elapsed < 120.0 && result.rows.size() == 10;
  double worst_gap = 0.0;
  double previous = -1.0;
  std::string curve;
  for (const auto& row : result.rows) {
    worst_gap = std::max(worst_gap, std::abs(row.ratio - row.fraction));
    if (row.ratio < previous - 0.02) ok = false;
    previous = row.ratio;
    char cell[32];
    std::snprintf(cell, sizeof cell, "%s%.3f", curve.empty() ? "" : " ", row.ratio);
    curve += cell;
  }
  if (worst_gap > 0.15) ok = false;
  if (result.rows.empty() || result.rows.back().ratio != 1.0) ok = false;
  char buf[256];
  std::snprintf(buf, sizeof buf, "N_D=%zu ratios=[%s] max|ratio-f|=%.3f, %.1f s", result.network_drivers,
                curve.c_str(), worst_gap, elapsed);
  return {ok, buf};
}

double time_large_solve(std::size_t n, int repeats) {
  tf::DiGraph g = tf::generate_er(n, 3.0, 31);
  std::mt19937_64 rng(32);
  tf::TargetSet s = tf::sample_targets(n, n / 2, rng);
  double best = 1e9;
  for (int i = 0; i < repeats; ++i) {
    auto start = Clock::now();
    auto sol = tf::solve(g, s);
    best = std::min(best, seconds_since(start));
    if (sol.min_drivers == 0) return -1.0;
  }
  return best;
}

Outcome scaling() {
  double small = time_large_solve(10000, 3);
  double large = time_large_solve(100000, 1);
  double exponent = std::log10(large / std::max(small, 1e-9));
  char buf[160];
  std::snprintf(buf, sizeof buf, "n=1e4: %.3f s, n=1e5: %.3f s, growth exponent %.2f", small, large, exponent);
  return {small > 0 && large > 0 && large < 10.0 && exponent < 2.0, buf};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"1 canonical instance exact", canonical_exact},
      {"2 brute-force oracle equivalence", brute_force_equivalence},
      {"3 dual-route agreement", dual_route_agreement},
      {"4 whole-network consistency with matching", whole_network_consistency},
      {"5 max-flow correctness", max_flow_correctness},
      {"6 feasible circulation existence", circulation_existence},
      {"7 numeric certification", numeric_certification},
      {"8 ER sweep band", er_sweep},
      {"9 scaling sanity", scaling},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("[%s] %s: %s\n", o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
