#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "targetflow/errors.hpp"
#include "targetflow/graph.hpp"
#include "targetflow/matching.hpp"
#include "targetflow/mftp.hpp"

namespace targetflow {

struct GeneratorSpec {
  enum class Kind { kEr, kSf };
  Kind kind = Kind::kEr;
  std::size_t n = 1000;
  double mu = 3.0;
  double gamma = 3.0;
};

inline DiGraph generate(const GeneratorSpec& spec, std::uint64_t seed) {
  return spec.kind == GeneratorSpec::Kind::kEr ? generate_er(spec.n, spec.mu, seed)
                                               : generate_sf(spec.n, spec.mu, spec.gamma, seed);
}

struct SweepRow {
  double fraction = 0.0;
  std::size_t trials = 0;
  double mean_drivers = 0.0;  // mean n_D
  double ratio = 0.0;         // mean n_D / N_D
  double std_ratio = 0.0;     // population std of n_D / N_D over trials
};

struct SweepResult {
  std::size_t network_drivers = 0;  // N_D
  std::vector<SweepRow> rows;
};

/// round(f * n), at least 1.
inline std::size_t target_count(double fraction, std::size_t n) {
  auto k = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
  return std::clamp<std::size_t>(k, 1, n);
}

/// k distinct nodes, uniform without replacement (partial Fisher-Yates).
template <typename Rng>
TargetSet sample_targets(std::size_t n, std::size_t k, Rng& rng) {
  if (k == 0 || k > n) throw InvalidInput("cannot sample " + std::to_string(k) + " of " + std::to_string(n));
  std::vector<NodeId> nodes(n);
  for (std::size_t i = 0; i < n; ++i) nodes[i] = static_cast<NodeId>(i);
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(nodes[i], nodes[pick(rng)]);
  }
  nodes.resize(k);
  return TargetSet(std::move(nodes), n);
}

/// For each fraction f, solve `trials` random target sets of size round(f n)
/// and normalize by the whole-network driver count. Trial (i, j) uses its own
/// RNG stream seeded from (seed, i, j); rows come back sorted by f.
inline SweepResult run_sweep(const DiGraph& g, std::vector<double> fractions, std::size_t trials,
                             std::uint64_t seed) {
  if (trials < 1) throw InvalidInput("trials must be >= 1");
  if (g.node_count() == 0) throw InvalidInput("sweep needs a non-empty graph");
  for (double f : fractions) {
    if (!(f > 0.0 && f <= 1.0)) throw InvalidInput("fractions must lie in (0, 1]");
  }
  std::sort(fractions.begin(), fractions.end());

  SweepResult result;
  result.network_drivers = driver_count_mm(g);
  const double nd = static_cast<double>(result.network_drivers);
  const std::size_t n = g.node_count();

  for (std::size_t fi = 0; fi < fractions.size(); ++fi) {
    const std::size_t k = target_count(fractions[fi], n);
    std::vector<double> ratios;
    ratios.reserve(trials);
    double total = 0.0;
    for (std::size_t trial = 0; trial < trials; ++trial) {
      std::seed_seq sseq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                         static_cast<std::uint32_t>(fi), static_cast<std::uint32_t>(trial)};
      std::mt19937_64 rng(sseq);
      TargetSet s = sample_targets(n, k, rng);
      auto drivers = static_cast<double>(solve(g, s).min_drivers);
      total += drivers;
      ratios.push_back(drivers / nd);
    }
    SweepRow row;
    row.fraction = fractions[fi];
    row.trials = trials;
    row.mean_drivers = total / static_cast<double>(trials);
    row.ratio = row.mean_drivers / nd;
    double var = 0.0;
    for (double r : ratios) var += (r - row.ratio) * (r - row.ratio);
    row.std_ratio = std::sqrt(var / static_cast<double>(trials));
    if (row.ratio > 1.0 + 1e-12) {
      throw InternalError("target driver count exceeds the whole-network driver count");
    }
    result.rows.push_back(row);
  }
  return result;
}

inline void write_sweep_csv(std::ostream& os, const SweepResult& r) {
  const auto old = os.precision(6);
  os << "f,trials,mean_nD,ratio,std\n";
  for (const SweepRow& row : r.rows) {
    os << row.fraction << ',' << row.trials << ',' << row.mean_drivers << ',' << row.ratio << ','
       << row.std_ratio << '\n';
  }
  os.precision(old);
}

}  // namespace targetflow
