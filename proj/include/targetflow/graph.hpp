#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "targetflow/errors.hpp"

namespace targetflow {

using NodeId = std::uint32_t;

struct Edge {
  NodeId tail = 0;
  NodeId head = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Immutable directed graph on nodes [0, n). Duplicate edges are dropped on
/// construction (first occurrence kept); self-loops are allowed.
class DiGraph {
 public:
  DiGraph() = default;

  DiGraph(std::size_t n, std::span<const Edge> edges) : n_(n), out_(n), in_(n) {
    std::unordered_set<std::uint64_t> seen;
    seen.reserve(edges.size() * 2);
    edges_.reserve(edges.size());
    for (const Edge& e : edges) {
      if (e.tail >= n || e.head >= n) {
        throw InvalidInput("edge (" + std::to_string(e.tail) + ", " +
                           std::to_string(e.head) + ") out of range for n=" +
                           std::to_string(n));
      }
      if (!seen.insert(key(e)).second) continue;
      out_[e.tail].push_back(e.head);
      in_[e.head].push_back(e.tail);
      edges_.push_back(e);
    }
  }

  DiGraph(std::size_t n, std::initializer_list<Edge> edges)
      : DiGraph(n, std::span<const Edge>(edges.begin(), edges.size())) {}

  std::size_t node_count() const noexcept { return n_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  std::span<const Edge> edges() const noexcept { return edges_; }
  std::span<const NodeId> out_neighbors(NodeId v) const { return out_.at(v); }
  std::span<const NodeId> in_neighbors(NodeId v) const { return in_.at(v); }

  bool has_edge(NodeId tail, NodeId head) const {
    if (tail >= n_ || head >= n_) return false;
    const auto& adj = out_[tail];
    return std::find(adj.begin(), adj.end(), head) != adj.end();
  }

  // Same node count and the same edge set, regardless of insertion order.
  friend bool operator==(const DiGraph& a, const DiGraph& b) {
    if (a.n_ != b.n_ || a.edges_.size() != b.edges_.size()) return false;
    auto ea = a.edges_;
    auto eb = b.edges_;
    std::sort(ea.begin(), ea.end());
    std::sort(eb.begin(), eb.end());
    return ea == eb;
  }

 private:
  static std::uint64_t key(const Edge& e) {
    return (static_cast<std::uint64_t>(e.tail) << 32) | e.head;
  }

  std::size_t n_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<NodeId>> out_;
  std::vector<std::vector<NodeId>> in_;
};

/// Non-empty, strictly increasing subset of a graph's nodes.
class TargetSet {
 public:
  TargetSet(std::vector<NodeId> members, std::size_t node_count)
      : members_(std::move(members)) {
    if (members_.empty()) throw InvalidInput("empty target set");
    std::sort(members_.begin(), members_.end());
    if (std::adjacent_find(members_.begin(), members_.end()) != members_.end()) {
      throw InvalidInput("duplicate node in target set");
    }
    if (members_.back() >= node_count) {
      throw InvalidInput("target node " + std::to_string(members_.back()) +
                         " out of range for n=" + std::to_string(node_count));
    }
  }

  static TargetSet all(std::size_t node_count) {
    std::vector<NodeId> v(node_count);
    for (std::size_t i = 0; i < node_count; ++i) v[i] = static_cast<NodeId>(i);
    return TargetSet(std::move(v), node_count);
  }

  std::span<const NodeId> members() const noexcept { return members_; }
  std::size_t size() const noexcept { return members_.size(); }
  bool contains(NodeId v) const {
    return std::binary_search(members_.begin(), members_.end(), v);
  }

  // Membership mask over [0, node_count).
  std::vector<char> mask(std::size_t node_count) const {
    std::vector<char> m(node_count, 0);
    for (NodeId v : members_) m[v] = 1;
    return m;
  }

  friend bool operator==(const TargetSet&, const TargetSet&) = default;

 private:
  std::vector<NodeId> members_;
};

// ---------------------------------------------------------------------------
// Edge-list files
// ---------------------------------------------------------------------------

using Label = std::uint64_t;

/// A parsed edge list: the compacted graph plus the label bookkeeping needed to
/// read target files and print results in the caller's label space.
struct LabeledGraph {
  DiGraph graph;
  std::vector<Label> labels;                   // internal id -> label
  std::unordered_map<Label, NodeId> ids;       // label -> internal id

  Label label(NodeId v) const { return labels.at(v); }
};

namespace detail {

inline bool blank_or_comment(const std::string& line) {
  auto pos = line.find_first_not_of(" \t\r");
  return pos == std::string::npos || line[pos] == '#';
}

inline Label parse_label(const std::string& tok, std::size_t line_no) {
  if (tok.empty() ||
      !std::all_of(tok.begin(), tok.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    throw ParseError(line_no, "expected a non-negative integer, got '" + tok + "'");
  }
  try {
    return std::stoull(tok);
  } catch (const std::out_of_range&) {
    throw ParseError(line_no, "integer out of range: '" + tok + "'");
  }
}

inline std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> tokens;
  for (std::string tok; ss >> tok;) tokens.push_back(tok);
  return tokens;
}

}  // namespace detail

/// Reads "tail head" lines. Labels are compacted to 0-based ids in order of
/// first appearance; '#' lines and blank lines are skipped.
inline LabeledGraph parse_edge_list(std::istream& in) {
  LabeledGraph out;
  std::vector<Edge> edges;
  auto intern = [&](Label l) {
    auto [it, inserted] = out.ids.try_emplace(l, static_cast<NodeId>(out.labels.size()));
    if (inserted) out.labels.push_back(l);
    return it->second;
  };

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::blank_or_comment(line)) continue;
    auto tokens = detail::split_ws(line);
    if (tokens.size() != 2) {
      throw ParseError(line_no, "expected 2 fields, got " + std::to_string(tokens.size()));
    }
    Label a = detail::parse_label(tokens[0], line_no);
    Label b = detail::parse_label(tokens[1], line_no);
    NodeId ta = intern(a);
    NodeId hb = intern(b);
    edges.push_back({ta, hb});
  }
  out.graph = DiGraph(out.labels.size(), edges);
  return out;
}

inline LabeledGraph parse_edge_list(const std::string& text) {
  std::istringstream ss(text);
  return parse_edge_list(ss);
}

/// Writes one "tail head" line per edge using the graph's internal ids, or the
/// given labels when supplied.
inline void write_edge_list(std::ostream& out, const DiGraph& g,
                            std::span<const Label> labels = {}) {
  for (const Edge& e : g.edges()) {
    if (labels.empty()) {
      out << e.tail << ' ' << e.head << '\n';
    } else {
      out << labels[e.tail] << ' ' << labels[e.head] << '\n';
    }
  }
}

/// Reads one label per line. Unknown labels are a semantic error
/// (InvalidInput), not a parse error.
inline TargetSet parse_target_list(std::istream& in, const LabeledGraph& g) {
  std::vector<NodeId> members;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::blank_or_comment(line)) continue;
    auto tokens = detail::split_ws(line);
    if (tokens.size() != 1) {
      throw ParseError(line_no, "expected 1 field, got " + std::to_string(tokens.size()));
    }
    Label l = detail::parse_label(tokens[0], line_no);
    auto it = g.ids.find(l);
    if (it == g.ids.end()) {
      throw InvalidInput("target label " + std::to_string(l) + " is not a node of the graph");
    }
    members.push_back(it->second);
  }
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  return TargetSet(std::move(members), g.graph.node_count());
}

// ---------------------------------------------------------------------------
// Adjacency matrices
// ---------------------------------------------------------------------------
//
// Row i of x' = Ax is fed by column j, so A[i][j] != 0 encodes the edge j -> i.

template <typename T>
DiGraph from_adjacency(const std::vector<std::vector<T>>& a) {
  const std::size_t n = a.size();
  for (const auto& row : a) {
    if (row.size() != n) throw InvalidInput("adjacency matrix is not square");
  }
  std::vector<Edge> edges;
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      if (a[i][j] != T{}) edges.push_back({static_cast<NodeId>(j), static_cast<NodeId>(i)});
    }
  }
  return DiGraph(n, edges);
}

inline std::vector<std::vector<int>> to_adjacency(const DiGraph& g) {
  std::vector<std::vector<int>> a(g.node_count(), std::vector<int>(g.node_count(), 0));
  for (const Edge& e : g.edges()) a[e.head][e.tail] = 1;
  return a;
}

// ---------------------------------------------------------------------------
// Random generators
// ---------------------------------------------------------------------------

// Directed edge count for mean total degree mu.
inline std::size_t edge_budget(std::size_t n, double mu) {
  return static_cast<std::size_t>(std::llround(static_cast<double>(n) * mu / 2.0));
}

/// Erdos-Renyi G(n, L): L = round(n*mu/2) distinct non-loop directed edges,
/// uniform without replacement. Edges come back sorted by (tail, head).
inline DiGraph generate_er(std::size_t n, double mu, std::uint64_t seed) {
  if (n < 1) throw InvalidInput("generate_er: n must be >= 1");
  if (!(mu >= 0.0)) throw InvalidInput("generate_er: mu must be >= 0");
  const std::size_t budget = edge_budget(n, mu);
  const std::uint64_t pairs = static_cast<std::uint64_t>(n) * (n - 1);
  if (budget > pairs) {
    throw InvalidInput("generate_er: " + std::to_string(budget) +
                       " edges requested but only " + std::to_string(pairs) +
                       " ordered pairs exist");
  }

  std::mt19937_64 rng(seed);
  auto decode = [n](std::uint64_t idx) {
    auto tail = static_cast<NodeId>(idx / (n - 1));
    auto r = static_cast<NodeId>(idx % (n - 1));
    return Edge{tail, r < tail ? r : r + 1};
  };

  std::vector<Edge> edges;
  edges.reserve(budget);
  if (pairs <= 2 * static_cast<std::uint64_t>(budget)) {
    // Dense: partial Fisher-Yates over the whole pair space.
    std::vector<std::uint64_t> all(pairs);
    for (std::uint64_t i = 0; i < pairs; ++i) all[i] = i;
    for (std::size_t i = 0; i < budget; ++i) {
      std::uniform_int_distribution<std::uint64_t> pick(i, pairs - 1);
      std::swap(all[i], all[pick(rng)]);
      edges.push_back(decode(all[i]));
    }
  } else {
    std::unordered_set<std::uint64_t> chosen;
    chosen.reserve(budget * 2);
    std::uniform_int_distribution<std::uint64_t> pick(0, pairs - 1);
    while (chosen.size() < budget) {
      std::uint64_t idx = pick(rng);
      if (chosen.insert(idx).second) edges.push_back(decode(idx));
    }
  }
  std::sort(edges.begin(), edges.end());
  return DiGraph(n, edges);
}

/// Static-model scale-free digraph: node i has weight (i+1)^(-1/(gamma-1));
/// tail and head are drawn independently by weight, self-loops and duplicates
/// are rejected. Fails after 100*L draws.
inline DiGraph generate_sf(std::size_t n, double mu, double gamma, std::uint64_t seed) {
  if (n < 2) throw InvalidInput("generate_sf: n must be >= 2");
  if (!(gamma > 2.0)) throw InvalidInput("generate_sf: gamma must be > 2");
  if (!(mu >= 0.0)) throw InvalidInput("generate_sf: mu must be >= 0");
  const std::size_t budget = edge_budget(n, mu);
  if (budget > static_cast<std::uint64_t>(n) * (n - 1)) {
    throw InvalidInput("generate_sf: too many edges requested");
  }

  const double alpha = 1.0 / (gamma - 1.0);
  std::vector<double> weights(n);
  for (std::size_t i = 0; i < n; ++i) {
    weights[i] = std::pow(static_cast<double>(i + 1), -alpha);
  }
  std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
  std::mt19937_64 rng(seed);

  std::unordered_set<std::uint64_t> chosen;
  chosen.reserve(budget * 2);
  std::vector<Edge> edges;
  edges.reserve(budget);
  const std::size_t max_attempts = 100 * budget;
  std::size_t attempts = 0;
  while (edges.size() < budget) {
    if (++attempts > max_attempts) {
      throw InvalidInput("generate_sf: rejection limit reached after " +
                         std::to_string(max_attempts) + " draws");
    }
    auto tail = static_cast<NodeId>(pick(rng));
    auto head = static_cast<NodeId>(pick(rng));
    if (tail == head) continue;
    auto k = (static_cast<std::uint64_t>(tail) << 32) | head;
    if (chosen.insert(k).second) edges.push_back({tail, head});
  }
  std::sort(edges.begin(), edges.end());
  return DiGraph(n, edges);
}

}  // namespace targetflow
