#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "targetflow/errors.hpp"
#include "targetflow/graph.hpp"

namespace targetflow {

using Capacity = std::int64_t;

// Marks an arc without an upper bound. Solvers replace it with a finite
// sentinel larger than any achievable flow before running.
inline constexpr Capacity kInfinite = std::numeric_limits<Capacity>::max();

struct Arc {
  NodeId tail = 0;
  NodeId head = 0;
  Capacity lower = 0;
  Capacity cap = 0;
  int tag = 0;
};

/// Capacity network with lower and upper arc bounds, l(e) <= f(e) <= c(e).
struct BoundedFlowNetwork {
  std::size_t node_count = 0;
  std::vector<Arc> arcs;
  NodeId source = 0;
  NodeId sink = 0;

  std::size_t add_arc(NodeId tail, NodeId head, Capacity lower, Capacity cap, int tag = 0) {
    if (tail >= node_count || head >= node_count) {
      throw InvalidInput("arc endpoint out of range");
    }
    if (lower < 0 || cap < lower) throw InvalidInput("arc bounds must satisfy 0 <= l <= c");
    arcs.push_back({tail, head, lower, cap, tag});
    return arcs.size() - 1;
  }

  Capacity total_lower() const {
    Capacity sum = 0;
    for (const Arc& a : arcs) sum += a.lower;
    return sum;
  }

  bool has_lower_bounds() const {
    return std::any_of(arcs.begin(), arcs.end(), [](const Arc& a) { return a.lower != 0; });
  }

  // Finite stand-in for kInfinite: exceeds the sum of every finite bound.
  Capacity infinity_sentinel() const {
    Capacity sum = 1;
    for (const Arc& a : arcs) {
      if (a.cap != kInfinite) sum += a.cap;
      sum += a.lower;
    }
    return sum;
  }
};

struct FlowAssignment {
  std::vector<Capacity> flow;  // indexed like BoundedFlowNetwork::arcs
  Capacity value = 0;
};

/// Net flow leaving `s`, ignoring return arcs that run from `t` straight back
/// to `s`. For a circulation this is the s->t throughput.
inline Capacity st_value(const BoundedFlowNetwork& net, std::span<const Capacity> flow,
                         NodeId s, NodeId t) {
  Capacity v = 0;
  for (std::size_t i = 0; i < net.arcs.size(); ++i) {
    const Arc& a = net.arcs[i];
    if (a.tail == t && a.head == s) continue;
    if (a.tail == s) v += flow[i];
    if (a.head == s) v -= flow[i];
  }
  return v;
}

/// Checks bounds on every arc and conservation at every node except `s` and
/// `t`. Pass s == t to require conservation everywhere (a circulation).
inline bool is_feasible_flow(const BoundedFlowNetwork& net, std::span<const Capacity> flow,
                             NodeId s, NodeId t) {
  if (flow.size() != net.arcs.size()) return false;
  std::vector<Capacity> excess(net.node_count, 0);
  for (std::size_t i = 0; i < net.arcs.size(); ++i) {
    const Arc& a = net.arcs[i];
    if (flow[i] < a.lower || flow[i] > a.cap) return false;
    excess[a.head] += flow[i];
    excess[a.tail] -= flow[i];
  }
  for (std::size_t v = 0; v < net.node_count; ++v) {
    if (s != t && (v == s || v == t)) continue;
    if (excess[v] != 0) return false;
  }
  if (s != t && excess[s] + excess[t] != 0) return false;
  return true;
}

/// Dinic's algorithm on a plain capacity network. Residual arcs are stored in
/// forward/backward pairs (2i, 2i+1); adjacency lists keep creation order, so
/// the first admissible arc by index is always tried first.
class DinicSolver {
 public:
  explicit DinicSolver(std::size_t node_count) : adj_(node_count) {}

  std::size_t add_arc(NodeId tail, NodeId head, Capacity cap) {
    std::size_t id = head_.size();
    head_.push_back(head);
    residual_.push_back(cap);
    head_.push_back(tail);
    residual_.push_back(0);
    adj_[tail].push_back(static_cast<std::uint32_t>(id));
    adj_[head].push_back(static_cast<std::uint32_t>(id + 1));
    initial_.push_back(cap);
    return id / 2;
  }

  std::size_t node_count() const noexcept { return adj_.size(); }
  std::size_t phases() const noexcept { return phases_; }

  Capacity flow(std::size_t arc) const { return initial_[arc] - residual_[2 * arc]; }

  Capacity run(NodeId s, NodeId t) {
    if (s == t) throw InvalidInput("max flow: source equals sink");
    if (s >= adj_.size() || t >= adj_.size()) throw InvalidInput("max flow: node out of range");
    Capacity total = 0;
    level_.assign(adj_.size(), -1);
    cursor_.assign(adj_.size(), 0);
    while (build_levels(s, t)) {
      ++phases_;
      std::fill(cursor_.begin(), cursor_.end(), 0);
      total += blocking_flow(s, t);
    }
    return total;
  }

 private:
  NodeId tail_of(std::uint32_t arc) const { return head_[arc ^ 1u]; }

  bool build_levels(NodeId s, NodeId t) {
    std::fill(level_.begin(), level_.end(), -1);
    queue_.clear();
    queue_.push_back(s);
    level_[s] = 0;
    for (std::size_t qi = 0; qi < queue_.size(); ++qi) {
      NodeId u = queue_[qi];
      for (std::uint32_t a : adj_[u]) {
        NodeId v = head_[a];
        if (residual_[a] > 0 && level_[v] < 0) {
          level_[v] = level_[u] + 1;
          queue_.push_back(v);
        }
      }
    }
    return level_[t] >= 0;
  }

  // Iterative DFS over the level graph; each augmentation retreats to the tail
  // of the first saturated arc on the path.
  Capacity blocking_flow(NodeId s, NodeId t) {
    Capacity pushed = 0;
    path_.clear();
    NodeId u = s;
    while (true) {
      if (u == t) {
        Capacity bottleneck = std::numeric_limits<Capacity>::max();
        for (std::uint32_t a : path_) bottleneck = std::min(bottleneck, residual_[a]);
        std::size_t cut = path_.size();
        for (std::size_t k = 0; k < path_.size(); ++k) {
          std::uint32_t a = path_[k];
          residual_[a] -= bottleneck;
          residual_[a ^ 1u] += bottleneck;
          if (residual_[a] == 0 && cut == path_.size()) cut = k;
        }
        pushed += bottleneck;
        u = tail_of(path_[cut]);
        path_.resize(cut);
        continue;
      }
      auto& it = cursor_[u];
      const auto& arcs = adj_[u];
      while (it < arcs.size()) {
        std::uint32_t a = arcs[it];
        if (residual_[a] > 0 && level_[head_[a]] == level_[u] + 1) break;
        ++it;
      }
      if (it == arcs.size()) {
        if (u == s) break;
        level_[u] = -1;
        std::uint32_t back = path_.back();
        path_.pop_back();
        u = tail_of(back);
        ++cursor_[u];
        continue;
      }
      path_.push_back(arcs[it]);
      u = head_[arcs[it]];
    }
    return pushed;
  }

  std::vector<NodeId> head_;
  std::vector<Capacity> residual_;
  std::vector<Capacity> initial_;
  std::vector<std::vector<std::uint32_t>> adj_;
  std::vector<int> level_;
  std::vector<std::size_t> cursor_;
  std::vector<NodeId> queue_;
  std::vector<std::uint32_t> path_;
  std::size_t phases_ = 0;
};

/// Maximum s->t flow of a network without lower bounds.
inline FlowAssignment max_flow_dinic(const BoundedFlowNetwork& net, NodeId s, NodeId t) {
  if (s >= net.node_count || t >= net.node_count) throw InvalidInput("max flow: node out of range");
  if (s == t) throw InvalidInput("max flow: source equals sink");
  if (net.has_lower_bounds()) throw InvalidInput("max flow: lower bounds must be zero");

  const Capacity inf = net.infinity_sentinel();
  DinicSolver solver(net.node_count);
  for (const Arc& a : net.arcs) solver.add_arc(a.tail, a.head, a.cap == kInfinite ? inf : a.cap);
  FlowAssignment out;
  out.value = solver.run(s, t);
  out.flow.resize(net.arcs.size());
  for (std::size_t i = 0; i < net.arcs.size(); ++i) out.flow[i] = solver.flow(i);
  return out;
}

/// Lower-bound elimination. Arc i of the input maps to arc i of `network`
/// with bounds [0, c - l]; the added super source/sink arcs follow, two per
/// node in node order.
struct AssociateGraph {
  BoundedFlowNetwork network;
  NodeId super_source = 0;
  NodeId super_sink = 0;
  Capacity required = 0;  // sum of all lower bounds of the input
};

inline AssociateGraph build_associate_graph(const BoundedFlowNetwork& net) {
  AssociateGraph out;
  const std::size_t n = net.node_count;
  out.super_source = static_cast<NodeId>(n);
  out.super_sink = static_cast<NodeId>(n + 1);
  out.network.node_count = n + 2;
  out.network.source = out.super_source;
  out.network.sink = out.super_sink;
  out.network.arcs.reserve(net.arcs.size() + 2 * n);

  std::vector<Capacity> lower_in(n, 0);
  std::vector<Capacity> lower_out(n, 0);
  for (const Arc& a : net.arcs) {
    if (a.lower == kInfinite) throw InvalidInput("associate graph: lower bounds must be finite");
    Capacity cap = a.cap == kInfinite ? kInfinite : a.cap - a.lower;
    out.network.add_arc(a.tail, a.head, 0, cap, a.tag);
    lower_in[a.head] += a.lower;
    lower_out[a.tail] += a.lower;
    out.required += a.lower;
  }
  for (std::size_t v = 0; v < n; ++v) {
    out.network.add_arc(out.super_source, static_cast<NodeId>(v), 0, lower_in[v]);
    out.network.add_arc(static_cast<NodeId>(v), out.super_sink, 0, lower_out[v]);
  }
  return out;
}

/// A flow meeting every bound with conservation at every node, or nullopt.
/// `value` reports the source->sink throughput (see st_value).
inline std::optional<FlowAssignment> feasible_circulation(const BoundedFlowNetwork& net) {
  AssociateGraph assoc = build_associate_graph(net);
  FlowAssignment aux = max_flow_dinic(assoc.network, assoc.super_source, assoc.super_sink);
  if (aux.value != assoc.required) return std::nullopt;

  FlowAssignment out;
  out.flow.resize(net.arcs.size());
  for (std::size_t i = 0; i < net.arcs.size(); ++i) out.flow[i] = aux.flow[i] + net.arcs[i].lower;
  out.value = st_value(net, out.flow, net.source, net.sink);
  return out;
}

/// Minimum-value feasible s->t flow. A return arc (t, s, 0, inf) is appended
/// internally to find a feasible circulation; the t->s residual max flow is
/// then cancelled out of it. The returned assignment covers `net.arcs` only.
inline FlowAssignment min_flow_with_bounds(const BoundedFlowNetwork& net, NodeId s, NodeId t) {
  if (s >= net.node_count || t >= net.node_count) throw InvalidInput("min flow: node out of range");
  if (s == t) throw InvalidInput("min flow: source equals sink");

  BoundedFlowNetwork closed = net;
  closed.source = s;
  closed.sink = t;
  closed.add_arc(t, s, 0, kInfinite);
  auto circ = feasible_circulation(closed);
  if (!circ) throw InvalidInput("no feasible flow");

  const Capacity inf = net.infinity_sentinel();
  DinicSolver residual(net.node_count);
  for (std::size_t i = 0; i < net.arcs.size(); ++i) {
    const Arc& a = net.arcs[i];
    Capacity f = circ->flow[i];
    Capacity cap = a.cap == kInfinite ? std::max(inf, f) : a.cap;
    residual.add_arc(a.tail, a.head, cap - f);  // 2i: push more along a
    residual.add_arc(a.head, a.tail, f - a.lower);  // 2i+1: cancel flow on a
  }
  residual.run(t, s);

  FlowAssignment out;
  out.flow.resize(net.arcs.size());
  for (std::size_t i = 0; i < net.arcs.size(); ++i) {
    out.flow[i] = circ->flow[i] + residual.flow(2 * i) - residual.flow(2 * i + 1);
  }
  out.value = st_value(net, out.flow, s, t);
  return out;
}

}  // namespace targetflow
