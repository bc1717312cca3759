#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "targetflow/errors.hpp"
#include "targetflow/flow.hpp"
#include "targetflow/graph.hpp"

// Minimum control sources for target controllability, computed as a path
// cover of the target set through a unit-capacity max-flow problem.

namespace targetflow {

enum class ArcClass : int {
  kOther = 0,
  kTargetOut = 1,  // (v_t, v^out), v in S
  kTargetIn = 2,   // (v^in, v_s), v in S
  kSplit = 3,      // (v^in, v^out)
  kEdge = 4,       // (u^out, v^in) for each graph edge (u, v)
  kSourceLink = 5,
  kSinkLink = 6,
};

inline int tag_of(ArcClass c) { return static_cast<int>(c); }

/// Split-node flow network. Node v becomes v^in = v and v^out = n + v; the
/// source v_s is 2n and the sink v_t is 2n + 1.
struct TransformedNetwork {
  BoundedFlowNetwork network;
  std::size_t graph_nodes = 0;
  std::vector<std::int64_t> edge_of_arc;  // arc -> index into graph edges, or -1
  std::vector<Edge> graph_edges;

  NodeId in_node(NodeId v) const { return v; }
  NodeId out_node(NodeId v) const { return static_cast<NodeId>(graph_nodes + v); }
  NodeId source() const { return static_cast<NodeId>(2 * graph_nodes); }
  NodeId sink() const { return static_cast<NodeId>(2 * graph_nodes + 1); }

  std::size_t count(ArcClass c) const {
    return static_cast<std::size_t>(std::count_if(
        network.arcs.begin(), network.arcs.end(),
        [c](const Arc& a) { return a.tag == tag_of(c); }));
  }
};

namespace detail {

inline void check_targets(const DiGraph& g, const TargetSet& s) {
  if (s.size() == 0) throw InvalidInput("empty target set");
  if (s.members().back() >= g.node_count()) {
    throw InvalidInput("target set is not a subset of the graph's nodes");
  }
}

inline TransformedNetwork split_nodes(const DiGraph& g) {
  TransformedNetwork t;
  t.graph_nodes = g.node_count();
  t.graph_edges.assign(g.edges().begin(), g.edges().end());
  t.network.node_count = 2 * g.node_count() + 2;
  t.network.source = t.source();
  t.network.sink = t.sink();
  return t;
}

inline void add_edge_arcs(TransformedNetwork& t) {
  for (std::size_t i = 0; i < t.graph_edges.size(); ++i) {
    const Edge& e = t.graph_edges[i];
    t.network.add_arc(t.out_node(e.tail), t.in_node(e.head), 0, 1, tag_of(ArcClass::kEdge));
    t.edge_of_arc.push_back(static_cast<std::int64_t>(i));
  }
}

inline void add_plain_arc(TransformedNetwork& t, NodeId a, NodeId b, Capacity lower, ArcClass c) {
  t.network.add_arc(a, b, lower, 1, tag_of(c));
  t.edge_of_arc.push_back(-1);
}

}  // namespace detail

/// The reduced network: E1 = {(v_t, v^out)}, E2 = {(v^in, v_s)} for targets,
/// E3 = {(v^in, v^out)} for non-targets, E4 = one arc per graph edge. All
/// capacities are 1 and all lower bounds 0. Max flow runs from v_t to v_s.
inline TransformedNetwork build_target_network(const DiGraph& g, const TargetSet& s) {
  detail::check_targets(g, s);
  TransformedNetwork t = detail::split_nodes(g);
  const auto target = s.mask(g.node_count());
  t.network.arcs.reserve(2 * s.size() + (g.node_count() - s.size()) + g.edge_count());

  for (NodeId v : s.members()) detail::add_plain_arc(t, t.sink(), t.out_node(v), 0, ArcClass::kTargetOut);
  for (NodeId v : s.members()) detail::add_plain_arc(t, t.in_node(v), t.source(), 0, ArcClass::kTargetIn);
  for (NodeId v = 0; v < g.node_count(); ++v) {
    if (!target[v]) detail::add_plain_arc(t, t.in_node(v), t.out_node(v), 0, ArcClass::kSplit);
  }
  detail::add_edge_arcs(t);
  return t;
}

/// The full split network with lower bounds: (v_s, v^in) and (v^out, v_t) for
/// every node, a split arc per node with l = 1 exactly on targets, and one arc
/// per graph edge. No return arc; min_flow_with_bounds supplies it.
inline TransformedNetwork build_split_network(const DiGraph& g, const TargetSet& s) {
  detail::check_targets(g, s);
  TransformedNetwork t = detail::split_nodes(g);
  const auto target = s.mask(g.node_count());
  t.network.arcs.reserve(3 * g.node_count() + g.edge_count());

  for (NodeId v = 0; v < g.node_count(); ++v) {
    detail::add_plain_arc(t, t.in_node(v), t.out_node(v), target[v] ? 1 : 0, ArcClass::kSplit);
  }
  detail::add_edge_arcs(t);
  for (NodeId v = 0; v < g.node_count(); ++v) {
    detail::add_plain_arc(t, t.source(), t.in_node(v), 0, ArcClass::kSourceLink);
  }
  for (NodeId v = 0; v < g.node_count(); ++v) {
    detail::add_plain_arc(t, t.out_node(v), t.sink(), 0, ArcClass::kSinkLink);
  }
  return t;
}

/// Copy of `net` with the unbounded return arc (sink, source) appended.
inline BoundedFlowNetwork with_return_arc(BoundedFlowNetwork net) {
  net.add_arc(net.sink, net.source, 0, kInfinite);
  return net;
}

/// Graph edges whose edge-arc image carries one unit of flow.
inline std::vector<Edge> extract_cover_edges(const TransformedNetwork& t, const FlowAssignment& flow) {
  if (flow.flow.size() != t.network.arcs.size()) {
    throw InvalidInput("flow does not match the transformed network");
  }
  std::vector<Edge> out;
  std::vector<int> in_deg(t.graph_nodes, 0);
  std::vector<int> out_deg(t.graph_nodes, 0);
  for (std::size_t i = 0; i < t.network.arcs.size(); ++i) {
    if (t.network.arcs[i].tag != tag_of(ArcClass::kEdge) || flow.flow[i] != 1) continue;
    const Edge& e = t.graph_edges[static_cast<std::size_t>(t.edge_of_arc[i])];
    if (++out_deg[e.tail] > 1 || ++in_deg[e.head] > 1) {
      throw InternalError("cover edges exceed degree 1 at an edge (" + std::to_string(e.tail) +
                          ", " + std::to_string(e.head) + ")");
    }
    out.push_back(e);
  }
  return out;
}

/// Vertex-disjoint simple paths and cycles. A cycle [a, b, c] closes with the
/// edge (c, a); a one-node cycle is a self-loop.
struct PathCover {
  std::vector<std::vector<NodeId>> paths;
  std::vector<std::vector<NodeId>> cycles;

  friend bool operator==(const PathCover&, const PathCover&) = default;
};

/// Splits a degree-<=1 edge set into the cover. Targets untouched by any edge
/// become singleton paths first; chains are then peeled from in-degree-0 nodes
/// and cycles from the smallest remaining node, both in ascending id order.
inline PathCover decompose_cover(std::span<const Edge> edges, const TargetSet& s) {
  constexpr NodeId kNone = static_cast<NodeId>(-1);
  std::size_t n = s.members().back() + 1;
  for (const Edge& e : edges) n = std::max<std::size_t>(n, std::max(e.tail, e.head) + 1);

  std::vector<NodeId> succ(n, kNone);
  std::vector<NodeId> pred(n, kNone);
  for (const Edge& e : edges) {
    if (succ[e.tail] != kNone || pred[e.head] != kNone) {
      throw InvalidInput("cover edges must have in- and out-degree at most 1");
    }
    succ[e.tail] = e.head;
    pred[e.head] = e.tail;
  }

  PathCover cover;
  for (NodeId v : s.members()) {
    if (succ[v] == kNone && pred[v] == kNone) cover.paths.push_back({v});
  }

  std::size_t consumed = 0;
  for (NodeId v = 0; v < n; ++v) {
    if (pred[v] != kNone || succ[v] == kNone) continue;
    std::vector<NodeId> path{v};
    for (NodeId u = v; succ[u] != kNone;) {
      NodeId next = succ[u];
      succ[u] = kNone;
      pred[next] = kNone;
      ++consumed;
      path.push_back(next);
      u = next;
    }
    cover.paths.push_back(std::move(path));
  }

  for (NodeId v = 0; v < n; ++v) {
    if (succ[v] == kNone) continue;
    std::vector<NodeId> cycle;
    NodeId u = v;
    do {
      NodeId next = succ[u];
      if (next == kNone) throw InvalidInput("cover edges contain a broken cycle");
      cycle.push_back(u);
      succ[u] = kNone;
      pred[next] = kNone;
      ++consumed;
      u = next;
    } while (u != v);
    cover.cycles.push_back(std::move(cycle));
  }

  if (consumed != edges.size()) throw InvalidInput("cover edges were not fully consumed");
  return cover;
}

struct Solution {
  PathCover cover;
  std::size_t min_drivers = 0;  // max(|paths|, 1)
  Capacity flow_value = 0;
};

namespace detail {

// Cycles made only of non-target nodes cover nothing and are dropped.
inline void drop_idle_cycles(PathCover& cover, const TargetSet& s) {
  std::erase_if(cover.cycles, [&](const std::vector<NodeId>& c) {
    return std::none_of(c.begin(), c.end(), [&](NodeId v) { return s.contains(v); });
  });
}

}  // namespace detail

/// Minimum path cover of `s` via max flow from v_t to v_s on the reduced
/// network; |paths| = |S| - flow value.
inline Solution solve(const DiGraph& g, const TargetSet& s) {
  TransformedNetwork t = build_target_network(g, s);
  FlowAssignment flow = max_flow_dinic(t.network, t.sink(), t.source());
  std::vector<Edge> cover_edges = extract_cover_edges(t, flow);

  Solution sol;
  sol.cover = decompose_cover(cover_edges, s);
  detail::drop_idle_cycles(sol.cover, s);
  sol.flow_value = flow.value;
  if (static_cast<Capacity>(sol.cover.paths.size()) + flow.value != static_cast<Capacity>(s.size())) {
    throw InternalError("path count " + std::to_string(sol.cover.paths.size()) +
                        " != |S| - flow (" + std::to_string(s.size()) + " - " +
                        std::to_string(flow.value) + ")");
  }
  sol.min_drivers = std::max<std::size_t>(sol.cover.paths.size(), 1);
  return sol;
}

/// Same answer through the lower-bounded network: feasible circulation, then
/// minimum v_s -> v_t flow. flow_value is reported as |S| - |paths| so both
/// routes share the same accounting.
inline Solution solve_via_circulation(const DiGraph& g, const TargetSet& s) {
  TransformedNetwork t = build_split_network(g, s);
  FlowAssignment flow = min_flow_with_bounds(t.network, t.source(), t.sink());
  std::vector<Edge> cover_edges = extract_cover_edges(t, flow);

  Solution sol;
  sol.cover = decompose_cover(cover_edges, s);
  detail::drop_idle_cycles(sol.cover, s);
  if (static_cast<Capacity>(sol.cover.paths.size()) != flow.value) {
    throw InternalError("min flow " + std::to_string(flow.value) + " != path count " +
                        std::to_string(sol.cover.paths.size()));
  }
  sol.flow_value = static_cast<Capacity>(s.size()) - flow.value;
  sol.min_drivers = std::max<std::size_t>(sol.cover.paths.size(), 1);
  return sol;
}

struct Attachment {
  std::size_t driver = 0;
  NodeId node = 0;

  friend bool operator==(const Attachment&, const Attachment&) = default;
  friend auto operator<=>(const Attachment&, const Attachment&) = default;
};

/// Nonzero pattern of the input matrix B: `driver_count` columns, one entry
/// per attachment.
struct DriverAllocation {
  std::size_t driver_count = 0;
  std::vector<Attachment> attachments;
};

/// Path k's head gets driver k. Each cycle hangs its smallest node on driver 0.
inline DriverAllocation allocate_drivers(const PathCover& cover) {
  DriverAllocation alloc;
  alloc.driver_count = std::max<std::size_t>(cover.paths.size(), 1);
  for (std::size_t k = 0; k < cover.paths.size(); ++k) {
    alloc.attachments.push_back({k, cover.paths[k].front()});
  }
  for (const auto& cycle : cover.cycles) {
    alloc.attachments.push_back({0, *std::min_element(cycle.begin(), cycle.end())});
  }
  return alloc;
}

/// True iff paths and cycles are vertex-disjoint, walk only graph edges, and
/// together cover every target.
inline bool verify_cover(const DiGraph& g, const TargetSet& s, const PathCover& cover) {
  const std::size_t n = g.node_count();
  std::vector<char> used(n, 0);
  auto claim = [&](NodeId v) {
    if (v >= n || used[v]) return false;
    used[v] = 1;
    return true;
  };
  for (const auto& path : cover.paths) {
    if (path.empty()) return false;
    for (std::size_t i = 0; i < path.size(); ++i) {
      if (!claim(path[i])) return false;
      if (i + 1 < path.size() && !g.has_edge(path[i], path[i + 1])) return false;
    }
  }
  for (const auto& cycle : cover.cycles) {
    if (cycle.empty()) return false;
    for (std::size_t i = 0; i < cycle.size(); ++i) {
      if (!claim(cycle[i])) return false;
      if (!g.has_edge(cycle[i], cycle[(i + 1) % cycle.size()])) return false;
    }
  }
  for (NodeId v : s.members()) {
    if (v >= n || !used[v]) return false;
  }
  return true;
}

}  // namespace targetflow
