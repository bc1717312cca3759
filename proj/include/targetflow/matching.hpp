#pragma once

#include <algorithm>
#include <limits>
#include <vector>

#include "targetflow/graph.hpp"

namespace targetflow {

/// Matched edges of the bipartite double cover (out-copies left, in-copies
/// right). A self-loop (v, v) is an ordinary bipartite edge.
struct Matching {
  std::vector<Edge> pairs;
  std::size_t size() const noexcept { return pairs.size(); }
};

/// Hopcroft-Karp. Deterministic: neighbours are scanned in edge insertion order.
inline Matching max_bipartite_matching(const DiGraph& g) {
  const std::size_t n = g.node_count();
  constexpr NodeId kFree = std::numeric_limits<NodeId>::max();
  constexpr int kUnreached = std::numeric_limits<int>::max();

  std::vector<NodeId> mate_left(n, kFree);   // tail -> head
  std::vector<NodeId> mate_right(n, kFree);  // head -> tail
  std::vector<int> dist(n);
  std::vector<std::size_t> cursor(n);
  std::vector<NodeId> queue;
  queue.reserve(n);

  auto bfs = [&] {
    queue.clear();
    for (NodeId u = 0; u < n; ++u) {
      if (mate_left[u] == kFree) {
        dist[u] = 0;
        queue.push_back(u);
      } else {
        dist[u] = kUnreached;
      }
    }
    bool found = false;
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
      NodeId u = queue[qi];
      for (NodeId v : g.out_neighbors(u)) {
        NodeId w = mate_right[v];
        if (w == kFree) {
          found = true;
        } else if (dist[w] == kUnreached) {
          dist[w] = dist[u] + 1;
          queue.push_back(w);
        }
      }
    }
    return found;
  };

  // Iterative layered DFS from a free left vertex.
  std::vector<NodeId> stack;
  auto augment_from = [&](NodeId root) {
    stack.assign(1, root);
    while (!stack.empty()) {
      NodeId u = stack.back();
      auto adj = g.out_neighbors(u);
      bool advanced = false;
      while (cursor[u] < adj.size()) {
        NodeId v = adj[cursor[u]];
        NodeId w = mate_right[v];
        if (w == kFree) {
          // Each stacked left vertex's cursor points at its new partner.
          for (NodeId left : stack) {
            NodeId right = g.out_neighbors(left)[cursor[left]];
            mate_left[left] = right;
            mate_right[right] = left;
          }
          return true;
        }
        if (dist[w] == dist[u] + 1) {
          stack.push_back(w);
          advanced = true;
          break;
        }
        ++cursor[u];
      }
      if (advanced) continue;
      dist[u] = kUnreached;
      stack.pop_back();
      if (!stack.empty()) ++cursor[stack.back()];
    }
    return false;
  };

  while (bfs()) {
    std::fill(cursor.begin(), cursor.end(), 0);
    for (NodeId u = 0; u < n; ++u) {
      if (mate_left[u] == kFree) augment_from(u);
    }
  }

  Matching m;
  for (NodeId u = 0; u < n; ++u) {
    if (mate_left[u] != kFree) m.pairs.push_back({u, mate_left[u]});
  }
  return m;
}

/// Whole-network driver count N_D = max(n - |maximum matching|, 1).
inline std::size_t driver_count_mm(const DiGraph& g) {
  std::size_t matched = max_bipartite_matching(g).size();
  return std::max<std::size_t>(g.node_count() - matched, 1);
}

}  // namespace targetflow
