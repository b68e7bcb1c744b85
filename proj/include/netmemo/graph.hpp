#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "netmemo/error.hpp"

namespace netmemo {

using NodeId = std::uint32_t;
using Edge = std::pair<NodeId, NodeId>;

/// Undirected simple graph in compressed adjacency form. Immutable after
/// construction; neighbor lists are sorted.
class Graph {
 public:
  Graph() : offsets_(1, 0) {}

  /// Self-loops are rejected; duplicate edges collapse to one.
  Graph(std::size_t n, const std::vector<Edge>& edges) : n_(n), offsets_(n + 1, 0) {
    if (n > std::numeric_limits<NodeId>::max()) throw UsageError("graph too large");
    for (auto [u, v] : edges) {
      if (u >= n || v >= n) throw UsageError("edge endpoint out of range");
      if (u == v) throw UsageError("self-loop on node " + std::to_string(u));
      ++offsets_[u + 1];
      ++offsets_[v + 1];
    }
    for (std::size_t i = 0; i < n; ++i) offsets_[i + 1] += offsets_[i];
    adj_.resize(offsets_[n]);
    std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
    for (auto [u, v] : edges) {
      adj_[fill[u]++] = v;
      adj_[fill[v]++] = u;
    }
    // Sort and deduplicate each list, then compact.
    std::vector<std::size_t> new_offsets(n + 1, 0);
    std::size_t out = 0;
    for (std::size_t u = 0; u < n; ++u) {
      auto first = adj_.begin() + static_cast<std::ptrdiff_t>(offsets_[u]);
      auto last = adj_.begin() + static_cast<std::ptrdiff_t>(offsets_[u + 1]);
      std::sort(first, last);
      last = std::unique(first, last);
      for (auto it = first; it != last; ++it) adj_[out++] = *it;
      new_offsets[u + 1] = out;
    }
    adj_.resize(out);
    offsets_ = std::move(new_offsets);
  }

  [[nodiscard]] std::size_t node_count() const { return n_; }
  [[nodiscard]] std::size_t edge_count() const { return adj_.size() / 2; }
  [[nodiscard]] std::size_t degree(NodeId u) const { return offsets_[u + 1] - offsets_[u]; }

  [[nodiscard]] std::span<const NodeId> neighbors(NodeId u) const {
    return {adj_.data() + offsets_[u], offsets_[u + 1] - offsets_[u]};
  }

  [[nodiscard]] bool has_edge(NodeId u, NodeId v) const {
    const auto nb = neighbors(u);
    return std::binary_search(nb.begin(), nb.end(), v);
  }

  /// Each edge once, as (u, v) with u < v, in lexicographic order.
  [[nodiscard]] std::vector<Edge> edges() const {
    std::vector<Edge> out;
    out.reserve(edge_count());
    for (NodeId u = 0; u < n_; ++u)
      for (NodeId v : neighbors(u))
        if (u < v) out.emplace_back(u, v);
    return out;
  }

 private:
  std::size_t n_ = 0;
  std::vector<std::size_t> offsets_;
  std::vector<NodeId> adj_;
};

/// Component label per node; labels are assigned in order of the smallest
/// node id in each component.
inline std::vector<std::uint32_t> connected_components(const Graph& g) {
  constexpr auto unset = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> label(g.node_count(), unset);
  std::vector<NodeId> queue;
  std::uint32_t next = 0;
  for (NodeId s = 0; s < g.node_count(); ++s) {
    if (label[s] != unset) continue;
    label[s] = next;
    queue.assign(1, s);
    for (std::size_t head = 0; head < queue.size(); ++head)
      for (NodeId v : g.neighbors(queue[head]))
        if (label[v] == unset) {
          label[v] = next;
          queue.push_back(v);
        }
    ++next;
  }
  return label;
}

/// Sizes indexed by component label.
inline std::vector<std::size_t> component_sizes(const std::vector<std::uint32_t>& labels) {
  std::vector<std::size_t> size;
  for (std::uint32_t l : labels) {
    if (l >= size.size()) size.resize(l + 1, 0);
    ++size[l];
  }
  return size;
}

/// Nodes of the largest component (ties: lowest label), ascending.
inline std::vector<NodeId> largest_component(const Graph& g) {
  if (g.node_count() == 0) return {};
  const auto labels = connected_components(g);
  const auto sizes = component_sizes(labels);
  const auto best = static_cast<std::uint32_t>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
  std::vector<NodeId> out;
  out.reserve(sizes[best]);
  for (NodeId u = 0; u < g.node_count(); ++u)
    if (labels[u] == best) out.push_back(u);
  return out;
}

/// Subgraph induced by `nodes` (ascending ids); node i of the result is nodes[i].
inline Graph induced_subgraph(const Graph& g, const std::vector<NodeId>& nodes) {
  constexpr auto absent = std::numeric_limits<NodeId>::max();
  std::vector<NodeId> index(g.node_count(), absent);
  for (std::size_t i = 0; i < nodes.size(); ++i) index[nodes[i]] = static_cast<NodeId>(i);
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < nodes.size(); ++i)
    for (NodeId v : g.neighbors(nodes[i]))
      if (index[v] != absent && index[v] > i) edges.emplace_back(static_cast<NodeId>(i), index[v]);
  return Graph(nodes.size(), edges);
}

}  // namespace netmemo
