#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <queue>
#include <string>
#include <tuple>
#include <vector>

#include "netmemo/error.hpp"
#include "netmemo/graph.hpp"
#include "netmemo/parallel.hpp"

namespace netmemo {

/// Compression gain g = num/den >= 1 held as an exact fraction. Costs are
/// measured in units of 1/num hops: a plain hop costs num units and a
/// compressed hop costs den units.
struct Gain {
  std::uint64_t num = 1;
  std::uint64_t den = 1;

  Gain() = default;
  Gain(std::uint64_t n, std::uint64_t d) : num(n), den(d) {
    if (d == 0 || n < d) throw UsageError("gain must be a fraction >= 1");
    const std::uint64_t k = std::gcd(n, d);
    num /= k;
    den /= k;
  }

  /// Closest fraction with denominator <= max_den (continued fractions).
  static Gain from_double(double g, std::uint64_t max_den = 1000000) {
    if (!(g >= 1.0) || !std::isfinite(g) || g > 1e9) throw UsageError("gain must be a finite number >= 1");
    std::uint64_t p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    double x = g;
    for (int it = 0; it < 64; ++it) {
      const double a_real = std::floor(x);
      const auto a = static_cast<std::uint64_t>(a_real);
      const std::uint64_t q2 = q0 + a * q1;
      if (q2 > max_den) break;
      const std::uint64_t p2 = p0 + a * p1;
      p0 = p1;
      q0 = q1;
      p1 = p2;
      q1 = q2;
      const double frac = x - a_real;
      if (frac < 1e-12 || std::fabs(static_cast<double>(p1) / static_cast<double>(q1) - g) <= 1e-15 * g) break;
      x = 1.0 / frac;
    }
    return Gain(p1, q1);
  }

  /// Accepts "p/q" or a decimal.
  static Gain parse(const std::string& text) {
    try {
      const auto slash = text.find('/');
      if (slash != std::string::npos) {
        std::size_t used = 0;
        const auto n = std::stoull(text.substr(0, slash), &used);
        if (used != slash) throw UsageError("");
        const auto d = std::stoull(text.substr(slash + 1), &used);
        if (used != text.size() - slash - 1) throw UsageError("");
        return Gain(n, d);
      }
      std::size_t used = 0;
      const double v = std::stod(text, &used);
      if (used != text.size()) throw UsageError("");
      return from_double(v);
    } catch (const std::exception&) {
      throw UsageError("invalid gain '" + text + "': expected a number >= 1 or a fraction p/q");
    }
  }

  [[nodiscard]] double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  [[nodiscard]] std::string str() const { return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den); }
  bool operator==(const Gain&) const = default;
};

struct MemoryDeployment {
  std::vector<NodeId> memories;  // distinct node ids
  Gain g;
};

inline void check_deployment(const MemoryDeployment& dep, std::size_t n) {
  std::vector<NodeId> sorted = dep.memories;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) throw UsageError("memory ids must be distinct");
  if (!sorted.empty() && sorted.back() >= n) throw UsageError("memory id out of range");
}

inline constexpr std::uint16_t kUnreachable = std::numeric_limits<std::uint16_t>::max();

/// Row-major all-pairs hop distances; kUnreachable marks disconnected pairs.
class DistanceTable {
 public:
  DistanceTable() = default;
  explicit DistanceTable(std::size_t n) : n_(n), d_(n * n, kUnreachable) {}

  [[nodiscard]] std::size_t size() const { return n_; }
  [[nodiscard]] std::uint16_t operator()(NodeId u, NodeId v) const { return d_[std::size_t{u} * n_ + v]; }
  [[nodiscard]] const std::uint16_t* row(NodeId u) const { return d_.data() + std::size_t{u} * n_; }
  std::uint16_t* row(NodeId u) { return d_.data() + std::size_t{u} * n_; }

 private:
  std::size_t n_ = 0;
  std::vector<std::uint16_t> d_;
};

/// Level-order traversal from s; writes hop counts into out[0..n).
inline void bfs_distances(const Graph& g, NodeId s, std::uint16_t* out, std::vector<NodeId>& queue) {
  std::fill(out, out + g.node_count(), kUnreachable);
  out[s] = 0;
  queue.assign(1, s);
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const NodeId u = queue[head];
    if (out[u] + 1 >= kUnreachable) throw UsageError("graph diameter exceeds distance table range");
    for (NodeId v : g.neighbors(u))
      if (out[v] == kUnreachable) {
        out[v] = static_cast<std::uint16_t>(out[u] + 1);
        queue.push_back(v);
      }
  }
}

inline DistanceTable hop_distances(const Graph& g, unsigned threads = 1) {
  DistanceTable table(g.node_count());
  const unsigned t = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, threads), std::max<std::size_t>(1, g.node_count())));
  parallel_for(t, t, [&](std::size_t worker) {
    std::vector<NodeId> queue;
    for (std::size_t s = worker; s < g.node_count(); s += t)
      bfs_distances(g, static_cast<NodeId>(s), table.row(static_cast<NodeId>(s)), queue);
  });
  return table;
}

/// Effective distance in units of 1/g.num hops, and the memory the flow is
/// routed through (none when the plain route is at least as cheap).
struct EffectiveDistance {
  std::uint64_t units = std::numeric_limits<std::uint64_t>::max();
  std::optional<NodeId> memory;

  [[nodiscard]] bool reachable() const { return units != std::numeric_limits<std::uint64_t>::max(); }
  bool operator==(const EffectiveDistance&) const = default;
};

inline constexpr std::uint64_t kNoRoute = std::numeric_limits<std::uint64_t>::max();

/// min(d(S,D), min over mu of d(S,mu)/g + d(mu,D)); ties keep the plain
/// route, then the lowest memory id.
inline EffectiveDistance effective_distance_oracle(NodeId s, NodeId d, const MemoryDeployment& dep, const DistanceTable& dist) {
  EffectiveDistance best;
  if (dist(s, d) != kUnreachable) best.units = dep.g.num * dist(s, d);
  std::vector<NodeId> order = dep.memories;
  std::sort(order.begin(), order.end());
  for (NodeId mu : order) {
    if (dist(s, mu) == kUnreachable || dist(mu, d) == kUnreachable) continue;
    const std::uint64_t c = dep.g.den * dist(s, mu) + dep.g.num * dist(mu, d);
    if (c < best.units) best = {c, mu};
  }
  return best;
}

/// Effective distances from every node to `dest`, by a reverse Dijkstra over
/// two layers: plain (no memory on the rest of the walk) and marked (the walk
/// still has to pass a memory, so hops cost 1/g). A memory node joins the
/// marked layer with the plain cost it has to dest.
inline std::vector<EffectiveDistance> modified_dijkstra(const Graph& g, NodeId dest, const MemoryDeployment& dep) {
  const std::size_t n = g.node_count();
  if (dest >= n) throw UsageError("destination out of range");
  check_deployment(dep, n);
  constexpr NodeId none = std::numeric_limits<NodeId>::max();
  using Key = std::tuple<std::uint64_t, NodeId, NodeId>;  // cost, memory, node
  std::priority_queue<Key, std::vector<Key>, std::greater<>> heap;

  std::vector<std::uint64_t> plain(n, kNoRoute);
  plain[dest] = 0;
  heap.emplace(0, none, dest);
  while (!heap.empty()) {
    const auto [c, tag, u] = heap.top();
    heap.pop();
    if (c != plain[u] || tag != none) continue;
    for (NodeId v : g.neighbors(u))
      if (c + dep.g.num < plain[v]) {
        plain[v] = c + dep.g.num;
        heap.emplace(plain[v], none, v);
      }
  }

  std::vector<std::pair<std::uint64_t, NodeId>> marked(n, {kNoRoute, none});
  for (NodeId mu : dep.memories)
    if (plain[mu] != kNoRoute && std::pair{plain[mu], mu} < marked[mu]) {
      marked[mu] = {plain[mu], mu};
      heap.emplace(plain[mu], mu, mu);
    }
  while (!heap.empty()) {
    const auto [c, mu, u] = heap.top();
    heap.pop();
    if (std::pair{c, mu} != marked[u]) continue;
    for (NodeId v : g.neighbors(u)) {
      const std::pair<std::uint64_t, NodeId> cand{c + dep.g.den, mu};
      if (cand < marked[v]) {
        marked[v] = cand;
        heap.emplace(cand.first, mu, v);
      }
    }
  }

  std::vector<EffectiveDistance> out(n);
  for (NodeId v = 0; v < n; ++v) {
    out[v].units = plain[v];
    if (v != dest && marked[v].first < plain[v]) out[v] = {marked[v].first, marked[v].second};
  }
  return out;
}

/// Totals for one source: plain hops and effective units (1/g.num hops).
struct FlowTotals {
  std::uint64_t plain_hops = 0;
  std::uint64_t effective_units = 0;
  std::uint64_t unit_den = 1;
  std::size_t pairs = 0;
  std::size_t unreachable = 0;

  [[nodiscard]] double plain() const { return static_cast<double>(plain_hops); }
  [[nodiscard]] double effective() const { return static_cast<double>(effective_units) / static_cast<double>(unit_den); }
};

/// F_S and F0_S with unit flow to every other reachable node.
inline FlowTotals total_flow(NodeId s, const MemoryDeployment& dep, const DistanceTable& dist) {
  FlowTotals t;
  t.unit_den = dep.g.num;
  for (NodeId d = 0; d < dist.size(); ++d) {
    if (d == s) continue;
    if (dist(s, d) == kUnreachable) {
      ++t.unreachable;
      continue;
    }
    t.plain_hops += dist(s, d);
    t.effective_units += effective_distance_oracle(s, d, dep, dist).units;
    ++t.pairs;
  }
  return t;
}

struct NetworkGain {
  std::uint64_t plain_hops = 0;       // sum of d(S,D)
  std::uint64_t effective_units = 0;  // sum of effective distances, units of 1/unit_den
  std::uint64_t unit_den = 1;
  std::size_t pairs = 0;
  std::size_t unreachable_pairs = 0;

  /// G = sum d / sum d_eff; 1 when there are no pairs.
  [[nodiscard]] double G() const {
    if (effective_units == 0) return 1.0;
    return static_cast<double>(plain_hops) * static_cast<double>(unit_den) / static_cast<double>(effective_units);
  }
};

namespace flow_detail {

inline NetworkGain reduce(const std::vector<NetworkGain>& parts, std::uint64_t den) {
  NetworkGain total;
  total.unit_den = den;
  for (const auto& p : parts) {
    total.plain_hops += p.plain_hops;
    total.effective_units += p.effective_units;
    total.pairs += p.pairs;
    total.unreachable_pairs += p.unreachable_pairs;
  }
  return total;
}

}  // namespace flow_detail

/// G over all ordered pairs of distinct connected nodes, using modified
/// Dijkstra per destination. Optionally records every pair's result.
inline NetworkGain network_gain(const Graph& g, const MemoryDeployment& dep, unsigned threads = 1,
                                std::vector<std::vector<EffectiveDistance>>* per_destination = nullptr) {
  check_deployment(dep, g.node_count());
  const std::size_t n = g.node_count();
  std::vector<NetworkGain> parts(n);
  if (per_destination != nullptr) per_destination->assign(n, {});
  parallel_for(n, threads, [&](std::size_t d) {
    const auto dest = static_cast<NodeId>(d);
    auto eff = modified_dijkstra(g, dest, dep);
    NetworkGain& part = parts[d];
    for (NodeId s = 0; s < n; ++s) {
      if (s == dest) continue;
      if (!eff[s].reachable()) {
        ++part.unreachable_pairs;
        continue;
      }
      part.effective_units += eff[s].units;
      ++part.pairs;
    }
    if (per_destination != nullptr) (*per_destination)[d] = std::move(eff);
  });
  // Plain hop totals from one BFS per destination.
  parallel_for(n, threads, [&](std::size_t d) {
    std::vector<std::uint16_t> row(n);
    std::vector<NodeId> queue;
    bfs_distances(g, static_cast<NodeId>(d), row.data(), queue);
    for (std::size_t s = 0; s < n; ++s)
      if (s != d && row[s] != kUnreachable) parts[d].plain_hops += row[s];
  });
  return flow_detail::reduce(parts, dep.g.num);
}

/// Same quantity from a distance table and the closed-form minimum.
inline NetworkGain network_gain(const DistanceTable& dist, const MemoryDeployment& dep, unsigned threads = 1) {
  check_deployment(dep, dist.size());
  const std::size_t n = dist.size();
  std::vector<NetworkGain> parts(n);
  parallel_for(n, threads, [&](std::size_t s) {
    const FlowTotals t = total_flow(static_cast<NodeId>(s), dep, dist);
    parts[s].plain_hops = t.plain_hops;
    parts[s].effective_units = t.effective_units;
    parts[s].pairs = t.pairs;
    parts[s].unreachable_pairs = t.unreachable;
  });
  return flow_detail::reduce(parts, dep.g.num);
}

/// Network gain of a single path with one memory at an endpoint: 2g/(g+1).
inline double single_path_gain(double g) {
  if (!(g >= 1.0)) throw UsageError("gain must be >= 1");
  if (std::isinf(g)) return 2.0;
  return 2 * g / (g + 1);
}

/// Gain when traffic stays on plain shortest paths. A pair {S, D} benefits
/// only from a memory lying on one of its shortest paths
/// (d(S,mu) + d(mu,D) = d(S,D)); one such memory (the lowest id) serves both
/// directions, so the pair costs d(S,mu)/g + d(mu,D) one way and
/// d(D,mu)/g + d(mu,S) the other.
inline NetworkGain plain_routing_gain(const DistanceTable& dist, const MemoryDeployment& dep, unsigned threads = 1) {
  check_deployment(dep, dist.size());
  const std::size_t n = dist.size();
  const std::uint64_t p = dep.g.num;
  const std::uint64_t q = dep.g.den;
  std::vector<NodeId> memories = dep.memories;
  std::sort(memories.begin(), memories.end());
  std::vector<NetworkGain> parts(n);
  parallel_for(n, threads, [&](std::size_t si) {
    const auto s = static_cast<NodeId>(si);
    const std::uint16_t* ds = dist.row(s);
    std::vector<std::uint64_t> best(n);
    std::vector<char> served(n, 0);
    for (std::size_t d = 0; d < n; ++d) best[d] = ds[d] == kUnreachable ? kNoRoute : p * ds[d];
    for (NodeId mu : memories) {
      const std::uint16_t dsm = ds[mu];
      if (dsm == kUnreachable) continue;
      const std::uint16_t* dm = dist.row(mu);
      for (std::size_t d = 0; d < n; ++d)
        if (!served[d] && dm[d] != kUnreachable && std::uint32_t{dsm} + dm[d] == ds[d]) {
          served[d] = 1;
          best[d] = q * dsm + p * dm[d];
        }
    }
    NetworkGain& part = parts[si];
    for (std::size_t d = 0; d < n; ++d) {
      if (d == si) continue;
      if (ds[d] == kUnreachable) {
        ++part.unreachable_pairs;
        continue;
      }
      part.plain_hops += ds[d];
      part.effective_units += best[d];
      ++part.pairs;
    }
  });
  return flow_detail::reduce(parts, p);
}

/// Fraction of ordered pairs (S, D), both outside the core, with a shortest
/// path through an interior core node: some c in core with
/// d(S,c) + d(c,D) = d(S,D). Pairs with an endpoint in the core are not
/// counted. Returns 1 when no pair qualifies.
inline double fppc(const DistanceTable& dist, const std::vector<NodeId>& core, unsigned threads = 1) {
  const std::size_t n = dist.size();
  std::vector<char> in_core(n, 0);
  for (NodeId c : core) {
    if (c >= n) throw UsageError("core node out of range");
    in_core[c] = 1;
  }
  std::vector<std::uint64_t> hits(n, 0);
  std::vector<std::uint64_t> total(n, 0);
  parallel_for(n, threads, [&](std::size_t si) {
    if (in_core[si]) return;
    const std::uint16_t* ds = dist.row(static_cast<NodeId>(si));
    std::vector<char> through(n, 0);
    for (NodeId c : core) {
      const std::uint16_t dsc = ds[c];
      if (dsc == kUnreachable) continue;
      const std::uint16_t* dc = dist.row(c);
      for (std::size_t d = 0; d < n; ++d) through[d] |= static_cast<char>(std::uint32_t{dsc} + dc[d] == ds[d]);
    }
    for (std::size_t d = 0; d < n; ++d) {
      if (d == si || in_core[d] || ds[d] == kUnreachable) continue;
      ++total[si];
      hits[si] += through[d] != 0 ? 1 : 0;
    }
  });
  const std::uint64_t t = std::accumulate(total.begin(), total.end(), std::uint64_t{0});
  const std::uint64_t h = std::accumulate(hits.begin(), hits.end(), std::uint64_t{0});
  return t == 0 ? 1.0 : static_cast<double>(h) / static_cast<double>(t);
}

}  // namespace netmemo
