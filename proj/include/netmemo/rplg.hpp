#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <numeric>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "netmemo/error.hpp"
#include "netmemo/graph.hpp"

namespace netmemo {

/// Fan-Lu expected degrees w_i = c i^{-1/(beta-1)} for i = ceil(i0) .. ceil(i0)+N-1.
struct ExpectedDegreeSequence {
  std::size_t N = 0;
  double beta = 0;
  double w_bar = 0;
  double delta = 0;
  double c = 0;
  double i0 = 0;
  std::vector<double> weights;  // node k has index ceil(i0) + k
  double rho = 0;               // 1 / sum of weights (0 when the sum is 0)

  [[nodiscard]] double weight_sum() const { return std::accumulate(weights.begin(), weights.end(), 0.0); }
  [[nodiscard]] double w_min() const { return weights.empty() ? 0.0 : *std::min_element(weights.begin(), weights.end()); }
  [[nodiscard]] double w_max() const { return weights.empty() ? 0.0 : *std::max_element(weights.begin(), weights.end()); }

  /// Arbitrary weights, for graphs outside the power-law family.
  static ExpectedDegreeSequence from_weights(std::vector<double> w) {
    ExpectedDegreeSequence s;
    s.N = w.size();
    s.weights = std::move(w);
    for (double x : s.weights)
      if (!(x >= 0.0) || !std::isfinite(x)) throw UsageError("weights must be finite and non-negative");
    const double total = s.weight_sum();
    s.rho = total > 0 ? 1.0 / total : 0.0;
    return s;
  }
};

inline ExpectedDegreeSequence build_weights(std::size_t N, double beta, double w_bar, double delta) {
  if (N < 2) throw UsageError("N must be >= 2");
  if (!(beta > 2.0 && beta < 3.0)) throw UsageError("beta must lie in (2, 3)");
  if (!(w_bar > 1.0)) throw UsageError("w_bar must be > 1");
  if (!(delta >= w_bar) || !std::isfinite(delta)) throw UsageError("delta must be finite and >= w_bar");
  ExpectedDegreeSequence s;
  s.N = N;
  s.beta = beta;
  s.w_bar = w_bar;
  s.delta = delta;
  const double n = static_cast<double>(N);
  s.c = (beta - 2) / (beta - 1) * w_bar * std::pow(n, 1 / (beta - 1));
  s.i0 = n * std::pow(w_bar * (beta - 2) / (delta * (beta - 1)), beta - 1);
  const double first = std::ceil(s.i0);
  s.weights.resize(N);
  for (std::size_t k = 0; k < N; ++k) s.weights[k] = s.c * std::pow(first + static_cast<double>(k), -1 / (beta - 1));
  s.rho = 1.0 / s.weight_sum();
  return s;
}

/// Average and maximum expected degree of the ACL power-law model with
/// exponent beta on N nodes: zeta(beta-1)/zeta(beta) and (N/zeta(beta))^{1/beta}.
struct AclParameters {
  double w_bar;
  double delta;
};

inline AclParameters acl_parameters(std::size_t N, double beta) {
  if (!(beta > 2.0 && beta < 3.0)) throw UsageError("beta must lie in (2, 3)");
  const double zb = std::riemann_zeta(beta);
  return {std::riemann_zeta(beta - 1) / zb, std::pow(static_cast<double>(N) / zb, 1 / beta)};
}

struct RplgGraph {
  ExpectedDegreeSequence sequence;
  Graph graph;
  std::vector<std::uint32_t> component;  // label per node
  std::vector<NodeId> giant;             // largest component, ascending
  std::uint64_t seed = 0;

  [[nodiscard]] std::size_t node_count() const { return graph.node_count(); }
  [[nodiscard]] bool in_giant(NodeId u) const { return std::binary_search(giant.begin(), giant.end(), u); }
};

inline RplgGraph label_graph(ExpectedDegreeSequence seq, Graph graph, std::uint64_t seed) {
  RplgGraph out;
  out.sequence = std::move(seq);
  out.component = connected_components(graph);
  out.giant = largest_component(graph);
  out.graph = std::move(graph);
  out.seed = seed;
  return out;
}

/// Each pair {i, j} is an edge independently with probability min(1, w_i w_j rho).
inline RplgGraph sample_graph(const ExpectedDegreeSequence& seq, std::uint64_t seed) {
  const std::size_t n = seq.weights.size();
  std::mt19937_64 rng(seed);
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    const double wi = seq.weights[i] * seq.rho;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double p = std::min(1.0, wi * seq.weights[j]);
      const double u = static_cast<double>(rng() >> 11) * 0x1p-53;
      if (u < p) edges.emplace_back(static_cast<NodeId>(i), static_cast<NodeId>(j));
    }
  }
  return label_graph(seq, Graph(n, edges), seed);
}

inline std::vector<NodeId> giant_component(const RplgGraph& g) { return g.giant; }

/// Sum over j != i of min(1, w_i w_j rho): the expected degree of node i in the sampler.
inline double expected_degree(const ExpectedDegreeSequence& seq, std::size_t i) {
  double sum = 0;
  for (std::size_t j = 0; j < seq.weights.size(); ++j)
    if (j != i) sum += std::min(1.0, seq.weights[i] * seq.weights[j] * seq.rho);
  return sum;
}

struct CoreThreshold {
  double gamma = 0;
  double l = 0;
  bool degenerate = false;  // l <= 1: the threshold does not exceed w_min
};

/// gamma = (1 - 1/(beta-1))^2 (beta-1)/(3-beta); l solves l^{3-beta} = 1/(w_bar gamma).
inline CoreThreshold solve_core_threshold(double beta, double w_bar) {
  if (!(beta > 2.0 && beta < 3.0)) throw UsageError("beta must lie in (2, 3)");
  if (!(w_bar > 0.0)) throw UsageError("w_bar must be > 0");
  CoreThreshold t;
  const double a = 1 - 1 / (beta - 1);
  t.gamma = a * a * (beta - 1) / (3 - beta);
  t.l = std::pow(1 / (w_bar * t.gamma), 1 / (3 - beta));
  t.degenerate = t.l <= 1.0;
  return t;
}

enum class CoreMode { theorem, topk_realized, topk_expected };

inline const char* core_mode_name(CoreMode m) {
  switch (m) {
    case CoreMode::theorem: return "theorem";
    case CoreMode::topk_realized: return "topk";
    case CoreMode::topk_expected: return "topk-expected";
  }
  return "?";
}

struct CoreSpec {
  CoreMode mode = CoreMode::topk_realized;
  double l = 0;
  double gamma = 0;
  double w_min = 0;
  double fraction = 0;
  bool degenerate = false;
  std::vector<NodeId> nodes;  // ascending
};

/// C = {u : w_u > l w_min}. With l <= 1 the core is flagged degenerate.
inline CoreSpec theorem_core(const ExpectedDegreeSequence& seq, const CoreThreshold& t) {
  CoreSpec core;
  core.mode = CoreMode::theorem;
  core.l = t.l;
  core.gamma = t.gamma;
  core.w_min = seq.w_min();
  core.degenerate = t.l <= 1.0;
  const double threshold = t.l * core.w_min;
  for (std::size_t u = 0; u < seq.weights.size(); ++u)
    if (seq.weights[u] > threshold) core.nodes.push_back(static_cast<NodeId>(u));
  core.fraction = seq.weights.empty() ? 0.0 : static_cast<double>(core.nodes.size()) / static_cast<double>(seq.weights.size());
  return core;
}

/// Number of core nodes for a fraction of n: ceil(fraction n), guarding
/// against representation error in fraction.
inline std::size_t core_size_for(double fraction, std::size_t n) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw UsageError("core fraction must lie in (0, 1]");
  const double k = std::ceil(fraction * static_cast<double>(n) - 1e-9);
  return std::min(n, static_cast<std::size_t>(std::max(0.0, k)));
}

/// The ceil(fraction N) nodes with the highest score (ties: lower id first).
inline std::vector<NodeId> top_by_score(const std::vector<double>& score, double fraction) {
  const std::size_t k = core_size_for(fraction, score.size());
  std::vector<NodeId> order(score.size());
  std::iota(order.begin(), order.end(), NodeId{0});
  std::stable_sort(order.begin(), order.end(), [&](NodeId a, NodeId b) { return score[a] > score[b]; });
  order.resize(k);
  std::sort(order.begin(), order.end());
  return order;
}

/// Top ceil(fraction N) nodes by realized degree.
inline CoreSpec topk_core(const Graph& g, double fraction) {
  std::vector<double> deg(g.node_count());
  for (NodeId u = 0; u < g.node_count(); ++u) deg[u] = static_cast<double>(g.degree(u));
  CoreSpec core;
  core.mode = CoreMode::topk_realized;
  core.fraction = fraction;
  core.nodes = top_by_score(deg, fraction);
  return core;
}

/// Drops core nodes outside the giant component.
inline CoreSpec restrict_to_giant(CoreSpec core, const RplgGraph& g) {
  std::erase_if(core.nodes, [&](NodeId u) { return !g.in_giant(u); });
  return core;
}

/// Top ceil(fraction N) nodes of the sampled graph by realized (or expected)
/// degree, restricted to the giant component.
inline CoreSpec topk_core(const RplgGraph& g, double fraction, bool by_expected_degree = false) {
  if (!by_expected_degree) return restrict_to_giant(topk_core(g.graph, fraction), g);
  CoreSpec core;
  core.mode = CoreMode::topk_expected;
  core.fraction = fraction;
  core.nodes = top_by_score(g.sequence.weights, fraction);
  return restrict_to_giant(std::move(core), g);
}

struct NoGiantResult {
  double ratio = 0;  // sum w'^2 / sum w' over the subset
  bool no_giant = true;
};

/// No-giant criterion from sums of induced weights.
inline NoGiantResult no_giant_from_sums(double sum_w_prime, double sum_w_prime_sq) {
  NoGiantResult r;
  r.ratio = sum_w_prime > 0 ? sum_w_prime_sq / sum_w_prime : 0.0;
  r.no_giant = r.ratio < 1.0;
  return r;
}

/// Induced weights w'_u = w_u * vol(U) / vol(G) on the subset, then the
/// criterion sum w'^2 / sum w' < 1.
inline NoGiantResult no_giant_check(const ExpectedDegreeSequence& seq, const std::vector<NodeId>& subset) {
  if (subset.empty()) throw UsageError("subset must be nonempty");
  const double total = seq.weight_sum();
  double vol = 0;
  for (NodeId u : subset) vol += seq.weights.at(u);
  const double scale = total > 0 ? vol / total : 0.0;
  double s1 = 0;
  double s2 = 0;
  for (NodeId u : subset) {
    const double w = seq.weights[u] * scale;
    s1 += w;
    s2 += w * w;
  }
  return no_giant_from_sums(s1, s2);
}

/// Asymptotic volumes of the periphery U_l (expected degree below l w_min)
/// in the large-N limit, before and after the induced-subgraph rescaling.
struct PeripherySums {
  double sum_w;
  double sum_w_sq;
  double sum_w_prime;
  double sum_w_prime_sq;
};

inline PeripherySums analytic_periphery_sums(double N, double beta, double w_bar, double l) {
  const double gamma = solve_core_threshold(beta, w_bar).gamma;
  const double shrink = 1 - std::pow(l, 2 - beta);
  PeripherySums s;
  s.sum_w = N * w_bar * shrink;
  s.sum_w_sq = N * w_bar * w_bar * gamma * std::pow(l, 3 - beta);
  // w' = (vol(U_l) / N w_bar) w = shrink * w
  s.sum_w_prime = shrink * s.sum_w;
  s.sum_w_prime_sq = shrink * shrink * s.sum_w_sq;
  return s;
}

// Graph files: header "N M seed beta w_bar delta", then one "u v" per line.

struct GraphFile {
  Graph graph;
  std::uint64_t seed = 0;
  double beta = 0;
  double w_bar = 0;
  double delta = 0;
};

inline void write_graph_file(std::ostream& os, const Graph& g, std::uint64_t seed, double beta, double w_bar, double delta) {
  os.precision(17);
  os << g.node_count() << ' ' << g.edge_count() << ' ' << seed << ' ' << beta << ' ' << w_bar << ' ' << delta << '\n';
  for (auto [u, v] : g.edges()) os << u << ' ' << v << '\n';
}

inline void write_graph_file(std::ostream& os, const RplgGraph& g) {
  write_graph_file(os, g.graph, g.seed, g.sequence.beta, g.sequence.w_bar, g.sequence.delta);
}

inline GraphFile read_graph_file(std::istream& is) {
  GraphFile f;
  std::string line;
  auto next_line = [&]() -> bool {
    while (std::getline(is, line)) {
      const auto first = line.find_first_not_of(" \t\r");
      if (first != std::string::npos && line[first] != '#') return true;
    }
    return false;
  };
  if (!next_line()) throw CorruptStreamError("graph file is empty");
  std::size_t n = 0;
  std::size_t m = 0;
  {
    std::istringstream hs(line);
    if (!(hs >> n >> m >> f.seed >> f.beta >> f.w_bar >> f.delta))
      throw CorruptStreamError("graph header must be 'N M seed beta w_bar delta'");
  }
  std::vector<Edge> edges;
  edges.reserve(m);
  while (next_line()) {
    std::istringstream es(line);
    long long u = -1;
    long long v = -1;
    if (!(es >> u >> v)) throw CorruptStreamError("bad edge line: '" + line + "'");
    if (u < 0 || v < 0 || static_cast<std::size_t>(u) >= n || static_cast<std::size_t>(v) >= n)
      throw CorruptStreamError("edge endpoint out of range: '" + line + "'");
    if (u == v) throw CorruptStreamError("self-loop in graph file: '" + line + "'");
    edges.emplace_back(static_cast<NodeId>(u), static_cast<NodeId>(v));
  }
  if (edges.size() != m)
    throw CorruptStreamError("graph header declares " + std::to_string(m) + " edges, file has " + std::to_string(edges.size()));
  f.graph = Graph(n, edges);
  return f;
}

inline void write_weights_file(std::ostream& os, const ExpectedDegreeSequence& seq) {
  os.precision(17);
  for (std::size_t u = 0; u < seq.weights.size(); ++u) os << u << ' ' << seq.weights[u] << '\n';
}

inline std::vector<double> read_weights_file(std::istream& is, std::size_t n) {
  std::vector<double> w(n, std::numeric_limits<double>::quiet_NaN());
  std::string line;
  while (std::getline(is, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ls(line);
    long long u = -1;
    double x = 0;
    if (!(ls >> u >> x) || u < 0 || static_cast<std::size_t>(u) >= n) throw CorruptStreamError("bad weights line: '" + line + "'");
    w[static_cast<std::size_t>(u)] = x;
  }
  for (double x : w)
    if (std::isnan(x)) throw CorruptStreamError("weights file does not cover every node");
  return w;
}

}  // namespace netmemo
