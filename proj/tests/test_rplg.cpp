#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <sstream>

#include "netmemo/rplg.hpp"

using namespace netmemo;

namespace {

Graph clique(std::size_t n, std::size_t offset, std::vector<Edge>& edges) {
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      edges.emplace_back(static_cast<NodeId>(offset + i), static_cast<NodeId>(offset + j));
  return Graph(offset + n, edges);
}

double slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

TEST(Graph, BuildsSortedDeduplicatedAdjacency) {
  const Graph g(4, {{2, 0}, {0, 1}, {1, 0}, {3, 2}, {0, 2}});
  EXPECT_EQ(g.node_count(), 4u);
  EXPECT_EQ(g.edge_count(), 3u);
  EXPECT_EQ(g.degree(0), 2u);
  EXPECT_EQ(g.degree(3), 1u);
  EXPECT_TRUE(g.has_edge(2, 3));
  EXPECT_TRUE(g.has_edge(3, 2));
  EXPECT_FALSE(g.has_edge(1, 3));
  const auto nb = g.neighbors(2);
  EXPECT_EQ(std::vector<NodeId>(nb.begin(), nb.end()), (std::vector<NodeId>{0, 3}));
  EXPECT_EQ(g.edges(), (std::vector<Edge>{{0, 1}, {0, 2}, {2, 3}}));
}

TEST(Graph, RejectsSelfLoopsAndBadEndpoints) {
  EXPECT_THROW(Graph(3, {{1, 1}}), UsageError);
  EXPECT_THROW(Graph(3, {{0, 3}}), UsageError);
}

TEST(Graph, ComponentsAndLargest) {
  std::vector<Edge> edges;
  clique(3, 0, edges);
  const Graph g = clique(5, 4, edges);  // node 3 isolated
  const auto labels = connected_components(g);
  EXPECT_EQ(labels[0], 0u);
  EXPECT_EQ(labels[3], 1u);
  EXPECT_EQ(labels[4], 2u);
  EXPECT_EQ(component_sizes(labels), (std::vector<std::size_t>{3, 1, 5}));
  EXPECT_EQ(largest_component(g), (std::vector<NodeId>{4, 5, 6, 7, 8}));
  const Graph tie(4, {{0, 1}, {2, 3}});
  EXPECT_EQ(largest_component(tie), (std::vector<NodeId>{0, 1}));
}

TEST(Graph, InducedSubgraphRelabels) {
  const Graph g(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {0, 4}});
  const Graph h = induced_subgraph(g, {1, 2, 4});
  EXPECT_EQ(h.node_count(), 3u);
  EXPECT_EQ(h.edges(), (std::vector<Edge>{{0, 1}}));
}

TEST(Weights, WorkedExample) {
  const auto s = build_weights(1000, 2.5, 4.0, 100.0);
  EXPECT_NEAR(s.c, 400.0 / 3.0, 1e-9);
  EXPECT_NEAR(s.i0, 1.5396, 1e-3);
  EXPECT_NEAR(s.weights[0], s.c * std::pow(2.0, -2.0 / 3.0), 1e-12);
  EXPECT_NEAR(s.weights[999], s.c * std::pow(1001.0, -2.0 / 3.0), 1e-12);
  // i0 is where the formula reaches the maximum expected degree.
  EXPECT_NEAR(s.c * std::pow(s.i0, -2.0 / 3.0), 100.0, 1e-9);
  EXPECT_LE(s.w_max(), 100.0);
  EXPECT_NEAR(s.rho * s.weight_sum(), 1.0, 1e-12);
  for (std::size_t k = 1; k < s.weights.size(); ++k) EXPECT_LT(s.weights[k], s.weights[k - 1]);
}

TEST(Weights, MeanWeightMatchesIntegral) {
  const std::size_t N = 20000;
  for (double beta : {2.2, 2.5, 2.8}) {
    const auto s = build_weights(N, beta, 3.0, 200.0);
    const double e = 1 / (beta - 1);
    const double a = std::ceil(s.i0);
    // Integral of c x^{-e} over [a - 1/2, a + N - 1/2].
    const double integral =
        s.c / (1 - e) * (std::pow(a + static_cast<double>(N) - 0.5, 1 - e) - std::pow(a - 0.5, 1 - e));
    EXPECT_NEAR(s.weight_sum() / integral, 1.0, 0.01) << beta;
  }
}

TEST(Weights, DecayExponentMatchesBeta) {
  for (double beta : {2.1, 2.3, 2.5, 2.7, 2.9}) {
    const auto s = build_weights(1000, beta, 3.0, 50.0);
    const double first = std::ceil(s.i0);
    const double ratio = std::log(s.weights[0] / s.weights[999]) / std::log((first + 999) / first);
    EXPECT_NEAR(ratio, 1 / (beta - 1), 1e-9) << beta;
  }
}

TEST(Weights, InvalidParametersAreUsageErrors) {
  EXPECT_THROW(build_weights(1, 2.5, 3, 10), UsageError);
  EXPECT_THROW(build_weights(100, 2.0, 3, 10), UsageError);
  EXPECT_THROW(build_weights(100, 3.0, 3, 10), UsageError);
  EXPECT_THROW(build_weights(100, 2.5, 1.0, 10), UsageError);
  EXPECT_THROW(build_weights(100, 2.5, 3, 2), UsageError);
  EXPECT_THROW(build_weights(100, 2.5, 3, INFINITY), UsageError);
  EXPECT_THROW(ExpectedDegreeSequence::from_weights({1.0, -1.0}), UsageError);
}

TEST(Weights, AclParameters) {
  const auto p = acl_parameters(10000, 2.5);
  EXPECT_NEAR(p.w_bar, 2.6123753486854883 / 1.3414872572509172, 1e-9);
  EXPECT_NEAR(p.delta, std::pow(10000 / 1.3414872572509172, 0.4), 1e-9);
  EXPECT_THROW(acl_parameters(100, 3.5), UsageError);
}

TEST(Sampler, ZeroWeightsGiveNoEdges) {
  const auto s = ExpectedDegreeSequence::from_weights(std::vector<double>(50, 0.0));
  EXPECT_EQ(s.rho, 0.0);
  EXPECT_EQ(sample_graph(s, 1).graph.edge_count(), 0u);
}

TEST(Sampler, DeterministicInSeed) {
  const auto s = build_weights(500, 2.5, 3.0, 40.0);
  EXPECT_EQ(sample_graph(s, 7).graph.edges(), sample_graph(s, 7).graph.edges());
  EXPECT_NE(sample_graph(s, 7).graph.edges(), sample_graph(s, 8).graph.edges());
}

TEST(Sampler, MeanDegreeMatchesExpectedDegree) {
  const auto s = build_weights(200, 2.5, 4.0, 40.0);
  const std::size_t n = s.weights.size();
  const double total = std::accumulate(s.weights.begin(), s.weights.end(), 0.0);
  std::vector<double> expected(n, 0.0);
  std::vector<double> variance(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) {
        const double p = std::min(1.0, s.weights[i] * s.weights[j] / total);
        expected[i] += p;
        variance[i] += p * (1 - p);
      }
  const int seeds = 200;
  std::vector<double> mean(n, 0.0);
  for (int seed = 0; seed < seeds; ++seed) {
    const auto g = sample_graph(s, static_cast<std::uint64_t>(seed));
    for (NodeId u = 0; u < n; ++u) mean[u] += static_cast<double>(g.graph.degree(u)) / seeds;
  }
  for (std::size_t i = 0; i < n; ++i) {
    EXPECT_NEAR(expected_degree(s, i), expected[i], 1e-9);
    EXPECT_NEAR(mean[i], expected[i], 5 * std::sqrt(variance[i] / seeds) + 1e-9) << i;
  }
}

TEST(Sampler, GiantComponentAndSmallRest) {
  const std::size_t N = 5000;
  const auto p = acl_parameters(N, 2.5);
  const auto g = sample_graph(build_weights(N, 2.5, p.w_bar, p.delta), 3);
  EXPECT_GE(g.giant.size(), static_cast<std::size_t>(0.3 * N));
  auto sizes = component_sizes(g.component);
  std::sort(sizes.rbegin(), sizes.rend());
  EXPECT_EQ(sizes[0], g.giant.size());
  if (sizes.size() > 1) {
    EXPECT_LE(static_cast<double>(sizes[1]), 5 * std::log(static_cast<double>(N)));
  }
  for (NodeId u : g.giant) EXPECT_TRUE(g.in_giant(u));
}

TEST(Sampler, DegreeTailFollowsPowerLaw) {
  const std::size_t N = 20000;
  const double beta = 2.5;
  const auto g = sample_graph(build_weights(N, beta, 4.0, 400.0), 5);
  std::map<std::size_t, std::size_t> hist;
  for (NodeId u = 0; u < N; ++u) ++hist[g.graph.degree(u)];
  // Complementary CDF over degrees in [10, 100] has slope 1 - beta.
  std::vector<double> x;
  std::vector<double> y;
  for (std::size_t k = 10; k <= 100; k += 5) {
    std::size_t above = 0;
    for (auto it = hist.lower_bound(k); it != hist.end(); ++it) above += it->second;
    x.push_back(std::log(static_cast<double>(k)));
    y.push_back(std::log(static_cast<double>(above) / static_cast<double>(N)));
  }
  EXPECT_NEAR(slope(x, y) - 1, -beta, 0.3);
}

TEST(CoreThreshold, ClosedForms) {
  const auto t = solve_core_threshold(2.5, 2.0);
  EXPECT_NEAR(t.gamma, 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(t.l, 2.25, 1e-12);
  EXPECT_FALSE(t.degenerate);
  const auto d = solve_core_threshold(2.5, 3.0);
  EXPECT_NEAR(d.l, 1.0, 1e-12);
  EXPECT_TRUE(d.degenerate);
  for (double beta : {2.05, 2.3, 2.5, 2.7, 2.95})
    for (double w_bar : {1.5, 2.0, 5.0, 20.0}) {
      const auto r = solve_core_threshold(beta, w_bar);
      EXPECT_NEAR(std::pow(r.l, 3 - beta) * w_bar * r.gamma, 1.0, 1e-12);
      const double a = (beta - 2) / (beta - 1);
      EXPECT_NEAR(r.gamma, a * a * (beta - 1) / (3 - beta), 1e-12);
    }
}

TEST(TheoremCore, StrictThreshold) {
  const auto s = ExpectedDegreeSequence::from_weights({1.0, 2.0, 2.0001, 5.0, 1.5});
  CoreThreshold t;
  t.l = 2.0;
  const auto core = theorem_core(s, t);
  EXPECT_EQ(core.nodes, (std::vector<NodeId>{2, 3}));
  EXPECT_EQ(core.w_min, 1.0);
  EXPECT_DOUBLE_EQ(core.fraction, 0.4);
  EXPECT_FALSE(core.degenerate);
  t.l = 1.0;
  const auto degenerate = theorem_core(s, t);
  EXPECT_TRUE(degenerate.degenerate);
  EXPECT_EQ(degenerate.nodes, (std::vector<NodeId>{1, 2, 3, 4}));
}

TEST(TheoremCore, FractionFollowsPowerLaw) {
  const auto s = build_weights(100000, 2.5, 2.0, 1000.0);
  const auto t = solve_core_threshold(2.5, 2.0);
  const auto core = theorem_core(s, t);
  const double expected = std::pow(t.l, 1 - 2.5);
  EXPECT_NEAR(core.fraction / expected, 1.0, 0.2);
}

TEST(TopkCore, SizesAndTies) {
  EXPECT_EQ(core_size_for(0.025, 2000), 50u);
  EXPECT_EQ(core_size_for(0.1, 30), 3u);
  EXPECT_EQ(core_size_for(1.0, 17), 17u);
  EXPECT_EQ(core_size_for(0.001, 10), 1u);
  EXPECT_THROW(core_size_for(0.0, 10), UsageError);
  EXPECT_THROW(core_size_for(1.5, 10), UsageError);
  EXPECT_EQ(top_by_score({1, 3, 3, 2, 3}, 0.4), (std::vector<NodeId>{1, 2}));

  const Graph star(6, {{0, 5}, {1, 5}, {2, 5}, {3, 5}, {3, 4}});
  EXPECT_EQ(topk_core(star, 0.3).nodes, (std::vector<NodeId>{3, 5}));
  EXPECT_EQ(topk_core(star, 1.0).nodes.size(), 6u);
}

TEST(TopkCore, SampledGraph) {
  const auto p = acl_parameters(2000, 2.5);
  const auto g = sample_graph(build_weights(2000, 2.5, p.w_bar, p.delta), 11);
  const auto core = topk_core(g, 0.025);
  EXPECT_LE(core.nodes.size(), 50u);
  EXPECT_GE(core.nodes.size(), 45u);
  for (NodeId u : core.nodes) EXPECT_TRUE(g.in_giant(u));
  const auto all = topk_core(g, 1.0);
  EXPECT_EQ(all.nodes, g.giant);
  const auto expected = topk_core(g, 0.025, true);
  EXPECT_EQ(expected.mode, CoreMode::topk_expected);
  // Weights decrease with id, so the expected-degree core is a prefix.
  for (NodeId u : expected.nodes) EXPECT_LT(u, 50u);
}

TEST(NoGiant, DirectCases) {
  const auto half = ExpectedDegreeSequence::from_weights(std::vector<double>(100, 0.5));
  std::vector<NodeId> all(100);
  std::iota(all.begin(), all.end(), NodeId{0});
  const auto r = no_giant_check(half, all);
  EXPECT_NEAR(r.ratio, 0.5, 1e-12);
  EXPECT_TRUE(r.no_giant);

  const auto s = build_weights(5000, 2.5, 3.0, 100.0);
  std::vector<NodeId> nodes(5000);
  std::iota(nodes.begin(), nodes.end(), NodeId{0});
  double s1 = 0, s2 = 0;
  for (double w : s.weights) {
    s1 += w;
    s2 += w * w;
  }
  EXPECT_NEAR(no_giant_check(s, nodes).ratio, s2 / s1, 1e-9);
  EXPECT_FALSE(no_giant_check(s, nodes).no_giant);

  // Half the volume: weights scale by vol(U)/vol(G).
  const auto two = ExpectedDegreeSequence::from_weights({2.0, 2.0, 2.0, 2.0});
  EXPECT_NEAR(no_giant_check(two, {0, 1}).ratio, 1.0, 1e-12);
  EXPECT_THROW(no_giant_check(two, {}), UsageError);
}

TEST(NoGiant, AnalyticPeripheryIsCriticalAtThreshold) {
  for (double beta : {2.2, 2.5, 2.8})
    for (double w_bar : {1.5, 2.0, 2.5}) {
      const auto t = solve_core_threshold(beta, w_bar);
      if (t.degenerate) continue;
      const auto at = analytic_periphery_sums(1e6, beta, w_bar, t.l);
      EXPECT_NEAR(at.sum_w_prime_sq / at.sum_w_prime, 1.0, 1e-12);
      const auto below = analytic_periphery_sums(1e6, beta, w_bar, 0.9 * t.l);
      EXPECT_TRUE(no_giant_from_sums(below.sum_w_prime, below.sum_w_prime_sq).no_giant);
      const auto above = analytic_periphery_sums(1e6, beta, w_bar, 1.1 * t.l);
      EXPECT_FALSE(no_giant_from_sums(above.sum_w_prime, above.sum_w_prime_sq).no_giant);
    }
}

TEST(GraphFiles, RoundTrip) {
  const auto s = build_weights(300, 2.3, 3.0, 30.0);
  const auto g = sample_graph(s, 42);
  std::stringstream ss;
  write_graph_file(ss, g);
  const GraphFile f = read_graph_file(ss);
  EXPECT_EQ(f.graph.edges(), g.graph.edges());
  EXPECT_EQ(f.graph.node_count(), 300u);
  EXPECT_EQ(f.seed, 42u);
  EXPECT_EQ(f.beta, 2.3);
  EXPECT_EQ(f.w_bar, 3.0);
  EXPECT_EQ(f.delta, 30.0);

  std::stringstream ws;
  write_weights_file(ws, s);
  EXPECT_EQ(read_weights_file(ws, 300), s.weights);
}

TEST(GraphFiles, CommentsAndErrors) {
  std::istringstream ok("# a comment\n3 2 1 2.5 3 10\n0 1\n\n# mid\n1 2\n");
  EXPECT_EQ(read_graph_file(ok).graph.edge_count(), 2u);
  std::istringstream bad_header("3 2 1\n0 1\n");
  EXPECT_THROW(read_graph_file(bad_header), CorruptStreamError);
  std::istringstream bad_count("3 3 1 2.5 3 10\n0 1\n");
  EXPECT_THROW(read_graph_file(bad_count), CorruptStreamError);
  std::istringstream bad_edge("3 1 1 2.5 3 10\n0 7\n");
  EXPECT_THROW(read_graph_file(bad_edge), CorruptStreamError);
  std::istringstream empty("");
  EXPECT_THROW(read_graph_file(empty), CorruptStreamError);
  std::istringstream missing("0 1.5\n");
  EXPECT_THROW(read_weights_file(missing, 2), CorruptStreamError);
}
