#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "netmemo/bytes.hpp"
#include "netmemo/error.hpp"

namespace netmemo {

/// A context of `length` bits. Bit 0 of `bits` is the most recent bit, so a
/// node at depth k of a ContextTree is reached by following bits 0..k-1.
struct BitContext {
  std::uint64_t bits = 0;
  int length = 0;

  /// Parses a bit string written in stream order: oldest bit first, most
  /// recent bit last ("01" means a 0 followed by a 1).
  static BitContext from_string(std::string_view s) {
    if (s.size() > 64) throw UsageError("bit context longer than 64 bits");
    BitContext c;
    c.length = static_cast<int>(s.size());
    for (char ch : s) {
      if (ch != '0' && ch != '1') throw UsageError("bit context must contain only '0' and '1'");
      c.bits = (c.bits << 1) | static_cast<std::uint64_t>(ch - '0');
    }
    return c;
  }
};

/// Krichevsky-Trofimov block probability of a zeros and b ones, in nats:
/// Gamma(a+1/2) Gamma(b+1/2) / (pi Gamma(a+b+1)).
inline double kt_log_probability(std::uint64_t a, std::uint64_t b) {
  const double da = static_cast<double>(a);
  const double db = static_cast<double>(b);
  return std::lgamma(da + 0.5) + std::lgamma(db + 0.5) - std::lgamma(da + db + 1.0) - std::log(std::numbers::pi);
}

/// log(1 + e^x) without overflow.
inline double log1p_exp(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

/// Binary context tree weighting model.
///
/// Every node keeps its zero/one counts and the ratio
/// beta = Pe(s) / (Pw(s0) Pw(s1)) between its own KT estimate and the product
/// of its children's weighted probabilities. The conditional probability of
/// the next bit then follows from a leaf-to-root pass with only a few
/// multiplications per node, and beta is updated multiplicatively after the
/// bit is known. beta is stored as `beta * 2^(512*scale)` so it never
/// saturates. Block log-probabilities (log_pe, log_pw) are derived on demand
/// from the counts and beta.
///
/// Nodes are created lazily the first time a context visits them; an absent
/// node behaves as a node with zero counts (Pe = Pw = 1).
class ContextTree {
 public:
  static constexpr int kMaxDepth = 32;

  struct Node {
    std::uint32_t count[2] = {0, 0};
    std::int32_t child[2] = {-1, -1};
    double beta = 1.0;
    std::int32_t scale = 0;
  };

  struct NodeView {
    int depth;
    std::uint32_t count_zero;
    std::uint32_t count_one;
    double log_pe;
    double log_pw;
  };

  explicit ContextTree(int depth = 16) : depth_(depth) {
    if (depth < 0 || depth > kMaxDepth)
      throw UsageError("context depth must be in [0, " + std::to_string(kMaxDepth) + "]");
    nodes_.emplace_back();
    if (depth <= kDirectDepthLimit) {
      direct_.assign(std::size_t{2} << depth, -1);
      direct_[0] = 0;
    }
  }

  [[nodiscard]] int depth() const { return depth_; }
  [[nodiscard]] std::size_t node_count() const { return nodes_.size(); }
  [[nodiscard]] std::uint64_t symbols_seen() const { return nodes_[0].count[0] + std::uint64_t{nodes_[0].count[1]}; }

  /// The last `depth` bits seen (zero-padded at stream start).
  [[nodiscard]] BitContext context() const { return {history_ & mask(), depth_}; }

  /// P(next bit = 0 | context). Pure: does not materialize nodes.
  [[nodiscard]] double predict(BitContext ctx) const {
    if (ctx.length != depth_)
      throw UsageError("context has " + std::to_string(ctx.length) + " bits, tree depth is " + std::to_string(depth_));
    std::array<std::int32_t, kMaxDepth + 1> path{};
    int reached = 0;
    path[0] = 0;
    while (reached < depth_) {
      std::int32_t c = nodes_[path[reached]].child[(ctx.bits >> reached) & 1];
      if (c < 0) break;
      path[++reached] = c;
    }
    double p0;
    double p1;
    if (reached == depth_) {
      kt(nodes_[path[depth_]], p0, p1);
    } else {
      p0 = p1 = 0.5;  // unvisited subtree
    }
    for (int k = (reached == depth_ ? depth_ - 1 : reached); k >= 0; --k) mix(nodes_[path[k]], p0, p1);
    return p0;
  }

  [[nodiscard]] double predict() const { return predict(context()); }

  /// Materializes the path for the current context and returns P(next = 0).
  /// Must be followed by commit().
  double prepare() {
    path_[0] = 0;
    if (!direct_.empty()) {
      // Slot of the depth-(k+1) node for the current context; the lookups do
      // not depend on each other.
      for (int k = 0; k < depth_; ++k) {
        const std::uint64_t low = (std::uint64_t{2} << k) - 1;
        const std::size_t slot = low + (history_ & low);
        std::int32_t c = direct_[slot];
        if (c < 0) {
          c = static_cast<std::int32_t>(nodes_.size());
          nodes_.emplace_back();
          nodes_[path_[k]].child[(history_ >> k) & 1] = c;
          direct_[slot] = c;
        }
        path_[k + 1] = c;
      }
    } else {
      for (int k = 0; k < depth_; ++k) {
        const int b = static_cast<int>((history_ >> k) & 1);
        std::int32_t c = nodes_[path_[k]].child[b];
        if (c < 0) {
          c = static_cast<std::int32_t>(nodes_.size());
          nodes_.emplace_back();
          nodes_[path_[k]].child[b] = c;
        }
        path_[k + 1] = c;
      }
    }
    double p0;
    double p1;
    kt(nodes_[path_[depth_]], p0, p1);
    cond_[depth_] = {p0, p1};
    kt_[depth_] = {p0, p1};
    for (int k = depth_ - 1; k >= 0; --k) {
      double k0;
      double k1;
      kt(nodes_[path_[k]], k0, k1);
      kt_[k] = {k0, k1};
      mix(nodes_[path_[k]], k0, k1, p0, p1);
      cond_[k] = {p0, p1};
    }
    return p0;
  }

  /// Folds `bit` into the path prepared by prepare(). With adapt = false the
  /// model stays frozen and only the context advances.
  void commit(int bit, bool adapt = true) {
    if (adapt) {
      for (int k = 0; k <= depth_; ++k) {
        Node& s = nodes_[path_[k]];
        if (k < depth_) {
          s.beta *= kt_[k][bit] / cond_[k + 1][bit];
          renormalize(s);
        }
        ++s.count[bit];
      }
    }
    history_ = (history_ << 1) | static_cast<std::uint64_t>(bit);
  }

  void update(int bit) {
    prepare();
    commit(bit);
  }

  /// Trains the tree on `memory`, bytes MSB first, continuing from the current
  /// context. No code bits are produced.
  void prime(ByteView memory) {
    if (memory.empty()) return;
    if (symbols_seen() + 8 * static_cast<std::uint64_t>(memory.size()) > 0xFFFFFFFFull)
      throw UsageError("context tree counts limited to 2^32 - 1 bits");
    if (nodes_.size() == 1 && symbols_seen() == 0 && depth_ <= kHistogramDepthLimit) {
      prime_from_histogram(memory);
      return;
    }
    for (std::uint8_t byte : memory)
      for (int i = 7; i >= 0; --i) update((byte >> i) & 1);
  }

  /// Node reached from the root by following the `path.length` most recent
  /// bits of `path`, if it has been materialized.
  [[nodiscard]] std::optional<NodeView> find(BitContext path) const {
    if (path.length < 0 || path.length > depth_) throw UsageError("node path longer than tree depth");
    std::int32_t idx = 0;
    for (int k = 0; k < path.length; ++k) {
      idx = nodes_[idx].child[(path.bits >> k) & 1];
      if (idx < 0) return std::nullopt;
    }
    return view(idx, path.length);
  }

  [[nodiscard]] NodeView root() const { return view(0, 0); }

  /// Visits every materialized node as (view, children views or nullopt).
  template <class F>
  void for_each_node(F&& f) const {
    visit(0, 0, f);
  }

  /// log P_w of everything the tree has seen, i.e. the CTW block probability.
  [[nodiscard]] double log_block_probability() const { return log_pw(0, 0); }

  [[nodiscard]] double log_pe(std::int32_t idx) const {
    return kt_log_probability(nodes_[idx].count[0], nodes_[idx].count[1]);
  }

  [[nodiscard]] double log_pw(std::int32_t idx, int depth) const {
    const Node& s = nodes_[idx];
    const double pe = kt_log_probability(s.count[0], s.count[1]);
    if (depth == depth_) return pe;
    return pe - std::numbers::ln2 + log1p_exp(-log_beta(s));
  }

 private:
  static constexpr int kHistogramDepthLimit = 20;
  static constexpr int kDirectDepthLimit = 18;
  static constexpr double kScaleLog = 512.0 * std::numbers::ln2;

  [[nodiscard]] std::uint64_t mask() const { return depth_ == 64 ? ~0ull : ((1ull << depth_) - 1); }

  static void kt(const Node& s, double& p0, double& p1) {
    const double inv = 1.0 / (s.count[0] + static_cast<double>(s.count[1]) + 1.0);
    p0 = (s.count[0] + 0.5) * inv;
    p1 = (s.count[1] + 0.5) * inv;
  }

  // Conditional at an internal node: P_s(x) = w kt_s(x) + (1 - w) P_child(x)
  // with w = beta / (1 + beta).
  static void mix(const Node& s, double& p0, double& p1) {
    double k0;
    double k1;
    kt(s, k0, k1);
    mix(s, k0, k1, p0, p1);
  }

  static void mix(const Node& s, double k0, double k1, double& p0, double& p1) {
    double inv;
    if (s.scale > 0)
      inv = 0.0;
    else if (s.scale < 0)
      inv = 1.0;
    else
      inv = 1.0 / (1.0 + s.beta);
    p0 = k0 + (p0 - k0) * inv;
    p1 = k1 + (p1 - k1) * inv;
  }

  static void renormalize(Node& s) {
    if (s.beta > 0x1p256) {
      s.beta *= 0x1p-512;
      ++s.scale;
    } else if (s.beta < 0x1p-256) {
      s.beta *= 0x1p512;
      --s.scale;
    }
  }

  static double log_beta(const Node& s) { return std::log(s.beta) + s.scale * kScaleLog; }

  static void set_log_beta(Node& s, double lb) {
    s.scale = static_cast<std::int32_t>(std::nearbyint(lb / kScaleLog));
    s.beta = std::exp(lb - s.scale * kScaleLog);
  }

  [[nodiscard]] NodeView view(std::int32_t idx, int depth) const {
    return {depth, nodes_[idx].count[0], nodes_[idx].count[1], log_pe(idx), log_pw(idx, depth)};
  }

  template <class F>
  void visit(std::int32_t idx, int depth, F& f) const {
    std::optional<NodeView> kids[2];
    for (int b = 0; b < 2; ++b)
      if (nodes_[idx].child[b] >= 0) kids[b] = view(nodes_[idx].child[b], depth + 1);
    f(view(idx, depth), kids[0], kids[1]);
    for (int b = 0; b < 2; ++b)
      if (nodes_[idx].child[b] >= 0) visit(nodes_[idx].child[b], depth + 1, f);
  }

  // Priming a fresh tree: count (context, bit) pairs at the leaves, then build
  // the tree bottom-up with closed-form KT probabilities. Equivalent to
  // feeding the bits one at a time, without per-bit tree traversal.
  void prime_from_histogram(ByteView memory) {
    const std::uint64_t m = mask();
    std::vector<std::uint32_t> hist(std::size_t{2} << depth_, 0);
    std::uint64_t h = history_;
    for (std::uint8_t byte : memory) {
      for (int i = 7; i >= 0; --i) {
        const std::uint64_t bit = (byte >> i) & 1;
        ++hist[((h & m) << 1) | bit];
        h = (h << 1) | bit;
      }
    }
    history_ = h;
    const Built root = build(hist, 0, 0);
    // build() appends the root last; move it into slot 0.
    nodes_[0] = nodes_[static_cast<std::size_t>(root.index)];
    nodes_.pop_back();
    if (!direct_.empty()) direct_[0] = 0;
  }

  struct Built {
    std::int32_t index;
    std::uint32_t count[2];
    double log_pw;
  };

  Built build(const std::vector<std::uint32_t>& hist, int depth, std::uint64_t prefix) {
    Built out{-1, {0, 0}, 0.0};
    Node node;
    if (depth == depth_) {
      node.count[0] = hist[prefix << 1];
      node.count[1] = hist[(prefix << 1) | 1];
      if (node.count[0] + std::uint64_t{node.count[1]} == 0) return out;
      out.log_pw = kt_log_probability(node.count[0], node.count[1]);
    } else {
      const Built c0 = build(hist, depth + 1, prefix);
      const Built c1 = build(hist, depth + 1, prefix | (1ull << depth));
      node.count[0] = c0.count[0] + c1.count[0];
      node.count[1] = c0.count[1] + c1.count[1];
      if (node.count[0] + std::uint64_t{node.count[1]} == 0) return out;
      node.child[0] = c0.index;
      node.child[1] = c1.index;
      const double pe = kt_log_probability(node.count[0], node.count[1]);
      const double lb = pe - (c0.log_pw + c1.log_pw);
      set_log_beta(node, lb);
      out.log_pw = pe - std::numbers::ln2 + log1p_exp(-lb);
    }
    out.index = static_cast<std::int32_t>(nodes_.size());
    out.count[0] = node.count[0];
    out.count[1] = node.count[1];
    nodes_.push_back(node);
    if (!direct_.empty()) direct_[((std::size_t{1} << depth) - 1) + prefix] = out.index;
    return out;
  }

  int depth_;
  std::uint64_t history_ = 0;
  std::vector<Node> nodes_;
  std::vector<std::int32_t> direct_;  // node index by (depth, context) for shallow trees
  std::array<std::int32_t, kMaxDepth + 1> path_{};
  std::array<std::array<double, 2>, kMaxDepth + 1> cond_{};
  std::array<std::array<double, 2>, kMaxDepth + 1> kt_{};
};

}  // namespace netmemo
