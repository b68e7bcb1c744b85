#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "netmemo/ctw.hpp"
#include "netmemo/lzdict.hpp"
#include "netmemo/parallel.hpp"

namespace netmemo {

/// splitmix64 finalizer; used to derive independent per-trial seeds.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
  auto step = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return step(step(step(seed) ^ a) ^ (b * 0xd6e8feb86659fd93ULL));
}

/// Binary Markov chain of a fixed order over the bit stream (bytes are formed
/// MSB first). The state is the last `order` bits, most recent bit in bit 0.
struct MarkovSource {
  int order = 0;
  std::vector<double> p_one;  // P(next = 1 | state), 2^order entries
  std::uint64_t seed = 0;

  static MarkovSource binary_order1(double p_one_after_zero, double p_one_after_one, std::uint64_t seed = 1) {
    return MarkovSource{1, {p_one_after_zero, p_one_after_one}, seed}.validated();
  }

  static MarkovSource memoryless(double p1, std::uint64_t seed = 1) { return MarkovSource{0, {p1}, seed}.validated(); }

  /// A high-order chain whose transition probabilities are pushed towards 0
  /// and 1, so its model is expensive to learn but its entropy rate is low.
  static MarkovSource random_table(int order, std::uint64_t table_seed, std::uint64_t seed = 1) {
    if (order < 0 || order > 24) throw UsageError("Markov order must be in [0, 24]");
    std::mt19937_64 rng(table_seed);
    MarkovSource s{order, std::vector<double>(std::size_t{1} << order), seed};
    for (double& p : s.p_one) {
      const double u = static_cast<double>(rng() >> 11) * 0x1p-53;
      p = u < 0.5 ? 0.5 * std::pow(2 * u, 4.0) : 1.0 - 0.5 * std::pow(2 * (1 - u), 4.0);
    }
    return s;
  }

  [[nodiscard]] MarkovSource with_seed(std::uint64_t s) const {
    MarkovSource out = *this;
    out.seed = s;
    return out;
  }

  [[nodiscard]] MarkovSource validated() const {
    if (order < 0 || order > 24) throw UsageError("Markov order must be in [0, 24]");
    if (p_one.size() != (std::size_t{1} << order)) throw UsageError("Markov table must have 2^order entries");
    for (double p : p_one)
      if (!(p >= 0.0 && p <= 1.0)) throw UsageError("Markov probabilities must lie in [0, 1]");
    return *this;
  }

  /// Stationary entropy rate in bits per bit (power iteration on the chain).
  [[nodiscard]] double entropy_rate() const {
    const std::size_t states = p_one.size();
    const std::uint64_t mask = states - 1;
    std::vector<double> pi(states, 1.0 / static_cast<double>(states));
    std::vector<double> next(states);
    for (int it = 0; it < 2000; ++it) {
      std::fill(next.begin(), next.end(), 0.0);
      for (std::size_t s = 0; s < states; ++s) {
        next[(s << 1) & mask] += pi[s] * (1 - p_one[s]);
        next[((s << 1) | 1) & mask] += pi[s] * p_one[s];
      }
      pi.swap(next);
    }
    double h = 0;
    for (std::size_t s = 0; s < states; ++s) {
      const double p = p_one[s];
      if (p > 0 && p < 1) h -= pi[s] * (p * std::log2(p) + (1 - p) * std::log2(1 - p));
    }
    return h;
  }
};

/// n bytes from the chain, initial state all zeros, deterministic in seed.
inline Bytes generate(const MarkovSource& source, std::size_t n) {
  std::mt19937_64 rng(source.seed);
  std::vector<std::uint64_t> threshold(source.p_one.size());
  for (std::size_t i = 0; i < threshold.size(); ++i)
    threshold[i] = static_cast<std::uint64_t>(std::ldexp(source.p_one[i], 53));
  const std::uint64_t mask = source.p_one.size() - 1;
  std::uint64_t state = 0;
  Bytes out(n);
  for (std::uint8_t& byte : out) {
    unsigned v = 0;
    for (int i = 0; i < 8; ++i) {
      const unsigned bit = (rng() >> 11) < threshold[state & mask] ? 1u : 0u;
      v = (v << 1) | bit;
      state = (state << 1) | bit;
    }
    byte = static_cast<std::uint8_t>(v);
  }
  return out;
}

/// A user corpus in chronological order.
struct Corpus {
  Bytes data;
};

using GainSource = std::variant<MarkovSource, Corpus>;

struct CodecParams {
  int ctw_depth = kDefaultCtwDepth;
  std::size_t lz_window = kDefaultWindow;
};

struct GainReport {
  Algorithm algorithm = Algorithm::ctw;
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t trials = 0;
  double mean_len_no_memory = 0;
  double mean_len_with_memory = 0;
  double g = 1;
  double stderr_g = 0;
  std::uint64_t seed = 0;
};

inline constexpr std::size_t kMemoryChunk = 65536;
inline constexpr std::uint64_t kTargetStream = ~0ull;

/// Memory of trial `trial`: the concatenation of previously sent sequences.
/// Chunk 0 is the most recent, so memories of different sizes for the same
/// trial are suffixes of one another.
inline Bytes draw_memory(const MarkovSource& source, std::uint64_t trial, std::size_t m) {
  Bytes out;
  out.reserve(m);
  const std::size_t chunks = (m + kMemoryChunk - 1) / kMemoryChunk;
  for (std::size_t j = chunks; j-- > 0;) {
    Bytes chunk = generate(source.with_seed(mix_seed(source.seed, trial, j + 1)), kMemoryChunk);
    const std::size_t skip = (j == chunks - 1) ? chunks * kMemoryChunk - m : 0;
    out.insert(out.end(), chunk.begin() + static_cast<std::ptrdiff_t>(skip), chunk.end());
  }
  return out;
}

inline Bytes draw_target(const MarkovSource& source, std::uint64_t trial, std::size_t n) {
  return generate(source.with_seed(mix_seed(source.seed, trial, kTargetStream)), n);
}

/// Compressed size in bytes of the coded payload (header framing excluded).
inline std::size_t coded_length(Algorithm algo, ByteView input, ByteView memory, const CodecParams& p) {
  if (algo == Algorithm::ctw) return CtwCodec(memory, {p.ctw_depth, true}).encode(input).payload.size();
  return lz_encode(input, memory, p.lz_window).payload.size();
}

namespace gain_detail {

inline GainReport summarize(Algorithm algo, std::size_t n, std::size_t m, std::uint64_t seed,
                            const std::vector<double>& plain, const std::vector<double>& assisted) {
  GainReport r;
  r.algorithm = algo;
  r.n = n;
  r.m = m;
  r.trials = plain.size();
  r.seed = seed;
  const double t = static_cast<double>(plain.size());
  double su = 0;
  double sm = 0;
  for (std::size_t i = 0; i < plain.size(); ++i) {
    su += plain[i];
    sm += assisted[i];
  }
  r.mean_len_no_memory = su / t;
  r.mean_len_with_memory = sm / t;
  r.g = r.mean_len_no_memory / r.mean_len_with_memory;
  if (plain.size() > 1) {
    // Delta-method standard error of a ratio of means.
    double vu = 0;
    double vm = 0;
    double cov = 0;
    for (std::size_t i = 0; i < plain.size(); ++i) {
      const double du = plain[i] - r.mean_len_no_memory;
      const double dm = assisted[i] - r.mean_len_with_memory;
      vu += du * du;
      vm += dm * dm;
      cov += du * dm;
    }
    vu /= t - 1;
    vm /= t - 1;
    cov /= t - 1;
    const double mu = r.mean_len_no_memory;
    const double mm = r.mean_len_with_memory;
    const double rel = vu / (mu * mu) + vm / (mm * mm) - 2 * cov / (mu * mm);
    r.stderr_g = r.g * std::sqrt(std::max(0.0, rel) / t);
  }
  return r;
}

}  // namespace gain_detail

/// g(n, m): ratio of mean coded lengths without and with an m-byte memory.
///
/// Markov sources: each trial draws its own memory and a fresh target.
/// Corpora: the memory is the first m bytes; target i is the slice
/// [m + i n, m + (i + 1) n).
inline GainReport measure_gain(const GainSource& source, Algorithm algo, std::size_t n, std::size_t m,
                               std::size_t trials, const CodecParams& params = {}, unsigned threads = 1) {
  if (trials < 1) throw UsageError("trials must be >= 1");
  std::vector<double> plain(trials);
  std::vector<double> assisted(trials);
  std::uint64_t seed = 0;

  if (const auto* markov = std::get_if<MarkovSource>(&source)) {
    seed = markov->seed;
    parallel_for(trials, threads, [&](std::size_t t) {
      const Bytes target = draw_target(*markov, t, n);
      plain[t] = static_cast<double>(coded_length(algo, target, {}, params));
      if (m == 0) {
        assisted[t] = plain[t];
      } else {
        // LZ only sees the last window bytes; memories are nested, so the
        // shorter draw is byte-identical to the tail of the full one.
        const std::size_t visible = algo == Algorithm::lz ? std::min(m, params.lz_window) : m;
        const Bytes memory = draw_memory(*markov, t, visible);
        assisted[t] = static_cast<double>(coded_length(algo, target, memory, params));
      }
    });
  } else {
    const Bytes& data = std::get<Corpus>(source).data;
    if (data.size() < m + n * trials)
      throw InsufficientDataError("corpus of " + std::to_string(data.size()) + " bytes is shorter than m + n*trials = " +
                                  std::to_string(m + n * trials));
    const ByteView memory(data.data(), m);
    // One primed model serves every target.
    std::optional<CtwCodec> with_memory;
    std::optional<CtwCodec> without_memory;
    if (algo == Algorithm::ctw) {
      with_memory.emplace(memory, CtwOptions{params.ctw_depth, true});
      without_memory.emplace(ByteView{}, CtwOptions{params.ctw_depth, true});
    }
    parallel_for(trials, threads, [&](std::size_t t) {
      const ByteView target(data.data() + m + t * n, n);
      if (algo == Algorithm::ctw) {
        plain[t] = static_cast<double>(without_memory->encode(target).payload.size());
        assisted[t] = static_cast<double>(with_memory->encode(target).payload.size());
      } else {
        plain[t] = static_cast<double>(lz_encode(target, {}, params.lz_window).payload.size());
        assisted[t] = static_cast<double>(lz_encode(target, memory, params.lz_window).payload.size());
      }
    });
  }
  return gain_detail::summarize(algo, n, m, seed, plain, assisted);
}

/// measure_gain over the cartesian product of n_grid x m_grid (n-major).
inline std::vector<GainReport> gain_curve(const GainSource& source, Algorithm algo, const std::vector<std::size_t>& n_grid,
                                          const std::vector<std::size_t>& m_grid, std::size_t trials,
                                          const CodecParams& params = {}, unsigned threads = 1) {
  std::vector<GainReport> out;
  for (std::size_t n : n_grid)
    for (std::size_t m : m_grid) out.push_back(measure_gain(source, algo, n, m, trials, params, threads));
  return out;
}

inline void write_gain_csv_header(std::ostream& os) {
  os << "algorithm,n,m,trials,mean_len_ucomp,mean_len_ucompm,g,stderr,seed\n";
}

inline void write_gain_csv_row(std::ostream& os, const GainReport& r) {
  const auto old_precision = os.precision(10);
  os << algorithm_name(r.algorithm) << ',' << r.n << ',' << r.m << ',' << r.trials << ',' << r.mean_len_no_memory << ','
     << r.mean_len_with_memory << ',' << r.g << ',' << r.stderr_g << ',' << r.seed << '\n';
  os.precision(old_precision);
}

}  // namespace netmemo
