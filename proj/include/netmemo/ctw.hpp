#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <optional>

#include "netmemo/arithmetic_coder.hpp"
#include "netmemo/coded_stream.hpp"
#include "netmemo/context_tree.hpp"

namespace netmemo {

inline constexpr int kDefaultCtwDepth = 16;

struct CtwOptions {
  int depth = kDefaultCtwDepth;
  /// Keep updating the memory-primed model while coding (the default). When
  /// false the primed model is frozen and only the context advances.
  bool adapt = true;
};

/// Trains `tree` on a memory sequence; returns the trained tree.
inline ContextTree prime(ContextTree tree, ByteView memory) {
  tree.prime(memory);
  return tree;
}

/// Memory-assisted CTW coder. The memory is primed once; every encode/decode
/// works on a private copy of the primed tree, so one codec serves any number
/// of independent streams (sequentially, or from copies of the codec).
class CtwCodec {
 public:
  explicit CtwCodec(ByteView memory = {}, CtwOptions opts = {})
      : opts_(opts), primed_(opts.depth), fingerprint_(memory_fingerprint(memory)) {
    primed_.prime(memory);
  }

  [[nodiscard]] const ContextTree& primed_tree() const { return primed_; }
  [[nodiscard]] std::uint64_t fingerprint() const { return fingerprint_; }
  [[nodiscard]] const CtwOptions& options() const { return opts_; }

  [[nodiscard]] CodedStream encode(ByteView input) const {
    CodedStream s;
    s.algorithm = Algorithm::ctw;
    s.parameter = static_cast<std::uint16_t>(opts_.depth);
    s.original_length = input.size();
    s.memory_fingerprint = fingerprint_;
    if (input.empty()) return s;

    ContextTree tree = primed_;
    ArithmeticEncoder enc;
    for (std::uint8_t byte : input) {
      for (int i = 7; i >= 0; --i) {
        const int bit = (byte >> i) & 1;
        enc.encode(bit, quantize_probability(tree.prepare()));
        tree.commit(bit, opts_.adapt);
      }
    }
    s.payload = enc.finish();
    return s;
  }

  [[nodiscard]] Bytes decode(const CodedStream& s) const {
    if (s.algorithm != Algorithm::ctw) throw CorruptStreamError("not a CTW stream");
    if (s.memory_fingerprint != fingerprint_)
      throw SyncError("memory fingerprint mismatch: decoder memory differs from encoder memory");
    if (s.parameter != opts_.depth)
      throw SyncError("context depth mismatch: stream uses " + std::to_string(s.parameter) + ", decoder " +
                      std::to_string(opts_.depth));
    Bytes out;
    if (s.original_length == 0) {
      if (!s.payload.empty()) throw CorruptStreamError("empty CTW stream carries a payload");
      return out;
    }
    if (s.payload.empty()) throw CorruptStreamError("CTW payload missing");
    out.reserve(std::min<std::uint64_t>(s.original_length, std::uint64_t{1} << 26));

    ContextTree tree = primed_;
    ArithmeticDecoder dec(s.payload);
    for (std::uint64_t n = 0; n < s.original_length; ++n) {
      int byte = 0;
      for (int i = 0; i < 8; ++i) {
        const int bit = dec.decode(quantize_probability(tree.prepare()));
        tree.commit(bit, opts_.adapt);
        byte = (byte << 1) | bit;
      }
      out.push_back(static_cast<std::uint8_t>(byte));
    }
    dec.finish();
    return out;
  }

 private:
  CtwOptions opts_;
  ContextTree primed_;
  std::uint64_t fingerprint_;
};

/// Probability that the next bit is 0 under the tree's current model.
inline double ctw_predict(const ContextTree& tree, BitContext context) { return tree.predict(context); }

inline CodedStream ctw_encode(ByteView input, ByteView memory, int depth = kDefaultCtwDepth) {
  return CtwCodec(memory, {depth, true}).encode(input);
}

/// `depth` defaults to the value recorded in the stream header.
inline Bytes ctw_decode(const CodedStream& stream, ByteView memory, std::optional<int> depth = std::nullopt) {
  check_fingerprint(stream, memory);
  const int d = depth.value_or(stream.parameter);
  return CtwCodec(memory, {d, true}).decode(stream);
}

}  // namespace netmemo
