#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "netmemo/arithmetic_coder.hpp"
#include "netmemo/coded_stream.hpp"
#include "netmemo/context_tree.hpp"

namespace netmemo {

inline constexpr std::size_t kDefaultWindow = 32768;
inline constexpr std::size_t kMinWindow = 256;
inline constexpr std::size_t kMaxWindow = 65536;
inline constexpr std::uint32_t kMinMatch = 3;
inline constexpr std::uint32_t kMaxMatch = 258;
inline constexpr int kMaxChainProbes = 4096;

struct LzToken {
  bool is_match = false;
  std::uint8_t literal = 0;
  std::uint32_t offset = 0;  // 1..window_size
  std::uint32_t length = 0;  // kMinMatch..kMaxMatch

  static LzToken make_literal(std::uint8_t b) { return {false, b, 0, 0}; }
  static LzToken make_match(std::uint32_t offset, std::uint32_t length) { return {true, 0, offset, length}; }
  bool operator==(const LzToken&) const = default;
};

inline void check_window(std::size_t window_size) {
  if (window_size < kMinWindow || window_size > kMaxWindow || window_size % 256 != 0)
    throw UsageError("LZ window must be a multiple of 256 in [256, 65536], got " + std::to_string(window_size));
}

/// Dictionary (the last window_size bytes of memory) followed by the input,
/// with a 3-byte hash chain over every position inserted so far.
class SlidingWindow {
 public:
  SlidingWindow(ByteView memory, ByteView input, std::size_t window_size) : window_(window_size) {
    check_window(window_size);
    const std::size_t keep = std::min(memory.size(), window_size);
    data_.reserve(keep + input.size());
    data_.insert(data_.end(), memory.end() - static_cast<std::ptrdiff_t>(keep), memory.end());
    dict_len_ = data_.size();
    data_.insert(data_.end(), input.begin(), input.end());
    head_.assign(kHashSize, -1);
    prev_.assign(data_.size(), -1);
    for (std::size_t p = 0; p < dict_len_; ++p) insert(p);
  }

  [[nodiscard]] std::size_t dictionary_size() const { return dict_len_; }
  [[nodiscard]] std::size_t window_size() const { return window_; }

  /// Greedy longest match for the input byte at data position `pos`.
  [[nodiscard]] LzToken longest_match(std::size_t pos) const {
    LzToken best = LzToken::make_literal(data_[pos]);
    const std::size_t remaining = data_.size() - pos;
    if (remaining < kMinMatch) return best;
    const std::size_t max_len = std::min<std::size_t>(kMaxMatch, remaining);
    std::uint32_t best_len = kMinMatch - 1;
    std::int32_t cand = head_[hash(pos)];
    for (int probes = 0; cand >= 0 && probes < kMaxChainProbes; ++probes, cand = prev_[cand]) {
      const std::size_t offset = pos - static_cast<std::size_t>(cand);
      if (offset > window_) break;
      if (data_[cand + best_len] != data_[pos + best_len]) continue;
      std::size_t len = 0;
      // Overlapping copies (offset < length) are allowed.
      while (len < max_len && data_[cand + len] == data_[pos + len]) ++len;
      if (len > best_len) {
        best_len = static_cast<std::uint32_t>(len);
        best = LzToken::make_match(static_cast<std::uint32_t>(offset), best_len);
        if (len == max_len) break;
      }
    }
    return best;
  }

  /// Greedy parse of the whole input.
  [[nodiscard]] std::vector<LzToken> parse() {
    std::vector<LzToken> tokens;
    std::size_t pos = dict_len_;
    while (pos < data_.size()) {
      const LzToken t = longest_match(pos);
      tokens.push_back(t);
      const std::size_t advance = t.is_match ? t.length : 1;
      for (std::size_t i = 0; i < advance; ++i) insert(pos + i);
      pos += advance;
    }
    return tokens;
  }

 private:
  static constexpr int kHashBits = 16;
  static constexpr std::size_t kHashSize = std::size_t{1} << kHashBits;

  [[nodiscard]] std::size_t hash(std::size_t p) const {
    const std::uint32_t key = (std::uint32_t{data_[p]} << 16) | (std::uint32_t{data_[p + 1]} << 8) | data_[p + 2];
    return (key * 2654435761u) >> (32 - kHashBits);
  }

  void insert(std::size_t p) {
    if (p + kMinMatch > data_.size()) return;
    const std::size_t h = hash(p);
    prev_[p] = head_[h];
    head_[h] = static_cast<std::int32_t>(p);
  }

  std::size_t window_;
  Bytes data_;
  std::size_t dict_len_ = 0;
  std::vector<std::int32_t> head_;
  std::vector<std::int32_t> prev_;
};

namespace lz_detail {

/// Order-0 adaptive binary coding of the token bit stream: a depth-0 context
/// tree (a single KT estimator) drives the arithmetic coder.
class TokenWriter {
 public:
  void put(std::uint32_t value, int nbits) {
    for (int i = nbits - 1; i >= 0; --i) {
      const int bit = static_cast<int>((value >> i) & 1);
      enc_.encode(bit, quantize_probability(model_.prepare()));
      model_.commit(bit);
    }
  }
  Bytes finish() { return enc_.finish(); }

 private:
  ContextTree model_{0};
  ArithmeticEncoder enc_;
};

class TokenReader {
 public:
  explicit TokenReader(ByteView payload) : dec_(payload) {}
  std::uint32_t get(int nbits) {
    std::uint32_t v = 0;
    for (int i = 0; i < nbits; ++i) {
      const int bit = dec_.decode(quantize_probability(model_.prepare()));
      model_.commit(bit);
      v = (v << 1) | static_cast<std::uint32_t>(bit);
    }
    return v;
  }
  void finish() const { dec_.finish(); }

 private:
  ContextTree model_{0};
  ArithmeticDecoder dec_;
};

}  // namespace lz_detail

/// Serializes tokens (flag bit; literal: 8 bits; match: 16-bit offset-1 and
/// 8-bit length-3) and entropy-codes them. No validation: used by lz_encode
/// and by tests that need hand-built streams.
inline CodedStream encode_tokens(const std::vector<LzToken>& tokens, std::uint64_t original_length,
                                 std::uint64_t fingerprint, std::size_t window_size) {
  check_window(window_size);
  CodedStream s;
  s.algorithm = Algorithm::lz;
  s.parameter = static_cast<std::uint16_t>(window_size / 256);
  s.original_length = original_length;
  s.memory_fingerprint = fingerprint;
  if (tokens.empty()) return s;
  lz_detail::TokenWriter w;
  for (const LzToken& t : tokens) {
    if (t.is_match) {
      w.put(1, 1);
      w.put(t.offset - 1, 16);
      w.put(t.length - kMinMatch, 8);
    } else {
      w.put(0, 1);
      w.put(t.literal, 8);
    }
  }
  s.payload = w.finish();
  return s;
}

inline CodedStream lz_encode(ByteView input, ByteView memory, std::size_t window_size = kDefaultWindow) {
  check_window(window_size);
  SlidingWindow window(memory, input, window_size);
  return encode_tokens(window.parse(), input.size(), memory_fingerprint(memory), window_size);
}

/// `window_size` defaults to the value recorded in the stream header.
inline Bytes lz_decode(const CodedStream& s, ByteView memory, std::optional<std::size_t> window_size = std::nullopt) {
  if (s.algorithm != Algorithm::lz) throw CorruptStreamError("not an LZ stream");
  check_fingerprint(s, memory);
  const std::size_t header_window = std::size_t{s.parameter} * 256;
  if (header_window < kMinWindow || header_window > kMaxWindow) throw CorruptStreamError("LZ stream has invalid window field");
  const std::size_t window = window_size.value_or(header_window);
  check_window(window);
  if (window != header_window)
    throw SyncError("LZ window mismatch: stream uses " + std::to_string(header_window) + ", decoder " +
                    std::to_string(window));

  if (s.original_length == 0) {
    if (!s.payload.empty()) throw CorruptStreamError("empty LZ stream carries a payload");
    return {};
  }
  if (s.payload.empty()) throw CorruptStreamError("LZ payload missing");

  const std::size_t keep = std::min(memory.size(), window);
  Bytes buf(memory.end() - static_cast<std::ptrdiff_t>(keep), memory.end());
  const std::size_t dict_len = buf.size();
  buf.reserve(dict_len + std::min<std::uint64_t>(s.original_length, std::uint64_t{1} << 26));

  lz_detail::TokenReader r(s.payload);
  while (buf.size() - dict_len < s.original_length) {
    const std::uint64_t produced = buf.size() - dict_len;
    if (r.get(1) == 0) {
      buf.push_back(static_cast<std::uint8_t>(r.get(8)));
      continue;
    }
    const std::size_t offset = r.get(16) + 1;
    const std::size_t length = r.get(8) + kMinMatch;
    const std::size_t available = std::min(buf.size(), window);
    if (offset > available)
      throw CorruptStreamError("LZ match offset " + std::to_string(offset) + " exceeds buffer of " +
                               std::to_string(available) + " bytes");
    if (length > s.original_length - produced) throw CorruptStreamError("LZ match runs past declared length");
    const std::size_t from = buf.size() - offset;
    for (std::size_t i = 0; i < length; ++i) buf.push_back(buf[from + i]);
  }
  r.finish();
  return Bytes(buf.begin() + static_cast<std::ptrdiff_t>(dict_len), buf.end());
}

}  // namespace netmemo
