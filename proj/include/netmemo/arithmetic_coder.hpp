#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "netmemo/bytes.hpp"
#include "netmemo/error.hpp"

namespace netmemo {

/// Binary probabilities are handed to the coder as P(bit = 0) in units of
/// 2^-16, clamped to [1, 2^16 - 1] so neither symbol gets a zero-width interval.
inline constexpr int kProbabilityBits = 16;
inline constexpr std::uint32_t kProbabilityOne = 1u << kProbabilityBits;

inline std::uint32_t quantize_probability(double p_zero) {
  double scaled = std::nearbyint(p_zero * kProbabilityOne);
  return static_cast<std::uint32_t>(std::clamp(scaled, 1.0, static_cast<double>(kProbabilityOne - 1)));
}

namespace detail {
inline constexpr std::uint64_t kTop = 0xFFFFFFFFull;
inline constexpr std::uint64_t kHalf = 0x80000000ull;
inline constexpr std::uint64_t kQuarter = 0x40000000ull;
inline constexpr std::uint64_t kThreeQuarters = 0xC0000000ull;
}  // namespace detail

/// 32-bit integer arithmetic encoder with underflow (pending bit) handling.
class ArithmeticEncoder {
 public:
  void encode(int bit, std::uint32_t p_zero) {
    const std::uint64_t range = high_ - low_ + 1;
    const std::uint64_t split = low_ + ((range * p_zero) >> kProbabilityBits) - 1;
    if (bit == 0)
      high_ = split;
    else
      low_ = split + 1;

    for (;;) {
      if (high_ < detail::kHalf) {
        emit_with_pending(0);
      } else if (low_ >= detail::kHalf) {
        emit_with_pending(1);
        low_ -= detail::kHalf;
        high_ -= detail::kHalf;
      } else if (low_ >= detail::kQuarter && high_ < detail::kThreeQuarters) {
        ++pending_;
        low_ -= detail::kQuarter;
        high_ -= detail::kQuarter;
      } else {
        break;
      }
      low_ <<= 1;
      high_ = (high_ << 1) | 1;
    }
  }

  /// Emits two disambiguating bits (plus pending) and pads to a byte.
  Bytes finish() {
    ++pending_;
    emit_with_pending(low_ < detail::kQuarter ? 0 : 1);
    while (nbits_ != 0) put_bit(0);
    return std::move(out_);
  }

 private:
  void emit_with_pending(int bit) {
    put_bit(bit);
    for (; pending_ > 0; --pending_) put_bit(bit ^ 1);
  }

  void put_bit(int bit) {
    current_ = static_cast<std::uint8_t>((current_ << 1) | bit);
    if (++nbits_ == 8) {
      out_.push_back(current_);
      current_ = 0;
      nbits_ = 0;
    }
  }

  std::uint64_t low_ = 0;
  std::uint64_t high_ = detail::kTop;
  std::uint64_t pending_ = 0;
  Bytes out_;
  std::uint8_t current_ = 0;
  int nbits_ = 0;
};

/// Mirror of ArithmeticEncoder. Bits past the end of the payload read as zero;
/// finish() verifies that exactly the expected number of such bits was used,
/// which catches truncated or padded payloads.
class ArithmeticDecoder {
 public:
  explicit ArithmeticDecoder(ByteView payload) : data_(payload) {
    for (int i = 0; i < 32; ++i) code_ = (code_ << 1) | next_bit();
  }

  int decode(std::uint32_t p_zero) {
    const std::uint64_t range = high_ - low_ + 1;
    const std::uint64_t split = low_ + ((range * p_zero) >> kProbabilityBits) - 1;
    int bit;
    if (code_ <= split) {
      bit = 0;
      high_ = split;
    } else {
      bit = 1;
      low_ = split + 1;
    }

    for (;;) {
      if (high_ < detail::kHalf) {
        // nothing to subtract
      } else if (low_ >= detail::kHalf) {
        low_ -= detail::kHalf;
        high_ -= detail::kHalf;
        code_ -= detail::kHalf;
      } else if (low_ >= detail::kQuarter && high_ < detail::kThreeQuarters) {
        low_ -= detail::kQuarter;
        high_ -= detail::kQuarter;
        code_ -= detail::kQuarter;
      } else {
        break;
      }
      low_ <<= 1;
      high_ = (high_ << 1) | 1;
      code_ = (code_ << 1) | next_bit();
    }
    return bit;
  }

  /// The encoder's flush leaves the decoder exactly 30 bits ahead of the last
  /// real bit, minus the zero padding of the final byte.
  void finish() const {
    const std::int64_t over = static_cast<std::int64_t>(bits_read_) - static_cast<std::int64_t>(data_.size() * 8);
    if (over > 30) throw CorruptStreamError("arithmetic payload truncated");
    if (over < 23) throw CorruptStreamError("arithmetic payload has trailing data");
  }

 private:
  std::uint64_t next_bit() {
    const std::size_t byte = bits_read_ >> 3;
    std::uint64_t bit = 0;
    if (byte < data_.size()) bit = (data_[byte] >> (7 - (bits_read_ & 7))) & 1;
    ++bits_read_;
    // Far more phantom bits than any valid stream needs: stop early instead of
    // decoding garbage for the rest of a long header length.
    if (bits_read_ > data_.size() * 8 + 64) throw CorruptStreamError("arithmetic payload truncated");
    return bit;
  }

  ByteView data_;
  std::uint64_t low_ = 0;
  std::uint64_t high_ = detail::kTop;
  std::uint64_t code_ = 0;
  std::size_t bits_read_ = 0;
};

}  // namespace netmemo
