#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "netmemo/bytes.hpp"
#include "netmemo/error.hpp"

namespace netmemo {

enum class Algorithm : std::uint8_t { ctw = 1, lz = 2 };

inline const char* algorithm_name(Algorithm a) { return a == Algorithm::ctw ? "ctw" : "lz"; }

/// Framed compressed output.
///
/// On-disk layout, all multi-byte integers big-endian:
///
///     "NMC1" | version u8 = 1 | algorithm u8 | parameter u16
///            | original length (unsigned LEB128)
///            | memory fingerprint u64 | payload ...
///
/// `parameter` is the context depth for CTW and window_size / 256 for LZ.
struct CodedStream {
  static constexpr std::array<std::uint8_t, 4> magic{'N', 'M', 'C', '1'};
  static constexpr std::uint8_t version = 1;

  Algorithm algorithm = Algorithm::ctw;
  std::uint16_t parameter = 0;
  std::uint64_t original_length = 0;
  std::uint64_t memory_fingerprint = 0;
  Bytes payload;

  [[nodiscard]] Bytes serialize() const {
    Bytes out(magic.begin(), magic.end());
    out.push_back(version);
    out.push_back(static_cast<std::uint8_t>(algorithm));
    put_be16(out, parameter);
    put_leb128(out, original_length);
    put_be64(out, memory_fingerprint);
    out.insert(out.end(), payload.begin(), payload.end());
    return out;
  }

  [[nodiscard]] std::size_t size() const { return serialize().size(); }

  static CodedStream parse(ByteView data) {
    std::size_t pos = 0;
    auto need = [&](std::size_t n) {
      if (data.size() - pos < n) throw CorruptStreamError("coded stream: truncated header");
    };
    need(magic.size() + 4);
    for (std::uint8_t m : magic) {
      if (data[pos++] != m) throw CorruptStreamError("coded stream: bad magic");
    }
    if (data[pos++] != version) throw CorruptStreamError("coded stream: unsupported version");

    CodedStream s;
    std::uint8_t algo = data[pos++];
    if (algo != 1 && algo != 2) throw CorruptStreamError("coded stream: unknown algorithm id " + std::to_string(algo));
    s.algorithm = static_cast<Algorithm>(algo);
    s.parameter = static_cast<std::uint16_t>((data[pos] << 8) | data[pos + 1]);
    pos += 2;

    int shift = 0;
    for (;;) {
      need(1);
      std::uint8_t byte = data[pos++];
      if (shift == 63 && (byte & 0x7e) != 0) throw CorruptStreamError("coded stream: length overflows 64 bits");
      s.original_length |= static_cast<std::uint64_t>(byte & 0x7f) << shift;
      if ((byte & 0x80) == 0) break;
      shift += 7;
      if (shift > 63) throw CorruptStreamError("coded stream: length overflows 64 bits");
    }

    need(8);
    for (int i = 0; i < 8; ++i) s.memory_fingerprint = (s.memory_fingerprint << 8) | data[pos++];
    s.payload.assign(data.begin() + static_cast<std::ptrdiff_t>(pos), data.end());
    return s;
  }
};

/// Refuses to decode with a memory other than the one used for encoding.
inline void check_fingerprint(const CodedStream& s, ByteView memory) {
  if (memory_fingerprint(memory) != s.memory_fingerprint)
    throw SyncError("memory fingerprint mismatch: decoder memory differs from encoder memory");
}

}  // namespace netmemo
