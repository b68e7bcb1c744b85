#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "netmemo/gainbench.hpp"
#include "netmemo/lzdict.hpp"

using namespace netmemo;

namespace {

Bytes random_bytes(std::mt19937_64& rng, std::size_t n, unsigned alphabet = 256) {
  Bytes out(n);
  for (auto& b : out) b = static_cast<std::uint8_t>(rng() % alphabet);
  return out;
}

std::vector<LzToken> parse_tokens(ByteView memory, ByteView input, std::size_t window) {
  return SlidingWindow(memory, input, window).parse();
}

}  // namespace

TEST(LzEncode, EmptyInputGivesHeaderOnlyStream) {
  const Bytes memory = to_bytes("dictionary");
  const CodedStream s = lz_encode({}, memory, 4096);
  EXPECT_TRUE(s.payload.empty());
  EXPECT_EQ(s.algorithm, Algorithm::lz);
  EXPECT_EQ(s.parameter, 16);
  EXPECT_TRUE(lz_decode(s, memory).empty());
}

TEST(LzEncode, DefaultWindowIs32k) {
  EXPECT_EQ(kDefaultWindow, 32768u);
  EXPECT_EQ(lz_encode(to_bytes("x"), {}).parameter, 32768 / 256);
}

TEST(LzEncode, GreedyParseOfRepeatedPatternStartsWithMatchIntoMemory) {
  const Bytes memory = to_bytes("abc");
  const Bytes input = to_bytes("abcabcabc");
  const auto tokens = parse_tokens(memory, input, 32768);
  ASSERT_FALSE(tokens.empty());
  EXPECT_TRUE(tokens[0].is_match);
  EXPECT_EQ(tokens[0].offset, 3u);
  EXPECT_GE(tokens[0].length, 3u);
  // Overlapping copy covers the whole input in one token.
  EXPECT_EQ(tokens.size(), 1u);
  EXPECT_EQ(tokens[0].length, 9u);
  EXPECT_EQ(lz_decode(lz_encode(input, memory), memory), input);
}

TEST(LzEncode, NoMemoryStartsWithLiterals) {
  const auto tokens = parse_tokens({}, to_bytes("abcabcabc"), 32768);
  ASSERT_EQ(tokens.size(), 4u);
  EXPECT_EQ(tokens[0], LzToken::make_literal('a'));
  EXPECT_EQ(tokens[1], LzToken::make_literal('b'));
  EXPECT_EQ(tokens[2], LzToken::make_literal('c'));
  EXPECT_EQ(tokens[3], LzToken::make_match(3, 6));
}

TEST(LzEncode, InputEqualToMemoryUsesMaximalMatches) {
  std::mt19937_64 rng(4);
  for (std::size_t size : {std::size_t{300}, std::size_t{258}, std::size_t{1000}, std::size_t{32768}}) {
    const Bytes memory = random_bytes(rng, size);
    const auto tokens = parse_tokens(memory, memory, 32768);
    const std::size_t bound = (size + 257) / 258;
    const auto matches = std::count_if(tokens.begin(), tokens.end(), [](const LzToken& t) { return t.is_match; });
    EXPECT_LE(static_cast<std::size_t>(matches), bound) << size;
    // A tail shorter than the minimum match can only be literals.
    const std::size_t tail = size % 258 < kMinMatch ? size % 258 : 0;
    EXPECT_EQ(tokens.size() - static_cast<std::size_t>(matches), tail) << size;
    for (std::size_t i = 0; i + tail < tokens.size(); ++i) EXPECT_TRUE(tokens[i].is_match);
    EXPECT_EQ(lz_decode(lz_encode(memory, memory, 32768), memory), memory);
  }
}

TEST(LzEncode, TokensNeverReachBeforeBufferOrPastWindow) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t window = 256 * (1 + rng() % 16);
    const Bytes memory = random_bytes(rng, rng() % 6000, 4);
    const Bytes input = random_bytes(rng, rng() % 3000, 4);
    const auto tokens = parse_tokens(memory, input, window);
    std::size_t produced = 0;
    const std::size_t dict = std::min(memory.size(), window);
    for (const auto& t : tokens) {
      if (t.is_match) {
        EXPECT_GE(t.length, kMinMatch);
        EXPECT_LE(t.length, kMaxMatch);
        EXPECT_GE(t.offset, 1u);
        EXPECT_LE(t.offset, std::min(dict + produced, window));
        produced += t.length;
      } else {
        ++produced;
      }
    }
    EXPECT_EQ(produced, input.size());
  }
}

TEST(LzEncode, OnlyTheLastWindowBytesOfMemoryMatter) {
  std::mt19937_64 rng(9);
  const Bytes memory = random_bytes(rng, 10000, 8);
  const Bytes input = random_bytes(rng, 2000, 8);
  const Bytes tail(memory.end() - 1024, memory.end());
  EXPECT_EQ(parse_tokens(memory, input, 1024), parse_tokens(tail, input, 1024));
  EXPECT_EQ(lz_encode(input, memory, 1024).payload, lz_encode(input, tail, 1024).payload);
}

TEST(LzRoundTrip, RandomizedCorpora) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t window = 256 * (1 + rng() % 256);
    const unsigned alphabet = 1 + static_cast<unsigned>(rng() % 256);
    const Bytes memory = random_bytes(rng, rng() % 70000, alphabet);
    Bytes input = random_bytes(rng, rng() % 5000, alphabet);
    if (trial % 4 == 0 && memory.size() > 600) input.insert(input.end(), memory.end() - 600, memory.end());
    const CodedStream s = lz_encode(input, memory, window);
    ASSERT_EQ(lz_decode(CodedStream::parse(s.serialize()), memory), input) << "trial " << trial;
  }
}

TEST(LzDecode, MatchBeyondBufferIsCorruptStream) {
  const Bytes memory = to_bytes("12345");
  const CodedStream s = encode_tokens({LzToken::make_match(10, 3)}, 3, memory_fingerprint(memory), 32768);
  EXPECT_THROW(lz_decode(s, memory), CorruptStreamError);
  const CodedStream ok = encode_tokens({LzToken::make_match(5, 3)}, 3, memory_fingerprint(memory), 32768);
  EXPECT_EQ(lz_decode(ok, memory), to_bytes("123"));
}

TEST(LzDecode, MatchPastDeclaredLengthIsCorruptStream) {
  const Bytes memory = to_bytes("abcdef");
  const CodedStream s = encode_tokens({LzToken::make_match(6, 6)}, 4, memory_fingerprint(memory), 32768);
  EXPECT_THROW(lz_decode(s, memory), CorruptStreamError);
}

TEST(LzDecode, TruncatedPayloadIsCorruptStream) {
  std::mt19937_64 rng(2);
  const Bytes input = random_bytes(rng, 3000);
  CodedStream s = lz_encode(input, {});
  s.payload.resize(s.payload.size() / 3);
  EXPECT_THROW(lz_decode(s, {}), CorruptStreamError);
  s.payload.clear();
  EXPECT_THROW(lz_decode(s, {}), CorruptStreamError);
}

TEST(LzDecode, MismatchedMemoryOrWindowIsSynchronizationError) {
  const Bytes input = to_bytes("the quick brown fox jumps over the lazy dog");
  const CodedStream s = lz_encode(input, to_bytes("memory one"), 4096);
  EXPECT_THROW(lz_decode(s, to_bytes("memory two")), SyncError);
  EXPECT_THROW(lz_decode(s, to_bytes("memory one"), 8192), SyncError);
  EXPECT_EQ(lz_decode(s, to_bytes("memory one"), 4096), input);
}

TEST(LzDecode, NonLzStreamIsRejected) {
  CodedStream s = lz_encode(to_bytes("abc"), {});
  s.algorithm = Algorithm::ctw;
  EXPECT_THROW(lz_decode(s, {}), CorruptStreamError);
}

TEST(LzWindow, OutOfRangeWindowIsUsageError) {
  EXPECT_THROW(lz_encode(to_bytes("a"), {}, 128), UsageError);
  EXPECT_THROW(lz_encode(to_bytes("a"), {}, 65536 + 256), UsageError);
  EXPECT_THROW(lz_encode(to_bytes("a"), {}, 1000), UsageError);
  EXPECT_NO_THROW(lz_encode(to_bytes("a"), {}, 256));
  EXPECT_NO_THROW(lz_encode(to_bytes("a"), {}, 65536));
}

TEST(LzCompression, DictionaryHelpsOnRearrangedMemorySubstrings) {
  std::mt19937_64 rng(3);
  int wins = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const Bytes memory = random_bytes(rng, 8192);
    Bytes input;
    for (int piece = 0; piece < 8; ++piece) {
      const std::size_t len = 16 + rng() % 200;
      const std::size_t at = rng() % (memory.size() - len);
      input.insert(input.end(), memory.begin() + static_cast<std::ptrdiff_t>(at),
                   memory.begin() + static_cast<std::ptrdiff_t>(at + len));
    }
    if (lz_encode(input, memory).payload.size() < lz_encode(input, {}).payload.size()) ++wins;
  }
  EXPECT_GE(wins, 95);
}
