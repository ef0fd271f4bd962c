#include <gtest/gtest.h>

#include <atomic>
#include <stdexcept>
#include <vector>

#include "medtok/parallel.hpp"
#include "medtok/random.hpp"
#include "medtok/unicode.hpp"

using namespace medtok;

TEST(Unicode, DecodeEncodeRoundTrip) {
  const std::string s = "abc שלום 😀";
  const auto cps = unicode::decode(s);
  EXPECT_EQ(cps.size(), 10u);
  EXPECT_EQ(unicode::encode(cps), s);
  EXPECT_EQ(unicode::count_scalars(s), 10u);
}

TEST(Unicode, MalformedUtf8Throws) {
  EXPECT_THROW(unicode::decode("ab\xC3"), ValidationError);
  EXPECT_THROW(unicode::decode("\xFF"), ValidationError);
}

TEST(Unicode, NfcComposes) {
  // e + combining acute
  EXPECT_EQ(unicode::nfc("e\xCC\x81"), "\xC3\xA9");
  EXPECT_EQ(unicode::nfc("plain"), "plain");
}

TEST(Unicode, CharacterClasses) {
  EXPECT_TRUE(unicode::is_punct(U','));
  EXPECT_TRUE(unicode::is_punct(U'-'));
  EXPECT_TRUE(unicode::is_punct(U'$'));
  EXPECT_FALSE(unicode::is_punct(U'א'));
  EXPECT_TRUE(unicode::is_word_char(U'א'));
  EXPECT_TRUE(unicode::is_word_char(U'ָ'));  // qamats
  EXPECT_TRUE(unicode::is_space(U' '));
  EXPECT_EQ(unicode::trim("  x y \n"), "x y");
  EXPECT_TRUE(unicode::is_blank(" \t "));
}

TEST(Random, DeriveSeedSeparatesSalts) {
  EXPECT_NE(derive_seed(1, "a"), derive_seed(1, "b"));
  EXPECT_NE(derive_seed(1, "a"), derive_seed(2, "a"));
  EXPECT_EQ(derive_seed(7, "x"), derive_seed(7, "x"));
}

TEST(Random, BoundedDrawsStayInRange) {
  Rng rng(42);
  for (int i = 0; i < 10000; ++i) {
    EXPECT_LT(rng.below(7), 7u);
    const auto v = rng.between(-3, 3);
    EXPECT_GE(v, -3);
    EXPECT_LE(v, 3);
    const double u = rng.unit();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}

TEST(Random, ShuffleIsPermutationAndSeeded) {
  std::vector<int> a(50), b;
  for (int i = 0; i < 50; ++i) a[i] = i;
  b = a;
  Rng r1(9), r2(9);
  shuffle(a, r1);
  shuffle(b, r2);
  EXPECT_EQ(a, b);
  auto sorted = a;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 50; ++i) EXPECT_EQ(sorted[i], i);
}

TEST(Parallel, ChunksCoverRangeOnce) {
  for (std::size_t threads : {1u, 3u, 8u}) {
    std::vector<std::atomic<int>> hits(101);
    parallel_for(hits.size(), threads, [&](std::size_t i) { ++hits[i]; });
    for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
  }
}

TEST(Parallel, LowestChunkExceptionWins) {
  try {
    parallel_chunks(8, 4, [](std::size_t chunk, std::size_t, std::size_t) {
      if (chunk >= 1) throw std::runtime_error("chunk " + std::to_string(chunk));
    });
    FAIL() << "expected an exception";
  } catch (const std::runtime_error& e) {
    EXPECT_STREQ(e.what(), "chunk 1");
  }
}
