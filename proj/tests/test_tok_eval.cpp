#include <gtest/gtest.h>

#include <cmath>

#include "medtok/tok_eval.hpp"

using namespace medtok;
using tok::SegmentMode;

namespace {

std::vector<Record> records_of(const std::vector<std::string>& texts) {
  std::vector<Record> out;
  for (std::size_t i = 0; i < texts.size(); ++i) out.push_back({"r" + std::to_string(i), "d", "other", texts[i], {}});
  return out;
}

Vocabulary vocab_of(std::vector<std::string> rest) {
  auto all = default_specials();
  all.insert(all.end(), rest.begin(), rest.end());
  return Vocabulary(std::move(all));
}

}  // namespace

TEST(Evaluate, WordsInVocabGiveRatioOne) {
  const auto r = eval::evaluate(vocab_of({"ab", "cd"}), records_of({"ab cd ab"}), SegmentMode::greedy);
  EXPECT_EQ(r.ctc, 3u);
  EXPECT_EQ(r.word_count, 3u);
  EXPECT_DOUBLE_EQ(r.cr, 1.0);
}

TEST(Evaluate, CharacterLevel) {
  const auto v = vocab_of({"a", "##b"});
  for (auto mode : {SegmentMode::greedy, SegmentMode::flota}) {
    const auto r = eval::evaluate(v, records_of({"ab ab"}), mode);
    EXPECT_EQ(r.ctc, 4u);
    EXPECT_DOUBLE_EQ(r.cr, 2.0);
  }
}

TEST(Evaluate, PunctuationCountsTowardItsWord) {
  const auto r = eval::evaluate(vocab_of({"ab", ","}), records_of({"ab, ab"}), SegmentMode::greedy);
  EXPECT_EQ(r.word_count, 2u);
  EXPECT_EQ(r.ctc, 3u);
  EXPECT_DOUBLE_EQ(r.cr, 1.5);
}

TEST(Evaluate, UnknownWordsStillCountOnce) {
  const auto r = eval::evaluate(vocab_of({"a"}), records_of({"zz a q"}), SegmentMode::greedy);
  EXPECT_EQ(r.ctc, 3u);
  EXPECT_GE(r.ctc, r.word_count);
}

TEST(Evaluate, EmptyCorpusRejected) {
  EXPECT_THROW(eval::evaluate(vocab_of({}), {}, SegmentMode::greedy), ValidationError);
}

TEST(Evaluate, ThreadCountDoesNotMatter) {
  std::vector<std::string> texts;
  for (int i = 0; i < 200; ++i) texts.push_back("ab abab b" + std::string(static_cast<std::size_t>(i % 7), 'a'));
  const auto recs = records_of(texts);
  const auto v = vocab_of({"a", "##a", "##b", "b", "ab"});
  const auto one = eval::evaluate(v, recs, SegmentMode::flota, 1);
  const auto many = eval::evaluate(v, recs, SegmentMode::flota, 8);
  EXPECT_EQ(one.ctc, many.ctc);
  EXPECT_EQ(one.word_count, many.word_count);
  EXPECT_NEAR(one.cr * static_cast<double>(one.word_count), static_cast<double>(one.ctc), 1e-12 * one.ctc);
}

TEST(Multiseed, WholePoolEqualsEvaluate) {
  const auto recs = records_of({"ab a", "b b b", "ab"});
  const auto v = vocab_of({"a", "##b", "b"});
  const std::vector<std::uint64_t> seeds{3};
  const auto m = eval::evaluate_multiseed(v, recs, recs.size(), seeds, SegmentMode::greedy);
  const auto e = eval::evaluate(v, recs, SegmentMode::greedy);
  EXPECT_EQ(m.ctc, e.ctc);
  EXPECT_EQ(m.word_count, e.word_count);
  EXPECT_DOUBLE_EQ(m.mean_cr, e.cr);
}

TEST(Multiseed, MeansMatchRecomputation) {
  std::vector<std::string> texts;
  for (int i = 0; i < 40; ++i) texts.push_back(std::string(static_cast<std::size_t>(1 + i % 5), 'a') + " b");
  const auto recs = records_of(texts);
  const auto v = vocab_of({"a", "##a", "b"});
  const std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  const auto r = eval::evaluate_multiseed(v, recs, 10, seeds, SegmentMode::greedy);
  ASSERT_EQ(r.per_seed.size(), 5u);
  double ctc = 0, cr = 0;
  for (const auto& row : r.per_seed) {
    ctc += static_cast<double>(row.ctc);
    cr += static_cast<double>(row.ctc) / static_cast<double>(row.word_count);
  }
  EXPECT_DOUBLE_EQ(r.mean_ctc, ctc / 5);
  EXPECT_NEAR(r.mean_cr, cr / 5, 1e-12);
  EXPECT_THROW(eval::evaluate_multiseed(v, recs, 41, seeds, SegmentMode::greedy), ValidationError);
}

TEST(Compare, SortedByCompressionWithDeltas) {
  auto report = [](double cr) {
    eval::TokenizerReport r;
    r.mean_cr = cr;
    r.mean_ctc = cr * 1000;
    return r;
  };
  const std::vector<std::pair<std::string, eval::TokenizerReport>> in{
      {"base", report(1.45)}, {"simple", report(1.44)}, {"adalm", report(1.34)}};
  const auto rows = eval::compare(in);
  EXPECT_EQ(rows[0].name, "adalm");
  EXPECT_EQ(rows[1].name, "simple");
  EXPECT_EQ(rows[2].name, "base");
  EXPECT_NEAR(rows[0].delta_cr, -0.11, 1e-12);
}

TEST(Compare, TiesKeepInputOrder) {
  eval::TokenizerReport r;
  r.mean_cr = 1.2;
  const std::vector<std::pair<std::string, eval::TokenizerReport>> in{{"x", r}, {"y", r}, {"z", r}};
  const auto rows = eval::compare(in);
  EXPECT_EQ(rows[0].name, "x");
  EXPECT_EQ(rows[2].name, "z");
  EXPECT_THROW(eval::compare(std::span(in).first(1)), ValidationError);
}
