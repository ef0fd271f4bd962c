#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "medtok/random.hpp"
#include "medtok/synth.hpp"
#include "medtok/trc.hpp"

using namespace medtok;
using namespace medtok::trc;
using L = RelationLabel;

namespace {

Record rec(std::string text, std::string id = "r1") { return {std::move(id), "onc", "other", std::move(text), {}}; }

EventPair labeled(std::string record, std::size_t i, L gold, std::optional<L> pred = std::nullopt) {
  EventPair p;
  p.e1 = {record, 10 * i, 10 * i + 2, "aa", "aa", EventSource::external};
  p.e2 = {record, 10 * i + 5, 10 * i + 7, "bb", "bb", EventSource::external};
  p.gold = gold;
  p.predicted = pred;
  return p;
}

std::vector<EventPair> with_counts(const LabelCounts& counts) {
  std::vector<EventPair> out;
  std::size_t n = 0;
  for (std::size_t l = 0; l < counts.size(); ++l) {
    for (std::uint64_t k = 0; k < counts[l]; ++k, ++n) out.push_back(labeled("p" + std::to_string(n), 0, static_cast<L>(l)));
  }
  return out;
}

// Confusion-matrix oracle written independently of detail::score.
double oracle_weighted_f1(const std::vector<L>& gold, const std::vector<L>& pred) {
  double m[4][4] = {};
  for (std::size_t i = 0; i < gold.size(); ++i) m[label_index(gold[i])][label_index(pred[i])] += 1;
  double total = 0;
  for (int c = 0; c < 4; ++c) {
    double row = 0, col = 0;
    for (int k = 0; k < 4; ++k) {
      row += m[c][k];
      col += m[k][c];
    }
    const double f1 = row + col > 0 ? 2 * m[c][c] / (row + col) : 0;
    total += row * f1;
  }
  return gold.empty() ? 0 : total / static_cast<double>(gold.size());
}

bool close(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)); }

}  // namespace

TEST(Labels, ParseAndPrint) {
  EXPECT_EQ(parse_label("before"), L::before);
  EXPECT_EQ(parse_label("VAGUE"), L::vague);
  EXPECT_EQ(to_string(L::equal), "EQUAL");
  EXPECT_THROW(parse_label("SIMULTANEOUS"), ValidationError);
}

TEST(Marking, NoTermsFound) {
  const std::vector<std::string> terms{"טמוקסיפן"};
  EXPECT_TRUE(mark_events_terms(rec("אין כאן אירוע"), terms).empty());
  EXPECT_THROW(mark_events_terms(rec("x"), std::vector<std::string>{}), ValidationError);
}

TEST(Marking, ProcliticAbsorbedInSurface) {
  const std::vector<std::string> terms{"טמוקסיפן"};
  const auto ev = mark_events_terms(rec("החלה וטמוקסיפן היום"), terms);
  ASSERT_EQ(ev.size(), 1u);
  EXPECT_EQ(ev[0].surface, "וטמוקסיפן");
  EXPECT_EQ(ev[0].term, "טמוקסיפן");
  EXPECT_EQ(ev[0].start, 5u);
  EXPECT_EQ(ev[0].end, 14u);
  EXPECT_EQ(ev[0].source, EventSource::term_list);
}

TEST(Marking, LongestTermWins) {
  const std::vector<std::string> terms{"CT", "CT scan"};
  const auto ev = mark_events_terms(rec("did CT scan then CT"), terms);
  ASSERT_EQ(ev.size(), 2u);
  EXPECT_EQ(ev[0].term, "CT scan");
  EXPECT_EQ(ev[1].term, "CT");
  EXPECT_LT(ev[0].end, ev[1].start);
}

TEST(Import, SortsAndValidates) {
  const auto r = rec("abcdefghij");
  EXPECT_TRUE(import_events(r, {}).empty());
  const auto ev = import_events(r, {{5, 7}, {0, 2}});
  ASSERT_EQ(ev.size(), 2u);
  EXPECT_EQ(ev[0].surface, "ab");
  EXPECT_EQ(ev[1].surface, "fg");
  EXPECT_EQ(ev[1].source, EventSource::external);
  EXPECT_THROW(import_events(r, {{0, 3}, {2, 4}}), ValidationError);
  EXPECT_THROW(import_events(r, {{8, 11}}), ValidationError);
  EXPECT_THROW(import_events(r, {{3, 3}}), ValidationError);
}

TEST(Sentences, HardPunctuation) {
  EXPECT_EQ(split_sentences("a. b? c"), (std::vector<Span>{{0, 2}, {2, 5}, {5, 7}}));
  EXPECT_EQ(split_sentences("bp 120.5 ok.").size(), 1u);
  EXPECT_TRUE(split_sentences("").empty());
  EXPECT_EQ(split_sentences("x!?\ny"), (std::vector<Span>{{0, 4}, {4, 5}}));
  EXPECT_EQ(split_sentences("end.  "), (std::vector<Span>{{0, 6}}));
}

TEST(Sentences, CoverTextWithoutGaps) {
  Rng rng(1);
  const std::u32string chars = U"ab 1.?!\n";
  for (int k = 0; k < 500; ++k) {
    std::u32string t;
    for (int i = 0; i < rng.between(0, 30); ++i) t.push_back(chars[rng.below(chars.size())]);
    const auto s = split_sentences(std::u32string_view(t));
    std::size_t pos = 0;
    for (const auto& [a, b] : s) {
      EXPECT_EQ(a, pos);
      EXPECT_LT(a, b);
      pos = b;
    }
    EXPECT_EQ(pos, t.size());
  }
}

TEST(Pairs, Window) {
  const std::string text = "a b. c. d e.";
  const auto sent = split_sentences(text);
  ASSERT_EQ(sent.size(), 3u);
  const auto r = rec(text);
  auto ev = import_events(r, {{0, 1}, {2, 3}});
  EXPECT_EQ(generate_pairs(text, ev, sent).size(), 1u);
  ev = import_events(r, {{0, 1}, {8, 9}});
  EXPECT_TRUE(generate_pairs(text, ev, sent).empty());
  ev = import_events(r, {{0, 1}, {2, 3}, {5, 6}});
  const auto pairs = generate_pairs(text, ev, sent);
  ASSERT_EQ(pairs.size(), 3u);
  EXPECT_EQ(pairs[2].e1.surface, "b");
  EXPECT_EQ(pairs[2].e2.surface, "c");
  EXPECT_EQ(pairs[2].context, "a b. c.");
  EXPECT_EQ(pairs[0].context, "a b.");
  for (const auto& p : pairs) EXPECT_LT(p.e1.end, p.e2.start + 1);
}

TEST(Pairs, UnsortedEventsRejected) {
  const std::string text = "a b.";
  auto ev = import_events(rec(text), {{0, 1}, {2, 3}});
  std::swap(ev[0], ev[1]);
  EXPECT_THROW(generate_pairs(text, ev, split_sentences(text)), ValidationError);
}

TEST(Clip, MedTrcArithmetic) {
  const auto clipped = clip_dataset(with_counts({2756, 826, 572, 108, 0}), 1);
  EXPECT_EQ(count_labels(clipped), (LabelCounts{826, 826, 572, 108, 0}));
  EXPECT_EQ(clipped.size(), 2332u);
}

TEST(Clip, OncTrcArithmetic) {
  const auto clipped = clip_dataset(with_counts({1432, 381, 416, 148, 0}), 1);
  EXPECT_EQ(count_labels(clipped), (LabelCounts{416, 381, 416, 148, 0}));
}

TEST(Clip, BalancedUnchangedAndOrderStable) {
  const auto in = with_counts({3, 3, 1, 0, 0});
  EXPECT_EQ(clip_dataset(in, 4), in);
  auto big = with_counts({50, 10, 5, 5, 0});
  shuffle(big, *std::make_unique<Rng>(2));
  const auto out = clip_dataset(big, 9);
  std::size_t j = 0;
  for (const auto& p : big) {
    if (j < out.size() && out[j] == p) ++j;
  }
  EXPECT_EQ(j, out.size());
  EXPECT_EQ(clip_dataset(big, 9), out);
}

TEST(Clip, Preconditions) {
  EXPECT_THROW(clip_dataset(with_counts({5, 1, 1, 1, 1}), 1), ValidationError);
  EXPECT_THROW(clip_dataset(with_counts({2, 3, 0, 0, 0}), 1), ValidationError);
}

TEST(Split, MedTrcSizes) {
  const auto clipped = clip_dataset(with_counts({2756, 826, 572, 108, 0}), 1);
  const auto s = split_train_test(clipped, 0.2157, 3);
  EXPECT_EQ(s.test.size(), 503u);
  EXPECT_EQ(s.train.size(), 1829u);
  const auto again = split_train_test(clipped, 0.2157, 3);
  EXPECT_EQ(again.test, s.test);
}

TEST(Split, RecordsNeverStraddle) {
  std::vector<EventPair> pairs;
  for (int r = 0; r < 40; ++r) {
    for (std::size_t k = 0; k < 1 + static_cast<std::size_t>(r % 4); ++k) pairs.push_back(labeled("rec" + std::to_string(r), k, static_cast<L>((r + k) % 4)));
  }
  const auto s = split_train_test(pairs, 0.25, 8);
  std::set<std::string> train_ids, test_ids;
  for (const auto& p : s.train) train_ids.insert(p.e1.record_id);
  for (const auto& p : s.test) test_ids.insert(p.e1.record_id);
  for (const auto& id : test_ids) EXPECT_FALSE(train_ids.contains(id));
  EXPECT_EQ(s.train.size() + s.test.size(), pairs.size());
  EXPECT_FALSE(s.test.empty());
}

TEST(Split, SingletonLabelStaysInTrain) {
  std::vector<EventPair> pairs{labeled("a", 0, L::before), labeled("b", 0, L::before), labeled("c", 0, L::vague)};
  const auto s = split_train_test(pairs, 0.5, 1);
  ASSERT_EQ(s.warnings.size(), 1u);
  for (const auto& p : s.test) EXPECT_NE(p.e1.record_id, "c");
  EXPECT_THROW(split_train_test(pairs, 1.0, 1), ValidationError);
}

TEST(Split, TwoRecordsOnePerSide) {
  std::vector<EventPair> pairs{labeled("a", 0, L::before), labeled("b", 0, L::before)};
  const auto s = split_train_test(pairs, 0.5, 1);
  EXPECT_EQ(s.train.size(), 1u);
  EXPECT_EQ(s.test.size(), 1u);
}

TEST(Baseline, AllBefore) {
  EXPECT_TRUE(predict_baseline({}, BaselineStrategy::majority).empty());
  const auto clipped = clip_dataset(with_counts({2756, 826, 572, 108, 0}), 1);
  for (auto strategy : {BaselineStrategy::majority, BaselineStrategy::textual_order}) {
    const auto pred = predict_baseline(clipped, strategy);
    const auto r = evaluate(pred);
    EXPECT_EQ(r.per_class[0].recall, 1.0);
    EXPECT_EQ(r.per_class[1].recall, 0.0);
    EXPECT_EQ(r.per_class[2].recall, 0.0);
    EXPECT_EQ(r.per_class[3].recall, 0.0);
  }
}

TEST(Evaluate, HandComputedExample) {
  const std::vector<L> gold{L::before, L::before, L::after, L::vague};
  const std::vector<L> pred{L::before, L::after, L::after, L::before};
  std::vector<EventPair> pairs;
  for (std::size_t i = 0; i < 4; ++i) pairs.push_back(labeled("r", i, gold[i], pred[i]));
  const auto r = evaluate(pairs);
  EXPECT_NEAR(r.per_class[0].f1, 0.5, 1e-15);
  EXPECT_NEAR(r.per_class[1].f1, 2.0 / 3.0, 1e-15);
  EXPECT_EQ(r.per_class[3].support, 1u);
  EXPECT_NEAR(r.weighted_f1, 5.0 / 12.0, 1e-15);
  EXPECT_NEAR(r.relaxed_f1, 2.0 / 3.0, 1e-15);
  EXPECT_EQ(r.discarded_vague_errors, 1u);
}

TEST(Evaluate, PerfectAndNoVague) {
  std::vector<EventPair> pairs{labeled("r", 0, L::before, L::before), labeled("r", 1, L::equal, L::equal)};
  auto r = evaluate(pairs);
  EXPECT_EQ(r.weighted_f1, 1.0);
  EXPECT_EQ(r.relaxed_f1, 1.0);
  pairs[1].predicted = L::after;
  r = evaluate(pairs);
  EXPECT_EQ(r.relaxed_f1, r.weighted_f1);
}

TEST(Evaluate, Errors) {
  EXPECT_THROW(evaluate({}), ValidationError);
  EXPECT_THROW(evaluate(std::vector<EventPair>{labeled("r", 0, L::before)}), ValidationError);
  EXPECT_THROW(evaluate(std::vector<EventPair>{labeled("r", 0, L::invalid, L::before)}), ValidationError);
}

TEST(Evaluate, ExhaustiveSmallCasesMatchOracle) {
  for (std::size_t n = 1; n <= 3; ++n) {
    std::size_t combos = 1;
    for (std::size_t i = 0; i < 2 * n; ++i) combos *= 4;
    for (std::size_t code = 0; code < combos; ++code) {
      std::vector<L> gold(n), pred(n);
      std::size_t c = code;
      for (std::size_t i = 0; i < n; ++i, c /= 16) {
        gold[i] = static_cast<L>(c % 4);
        pred[i] = static_cast<L>((c / 4) % 4);
      }
      std::vector<EventPair> pairs;
      std::vector<L> rg, rp;
      for (std::size_t i = 0; i < n; ++i) {
        pairs.push_back(labeled("r", i, gold[i], pred[i]));
        if (!(gold[i] == L::vague && pred[i] != L::vague)) {
          rg.push_back(gold[i]);
          rp.push_back(pred[i]);
        }
      }
      const auto r = evaluate(pairs);
      ASSERT_TRUE(close(r.weighted_f1, oracle_weighted_f1(gold, pred))) << code;
      ASSERT_TRUE(close(r.relaxed_f1, oracle_weighted_f1(rg, rp))) << code;
    }
  }
}

TEST(Json, PairRoundTrip) {
  auto p = labeled("r9", 1, L::equal, L::after);
  p.confidence = 0.25;
  p.context = "ctx \"q\"";
  p.context_span = {3, 40};
  std::ostringstream out;
  write_pairs(out, std::vector<EventPair>{p});
  std::string line = out.str();
  line.pop_back();
  EXPECT_EQ(parse_pair(line), p);
  auto bare = labeled("r9", 1, L::vague);
  EXPECT_EQ(parse_pair(dump_line(to_json(bare))), bare);
}
