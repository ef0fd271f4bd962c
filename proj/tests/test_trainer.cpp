#include <gtest/gtest.h>

#include <map>
#include <set>

#include "medtok/random.hpp"
#include "medtok/wordpiece_trainer.hpp"

using namespace medtok;

namespace {

std::vector<Record> records_of(const std::vector<std::string>& texts) {
  std::vector<Record> out;
  for (std::size_t i = 0; i < texts.size(); ++i) out.push_back({"r" + std::to_string(i), "d", "other", texts[i], {}});
  return out;
}

// Straightforward re-count-everything trainer over string pieces.
std::vector<std::string> reference_train(const std::map<std::string, std::uint64_t>& counts, std::size_t target,
                                         std::uint64_t min_freq) {
  std::vector<std::string> vocab = default_specials();
  std::vector<std::pair<std::vector<std::string>, std::uint64_t>> words;
  std::set<std::string> alphabet;
  for (const auto& [w, c] : counts) {
    const auto cps = unicode::decode(w);
    std::vector<std::string> seq;
    for (std::size_t i = 0; i < cps.size(); ++i) {
      seq.push_back((i ? "##" : "") + unicode::encode(cps.substr(i, 1)));
      alphabet.insert(seq.back());
    }
    words.emplace_back(seq, c);
  }
  vocab.insert(vocab.end(), alphabet.begin(), alphabet.end());
  auto join = [](const std::string& a, const std::string& b) { return a + b.substr(2); };
  while (vocab.size() < target) {
    std::map<std::string, std::uint64_t> piece;
    std::map<std::pair<std::string, std::string>, std::uint64_t> pair;
    for (const auto& [seq, c] : words) {
      for (std::size_t i = 0; i < seq.size(); ++i) {
        piece[seq[i]] += c;
        if (i + 1 < seq.size()) pair[{seq[i], seq[i + 1]}] += c;
      }
    }
    std::optional<std::pair<std::string, std::string>> best;
    long double best_score = -1;
    std::uint64_t best_freq = 0;
    for (const auto& [p, f] : pair) {
      if (f < min_freq) continue;
      const long double score = static_cast<long double>(f) / (static_cast<long double>(piece[p.first]) * piece[p.second]);
      const bool wins = !best || score > best_score ||
                        (score == best_score && (f > best_freq || (f == best_freq && join(p.first, p.second) < join(best->first, best->second))));
      if (wins) {
        best = p;
        best_score = score;
        best_freq = f;
      }
    }
    if (!best) break;
    const std::string merged = join(best->first, best->second);
    for (auto& [seq, c] : words) {
      std::vector<std::string> next;
      for (std::size_t i = 0; i < seq.size(); ++i) {
        if (i + 1 < seq.size() && seq[i] == best->first && seq[i + 1] == best->second) {
          next.push_back(merged);
          ++i;
        } else {
          next.push_back(seq[i]);
        }
      }
      seq = std::move(next);
    }
    if (std::find(vocab.begin(), vocab.end(), merged) == vocab.end()) vocab.push_back(merged);
  }
  return vocab;
}

}  // namespace

TEST(Trainer, RepeatedWordBecomesOneToken) {
  const auto v = tok::train_wordpiece(records_of({"abab abab abab"}), 100, 1);
  EXPECT_TRUE(v.contains("abab"));
  EXPECT_FALSE(v.is_continuation("abab"));
  EXPECT_EQ(tok::segment_greedy("abab", v).tokens, std::vector<std::string>{"abab"});
}

TEST(Trainer, HandRunMergeOrder) {
  // a:1 ##b:2 ##a:1 per word; all three pairs score 1/2, same count, so the
  // smallest merged string goes first: "##ab", then "##bab", then "abab".
  const auto v = tok::train_wordpiece(records_of({"abab"}), 100, 1);
  const std::vector<std::string> tail(v.tokens().begin() + 5, v.tokens().end());
  EXPECT_EQ(tail, (std::vector<std::string>{"##a", "##b", "a", "##ab", "##bab", "abab"}));
}

TEST(Trainer, AlphabetSizedTargetIsCharacterLevel) {
  const auto recs = records_of({"abc cab"});
  // ##a ##b ##c a c
  const auto v = tok::train_wordpiece(recs, 5 + 5, 1);
  EXPECT_EQ(v.size(), 10u);
  for (const auto& t : v.tokens()) {
    if (v.is_special(t)) continue;
    EXPECT_EQ(unicode::count_scalars(v.is_continuation(t) ? t.substr(2) : t), 1u) << t;
  }
  EXPECT_THROW(tok::train_wordpiece(recs, 9, 1), ValidationError);
}

TEST(Trainer, MinFrequencyAboveAllPairs) {
  const auto v = tok::train_wordpiece(records_of({"abc abd"}), 1000, 3);
  EXPECT_EQ(v.size(), 5u + 4u);
}

TEST(Trainer, ExactSizeWhenMergesRemain) {
  const auto v = tok::train_wordpiece(records_of({"hello world help held hollow"}), 20, 1);
  EXPECT_EQ(v.size(), 20u);
}

TEST(Trainer, EmptyCorpusRejected) {
  EXPECT_THROW(tok::train_wordpiece({}, 100, 1), ValidationError);
}

TEST(Trainer, SmallerVocabularyIsPrefix) {
  const auto recs = records_of({"the cat sat on the mat", "a cat and a hat", "that"});
  const auto big = tok::train_wordpiece(recs, 40, 1);
  const auto small = tok::train_wordpiece(recs, 30, 1);
  ASSERT_LE(small.size(), big.size());
  EXPECT_TRUE(std::equal(small.tokens().begin(), small.tokens().end(), big.tokens().begin()));
}

TEST(Trainer, MatchesReferenceOnRandomCorpora) {
  Rng rng(11);
  const std::string letters = "abcde";
  for (int round = 0; round < 60; ++round) {
    std::map<std::string, std::uint64_t> counts;
    const auto types = rng.between(1, 12);
    for (int t = 0; t < types; ++t) {
      std::string w;
      const auto len = rng.between(1, 7);
      for (int i = 0; i < len; ++i) w.push_back(letters[rng.below(letters.size())]);
      counts[w] += static_cast<std::uint64_t>(rng.between(1, 6));
    }
    const std::uint64_t min_freq = static_cast<std::uint64_t>(rng.between(1, 3));
    tok::TrainerOptions opt;
    opt.min_frequency = min_freq;
    tok::WordPieceTrainer trainer(counts, opt);
    trainer.grow_to(60);
    EXPECT_EQ(trainer.tokens(), reference_train(counts, 60, min_freq)) << "round " << round;
  }
}
