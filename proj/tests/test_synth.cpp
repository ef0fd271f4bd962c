#include <gtest/gtest.h>

#include "medtok/synth.hpp"

using namespace medtok;

TEST(Synth, RecordsDependOnlyOnSeedAndIndex) {
  EXPECT_EQ(synth::clinical_record(7, 3).record, synth::clinical_record(7, 3).record);
  EXPECT_NE(synth::clinical_record(7, 3).record.text, synth::clinical_record(7, 4).record.text);
  const auto one = synth::clinical_corpus(50, 3, {}, 1);
  const auto many = synth::clinical_corpus(50, 3, {}, 8);
  for (std::size_t i = 0; i < one.size(); ++i) EXPECT_EQ(one[i].record, many[i].record);
  EXPECT_EQ(synth::general_corpus(20, 1, 1), synth::general_corpus(20, 1, 4));
}

TEST(Synth, NoPiiOption) {
  const auto c = synth::clinical_record(0, 1, {0.22, 0.04, false});
  EXPECT_FALSE(c.record.pii);
  EXPECT_EQ(c.pii_mentions, 0u);
  EXPECT_FALSE(c.record.text.empty());
}

TEST(Synth, ManifestCoversMentions) {
  for (const auto& c : synth::clinical_corpus(100, 5)) {
    ASSERT_TRUE(c.record.pii);
    EXPECT_FALSE(c.record.pii->patient_names.empty());
    EXPECT_GT(c.pii_mentions, 0u);
    EXPECT_TRUE(is_doc_type(c.record.doc_type));
  }
}

TEST(Synth, GeneralRecordsHaveNoDomainTerms) {
  const auto terms = synth::event_terms();
  for (const auto& r : synth::general_corpus(200, 2)) {
    for (const auto& t : terms) EXPECT_EQ(r.text.find(" " + t + " "), std::string::npos) << t;
  }
}

TEST(Synth, PairsWithExactCounts) {
  const auto pairs = synth::pairs_with_counts({5, 3, 2, 1, 0}, 1);
  EXPECT_EQ(trc::count_labels(pairs), (trc::LabelCounts{5, 3, 2, 1, 0}));
  EXPECT_EQ(pairs, synth::pairs_with_counts({5, 3, 2, 1, 0}, 1));
}

TEST(Synth, EmbeddingsPerToken) {
  const Vocabulary a({"[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]", "x", "##y"});
  const auto e = synth::random_embeddings(a, 4, 9);
  EXPECT_EQ(e.rows.size(), a.size());
  for (const auto& [tok, row] : e.rows) {
    ASSERT_EQ(row.size(), 4u);
    for (double v : row) {
      EXPECT_GE(v, -1.0);
      EXPECT_LT(v, 1.0);
    }
  }
  EXPECT_THROW(synth::random_embeddings(a, 0, 9), ValidationError);
}
