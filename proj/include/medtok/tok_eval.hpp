#pragma once

// Corpus token count (CTC) and compression rate (tokens per
// whitespace-delimited word), single-shot or averaged over seeded samples.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "medtok/corpus.hpp"
#include "medtok/error.hpp"
#include "medtok/parallel.hpp"
#include "medtok/record.hpp"
#include "medtok/tokenizer.hpp"
#include "medtok/vocabulary.hpp"

namespace medtok::eval {

struct SeedRow {
  std::optional<std::uint64_t> seed;
  std::uint64_t ctc = 0;
  std::uint64_t word_count = 0;
  double cr = 0.0;
};

struct TokenizerReport {
  tok::SegmentMode mode = tok::SegmentMode::greedy;
  std::uint64_t ctc = 0;
  std::uint64_t word_count = 0;
  double cr = 0.0;
  std::vector<SeedRow> per_seed;
  double mean_ctc = 0.0;
  double mean_cr = 0.0;
};

struct TokenCounts {
  std::uint64_t tokens = 0;
  std::uint64_t words = 0;
};

/// Token and word totals. Punctuation split off a whitespace word adds
/// tokens but not words.
inline TokenCounts count_tokens(const Vocabulary& vocab, std::span<const Record> records,
                                tok::SegmentMode mode, std::size_t threads = 1) {
  const std::size_t chunks = chunk_count(records.size(), threads);
  std::vector<TokenCounts> partial(chunks);
  parallel_chunks(records.size(), threads, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
    std::unordered_map<std::string, std::uint32_t> cache;
    TokenCounts local;
    for (std::size_t i = begin; i < end; ++i) {
      for (const auto& group : tok::pretokenize_grouped(records[i].text)) {
        ++local.words;
        for (const auto& word : group) {
          auto it = cache.find(word);
          if (it == cache.end()) {
            const auto n = static_cast<std::uint32_t>(tok::segment(word, vocab, mode).size());
            it = cache.emplace(word, n).first;
          }
          local.tokens += it->second;
        }
      }
    }
    partial[chunk] = local;
  });
  TokenCounts total;
  for (const auto& p : partial) {
    total.tokens += p.tokens;
    total.words += p.words;
  }
  return total;
}

inline void finalize_means(TokenizerReport& report) {
  double ctc_sum = 0.0;
  double cr_sum = 0.0;
  for (const auto& row : report.per_seed) {
    ctc_sum += static_cast<double>(row.ctc);
    cr_sum += row.cr;
  }
  const auto n = static_cast<double>(report.per_seed.size());
  report.mean_ctc = ctc_sum / n;
  report.mean_cr = cr_sum / n;
}

inline TokenizerReport evaluate(const Vocabulary& vocab, std::span<const Record> records,
                                tok::SegmentMode mode, std::size_t threads = 1) {
  if (records.empty()) throw ValidationError("cannot evaluate a tokenizer on an empty corpus");
  const TokenCounts counts = count_tokens(vocab, records, mode, threads);
  if (counts.words == 0) throw ValidationError("evaluation corpus contains no words");
  TokenizerReport report;
  report.mode = mode;
  report.ctc = counts.tokens;
  report.word_count = counts.words;
  report.cr = static_cast<double>(counts.tokens) / static_cast<double>(counts.words);
  report.per_seed.push_back({std::nullopt, report.ctc, report.word_count, report.cr});
  finalize_means(report);
  return report;
}

/// One sample of n records per seed, evaluated separately, then averaged.
/// The top-level ctc/cr fields hold the pooled totals over all samples.
inline TokenizerReport evaluate_multiseed(const Vocabulary& vocab, std::span<const Record> pool,
                                          std::size_t n, std::span<const std::uint64_t> seeds,
                                          tok::SegmentMode mode, std::size_t threads = 1) {
  if (seeds.empty()) throw ValidationError("at least one seed is required");
  TokenizerReport report;
  report.mode = mode;
  for (const std::uint64_t seed : seeds) {
    const auto drawn = corpus::sample(pool, n, seed);
    const TokenizerReport one = evaluate(vocab, drawn, mode, threads);
    report.per_seed.push_back({seed, one.ctc, one.word_count, one.cr});
    report.ctc += one.ctc;
    report.word_count += one.word_count;
  }
  report.cr = static_cast<double>(report.ctc) / static_cast<double>(report.word_count);
  finalize_means(report);
  return report;
}

struct RankedEntry {
  std::string name;
  std::size_t input_index = 0;
  double mean_ctc = 0.0;
  double mean_cr = 0.0;
  double delta_ctc = 0.0;  // relative to the first listed report
  double delta_cr = 0.0;
};

/// Sorted by mean compression rate, ascending; ties keep input order.
inline std::vector<RankedEntry> compare(std::span<const std::pair<std::string, TokenizerReport>> reports) {
  if (reports.size() < 2) throw ValidationError("compare needs at least two reports");
  const auto& baseline = reports.front().second;
  std::vector<RankedEntry> rows;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& [name, r] = reports[i];
    rows.push_back({name, i, r.mean_ctc, r.mean_cr, r.mean_ctc - baseline.mean_ctc,
                    r.mean_cr - baseline.mean_cr});
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const RankedEntry& a, const RankedEntry& b) { return a.mean_cr < b.mean_cr; });
  return rows;
}

inline ordered_json to_json(const TokenizerReport& r) {
  ordered_json j;
  j["mode"] = tok::to_string(r.mode);
  j["ctc"] = r.ctc;
  j["word_count"] = r.word_count;
  j["cr"] = r.cr;
  j["mean_ctc"] = r.mean_ctc;
  j["mean_cr"] = r.mean_cr;
  ordered_json rows = ordered_json::array();
  for (const auto& row : r.per_seed) {
    ordered_json o;
    o["seed"] = row.seed ? ordered_json(*row.seed) : ordered_json(nullptr);
    o["ctc"] = row.ctc;
    o["word_count"] = row.word_count;
    o["cr"] = row.cr;
    rows.push_back(std::move(o));
  }
  j["per_seed"] = std::move(rows);
  return j;
}

namespace detail {
inline std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}
}  // namespace detail

inline std::string format_table(const TokenizerReport& r) {
  std::ostringstream out;
  out << "seed        ctc          words        cr\n";
  for (const auto& row : r.per_seed) {
    char line[128];
    std::snprintf(line, sizeof line, "%-11s %-12llu %-12llu %s\n",
                  row.seed ? std::to_string(*row.seed).c_str() : "-",
                  static_cast<unsigned long long>(row.ctc),
                  static_cast<unsigned long long>(row.word_count), detail::fixed(row.cr, 4).c_str());
    out << line;
  }
  out << "mean        " << detail::fixed(r.mean_ctc, 1) << "  cr " << detail::fixed(r.mean_cr, 4) << '\n';
  return out.str();
}

inline std::string format_ranking(std::span<const RankedEntry> rows) {
  std::ostringstream out;
  out << "rank  tokenizer             mean_ctc        mean_cr   d_ctc           d_cr\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    char line[256];
    std::snprintf(line, sizeof line, "%-5zu %-21s %-15s %-9s %-15s %s\n", i + 1, r.name.c_str(),
                  detail::fixed(r.mean_ctc, 1).c_str(), detail::fixed(r.mean_cr, 4).c_str(),
                  detail::fixed(r.delta_ctc, 1).c_str(), detail::fixed(r.delta_cr, 4).c_str());
    out << line;
  }
  return out.str();
}

}  // namespace medtok::eval
