#pragma once

// Domain vocabulary adaptation: a one-shot union with a freshly trained
// domain vocabulary, or AdaLM-style growth in fixed increments until the
// relative compression gain on an evaluation sample drops below delta.
// Also initializes embeddings for the added tokens.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "medtok/error.hpp"
#include "medtok/parallel.hpp"
#include "medtok/record.hpp"
#include "medtok/tok_eval.hpp"
#include "medtok/tokenizer.hpp"
#include "medtok/vocabulary.hpp"
#include "medtok/wordpiece_trainer.hpp"

namespace medtok::adapt {

enum class Method { simple, adalm };

inline Method parse_method(std::string_view s) {
  if (s == "simple") return Method::simple;
  if (s == "adalm") return Method::adalm;
  throw ValidationError("unknown adaptation method '" + std::string(s) + "' (expected simple|adalm)");
}

inline std::string_view to_string(Method m) { return m == Method::simple ? "simple" : "adalm"; }

struct AdaptConfig {
  Method method = Method::simple;
  std::size_t domain_vocab_size = 10000;
  double delta = 0.1;
  /// New tokens added per AdaLM increment.
  std::size_t step = 1000;
  std::size_t max_steps = 64;
  std::uint64_t min_frequency = 1;

  void validate() const {
    if (!(delta > 0.0 && delta < 1.0)) throw ValidationError("delta must lie in (0, 1)");
    if (step < 1) throw ValidationError("step must be >= 1");
    if (domain_vocab_size < 1) throw ValidationError("domain vocabulary size must be >= 1");
    if (max_steps < 1) throw ValidationError("max_steps must be >= 1");
  }
};

struct AdaptStep {
  std::size_t candidate_added = 0;
  std::size_t merged_size = 0;
  std::optional<double> compression;
  std::optional<double> relative_gain;
  bool accepted = false;
};

struct AdaptationTrace {
  Method method = Method::simple;
  std::size_t base_size = 0;
  std::optional<double> base_compression;
  std::vector<AdaptStep> steps;
  std::vector<std::string> added_tokens;
  bool truncated = false;
};

struct AdaptResult {
  Vocabulary vocab;
  AdaptationTrace trace;
};

/// Base tokens keep their ids; domain tokens not already present are
/// appended in the given order.
inline Vocabulary merge_vocabularies(const Vocabulary& base, std::span<const std::string> domain_tokens,
                                     std::vector<std::string>* added = nullptr) {
  std::vector<std::string> tokens = base.tokens();
  std::unordered_set<std::string> seen(tokens.begin(), tokens.end());
  for (const auto& t : domain_tokens) {
    if (seen.insert(t).second) {
      tokens.push_back(t);
      if (added) added->push_back(t);
    }
  }
  return Vocabulary(std::move(tokens), base.continuation_prefix(), base.specials(), base.unk_token());
}

namespace detail {

inline tok::TrainerOptions trainer_options(const Vocabulary& base, const AdaptConfig& cfg) {
  tok::TrainerOptions o;
  o.min_frequency = cfg.min_frequency;
  o.continuation_prefix = base.continuation_prefix();
  o.specials = base.specials();
  o.unk_token = base.unk_token();
  return o;
}

inline double compression(const Vocabulary& vocab, std::span<const Record> sample, std::size_t threads) {
  return eval::evaluate(vocab, sample, tok::SegmentMode::greedy, threads).cr;
}

}  // namespace detail

inline AdaptResult adapt_simple(const Vocabulary& base, std::span<const Record> corpus,
                                const AdaptConfig& cfg) {
  cfg.validate();
  if (corpus.empty()) throw ValidationError("cannot adapt on an empty corpus");
  const Vocabulary domain =
      tok::train_wordpiece(corpus, cfg.domain_vocab_size, cfg.min_frequency, detail::trainer_options(base, cfg));
  AdaptationTrace trace;
  trace.method = Method::simple;
  trace.base_size = base.size();
  Vocabulary merged = merge_vocabularies(base, domain.tokens(), &trace.added_tokens);
  trace.steps.push_back({trace.added_tokens.size(), merged.size(), std::nullopt, std::nullopt, true});
  return {std::move(merged), std::move(trace)};
}

/// Increment i holds the first i*step domain tokens that are new to the
/// base, in domain-trainer order. Because the trainer's merge sequence is
/// fixed, this equals training a domain vocabulary just large enough to
/// contribute i*step new tokens and taking the union with the base.
/// The first increment whose relative gain (rho_{i-1} - rho_i) / rho_{i-1}
/// falls below delta is recorded and rejected; the previous merge is kept.
inline AdaptResult adapt_adalm(const Vocabulary& base, std::span<const Record> corpus,
                               std::span<const Record> eval_sample, const AdaptConfig& cfg,
                               std::size_t threads = 1) {
  cfg.validate();
  if (corpus.empty()) throw ValidationError("cannot adapt on an empty corpus");
  if (eval_sample.empty()) throw ValidationError("AdaLM needs a non-empty evaluation sample");

  tok::WordPieceTrainer trainer(tok::count_words(corpus), detail::trainer_options(base, cfg));
  std::unordered_set<std::string> in_base(base.tokens().begin(), base.tokens().end());
  std::vector<std::string> fresh;  // domain tokens new to the base, trainer order
  std::size_t scanned = 0;
  auto collect = [&] {
    const auto& tokens = trainer.tokens();
    for (; scanned < tokens.size(); ++scanned) {
      if (!in_base.contains(tokens[scanned])) fresh.push_back(tokens[scanned]);
    }
  };
  collect();

  AdaptationTrace trace;
  trace.method = Method::adalm;
  trace.base_size = base.size();
  double previous = detail::compression(base, eval_sample, threads);
  trace.base_compression = previous;
  std::size_t accepted_new = 0;

  bool stopped = false;
  for (std::size_t i = 1; i <= cfg.max_steps; ++i) {
    const std::size_t want = i * cfg.step;
    while (fresh.size() < want && trainer.add_token()) collect();
    const std::size_t take = std::min(want, fresh.size());
    const Vocabulary candidate =
        merge_vocabularies(base, std::span<const std::string>(fresh.data(), take));
    const double rho = detail::compression(candidate, eval_sample, threads);
    const double gain = (previous - rho) / previous;
    const bool ok = gain >= cfg.delta;
    trace.steps.push_back({take, candidate.size(), rho, gain, ok});
    if (!ok) {
      stopped = true;
      break;
    }
    accepted_new = take;
    previous = rho;
  }
  trace.truncated = !stopped;

  trace.added_tokens.assign(fresh.begin(), fresh.begin() + static_cast<std::ptrdiff_t>(accepted_new));
  Vocabulary merged = merge_vocabularies(base, trace.added_tokens);
  return {std::move(merged), std::move(trace)};
}

inline ordered_json to_json(const AdaptationTrace& t) {
  auto opt = [](const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); };
  ordered_json j;
  j["method"] = to_string(t.method);
  j["base_size"] = t.base_size;
  j["base_compression"] = opt(t.base_compression);
  ordered_json steps = ordered_json::array();
  for (const auto& s : t.steps) {
    ordered_json o;
    o["candidate_added"] = s.candidate_added;
    o["merged_size"] = s.merged_size;
    o["compression"] = opt(s.compression);
    o["relative_gain"] = opt(s.relative_gain);
    o["accepted"] = s.accepted;
    steps.push_back(std::move(o));
  }
  j["steps"] = std::move(steps);
  j["added_count"] = t.added_tokens.size();
  j["added_tokens"] = t.added_tokens;
  j["truncated"] = t.truncated;
  return j;
}

// ---------------------------------------------------------------------------
// Embedding initialization

struct EmbeddingTable {
  std::size_t dim = 0;
  std::unordered_map<std::string, std::vector<double>> rows;

  const std::vector<double>* find(const std::string& token) const {
    const auto it = rows.find(token);
    return it == rows.end() ? nullptr : &it->second;
  }
};

/// Old rows are copied verbatim. A new token gets the mean of the rows of
/// its greedy segmentation under the old vocabulary (continuation tokens are
/// segmented as word-internal text), or the unknown marker's row when that
/// segmentation fails.
inline EmbeddingTable init_embeddings(const EmbeddingTable& base_table, const Vocabulary& old_vocab,
                                      const Vocabulary& new_vocab, std::size_t threads = 1) {
  if (base_table.dim == 0) throw ValidationError("embedding dimension must be positive");
  for (const auto& [token, row] : base_table.rows) {
    if (row.size() != base_table.dim) {
      throw ValidationError("embedding row for '" + token + "' has dimension " + std::to_string(row.size()) +
                            ", expected " + std::to_string(base_table.dim));
    }
  }
  for (const auto& t : old_vocab.tokens()) {
    if (!base_table.find(t)) throw ValidationError("base embeddings lack old token '" + t + "'");
  }
  for (const auto& t : old_vocab.tokens()) {
    if (!new_vocab.contains(t)) throw ValidationError("old token '" + t + "' missing from new vocabulary");
  }

  const auto& tokens = new_vocab.tokens();
  std::vector<std::vector<double>> rows(tokens.size());
  parallel_for(tokens.size(), threads, [&](std::size_t i) {
    const std::string& token = tokens[i];
    if (old_vocab.contains(token)) {
      rows[i] = *base_table.find(token);
      return;
    }
    tok::TokenSequence seq;
    if (new_vocab.is_continuation(token)) {
      seq = tok::segment_greedy(std::string_view(token).substr(new_vocab.continuation_prefix().size()),
                                old_vocab, false);
    } else if (!new_vocab.is_special(token)) {
      seq = tok::segment_greedy(token, old_vocab);
    }
    if (seq.tokens.empty() || seq.contains(old_vocab.unk_token())) {
      const auto* unk = base_table.find(old_vocab.unk_token());
      if (!unk) throw ValidationError("token '" + token + "' is unsegmentable and no unknown-token row exists");
      rows[i] = *unk;
      return;
    }
    std::vector<double> sum(base_table.dim, 0.0);
    for (const auto& piece : seq.tokens) {
      const auto& r = *base_table.find(piece);
      for (std::size_t d = 0; d < sum.size(); ++d) sum[d] += r[d];
    }
    const auto n = static_cast<double>(seq.tokens.size());
    for (auto& v : sum) v /= n;
    rows[i] = std::move(sum);
  });

  EmbeddingTable out;
  out.dim = base_table.dim;
  out.rows.reserve(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) out.rows.emplace(tokens[i], std::move(rows[i]));
  return out;
}

/// "<count> <dim>" header, then "token<TAB>v1 v2 ..." per row.
inline EmbeddingTable read_embeddings(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open embeddings '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line)) throw ValidationError(path.string(), 1, "missing header");
  std::istringstream header(line);
  std::size_t count = 0;
  EmbeddingTable table;
  if (!(header >> count >> table.dim) || table.dim == 0) {
    throw ValidationError(path.string(), 1, "header must be '<token_count> <dim>'");
  }
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) throw ValidationError(path.string(), line_no, "expected token<TAB>values");
    std::string token = line.substr(0, tab);
    std::vector<double> row;
    row.reserve(table.dim);
    const char* p = line.c_str() + tab + 1;
    char* end = nullptr;
    while (true) {
      const double v = std::strtod(p, &end);
      if (end == p) break;
      row.push_back(v);
      p = end;
    }
    while (*p == ' ') ++p;
    if (*p != '\0') throw ValidationError(path.string(), line_no, "unparseable value");
    if (row.size() != table.dim) {
      throw ValidationError(path.string(), line_no,
                            "row has " + std::to_string(row.size()) + " values, expected " + std::to_string(table.dim));
    }
    if (!table.rows.emplace(std::move(token), std::move(row)).second) {
      throw ValidationError(path.string(), line_no, "duplicate token");
    }
  }
  if (table.rows.size() != count) {
    throw ValidationError(path.string() + ": header announces " + std::to_string(count) + " rows, found " +
                          std::to_string(table.rows.size()));
  }
  return table;
}

/// Rows are written in vocabulary id order with round-trip precision.
inline void write_embeddings(const EmbeddingTable& table, const Vocabulary& vocab, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write '" + path.string() + "'");
  out << vocab.size() << ' ' << table.dim << '\n';
  char buf[40];
  for (const auto& t : vocab.tokens()) {
    const auto* row = table.find(t);
    if (!row) throw ValidationError("no embedding row for token '" + t + "'");
    out << t << '\t';
    for (std::size_t d = 0; d < row->size(); ++d) {
      std::snprintf(buf, sizeof buf, "%.17g", (*row)[d]);
      if (d) out << ' ';
      out << buf;
    }
    out << '\n';
  }
}

}  // namespace medtok::adapt
