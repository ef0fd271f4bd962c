#pragma once

// Pre-tokenization and the two segmenters: WordPiece longest-prefix
// matching and FLOTA (longest token anywhere, recursing on remainders).

#include <algorithm>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "medtok/error.hpp"
#include "medtok/unicode.hpp"
#include "medtok/vocabulary.hpp"

namespace medtok::tok {

enum class SegmentMode { greedy, flota };

inline SegmentMode parse_mode(std::string_view s) {
  if (s == "greedy") return SegmentMode::greedy;
  if (s == "flota") return SegmentMode::flota;
  throw ValidationError("unknown segmentation mode '" + std::string(s) + "' (expected greedy|flota)");
}

inline std::string_view to_string(SegmentMode m) {
  return m == SegmentMode::greedy ? "greedy" : "flota";
}

struct TokenSequence {
  std::vector<std::string> tokens;
  /// [start, end) code-point spans into the word, one per token.
  std::vector<std::pair<std::size_t, std::size_t>> offsets;
  bool used_flota = false;

  std::size_t size() const noexcept { return tokens.size(); }
  bool contains(std::string_view token) const {
    return std::find(tokens.begin(), tokens.end(), token) != tokens.end();
  }
};

/// Words of one whitespace-delimited chunk: punctuation characters become
/// standalone words, everything else stays contiguous.
inline void split_punct(std::u32string_view chunk, std::vector<std::string>& out) {
  std::size_t start = 0;
  for (std::size_t i = 0; i < chunk.size(); ++i) {
    if (!unicode::is_punct(chunk[i])) continue;
    if (i > start) out.push_back(unicode::encode(chunk.substr(start, i - start)));
    out.push_back(unicode::encode(chunk.substr(i, 1)));
    start = i + 1;
  }
  if (start < chunk.size()) out.push_back(unicode::encode(chunk.substr(start)));
}

/// Pre-tokenized words grouped by their whitespace-delimited source word.
inline std::vector<std::vector<std::string>> pretokenize_grouped(std::string_view text) {
  const std::u32string cps = unicode::decode(unicode::nfc(text));
  std::vector<std::vector<std::string>> groups;
  std::size_t i = 0;
  while (i < cps.size()) {
    while (i < cps.size() && unicode::is_space(cps[i])) ++i;
    const std::size_t start = i;
    while (i < cps.size() && !unicode::is_space(cps[i])) ++i;
    if (i > start) {
      groups.emplace_back();
      split_punct(std::u32string_view(cps).substr(start, i - start), groups.back());
    }
  }
  return groups;
}

inline std::vector<std::string> pretokenize(std::string_view text) {
  std::vector<std::string> words;
  for (auto& group : pretokenize_grouped(text)) {
    for (auto& w : group) words.push_back(std::move(w));
  }
  return words;
}

namespace detail {

inline TokenSequence unknown_word(const Vocabulary& vocab, std::size_t length) {
  TokenSequence seq;
  seq.tokens.push_back(vocab.unk_token());
  seq.offsets.emplace_back(0, length);
  return seq;
}

inline TokenSequence greedy(std::u32string_view word, const Vocabulary& vocab, bool word_initial) {
  TokenSequence seq;
  std::size_t pos = 0;
  while (pos < word.size()) {
    const bool continuation = pos > 0 || !word_initial;
    const auto [length, id] = vocab.longest_match(word, pos, word.size(), continuation);
    if (length == 0) return unknown_word(vocab, word.size());
    seq.tokens.push_back(vocab.token(static_cast<std::size_t>(id)));
    seq.offsets.emplace_back(pos, pos + length);
    pos += length;
  }
  return seq;
}

struct Piece {
  std::size_t start;
  std::size_t end;
  std::int32_t id;  // -1 marks an unknown remainder
};

inline void flota(std::u32string_view word, const Vocabulary& vocab, std::size_t lo,
                  std::size_t hi, std::vector<Piece>& out) {
  if (lo >= hi) return;
  std::size_t best_start = 0;
  std::size_t best_length = 0;
  std::int32_t best_id = -1;
  for (std::size_t s = lo; s < hi; ++s) {
    if (hi - s <= best_length) break;
    const auto [length, id] = vocab.longest_match(word, s, hi, s > 0);
    if (length > best_length) {
      best_start = s;
      best_length = length;
      best_id = id;
    }
  }
  if (best_length == 0) {
    out.push_back({lo, hi, -1});
    return;
  }
  flota(word, vocab, lo, best_start, out);
  out.push_back({best_start, best_start + best_length, best_id});
  flota(word, vocab, best_start + best_length, hi, out);
}

}  // namespace detail

/// Longest vocabulary token at each position, left to right. A position with
/// no match turns the whole word into the unknown-token marker.
/// word_initial=false segments the word as if it continued a previous piece.
inline TokenSequence segment_greedy(std::string_view word, const Vocabulary& vocab,
                                    bool word_initial = true) {
  return detail::greedy(unicode::decode(word), vocab, word_initial);
}

/// Longest token anywhere in the word (leftmost on ties), then recurse on
/// the left and right remainders. An unmatched remainder becomes one
/// unknown-token marker covering that remainder.
inline TokenSequence segment_flota(std::string_view word, const Vocabulary& vocab) {
  const std::u32string cps = unicode::decode(word);
  std::vector<detail::Piece> pieces;
  detail::flota(cps, vocab, 0, cps.size(), pieces);
  TokenSequence seq;
  seq.used_flota = true;
  for (const auto& p : pieces) {
    seq.tokens.push_back(p.id < 0 ? vocab.unk_token() : vocab.token(static_cast<std::size_t>(p.id)));
    seq.offsets.emplace_back(p.start, p.end);
  }
  return seq;
}

inline TokenSequence segment(std::string_view word, const Vocabulary& vocab, SegmentMode mode) {
  return mode == SegmentMode::greedy ? segment_greedy(word, vocab) : segment_flota(word, vocab);
}

/// Pre-tokenizes text and segments every word.
inline std::vector<std::string> tokenize(std::string_view text, const Vocabulary& vocab,
                                         SegmentMode mode) {
  std::vector<std::string> out;
  for (const auto& word : pretokenize(text)) {
    auto seq = segment(word, vocab, mode);
    for (auto& t : seq.tokens) out.push_back(std::move(t));
  }
  return out;
}

/// Inverse of segmentation for sequences without unknown markers.
inline std::string join_pieces(const TokenSequence& seq, const Vocabulary& vocab) {
  std::string out;
  for (const auto& t : seq.tokens) {
    if (vocab.is_continuation(t)) {
      out += std::string_view(t).substr(vocab.continuation_prefix().size());
    } else {
      out += t;
    }
  }
  return out;
}

}  // namespace medtok::tok
