#pragma once

// WordPiece vocabulary training by iterative pair merging.
//
// Each word type starts as characters (first one word-initial, the rest
// continuation-prefixed). Every round merges the adjacent pair with the
// highest score freq(pair) / (freq(left) * freq(right)); ties go to the
// higher pair frequency, then to the lexicographically smallest merged
// token. The merge sequence for a corpus is fixed, so a vocabulary of size
// n is always a prefix of the one of size m > n.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "medtok/error.hpp"
#include "medtok/record.hpp"
#include "medtok/tokenizer.hpp"
#include "medtok/unicode.hpp"
#include "medtok/vocabulary.hpp"

namespace medtok::tok {

struct TrainerOptions {
  std::uint64_t min_frequency = 1;
  std::string continuation_prefix = std::string(kContinuationPrefix);
  std::vector<std::string> specials = default_specials();
  std::string unk_token = std::string(kUnkToken);
};

/// Word-type frequencies after pre-tokenization.
inline std::map<std::string, std::uint64_t> count_words(std::span<const Record> records) {
  std::map<std::string, std::uint64_t> counts;
  for (const auto& r : records) {
    for (auto& w : pretokenize(r.text)) ++counts[std::move(w)];
  }
  return counts;
}

class WordPieceTrainer {
 public:
  WordPieceTrainer(const std::map<std::string, std::uint64_t>& word_counts, TrainerOptions options)
      : options_(std::move(options)) {
    for (const auto& s : options_.specials) add_token(s);
    if (!std::count(options_.specials.begin(), options_.specials.end(), options_.unk_token)) {
      throw ValidationError("unknown-token marker must be one of the specials");
    }

    std::vector<std::string> alphabet;
    for (const auto& [word, count] : word_counts) {
      const std::u32string cps = unicode::decode(word);
      std::vector<std::uint32_t> seq;
      seq.reserve(cps.size());
      for (std::size_t i = 0; i < cps.size(); ++i) {
        std::string piece = i == 0 ? std::string() : options_.continuation_prefix;
        unicode::append_utf8(piece, cps[i]);
        const auto [id, fresh] = intern(piece);
        if (fresh) alphabet.push_back(piece);
        seq.push_back(id);
      }
      if (seq.empty()) continue;
      words_.push_back(std::move(seq));
      counts_.push_back(count);
    }
    std::sort(alphabet.begin(), alphabet.end());
    for (const auto& a : alphabet) add_token(a);
    alphabet_size_ = alphabet.size();

    piece_freq_.assign(pieces_.size(), 0);
    for (std::uint32_t w = 0; w < words_.size(); ++w) account(w, +1);
  }

  /// Specials plus every character piece of the corpus.
  std::size_t base_size() const noexcept { return options_.specials.size() + alphabet_size_; }
  std::size_t alphabet_size() const noexcept { return alphabet_size_; }
  std::size_t size() const noexcept { return tokens_.size(); }
  const std::vector<std::string>& tokens() const noexcept { return tokens_; }
  bool exhausted() const noexcept { return exhausted_; }

  /// Merges until one new token joins the vocabulary. False when no pair
  /// reaches min_frequency any more.
  bool add_token() {
    const std::size_t before = tokens_.size();
    while (tokens_.size() == before) {
      if (!merge_best()) return false;
    }
    return true;
  }

  /// Grows to target tokens or until merges run out; returns the final size.
  std::size_t grow_to(std::size_t target) {
    while (tokens_.size() < target && add_token()) {
    }
    return tokens_.size();
  }

  Vocabulary vocabulary() const {
    return Vocabulary(tokens_, options_.continuation_prefix, options_.specials, options_.unk_token);
  }

 private:
  struct Candidate {
    std::uint64_t key;
    std::uint64_t pair_freq;
    std::uint64_t left_freq;
    std::uint64_t right_freq;
  };

  static std::uint64_t pair_key(std::uint32_t a, std::uint32_t b) {
    return (static_cast<std::uint64_t>(a) << 32) | b;
  }
  static std::uint32_t left_of(std::uint64_t key) { return static_cast<std::uint32_t>(key >> 32); }
  static std::uint32_t right_of(std::uint64_t key) { return static_cast<std::uint32_t>(key); }

  std::pair<std::uint32_t, bool> intern(const std::string& piece) {
    const auto [it, fresh] = piece_ids_.try_emplace(piece, static_cast<std::uint32_t>(pieces_.size()));
    if (fresh) {
      pieces_.push_back(piece);
      piece_freq_.push_back(0);
    }
    return {it->second, fresh};
  }

  void add_token(const std::string& token) {
    if (in_vocab_.emplace(token).second) tokens_.push_back(token);
  }

  std::string merged_string(std::uint64_t key) const {
    const std::string& right = pieces_[right_of(key)];
    return pieces_[left_of(key)] + right.substr(options_.continuation_prefix.size());
  }

  void account(std::uint32_t w, int sign) {
    const auto& seq = words_[w];
    const std::uint64_t c = counts_[w];
    for (std::size_t i = 0; i < seq.size(); ++i) {
      if (sign > 0) {
        piece_freq_[seq[i]] += c;
      } else {
        piece_freq_[seq[i]] -= c;
      }
      if (i + 1 == seq.size()) continue;
      const auto key = pair_key(seq[i], seq[i + 1]);
      if (sign > 0) {
        pair_freq_[key] += c;
        where_[key].push_back(w);
      } else if ((pair_freq_[key] -= c) == 0) {
        pair_freq_.erase(key);
        where_.erase(key);
      }
    }
  }

  /// Strict "a beats b" under (score, pair frequency, merged token, pair ids).
  bool better(const Candidate& a, const Candidate& b) const {
    using u128 = unsigned __int128;
    const u128 lhs = static_cast<u128>(a.pair_freq) * b.left_freq * b.right_freq;
    const u128 rhs = static_cast<u128>(b.pair_freq) * a.left_freq * a.right_freq;
    if (lhs != rhs) return lhs > rhs;
    if (a.pair_freq != b.pair_freq) return a.pair_freq > b.pair_freq;
    const std::string ma = merged_string(a.key);
    const std::string mb = merged_string(b.key);
    if (ma != mb) return ma < mb;
    return a.key < b.key;
  }

  bool merge_best() {
    if (exhausted_) return false;
    std::optional<Candidate> best;
    for (const auto& [key, freq] : pair_freq_) {
      if (freq < options_.min_frequency) continue;
      const Candidate c{key, freq, piece_freq_[left_of(key)], piece_freq_[right_of(key)]};
      if (!best || better(c, *best)) best = c;
    }
    if (!best) {
      exhausted_ = true;
      return false;
    }
    const std::uint32_t left = left_of(best->key);
    const std::uint32_t right = right_of(best->key);
    const std::string merged = merged_string(best->key);
    const std::uint32_t merged_id = intern(merged).first;

    auto affected = std::move(where_[best->key]);
    std::sort(affected.begin(), affected.end());
    affected.erase(std::unique(affected.begin(), affected.end()), affected.end());
    for (const std::uint32_t w : affected) {
      auto& seq = words_[w];
      bool hit = false;
      for (std::size_t i = 0; i + 1 < seq.size(); ++i) {
        if (seq[i] == left && seq[i + 1] == right) {
          hit = true;
          break;
        }
      }
      if (!hit) continue;
      account(w, -1);
      std::vector<std::uint32_t> next;
      next.reserve(seq.size());
      for (std::size_t i = 0; i < seq.size(); ++i) {
        if (i + 1 < seq.size() && seq[i] == left && seq[i + 1] == right) {
          next.push_back(merged_id);
          ++i;
        } else {
          next.push_back(seq[i]);
        }
      }
      seq = std::move(next);
      account(w, +1);
    }
    add_token(merged);
    return true;
  }

  TrainerOptions options_;
  std::vector<std::vector<std::uint32_t>> words_;
  std::vector<std::uint64_t> counts_;
  std::vector<std::string> pieces_;
  std::unordered_map<std::string, std::uint32_t> piece_ids_;
  std::vector<std::uint64_t> piece_freq_;
  std::unordered_map<std::uint64_t, std::uint64_t> pair_freq_;
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> where_;
  std::vector<std::string> tokens_;
  std::unordered_set<std::string> in_vocab_;
  std::size_t alphabet_size_ = 0;
  bool exhausted_ = false;
};

/// Trains a vocabulary of exactly target_vocab_size tokens, or fewer when
/// merges run out. The target must at least hold specials plus alphabet.
inline Vocabulary train_wordpiece(std::span<const Record> records, std::size_t target_vocab_size,
                                  std::uint64_t min_frequency, TrainerOptions options = {}) {
  if (records.empty()) throw ValidationError("cannot train a vocabulary on an empty corpus");
  options.min_frequency = min_frequency;
  WordPieceTrainer trainer(count_words(records), std::move(options));
  if (target_vocab_size < trainer.base_size()) {
    throw ValidationError("target vocabulary size " + std::to_string(target_vocab_size) +
                          " is below specials + alphabet (" + std::to_string(trainer.base_size()) + ")");
  }
  trainer.grow_to(target_vocab_size);
  return trainer.vocabulary();
}

}  // namespace medtok::tok
