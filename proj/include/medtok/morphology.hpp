#pragma once

// Whole-word phrase matching that tolerates Hebrew proclitics: up to two
// single-letter particles (vav, he, bet, lamed, mem, shin, kaf) glued to the
// front of the word, optionally followed by a hyphen or maqaf.

#include <algorithm>
#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "medtok/unicode.hpp"

namespace medtok::morph {

inline constexpr std::array<char32_t, 7> kProclitics = {U'ו', U'ה', U'ב', U'ל', U'מ', U'ש', U'כ'};
inline constexpr std::size_t kMaxProcliticDepth = 2;

inline bool is_proclitic(char32_t c) {
  return std::find(kProclitics.begin(), kProclitics.end(), c) != kProclitics.end();
}

inline bool is_joiner(char32_t c) { return c == U'-' || c == U'־'; }

/// Span [start, end) of the whole match; [core_start, end) excludes the
/// proclitic stack.
struct Hit {
  std::size_t start = 0;
  std::size_t core_start = 0;
  std::size_t end = 0;
  std::size_t entry = 0;

  std::size_t length() const noexcept { return end - start; }
  bool operator==(const Hit&) const = default;
};

class PhraseMatcher {
 public:
  PhraseMatcher() : nodes_(1) {}

  /// Registers a phrase (case-folded, inner whitespace runs matched by any
  /// whitespace run). Returns false for phrases that are empty after
  /// normalization.
  bool add(std::string_view phrase, std::size_t entry) {
    const std::u32string key = normalize(unicode::decode(phrase));
    if (key.empty()) return false;
    std::uint32_t node = 0;
    for (char32_t c : key) {
      const auto [it, fresh] = edges_.try_emplace(edge_key(node, c), static_cast<std::uint32_t>(nodes_.size()));
      if (fresh) nodes_.emplace_back();
      node = it->second;
    }
    auto& entries = nodes_[node].entries;
    if (std::find(entries.begin(), entries.end(), entry) == entries.end()) entries.push_back(entry);
    ++phrases_;
    return true;
  }

  bool empty() const noexcept { return phrases_ == 0; }

  /// Every candidate hit, possibly overlapping, ordered by (start, end, entry).
  std::vector<Hit> find_all(std::u32string_view text) const {
    std::vector<Hit> hits;
    if (empty()) return hits;
    for (std::size_t p = 0; p < text.size(); ++p) {
      if (p > 0 && unicode::is_word_char(text[p - 1])) continue;
      if (!unicode::is_word_char(text[p])) continue;
      // Candidate cores: no prefix, or 1..2 proclitics (+ optional joiner).
      std::size_t q = p;
      for (std::size_t depth = 0; depth <= kMaxProcliticDepth && q < text.size(); ++depth) {
        if (depth > 0) {
          if (!is_proclitic(text[q - 1])) break;
          walk(text, p, q, hits);
          if (q < text.size() && is_joiner(text[q])) walk(text, p, q + 1, hits);
        } else {
          walk(text, p, q, hits);
        }
        if (!is_proclitic(text[q])) break;
        ++q;
      }
    }
    std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) {
      return std::tie(a.start, a.end, a.core_start, a.entry) < std::tie(b.start, b.end, b.core_start, b.entry);
    });
    hits.erase(std::unique(hits.begin(), hits.end()), hits.end());
    return hits;
  }

  static std::u32string normalize(std::u32string_view phrase) {
    std::u32string out;
    bool pending_space = false;
    for (char32_t c : phrase) {
      if (unicode::is_space(c)) {
        pending_space = !out.empty();
        continue;
      }
      if (pending_space) out.push_back(U' ');
      pending_space = false;
      out.push_back(unicode::fold(c));
    }
    return out;
  }

 private:
  struct Node {
    std::vector<std::size_t> entries;
  };

  static std::uint64_t edge_key(std::uint32_t node, char32_t c) {
    return (static_cast<std::uint64_t>(node) << 32) | static_cast<std::uint32_t>(c);
  }

  void walk(std::u32string_view text, std::size_t start, std::size_t core, std::vector<Hit>& hits) const {
    if (core >= text.size()) return;
    std::uint32_t node = 0;
    std::size_t i = core;
    while (i < text.size()) {
      std::size_t next = i;
      char32_t c = text[i];
      if (unicode::is_space(c)) {
        while (next < text.size() && unicode::is_space(text[next])) ++next;
        c = U' ';
      } else {
        c = unicode::fold(c);
        ++next;
      }
      const auto it = edges_.find(edge_key(node, c));
      if (it == edges_.end()) return;
      node = it->second;
      i = next;
      const auto& entries = nodes_[node].entries;
      if (!entries.empty() && (i == text.size() || !unicode::is_word_char(text[i]))) {
        for (std::size_t e : entries) hits.push_back({start, core, i, e});
      }
    }
  }

  std::vector<Node> nodes_;
  std::unordered_map<std::uint64_t, std::uint32_t> edges_;
  std::size_t phrases_ = 0;
};

/// Non-overlapping subset: longest span first, then leftmost. Span is taken
/// as [start, end) or, with core_only, [core_start, end). Result is ordered
/// by position.
inline std::vector<Hit> resolve_overlaps(std::vector<Hit> hits, bool core_only = false) {
  auto lo = [core_only](const Hit& h) { return core_only ? h.core_start : h.start; };
  std::stable_sort(hits.begin(), hits.end(), [&](const Hit& a, const Hit& b) {
    const std::size_t la = a.end - lo(a);
    const std::size_t lb = b.end - lo(b);
    if (la != lb) return la > lb;
    return lo(a) < lo(b);
  });
  std::vector<Hit> kept;
  for (const auto& h : hits) {
    const bool clash = std::any_of(kept.begin(), kept.end(), [&](const Hit& k) {
      return lo(h) < k.end && lo(k) < h.end;
    });
    if (!clash) kept.push_back(h);
  }
  std::sort(kept.begin(), kept.end(), [&](const Hit& a, const Hit& b) { return lo(a) < lo(b); });
  return kept;
}

}  // namespace medtok::morph
