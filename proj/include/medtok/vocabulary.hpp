#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "medtok/error.hpp"
#include "medtok/unicode.hpp"

namespace medtok {

inline constexpr std::string_view kContinuationPrefix = "##";
inline constexpr std::string_view kUnkToken = "[UNK]";

inline std::vector<std::string> default_specials() {
  return {"[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"};
}

namespace detail {

/// Code-point trie; terminals carry the token id.
class TokenTrie {
 public:
  TokenTrie() : terminal_(1, -1) {}

  void insert(std::u32string_view key, std::int32_t id) {
    std::uint32_t node = 0;
    for (char32_t c : key) {
      const auto [it, fresh] = edges_.try_emplace(edge_key(node, c),
                                                  static_cast<std::uint32_t>(terminal_.size()));
      if (fresh) terminal_.push_back(-1);
      node = it->second;
    }
    terminal_[node] = id;
  }

  /// Longest key that is a prefix of text[pos, end): (length, id), or (0, -1).
  std::pair<std::size_t, std::int32_t> longest(std::u32string_view text, std::size_t pos,
                                               std::size_t end) const {
    std::pair<std::size_t, std::int32_t> best{0, -1};
    std::uint32_t node = 0;
    for (std::size_t i = pos; i < end; ++i) {
      const auto it = edges_.find(edge_key(node, text[i]));
      if (it == edges_.end()) break;
      node = it->second;
      if (terminal_[node] >= 0) best = {i - pos + 1, terminal_[node]};
    }
    return best;
  }

 private:
  static std::uint64_t edge_key(std::uint32_t node, char32_t c) {
    return (static_cast<std::uint64_t>(node) << 32) | static_cast<std::uint32_t>(c);
  }

  std::unordered_map<std::uint64_t, std::uint32_t> edges_;
  std::vector<std::int32_t> terminal_;
};

}  // namespace detail

/// Ordered token set; line order is the token id. Tokens starting with the
/// continuation prefix are word-internal forms, all other non-special tokens
/// are word-initial forms.
class Vocabulary {
 public:
  explicit Vocabulary(std::vector<std::string> tokens,
                      std::string continuation_prefix = std::string(kContinuationPrefix),
                      std::vector<std::string> specials = default_specials(),
                      std::string unk_token = std::string(kUnkToken))
      : tokens_(std::move(tokens)),
        prefix_(std::move(continuation_prefix)),
        specials_(std::move(specials)),
        unk_(std::move(unk_token)) {
    if (prefix_.empty()) throw ValidationError("continuation prefix must be non-empty");
    for (std::size_t i = 0; i < tokens_.size(); ++i) {
      const auto& t = tokens_[i];
      if (t.empty()) throw ValidationError("empty token at id " + std::to_string(i));
      if (!ids_.emplace(t, static_cast<std::int32_t>(i)).second) {
        throw ValidationError("duplicate token '" + t + "'");
      }
    }
    for (const auto& s : specials_) {
      if (!ids_.contains(s)) throw ValidationError("special token '" + s + "' missing from vocabulary");
      special_set_.insert(s);
    }
    if (!special_set_.contains(unk_)) throw ValidationError("unknown-token marker must be a special token");
    for (std::size_t i = 0; i < tokens_.size(); ++i) {
      const auto& t = tokens_[i];
      if (special_set_.contains(t)) continue;
      if (is_continuation(t)) {
        if (t.size() == prefix_.size()) throw ValidationError("bare continuation prefix is not a token");
        continuation_.insert(unicode::decode(std::string_view(t).substr(prefix_.size())),
                             static_cast<std::int32_t>(i));
      } else {
        initial_.insert(unicode::decode(t), static_cast<std::int32_t>(i));
      }
    }
  }

  std::size_t size() const noexcept { return tokens_.size(); }
  const std::vector<std::string>& tokens() const noexcept { return tokens_; }
  const std::string& token(std::size_t id) const { return tokens_.at(id); }
  const std::string& continuation_prefix() const noexcept { return prefix_; }
  const std::vector<std::string>& specials() const noexcept { return specials_; }
  const std::string& unk_token() const noexcept { return unk_; }

  bool contains(std::string_view token) const { return ids_.contains(std::string(token)); }

  std::optional<std::size_t> id(std::string_view token) const {
    const auto it = ids_.find(std::string(token));
    if (it == ids_.end()) return std::nullopt;
    return static_cast<std::size_t>(it->second);
  }

  bool is_special(std::string_view token) const { return special_set_.contains(std::string(token)); }

  bool is_continuation(std::string_view token) const {
    return token.size() >= prefix_.size() && token.substr(0, prefix_.size()) == prefix_ &&
           !is_special(token);
  }

  /// Longest token matching text[pos, end); continuation selects the
  /// word-internal form. Returns (length in code points, id) or (0, -1).
  std::pair<std::size_t, std::int32_t> longest_match(std::u32string_view text, std::size_t pos,
                                                     std::size_t end, bool continuation) const {
    return continuation ? continuation_.longest(text, pos, end) : initial_.longest(text, pos, end);
  }

  bool operator==(const Vocabulary& o) const {
    return tokens_ == o.tokens_ && prefix_ == o.prefix_ && specials_ == o.specials_ && unk_ == o.unk_;
  }

 private:
  std::vector<std::string> tokens_;
  std::string prefix_;
  std::vector<std::string> specials_;
  std::string unk_;
  std::unordered_map<std::string, std::int32_t> ids_;
  std::unordered_set<std::string> special_set_;
  detail::TokenTrie initial_;
  detail::TokenTrie continuation_;
};

inline constexpr std::string_view kVocabFormat = "medtok-vocab/1";

inline std::filesystem::path vocab_meta_path(const std::filesystem::path& vocab_path) {
  auto p = vocab_path;
  p += ".meta.json";
  return p;
}

/// Writes one token per line plus a <file>.meta.json sidecar.
inline void write_vocabulary(const Vocabulary& vocab, const std::filesystem::path& path) {
  {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write '" + path.string() + "'");
    for (const auto& t : vocab.tokens()) out << t << '\n';
  }
  nlohmann::ordered_json meta;
  meta["format"] = kVocabFormat;
  meta["continuation_prefix"] = vocab.continuation_prefix();
  meta["unk_token"] = vocab.unk_token();
  meta["specials"] = vocab.specials();
  meta["size"] = vocab.size();
  std::ofstream out(vocab_meta_path(path), std::ios::binary);
  if (!out) throw ValidationError("cannot write vocabulary metadata for '" + path.string() + "'");
  out << meta.dump(2) << '\n';
}

inline Vocabulary read_vocabulary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open vocabulary '" + path.string() + "'");
  std::vector<std::string> tokens;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) throw ValidationError(path.string(), line_no, "empty token line");
    tokens.push_back(line);
  }
  std::string prefix(kContinuationPrefix);
  std::string unk(kUnkToken);
  std::vector<std::string> specials = default_specials();
  if (std::ifstream meta_in(vocab_meta_path(path)); meta_in) {
    try {
      const auto meta = nlohmann::json::parse(meta_in);
      prefix = meta.value("continuation_prefix", prefix);
      unk = meta.value("unk_token", unk);
      if (meta.contains("specials")) specials = meta.at("specials").get<std::vector<std::string>>();
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError("bad vocabulary metadata for '" + path.string() + "': " + e.what());
    }
  }
  try {
    return Vocabulary(std::move(tokens), prefix, specials, unk);
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

}  // namespace medtok
