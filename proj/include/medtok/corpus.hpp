#pragma once

// Line-delimited record ingestion, exact-duplicate filtering, corpus
// statistics and seeded sampling.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "medtok/error.hpp"
#include "medtok/random.hpp"
#include "medtok/record.hpp"
#include "medtok/unicode.hpp"

namespace medtok::corpus {

struct CorpusStats {
  std::uint64_t record_count = 0;
  std::uint64_t word_count = 0;
  std::uint64_t char_count = 0;

  CorpusStats& operator+=(const CorpusStats& o) {
    record_count += o.record_count;
    word_count += o.word_count;
    char_count += o.char_count;
    return *this;
  }
  friend CorpusStats operator+(CorpusStats a, const CorpusStats& b) { return a += b; }
  bool operator==(const CorpusStats&) const = default;
};

/// Trimmed, with internal whitespace runs collapsed to one space.
inline std::string normalize_for_dedup(std::string_view text) {
  std::string out;
  bool pending_space = false;
  for (char32_t c : unicode::decode(text)) {
    if (unicode::is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    unicode::append_utf8(out, c);
  }
  return out;
}

/// Number of maximal non-whitespace runs.
inline std::uint64_t count_words(std::string_view text) {
  std::uint64_t words = 0;
  bool in_word = false;
  for (char32_t c : unicode::decode(text)) {
    const bool space = unicode::is_space(c);
    if (!space && !in_word) ++words;
    in_word = !space;
  }
  return words;
}

inline CorpusStats stats_of(const Record& r) {
  return {1, count_words(r.text), unicode::count_scalars(r.text)};
}

inline CorpusStats stats(std::span<const Record> records) {
  CorpusStats s;
  for (const auto& r : records) s += stats_of(r);
  return s;
}

/// Streaming reader: validates each line, rejects duplicate ids and
/// optionally skips records whose normalized text was already seen.
class RecordReader {
 public:
  RecordReader(std::istream& in, std::string source, bool dedup)
      : in_(in), source_(std::move(source)), dedup_(dedup) {}

  std::optional<Record> next() {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (unicode::trim(line).empty()) continue;
      Record r;
      try {
        r = parse_record(line);
      } catch (const ValidationError& e) {
        throw ValidationError(source_, line_no_, e.what());
      }
      const auto [it, fresh] = id_lines_.emplace(r.id, line_no_);
      if (!fresh) {
        throw ValidationError(source_, line_no_,
                              "duplicate id '" + r.id + "' (first seen at line " +
                                  std::to_string(it->second) + ")");
      }
      if (dedup_) {
        if (!seen_text_.insert(normalize_for_dedup(r.text)).second) {
          ++skipped_;
          continue;
        }
      }
      return r;
    }
    return std::nullopt;
  }

  std::size_t skipped() const noexcept { return skipped_; }
  std::size_t line() const noexcept { return line_no_; }

 private:
  std::istream& in_;
  std::string source_;
  bool dedup_;
  std::size_t line_no_ = 0;
  std::size_t skipped_ = 0;
  std::unordered_map<std::string, std::size_t> id_lines_;
  std::unordered_set<std::string> seen_text_;
};

struct IngestResult {
  std::vector<Record> records;
  std::size_t skipped_duplicates = 0;
};

inline IngestResult ingest(std::istream& in, const std::string& source, bool dedup) {
  RecordReader reader(in, source, dedup);
  IngestResult result;
  while (auto r = reader.next()) result.records.push_back(std::move(*r));
  result.skipped_duplicates = reader.skipped();
  return result;
}

inline IngestResult ingest(const std::filesystem::path& path, bool dedup) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open record file '" + path.string() + "'");
  return ingest(in, path.string(), dedup);
}

/// n records drawn uniformly without replacement, in draw order.
inline std::vector<Record> sample(std::span<const Record> records, std::size_t n,
                                  std::uint64_t seed) {
  if (n > records.size()) {
    throw ValidationError("sample size " + std::to_string(n) + " exceeds collection size " +
                          std::to_string(records.size()));
  }
  std::vector<std::size_t> index(records.size());
  for (std::size_t i = 0; i < index.size(); ++i) index[i] = i;
  Rng rng(derive_seed(seed, "corpus.sample"));
  // Partial Fisher-Yates: position i receives a uniform pick from the rest.
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = i + rng.below(index.size() - i);
    std::swap(index[i], index[j]);
  }
  std::vector<Record> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(records[index[i]]);
  return out;
}

inline void write_records(std::ostream& out, std::span<const Record> records) {
  for (const auto& r : records) out << dump_line(to_json(r)) << '\n';
}

inline void write_records(const std::filesystem::path& path, std::span<const Record> records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write '" + path.string() + "'");
  write_records(out, records);
}

inline ordered_json to_json(const CorpusStats& s) {
  ordered_json j;
  j["records"] = s.record_count;
  j["words"] = s.word_count;
  j["chars"] = s.char_count;
  return j;
}

}  // namespace medtok::corpus
