#pragma once

// Manifest-driven de-identification. Only strings known from a record's
// identity metadata (plus a curated institution list) are searched for;
// nothing is flagged by shape alone, so lab values such as "120-90" are
// never touched unless a manifest lists them. Hits are replaced with
// same-format surrogates, consistently within a record, and every
// replacement is logged against the original offsets.

#include <algorithm>
#include <array>
#include <cctype>
#include <chrono>
#include <cstdio>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "medtok/error.hpp"
#include "medtok/morphology.hpp"
#include "medtok/random.hpp"
#include "medtok/record.hpp"
#include "medtok/surrogate_pools_data.hpp"
#include "medtok/unicode.hpp"

namespace medtok::deid {

enum class Category { name, id, phone, email, zip, date, address, institution };

inline constexpr std::array<std::string_view, 8> kCategoryNames = {
    "name", "id", "phone", "email", "zip", "date", "address", "institution"};

inline std::string_view to_string(Category c) { return kCategoryNames[static_cast<std::size_t>(c)]; }

inline Category parse_category(std::string_view s) {
  for (std::size_t i = 0; i < kCategoryNames.size(); ++i) {
    if (kCategoryNames[i] == s) return static_cast<Category>(i);
  }
  throw ValidationError("unknown PII category '" + std::string(s) + "'");
}

struct InstitutionList {
  std::vector<std::string> names;
};

inline InstitutionList read_institutions(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open institution list '" + path.string() + "'");
  InstitutionList list;
  std::string line;
  while (std::getline(in, line)) {
    const auto t = unicode::trim(line);
    if (!t.empty() && t.front() != '#') list.names.emplace_back(t);
  }
  return list;
}

/// One detected PII occurrence; [start, end) are code-point offsets of the
/// part that gets replaced (proclitics stay in place).
struct PiiHit {
  Category category = Category::name;
  std::size_t start = 0;
  std::size_t end = 0;
  std::string key;  // canonical identity of the underlying entity
};

struct LogEntry {
  std::string record_id;
  Category category = Category::name;
  std::size_t start = 0;
  std::size_t end = 0;
  std::string original;
  std::string surrogate;
};

struct ReplacementLog {
  std::vector<LogEntry> entries;
};

// ---------------------------------------------------------------------------
// Dates

struct CalendarDate {
  int year = 0;
  unsigned month = 0;
  unsigned day = 0;
  bool operator==(const CalendarDate&) const = default;
};

/// Surface layout of a numeric date, kept so a shifted date can be written
/// back in the same shape.
struct DateLayout {
  bool year_first = false;
  char32_t separator = U'/';
  std::size_t day_width = 2;
  std::size_t month_width = 2;
  std::size_t year_width = 4;
};

struct ParsedDate {
  CalendarDate date;
  DateLayout layout;
  std::size_t length = 0;  // code points consumed
};

namespace detail {

inline bool valid_date(const CalendarDate& d) {
  using namespace std::chrono;
  return year_month_day{year{d.year}, month{d.month}, day{d.day}}.ok();
}

inline bool is_date_sep(char32_t c) { return c == U'/' || c == U'.' || c == U'-'; }

inline std::size_t digit_run(std::u32string_view s, std::size_t pos, std::size_t max_len, int& value) {
  std::size_t n = 0;
  value = 0;
  while (pos + n < s.size() && n < max_len && unicode::is_ascii_digit(s[pos + n])) {
    value = value * 10 + static_cast<int>(s[pos + n] - U'0');
    ++n;
  }
  return n;
}

inline int expand_year(int y, std::size_t width) {
  if (width == 4) return y;
  return y < 50 ? 2000 + y : 1900 + y;
}

}  // namespace detail

/// Parses D/M/Y (1-2 digit day and month, 2 or 4 digit year) or Y-M-D at
/// pos, with one separator kind from / . -
inline std::optional<ParsedDate> parse_date_at(std::u32string_view s, std::size_t pos) {
  int a = 0, b = 0, c = 0;
  const std::size_t la = detail::digit_run(s, pos, 4, a);
  if (la == 0 || la == 3) return std::nullopt;
  std::size_t i = pos + la;
  if (i >= s.size() || !detail::is_date_sep(s[i])) return std::nullopt;
  const char32_t sep = s[i++];
  const std::size_t lb = detail::digit_run(s, i, 2, b);
  if (lb == 0) return std::nullopt;
  i += lb;
  if (i >= s.size() || s[i] != sep) return std::nullopt;
  ++i;
  ParsedDate out;
  out.layout.separator = sep;
  std::size_t lc = 0;
  if (la == 4) {
    lc = detail::digit_run(s, i, 2, c);
    if (lc == 0) return std::nullopt;
    out.layout.year_first = true;
    out.layout.year_width = 4;
    out.layout.month_width = lb;
    out.layout.day_width = lc;
    out.date = {a, static_cast<unsigned>(b), static_cast<unsigned>(c)};
  } else {
    lc = detail::digit_run(s, i, 4, c);
    if (lc != 2 && lc != 4) return std::nullopt;
    out.layout.day_width = la;
    out.layout.month_width = lb;
    out.layout.year_width = lc;
    out.date = {detail::expand_year(c, lc), static_cast<unsigned>(b), static_cast<unsigned>(a)};
  }
  i += lc;
  if (i < s.size() && (unicode::is_word_char(s[i]) ||
                       (detail::is_date_sep(s[i]) && i + 1 < s.size() && unicode::is_ascii_digit(s[i + 1])))) {
    return std::nullopt;
  }
  if (!detail::valid_date(out.date)) return std::nullopt;
  out.length = i - pos;
  return out;
}

inline std::optional<CalendarDate> parse_date(std::string_view text) {
  const auto cps = unicode::decode(unicode::trim(text));
  auto parsed = parse_date_at(cps, 0);
  if (!parsed || parsed->length != cps.size()) return std::nullopt;
  return parsed->date;
}

inline CalendarDate shift_date(const CalendarDate& d, int days) {
  using namespace std::chrono;
  const year_month_day ymd{sys_days{year_month_day{year{d.year}, month{d.month}, day{d.day}}} +
                           std::chrono::days{days}};
  return {static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day())};
}

inline std::string format_date(const CalendarDate& d, const DateLayout& layout) {
  auto pad = [](int v, std::size_t width) {
    std::string s = std::to_string(v);
    while (s.size() < width) s.insert(s.begin(), '0');
    return s;
  };
  std::string sep;
  unicode::append_utf8(sep, layout.separator);
  const int y = layout.year_width == 4 ? d.year : d.year % 100;
  const std::string ys = pad(y, layout.year_width);
  const std::string ms = pad(static_cast<int>(d.month), layout.month_width);
  const std::string ds = pad(static_cast<int>(d.day), layout.day_width);
  return layout.year_first ? ys + sep + ms + sep + ds : ds + sep + ms + sep + ys;
}

inline std::string date_key(const CalendarDate& d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", d.year, d.month, d.day);
  return buf;
}

// ---------------------------------------------------------------------------
// Matchers

namespace detail {

inline bool is_number_sep(char32_t c) { return c == U'-' || c == U' ' || c == U'.'; }

inline std::string ascii_digits(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c >= '0' && c <= '9') out.push_back(c);
  }
  return out;
}

inline std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

inline std::vector<std::string> split_words(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto sp = s.find(' ', start);
    const auto end = sp == std::string::npos ? s.size() : sp;
    if (end > start) out.push_back(s.substr(start, end - start));
    if (sp == std::string::npos) break;
    start = sp + 1;
  }
  return out;
}

inline bool is_email_char(char32_t c) {
  return (c < 128 && (std::isalnum(static_cast<int>(c)) != 0)) || c == U'_' || c == U'%' || c == U'+' ||
         c == U'-' || c == U'@' || c == U'.';
}

}  // namespace detail

/// Immutable matcher set built from one manifest plus the institution list.
class MatcherSet {
 public:
  MatcherSet() = default;

  MatcherSet(const PiiManifest& manifest, const InstitutionList& institutions) {
    auto add_phrases = [&](const std::vector<std::string>& list, Category cat) {
      for (const auto& s : list) {
        const std::string key = unicode::encode(morph::PhraseMatcher::normalize(unicode::decode(s)));
        if (key.empty()) continue;
        const std::size_t entry = phrase_entries_.size();
        phrase_entries_.push_back({cat, key});
        phrases_.add(s, entry);
        if (cat == Category::name) {
          // Each word of a multi-word name is identifying on its own.
          const auto parts = detail::split_words(key);
          if (parts.size() > 1) {
            for (const auto& p : parts) {
              const std::size_t sub = phrase_entries_.size();
              phrase_entries_.push_back({cat, p});
              phrases_.add(p, sub);
            }
          }
        }
      }
    };
    add_phrases(manifest.patient_names, Category::name);
    add_phrases(manifest.relative_names, Category::name);
    add_phrases(manifest.contact_names, Category::name);
    add_phrases(manifest.doctor_names, Category::name);
    add_phrases(manifest.addresses, Category::address);
    add_phrases(institutions.names, Category::institution);

    auto add_numbers = [&](const std::vector<std::string>& list, Category cat) {
      for (const auto& s : list) {
        auto digits = detail::ascii_digits(s);
        if (digits.size() >= 2) numbers_.push_back({cat, std::move(digits)});
      }
    };
    add_numbers(manifest.id_numbers, Category::id);
    add_numbers(manifest.phone_numbers, Category::phone);
    add_numbers(manifest.zip_codes, Category::zip);

    for (const auto& e : manifest.emails) {
      auto lower = detail::ascii_lower(unicode::trim(e));
      if (lower.find('@') != std::string::npos) emails_.push_back(unicode::decode(lower));
    }
    for (const auto& d : manifest.dates) {
      if (const auto parsed = parse_date(d)) dates_.push_back(*parsed);
    }
  }

  const std::vector<CalendarDate>& dates() const noexcept { return dates_; }

  bool empty() const {
    return phrases_.empty() && numbers_.empty() && emails_.empty() && dates_.empty();
  }

  /// All matcher hits after overlap resolution (longest, then leftmost).
  std::vector<PiiHit> find(std::u32string_view text) const {
    std::vector<PiiHit> candidates;
    for (const auto& h : phrases_.find_all(text)) {
      const auto& e = phrase_entries_[h.entry];
      candidates.push_back({e.category, h.core_start, h.end, e.key});
    }
    find_numbers(text, candidates);
    find_emails(text, candidates);
    find_dates(text, candidates);

    std::vector<morph::Hit> spans;
    spans.reserve(candidates.size());
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      spans.push_back({candidates[i].start, candidates[i].start, candidates[i].end, i});
    }
    std::vector<PiiHit> out;
    for (const auto& h : morph::resolve_overlaps(std::move(spans))) out.push_back(candidates[h.entry]);
    return out;
  }

 private:
  struct PhraseEntry {
    Category category;
    std::string key;
  };
  struct NumberEntry {
    Category category;
    std::string digits;
  };

  void find_numbers(std::u32string_view s, std::vector<PiiHit>& out) const {
    if (numbers_.empty()) return;
    for (std::size_t p = 0; p < s.size(); ++p) {
      if (!unicode::is_ascii_digit(s[p])) continue;
      if (p > 0 && unicode::is_word_char(s[p - 1])) continue;
      if (p >= 2 && (s[p - 1] == U'-' || s[p - 1] == U'.') && unicode::is_ascii_digit(s[p - 2])) continue;
      for (const auto& n : numbers_) {
        std::size_t i = p;
        bool ok = true;
        for (std::size_t k = 0; k < n.digits.size(); ++k) {
          if (k > 0 && i + 1 < s.size() && detail::is_number_sep(s[i]) &&
              s[i + 1] == static_cast<char32_t>(n.digits[k])) {
            ++i;
          }
          if (i >= s.size() || s[i] != static_cast<char32_t>(n.digits[k])) {
            ok = false;
            break;
          }
          ++i;
        }
        if (!ok) continue;
        if (i < s.size() && (unicode::is_word_char(s[i]) ||
                             ((s[i] == U'-' || s[i] == U'.') && i + 1 < s.size() && unicode::is_ascii_digit(s[i + 1])))) {
          continue;
        }
        out.push_back({n.category, p, i, std::string(to_string(n.category)) + ":" + n.digits});
      }
    }
  }

  void find_emails(std::u32string_view s, std::vector<PiiHit>& out) const {
    for (const auto& e : emails_) {
      if (e.size() > s.size()) continue;
      for (std::size_t p = 0; p + e.size() <= s.size(); ++p) {
        if (p > 0 && detail::is_email_char(s[p - 1]) && s[p - 1] != U'.') continue;
        if (p > 0 && s[p - 1] == U'.' && p > 1 && detail::is_email_char(s[p - 2])) continue;
        bool eq = true;
        for (std::size_t k = 0; k < e.size() && eq; ++k) {
          char32_t c = s[p + k];
          if (c >= U'A' && c <= U'Z') c = c - U'A' + U'a';
          eq = c == e[k];
        }
        if (!eq) continue;
        const std::size_t end = p + e.size();
        if (end < s.size()) {
          const char32_t c = s[end];
          if (c != U'.' && detail::is_email_char(c)) continue;
          if (c == U'.' && end + 1 < s.size() && detail::is_email_char(s[end + 1]) && s[end + 1] != U'.') continue;
        }
        out.push_back({Category::email, p, end, "email:" + unicode::encode(e)});
      }
    }
  }

  void find_dates(std::u32string_view s, std::vector<PiiHit>& out) const {
    if (dates_.empty()) return;
    for (std::size_t p = 0; p < s.size(); ++p) {
      if (!unicode::is_ascii_digit(s[p])) continue;
      if (p > 0 && (unicode::is_word_char(s[p - 1]) ||
                    (detail::is_date_sep(s[p - 1]) && p >= 2 && unicode::is_ascii_digit(s[p - 2])))) {
        continue;
      }
      const auto parsed = parse_date_at(s, p);
      if (!parsed) continue;
      for (const auto& d : dates_) {
        const bool same = parsed->layout.year_width == 2
                              ? (d.month == parsed->date.month && d.day == parsed->date.day &&
                                 d.year % 100 == parsed->date.year % 100)
                              : d == parsed->date;
        if (same) {
          out.push_back({Category::date, p, p + parsed->length, "date:" + date_key(parsed->date)});
          break;
        }
      }
    }
  }

  morph::PhraseMatcher phrases_;
  std::vector<PhraseEntry> phrase_entries_;
  std::vector<NumberEntry> numbers_;
  std::vector<std::u32string> emails_;
  std::vector<CalendarDate> dates_;
};

inline MatcherSet build_matchers(const PiiManifest& manifest, const InstitutionList& institutions) {
  return MatcherSet(manifest, institutions);
}

// ---------------------------------------------------------------------------
// Surrogates

namespace detail {

inline bool is_latin(std::string_view s) {
  for (char32_t c : unicode::decode(s)) {
    if (unicode::is_word_char(c)) return c < 0x250;
  }
  return false;
}

template <std::size_t N>
std::vector<std::string_view> script_pool(const std::array<std::string_view, N>& pool, bool latin) {
  std::vector<std::string_view> out;
  for (auto s : pool) {
    if (is_latin(s) == latin) out.push_back(s);
  }
  if (out.empty()) out.assign(pool.begin(), pool.end());
  return out;
}

inline bool valid_israeli_id(std::string_view digits) {
  if (digits.size() != 9) return false;
  int sum = 0;
  for (std::size_t i = 0; i < 9; ++i) {
    int v = (digits[i] - '0') * (i % 2 == 0 ? 1 : 2);
    sum += v > 9 ? v - 9 : v;
  }
  return sum % 10 == 0;
}

inline char israeli_check_digit(std::string_view first8) {
  int sum = 0;
  for (std::size_t i = 0; i < 8; ++i) {
    int v = (first8[i] - '0') * (i % 2 == 0 ? 1 : 2);
    sum += v > 9 ? v - 9 : v;
  }
  return static_cast<char>('0' + (10 - sum % 10) % 10);
}

inline constexpr std::array<std::string_view, 8> kPublicMailDomains = {
    "gmail.com", "walla.co.il", "walla.com", "yahoo.com", "hotmail.com", "outlook.com", "bezeqint.net", "012.net.il"};

}  // namespace detail

/// Per-record surrogate state: one mapping per entity key, drawn in order of
/// first appearance from a stream seeded by (seed, record id).
class SurrogateFactory {
 public:
  SurrogateFactory(std::uint64_t seed, const std::string& record_id, const MatcherSet& matchers)
      : rng_(derive_seed(seed, "deid:" + record_id)), matchers_(matchers) {
    // Drawn first so the shift does not depend on which hits occur. A shift
    // that would turn one listed date into another is redrawn.
    const auto& dates = matchers.dates();
    for (int attempt = 0; attempt < 64; ++attempt) {
      const auto magnitude = static_cast<int>(rng_.between(30, 365));
      date_shift_days_ = rng_.chance(0.5) ? magnitude : -magnitude;
      const bool clash = std::any_of(dates.begin(), dates.end(), [&](const CalendarDate& d) {
        const CalendarDate moved = shift_date(d, date_shift_days_);
        return std::any_of(dates.begin(), dates.end(), [&](const CalendarDate& o) {
          return o.month == moved.month && o.day == moved.day && o.year % 100 == moved.year % 100;
        });
      });
      if (!clash) break;
    }
  }

  int date_shift_days() const noexcept { return date_shift_days_; }

  std::string surrogate(const PiiHit& hit, std::u32string_view original) {
    if (hit.category == Category::date) return shift_occurrence(original);
    if (hit.category == Category::name) {
      // Word by word, so a full name and its parts map consistently.
      std::string out;
      for (const auto& w : detail::split_words(hit.key)) {
        if (!out.empty()) out.push_back(' ');
        out += name_for(w);
      }
      return out;
    }
    const std::string key = std::string(to_string(hit.category)) + ":" + hit.key;
    auto it = by_key_.find(key);
    if (it == by_key_.end()) {
      it = by_key_.emplace(key, make(hit, unicode::encode(original))).first;
    }
    switch (hit.category) {
      case Category::id:
      case Category::phone:
      case Category::zip:
        return lay_out_digits(original, it->second);
      default:
        return it->second;
    }
  }

 private:
  std::string name_for(const std::string& word) {
    const std::string key = "name:" + word;
    auto it = by_key_.find(key);
    if (it == by_key_.end()) it = by_key_.emplace(key, pick(pools::k_names, detail::is_latin(word))).first;
    return it->second;
  }

  bool leaks(std::string_view candidate) const {
    return !matchers_.find(unicode::decode(candidate)).empty();
  }

  template <std::size_t N>
  std::string pick(const std::array<std::string_view, N>& pool, bool latin) {
    const auto options = detail::script_pool(pool, latin);
    const std::size_t start = rng_.below(options.size());
    std::optional<std::string> reuse;
    for (std::size_t k = 0; k < options.size(); ++k) {
      const std::string candidate(options[(start + k) % options.size()]);
      if (leaks(candidate)) continue;
      if (!used_.contains(candidate)) {
        used_.insert(candidate);
        return candidate;
      }
      if (!reuse) reuse = candidate;
    }
    if (reuse) return *reuse;  // pool exhausted: cycle
    throw ValidationError("every surrogate in the pool collides with the manifest");
  }

  std::string random_digits(std::size_t n, bool nonzero_first) {
    std::string s;
    for (std::size_t i = 0; i < n; ++i) {
      const int lo = (i == 0 && nonzero_first) ? 1 : 0;
      s.push_back(static_cast<char>('0' + rng_.between(lo, 9)));
    }
    return s;
  }

  std::string make_digits(Category cat, const std::string& digits) {
    for (int attempt = 0; attempt < 1000; ++attempt) {
      std::string s;
      if (cat == Category::phone) {
        const std::size_t keep = digits.size() >= 9 ? 3 : 1;
        s = digits.substr(0, keep) + random_digits(digits.size() - keep, false);
      } else if (cat == Category::id && detail::valid_israeli_id(digits)) {
        s = random_digits(8, false);
        s.push_back(detail::israeli_check_digit(s));
      } else {
        s = random_digits(digits.size(), digits.front() != '0');
      }
      if (s != digits && !leaks(s)) return s;
    }
    throw ValidationError("could not draw a non-colliding numeric surrogate");
  }

  std::string make_email(const std::string& original) {
    const auto at = original.find('@');
    const std::string domain = detail::ascii_lower(original.substr(at + 1));
    const bool public_domain = std::find(detail::kPublicMailDomains.begin(), detail::kPublicMailDomains.end(),
                                         domain) != detail::kPublicMailDomains.end();
    for (int attempt = 0; attempt < 1000; ++attempt) {
      std::string local;
      for (std::size_t i = 0; i < std::max<std::size_t>(at, 1); ++i) {
        local.push_back(static_cast<char>('a' + rng_.below(26)));
      }
      std::string s = local + "@" + (public_domain ? domain : std::string("mail.example.org"));
      if (!leaks(s) && detail::ascii_lower(original) != s) return s;
    }
    throw ValidationError("could not draw a non-colliding e-mail surrogate");
  }

  std::string make(const PiiHit& hit, const std::string& original) {
    switch (hit.category) {
      case Category::institution:
        return pick(pools::k_institutions, detail::is_latin(original));
      case Category::address: {
        std::string out = pick(pools::k_streets, false);
        const auto digits = detail::ascii_digits(original);
        if (!digits.empty()) out += " " + random_digits(std::min<std::size_t>(digits.size(), 3), true);
        return out;
      }
      case Category::email:
        return make_email(original);
      case Category::id:
      case Category::phone:
      case Category::zip:
        return make_digits(hit.category, detail::ascii_digits(original));
      case Category::name:
      case Category::date:
        break;
    }
    return original;
  }

  /// Writes the surrogate digits into the occurrence's separator layout.
  static std::string lay_out_digits(std::u32string_view original, const std::string& digits) {
    std::string out;
    std::size_t k = 0;
    for (char32_t c : original) {
      if (unicode::is_ascii_digit(c) && k < digits.size()) {
        out.push_back(digits[k++]);
      } else {
        unicode::append_utf8(out, c);
      }
    }
    return out;
  }

  std::string shift_occurrence(std::u32string_view original) {
    const auto parsed = parse_date_at(original, 0);
    if (!parsed) return unicode::encode(original);
    return format_date(shift_date(parsed->date, date_shift_days_), parsed->layout);
  }

  Rng rng_;
  const MatcherSet& matchers_;
  int date_shift_days_ = 0;
  std::map<std::string, std::string> by_key_;
  std::set<std::string> used_;
};

struct DeidResult {
  Record record;
  ReplacementLog log;
};

/// Replaces every matcher hit with a surrogate. Output differs from the
/// input only inside logged spans.
inline DeidResult deidentify(const Record& record, const MatcherSet& matchers, std::uint64_t seed) {
  if (unicode::is_blank(record.text)) throw ValidationError("record '" + record.id + "' has empty text");
  DeidResult result{record, {}};
  if (matchers.empty()) return result;
  const std::u32string text = unicode::decode(record.text);
  const auto hits = matchers.find(text);
  if (hits.empty()) return result;

  SurrogateFactory factory(seed, record.id, matchers);
  std::string out;
  std::size_t cursor = 0;
  for (const auto& h : hits) {
    out += unicode::encode(std::u32string_view(text).substr(cursor, h.start - cursor));
    const std::u32string_view original = std::u32string_view(text).substr(h.start, h.end - h.start);
    std::string surrogate = factory.surrogate(h, original);
    out += surrogate;
    result.log.entries.push_back(
        {record.id, h.category, h.start, h.end, unicode::encode(original), std::move(surrogate)});
    cursor = h.end;
  }
  out += unicode::encode(std::u32string_view(text).substr(cursor));
  result.record.text = std::move(out);
  return result;
}

struct Residual {
  Category category = Category::name;
  std::size_t start = 0;
  std::size_t end = 0;
  std::string text;
};

/// Re-scans de-identified output; anything found is a leak.
inline std::vector<Residual> verify(const Record& record_out, const PiiManifest& manifest,
                                    const InstitutionList& institutions = {}) {
  const MatcherSet matchers(manifest, institutions);
  const std::u32string text = unicode::decode(record_out.text);
  std::vector<Residual> out;
  for (const auto& h : matchers.find(text)) {
    out.push_back({h.category, h.start, h.end,
                   unicode::encode(std::u32string_view(text).substr(h.start, h.end - h.start))});
  }
  return out;
}

inline ordered_json to_json(const LogEntry& e) {
  ordered_json j;
  j["record_id"] = e.record_id;
  j["category"] = to_string(e.category);
  j["start"] = e.start;
  j["end"] = e.end;
  j["original"] = e.original;
  j["surrogate"] = e.surrogate;
  return j;
}

}  // namespace medtok::deid
