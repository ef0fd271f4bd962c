#pragma once

// Temporal relation classification datasets: event marking, sentence
// windows, pair generation, class clipping, record-disjoint splits,
// baselines and weighted / relaxed F1.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "medtok/error.hpp"
#include "medtok/morphology.hpp"
#include "medtok/random.hpp"
#include "medtok/record.hpp"
#include "medtok/unicode.hpp"

namespace medtok::trc {

enum class RelationLabel { before, after, equal, vague, invalid };

inline constexpr std::array<RelationLabel, 4> kEvalLabels = {RelationLabel::before, RelationLabel::after,
                                                             RelationLabel::equal, RelationLabel::vague};

inline std::string_view to_string(RelationLabel l) {
  switch (l) {
    case RelationLabel::before: return "BEFORE";
    case RelationLabel::after: return "AFTER";
    case RelationLabel::equal: return "EQUAL";
    case RelationLabel::vague: return "VAGUE";
    case RelationLabel::invalid: return "INVALID";
  }
  return "INVALID";
}

inline RelationLabel parse_label(std::string_view s) {
  std::string up(s);
  for (auto& c : up) {
    if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
  }
  if (up == "BEFORE") return RelationLabel::before;
  if (up == "AFTER") return RelationLabel::after;
  if (up == "EQUAL") return RelationLabel::equal;
  if (up == "VAGUE") return RelationLabel::vague;
  if (up == "INVALID") return RelationLabel::invalid;
  throw ValidationError("unknown relation label '" + std::string(s) + "'");
}

inline std::size_t label_index(RelationLabel l) { return static_cast<std::size_t>(l); }

enum class EventSource { term_list, external };

inline std::string_view to_string(EventSource s) { return s == EventSource::term_list ? "term_list" : "external"; }

inline EventSource parse_source(std::string_view s) {
  if (s == "term_list") return EventSource::term_list;
  if (s == "external") return EventSource::external;
  throw ValidationError("unknown event source '" + std::string(s) + "'");
}

/// [start, end) in code points of the record text.
struct Event {
  std::string record_id;
  std::size_t start = 0;
  std::size_t end = 0;
  std::string surface;
  std::string term;
  EventSource source = EventSource::term_list;

  bool operator==(const Event&) const = default;
};

using Span = std::pair<std::size_t, std::size_t>;

struct EventPair {
  Event e1;
  Event e2;
  std::string context;
  Span context_span{0, 0};
  std::optional<RelationLabel> gold;
  std::optional<RelationLabel> predicted;
  std::optional<double> confidence;

  bool operator==(const EventPair&) const = default;
};

// ---------------------------------------------------------------------------
// Event marking

inline std::vector<std::string> read_terms(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open term list '" + path.string() + "'");
  std::vector<std::string> terms;
  std::string line;
  while (std::getline(in, line)) {
    const auto t = unicode::trim(line);
    if (!t.empty() && t.front() != '#') terms.emplace_back(t);
  }
  return terms;
}

/// Term list compiled once, applied to many records.
class TermMarker {
 public:
  explicit TermMarker(std::span<const std::string> terms) {
    if (terms.empty()) throw ValidationError("term list is empty");
    for (const auto& t : terms) {
      if (matcher_.add(t, terms_.size())) terms_.emplace_back(unicode::trim(t));
    }
    if (terms_.empty()) throw ValidationError("term list has no usable terms");
  }

  std::vector<Event> mark(const Record& record) const {
    const std::u32string text = unicode::decode(record.text);
    std::vector<Event> out;
    for (const auto& h : morph::resolve_overlaps(matcher_.find_all(text))) {
      out.push_back({record.id, h.start, h.end,
                     unicode::encode(std::u32string_view(text).substr(h.start, h.end - h.start)), terms_[h.entry],
                     EventSource::term_list});
    }
    return out;
  }

 private:
  morph::PhraseMatcher matcher_;
  std::vector<std::string> terms_;
};

inline std::vector<Event> mark_events_terms(const Record& record, std::span<const std::string> terms) {
  return TermMarker(terms).mark(record);
}

inline std::vector<Event> import_events(const Record& record, std::vector<Span> spans) {
  const std::u32string text = unicode::decode(record.text);
  auto show = [](const Span& s) { return "[" + std::to_string(s.first) + ", " + std::to_string(s.second) + ")"; };
  for (const auto& s : spans) {
    if (s.first >= s.second || s.second > text.size()) {
      throw ValidationError("event span " + show(s) + " is empty or outside record '" + record.id + "'");
    }
  }
  std::sort(spans.begin(), spans.end());
  for (std::size_t i = 1; i < spans.size(); ++i) {
    if (spans[i].first < spans[i - 1].second) {
      throw ValidationError("event span " + show(spans[i]) + " overlaps " + show(spans[i - 1]) + " in record '" +
                            record.id + "'");
    }
  }
  std::vector<Event> out;
  for (const auto& s : spans) {
    std::string surface = unicode::encode(std::u32string_view(text).substr(s.first, s.second - s.first));
    out.push_back({record.id, s.first, s.second, surface, surface, EventSource::external});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sentences and pairs

namespace detail {
inline bool is_hard_punct(char32_t c) { return c == U'.' || c == U'?' || c == U'!' || c == U'\n'; }
}  // namespace detail

/// Sentence spans covering the text without gaps. A period between two
/// digits does not split; a run of hard punctuation ends one sentence.
inline std::vector<Span> split_sentences(std::u32string_view text) {
  std::vector<Span> out;
  const std::size_t n = text.size();
  std::size_t start = 0;
  std::size_t i = 0;
  while (i < n) {
    const char32_t c = text[i];
    const bool decimal = c == U'.' && i > 0 && i + 1 < n && unicode::is_ascii_digit(text[i - 1]) &&
                         unicode::is_ascii_digit(text[i + 1]);
    if (!detail::is_hard_punct(c) || decimal) {
      ++i;
      continue;
    }
    while (i < n && detail::is_hard_punct(text[i])) ++i;
    out.emplace_back(start, i);
    start = i;
  }
  if (start < n) {
    bool blank = true;
    for (std::size_t k = start; k < n && blank; ++k) blank = unicode::is_space(text[k]);
    if (blank && !out.empty()) {
      out.back().second = n;
    } else {
      out.emplace_back(start, n);
    }
  }
  return out;
}

inline std::vector<Span> split_sentences(std::string_view text) { return split_sentences(unicode::decode(text)); }

/// Every pair of events in the same or adjacent sentences, in text order.
inline std::vector<EventPair> generate_pairs(std::string_view text, std::span<const Event> events,
                                             std::span<const Span> sentences) {
  std::vector<EventPair> out;
  if (events.empty()) return out;
  const std::u32string cps = unicode::decode(text);
  std::vector<std::size_t> sentence_of(events.size());
  for (std::size_t i = 0; i < events.size(); ++i) {
    const auto& e = events[i];
    if (e.record_id != events.front().record_id) throw ValidationError("events from different records");
    if (e.end > cps.size() || e.start >= e.end) throw ValidationError("event span outside record '" + e.record_id + "'");
    if (i > 0 && std::pair(events[i - 1].start, events[i - 1].end) >= std::pair(e.start, e.end)) {
      throw ValidationError("events are not sorted by span in record '" + e.record_id + "'");
    }
    const auto it = std::upper_bound(sentences.begin(), sentences.end(), e.start,
                                     [](std::size_t pos, const Span& s) { return pos < s.second; });
    if (it == sentences.end()) throw ValidationError("event outside every sentence in '" + e.record_id + "'");
    sentence_of[i] = static_cast<std::size_t>(it - sentences.begin());
  }
  for (std::size_t i = 0; i < events.size(); ++i) {
    for (std::size_t j = i + 1; j < events.size(); ++j) {
      if (sentence_of[j] - sentence_of[i] > 1) break;
      const std::size_t lo = sentences[sentence_of[i]].first;
      const std::size_t hi = std::max(sentences[sentence_of[j]].second, events[j].end);
      EventPair p;
      p.e1 = events[i];
      p.e2 = events[j];
      p.context_span = {lo, hi};
      p.context = unicode::encode(std::u32string_view(cps).substr(lo, hi - lo));
      out.push_back(std::move(p));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Dataset shaping

using LabelCounts = std::array<std::uint64_t, 5>;

inline LabelCounts count_labels(std::span<const EventPair> pairs) {
  LabelCounts c{};
  for (const auto& p : pairs) {
    if (!p.gold) throw ValidationError("pair without a gold label in record '" + p.e1.record_id + "'");
    ++c[label_index(*p.gold)];
  }
  return c;
}

/// Subsamples BEFORE pairs down to the largest other class; everything
/// else passes through in its original order.
inline std::vector<EventPair> clip_dataset(std::span<const EventPair> pairs, std::uint64_t seed) {
  const LabelCounts counts = count_labels(pairs);
  if (counts[label_index(RelationLabel::invalid)] != 0) {
    throw ValidationError("INVALID pairs must be filtered out before clipping");
  }
  const std::uint64_t before = counts[label_index(RelationLabel::before)];
  const std::uint64_t target = std::max({counts[label_index(RelationLabel::after)],
                                         counts[label_index(RelationLabel::equal)],
                                         counts[label_index(RelationLabel::vague)]});
  if (before < target) {
    throw ValidationError("BEFORE (" + std::to_string(before) + ") is not the majority class (largest other: " +
                          std::to_string(target) + ")");
  }
  std::vector<std::size_t> before_idx;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (*pairs[i].gold == RelationLabel::before) before_idx.push_back(i);
  }
  Rng rng(derive_seed(seed, "trc.clip"));
  for (std::size_t i = 0; i < target; ++i) {
    std::swap(before_idx[i], before_idx[i + rng.below(before_idx.size() - i)]);
  }
  std::vector<bool> keep(pairs.size(), true);
  for (std::size_t i = target; i < before_idx.size(); ++i) keep[before_idx[i]] = false;
  std::vector<EventPair> out;
  out.reserve(pairs.size() - (before_idx.size() - target));
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (keep[i]) out.push_back(pairs[i]);
  }
  return out;
}

struct SplitResult {
  std::vector<EventPair> train;
  std::vector<EventPair> test;
  std::vector<std::string> warnings;
};

/// Per-label test quotas: frac * count per label, rounded so the quotas sum
/// to round(frac * total) (largest remainder).
inline LabelCounts test_quotas(const LabelCounts& counts, double frac) {
  std::uint64_t total = 0;
  for (auto c : counts) total += c;
  const auto want = static_cast<std::uint64_t>(std::llround(frac * static_cast<double>(total)));
  LabelCounts q{};
  std::vector<std::pair<double, std::size_t>> rema;
  std::uint64_t sum = 0;
  for (std::size_t l = 0; l < counts.size(); ++l) {
    const double exact = frac * static_cast<double>(counts[l]);
    q[l] = static_cast<std::uint64_t>(exact);
    sum += q[l];
    rema.emplace_back(exact - static_cast<double>(q[l]), l);
  }
  std::stable_sort(rema.begin(), rema.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t k = 0; sum < want && k < rema.size(); ++k) {
    if (q[rema[k].second] < counts[rema[k].second]) {
      ++q[rema[k].second];
      ++sum;
    }
  }
  return q;
}

/// Record-disjoint split stratified by label. Records are visited in a
/// seeded order; each goes to test when that brings per-label test counts
/// closer to their quotas.
inline SplitResult split_train_test(std::span<const EventPair> pairs, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw ValidationError("test fraction must lie strictly between 0 and 1");
  }
  const LabelCounts counts = count_labels(pairs);
  const LabelCounts quota = test_quotas(counts, test_fraction);

  std::vector<std::string> order;
  std::map<std::string, std::vector<std::size_t>> by_record;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    auto [it, fresh] = by_record.try_emplace(pairs[i].e1.record_id);
    if (fresh) order.push_back(pairs[i].e1.record_id);
    it->second.push_back(i);
  }

  SplitResult result;
  for (std::size_t l = 0; l < counts.size(); ++l) {
    if (counts[l] == 1) {
      result.warnings.push_back("label " + std::string(to_string(static_cast<RelationLabel>(l))) +
                                " has a single instance; its record is kept in train");
    }
  }

  Rng rng(derive_seed(seed, "trc.split"));
  shuffle(order, rng);
  LabelCounts taken{};
  std::vector<bool> in_test(pairs.size(), false);
  for (const auto& id : order) {
    const auto& idx = by_record[id];
    LabelCounts add{};
    bool forced = false;
    for (auto i : idx) {
      const auto l = label_index(*pairs[i].gold);
      ++add[l];
      forced = forced || counts[l] == 1;
    }
    if (forced) continue;
    std::int64_t now = 0;
    std::int64_t then = 0;
    for (std::size_t l = 0; l < counts.size(); ++l) {
      const auto t = static_cast<std::int64_t>(taken[l]);
      const auto q = static_cast<std::int64_t>(quota[l]);
      now += std::abs(t - q);
      then += std::abs(t + static_cast<std::int64_t>(add[l]) - q);
    }
    if (then < now) {
      for (std::size_t l = 0; l < counts.size(); ++l) taken[l] += add[l];
      for (auto i : idx) in_test[i] = true;
    }
  }
  for (std::size_t i = 0; i < pairs.size(); ++i) (in_test[i] ? result.test : result.train).push_back(pairs[i]);
  return result;
}

enum class BaselineStrategy { majority, textual_order };

inline BaselineStrategy parse_strategy(std::string_view s) {
  if (s == "majority") return BaselineStrategy::majority;
  if (s == "textual_order") return BaselineStrategy::textual_order;
  throw ValidationError("unknown baseline strategy '" + std::string(s) + "'");
}

/// Both strategies answer BEFORE: the majority class, and the label implied
/// by e1 preceding e2 in the text.
inline std::vector<EventPair> predict_baseline(std::span<const EventPair> pairs, BaselineStrategy) {
  std::vector<EventPair> out(pairs.begin(), pairs.end());
  for (auto& p : out) p.predicted = RelationLabel::before;
  return out;
}

// ---------------------------------------------------------------------------
// Evaluation

struct ClassScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::uint64_t support = 0;
};

struct EvalReport {
  std::array<ClassScore, 4> per_class{};
  double weighted_f1 = 0.0;
  double relaxed_f1 = 0.0;
  std::uint64_t discarded_vague_errors = 0;
  std::uint64_t pair_count = 0;
};

namespace detail {

struct Scores {
  std::array<ClassScore, 4> per_class{};
  double weighted_f1 = 0.0;
};

inline Scores score(std::span<const std::pair<RelationLabel, RelationLabel>> gp) {
  std::array<std::uint64_t, 4> tp{}, pred{}, gold{};
  for (const auto& [g, p] : gp) {
    ++gold[label_index(g)];
    ++pred[label_index(p)];
    if (g == p) ++tp[label_index(g)];
  }
  Scores s;
  double weighted = 0.0;
  for (std::size_t c = 0; c < 4; ++c) {
    auto& cs = s.per_class[c];
    cs.support = gold[c];
    cs.precision = pred[c] ? static_cast<double>(tp[c]) / static_cast<double>(pred[c]) : 0.0;
    cs.recall = gold[c] ? static_cast<double>(tp[c]) / static_cast<double>(gold[c]) : 0.0;
    cs.f1 = cs.precision + cs.recall > 0.0 ? 2.0 * cs.precision * cs.recall / (cs.precision + cs.recall) : 0.0;
    weighted += static_cast<double>(gold[c]) * cs.f1;
  }
  s.weighted_f1 = gp.empty() ? 0.0 : weighted / static_cast<double>(gp.size());
  return s;
}

}  // namespace detail

/// Per-class P/R/F1 and support-weighted F1. The relaxed score drops pairs
/// whose gold label is VAGUE but whose prediction is not.
inline EvalReport evaluate(std::span<const EventPair> pairs) {
  if (pairs.empty()) throw ValidationError("nothing to evaluate");
  std::vector<std::pair<RelationLabel, RelationLabel>> all;
  std::vector<std::pair<RelationLabel, RelationLabel>> relaxed;
  EvalReport r;
  for (const auto& p : pairs) {
    if (!p.gold || !p.predicted) {
      throw ValidationError("pair in record '" + p.e1.record_id + "' lacks a gold or predicted label");
    }
    if (*p.gold == RelationLabel::invalid || *p.predicted == RelationLabel::invalid) {
      throw ValidationError("INVALID label in evaluation input (record '" + p.e1.record_id + "')");
    }
    all.emplace_back(*p.gold, *p.predicted);
    if (*p.gold == RelationLabel::vague && *p.predicted != RelationLabel::vague) {
      ++r.discarded_vague_errors;
    } else {
      relaxed.emplace_back(*p.gold, *p.predicted);
    }
  }
  const auto full = detail::score(all);
  r.per_class = full.per_class;
  r.weighted_f1 = full.weighted_f1;
  r.relaxed_f1 = r.discarded_vague_errors == 0 ? full.weighted_f1 : detail::score(relaxed).weighted_f1;
  r.pair_count = pairs.size();
  return r;
}

// ---------------------------------------------------------------------------
// JSON

inline ordered_json to_json(const Event& e) {
  ordered_json j;
  j["record_id"] = e.record_id;
  j["start"] = e.start;
  j["end"] = e.end;
  j["surface"] = e.surface;
  j["term"] = e.term;
  j["source"] = to_string(e.source);
  return j;
}

namespace detail {

template <class Json>
const Json& field(const Json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) throw ValidationError(std::string("missing field '") + key + "'");
  return *it;
}

template <class Json>
std::optional<RelationLabel> optional_label(const Json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw ValidationError(std::string("field '") + key + "' must be a string");
  return parse_label(it->template get<std::string>());
}

}  // namespace detail

template <class Json>
Event event_from_json(const Json& j, const std::string& record_id) {
  Event e;
  e.record_id = j.contains("record_id") ? j["record_id"].template get<std::string>() : record_id;
  e.start = detail::field(j, "start").template get<std::size_t>();
  e.end = detail::field(j, "end").template get<std::size_t>();
  e.surface = detail::field(j, "surface").template get<std::string>();
  e.term = j.contains("term") ? j["term"].template get<std::string>() : e.surface;
  e.source = j.contains("source") ? parse_source(j["source"].template get<std::string>()) : EventSource::external;
  if (e.start >= e.end) throw ValidationError("event span is empty");
  return e;
}

inline ordered_json to_json(const EventPair& p) {
  auto ev = [](const Event& e) {
    ordered_json j;
    j["start"] = e.start;
    j["end"] = e.end;
    j["surface"] = e.surface;
    j["term"] = e.term;
    j["source"] = to_string(e.source);
    return j;
  };
  auto label = [](const std::optional<RelationLabel>& l) {
    return l ? ordered_json(std::string(to_string(*l))) : ordered_json(nullptr);
  };
  ordered_json j;
  j["record_id"] = p.e1.record_id;
  j["e1"] = ev(p.e1);
  j["e2"] = ev(p.e2);
  j["context"] = p.context;
  j["context_span"] = {p.context_span.first, p.context_span.second};
  j["gold"] = label(p.gold);
  j["predicted"] = label(p.predicted);
  j["confidence"] = p.confidence ? ordered_json(*p.confidence) : ordered_json(nullptr);
  return j;
}

inline EventPair parse_pair(std::string_view line) {
  ordered_json j;
  try {
    j = ordered_json::parse(line);
  } catch (const ordered_json::parse_error& e) {
    throw ValidationError(std::string("malformed JSON: ") + e.what());
  }
  try {
    if (!j.is_object()) throw ValidationError("pair line is not a JSON object");
    EventPair p;
    const auto id = detail::field(j, "record_id").get<std::string>();
    p.e1 = event_from_json(detail::field(j, "e1"), id);
    p.e2 = event_from_json(detail::field(j, "e2"), id);
    if (std::pair(p.e1.start, p.e1.end) >= std::pair(p.e2.start, p.e2.end)) {
      throw ValidationError("e1 must precede e2 in text order");
    }
    p.context = j.contains("context") ? j["context"].get<std::string>() : std::string();
    if (j.contains("context_span") && j["context_span"].is_array() && j["context_span"].size() == 2) {
      p.context_span = {j["context_span"][0].get<std::size_t>(), j["context_span"][1].get<std::size_t>()};
    }
    p.gold = detail::optional_label(j, "gold");
    p.predicted = detail::optional_label(j, "predicted");
    if (j.contains("confidence") && !j["confidence"].is_null()) {
      const double c = j["confidence"].get<double>();
      if (!(c >= 0.0 && c <= 1.0)) throw ValidationError("confidence outside [0, 1]");
      p.confidence = c;
    }
    return p;
  } catch (const ordered_json::exception& e) {
    throw ValidationError(std::string("bad pair field: ") + e.what());
  }
}

inline std::vector<EventPair> read_pairs(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open pair file '" + path.string() + "'");
  std::vector<EventPair> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (unicode::is_blank(line)) continue;
    try {
      out.push_back(parse_pair(line));
    } catch (const ValidationError& e) {
      throw ValidationError(path.string(), n, e.what());
    }
  }
  return out;
}

inline void write_pairs(std::ostream& out, std::span<const EventPair> pairs) {
  for (const auto& p : pairs) out << dump_line(to_json(p)) << '\n';
}

inline ordered_json to_json(const EvalReport& r) {
  ordered_json j;
  j["pairs"] = r.pair_count;
  ordered_json classes;
  for (std::size_t c = 0; c < 4; ++c) {
    const auto& s = r.per_class[c];
    ordered_json o;
    o["precision"] = s.precision;
    o["recall"] = s.recall;
    o["f1"] = s.f1;
    o["support"] = s.support;
    classes[std::string(to_string(kEvalLabels[c]))] = std::move(o);
  }
  j["per_class"] = std::move(classes);
  j["weighted_f1"] = r.weighted_f1;
  j["relaxed_f1"] = r.relaxed_f1;
  j["discarded_vague_errors"] = r.discarded_vague_errors;
  return j;
}

inline ordered_json to_json(const LabelCounts& c) {
  ordered_json j;
  std::uint64_t total = 0;
  for (std::size_t l = 0; l < c.size(); ++l) {
    j[std::string(to_string(static_cast<RelationLabel>(l)))] = c[l];
    total += c[l];
  }
  j["total"] = total;
  return j;
}

}  // namespace medtok::trc
