#pragma once

// Seeded synthetic corpora: a general-domain corpus, a clinical corpus with
// injected domain terms, lab values and PII (manifests attached, mention
// counts known exactly), labeled TRC pairs and random embeddings. Record i
// depends only on (seed, i), so generation parallelizes without changing
// output.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "medtok/deid.hpp"
#include "medtok/morphology.hpp"
#include "medtok/parallel.hpp"
#include "medtok/random.hpp"
#include "medtok/record.hpp"
#include "medtok/trc.hpp"
#include "medtok/vocab_adapt.hpp"
#include "medtok/vocabulary.hpp"

namespace medtok::synth {

inline constexpr std::array<std::string_view, 20> kFirstNames = {
    "דנה", "רון", "נועה", "איתי", "מיכל", "עומר", "שירה", "אורי", "ליאור", "גיל",
    "עדי", "נטע", "אסף", "רותם", "יובל", "הדס", "עמית", "קרן", "ניר", "ענבל"};
inline constexpr std::array<std::string_view, 20> kFirstNamesLatin = {
    "dana", "ron", "noa", "itai", "michal", "omer", "shira", "uri", "lior", "gil",
    "adi", "neta", "asaf", "rotem", "yuval", "hadas", "amit", "keren", "nir", "inbal"};
inline constexpr std::array<std::string_view, 16> kLastNames = {
    "כהן", "לוי", "מזרחי", "פרץ", "ביטון", "פרידמן", "אזולאי", "דהן",
    "אגבריה", "חדד", "גבאי", "שפירא", "רוזן", "קליין", "גולן", "נחמיאס"};
inline constexpr std::array<std::string_view, 16> kLastNamesLatin = {
    "cohen", "levi", "mizrahi", "peretz", "biton", "friedman", "azulai", "dahan",
    "agbaria", "hadad", "gabay", "shapira", "rozen", "klein", "golan", "nahmias"};
inline constexpr std::array<std::string_view, 6> kLatinDoctors = {
    "John Miller", "Sarah Brown", "David Green", "Anna Novak", "Mark Stein", "Laura Weiss"};
inline constexpr std::array<std::string_view, 8> kStreets = {
    "רחוב הנרקיס", "רחוב הכלנית", "רחוב הרקפת", "שדרות ירושלים",
    "רחוב החרמון", "רחוב התבור", "רחוב האורנים", "שדרות הנשיא"};
inline constexpr std::array<std::string_view, 4> kMailDomains = {"gmail.com", "walla.co.il", "yahoo.com",
                                                                 "clinic-mail.co.il"};

/// Curated institution list (fictional).
inline constexpr std::array<std::string_view, 8> kInstitutions = {
    "בית החולים נווה הדר", "המרכז הרפואי גבעת אורן", "מרכז רפואי שער הים", "קופת חולים מגן",
    "בית חולים רמת השקמה", "מכון הלב צפון", "Harbor View Hospital", "מרפאת עין גנים"};

inline constexpr std::array<std::string_view, 5> kDepartments = {"oncology", "cardiology", "internal_medicine",
                                                                 "surgery", "emergency"};

inline constexpr std::array<std::string_view, 40> kFunctionWords = {
    "של", "עם", "על", "את", "לא", "יש", "אין", "גם", "כי", "אבל", "מאוד", "היה", "הוא", "היא",
    "לאחר", "לפני", "ללא", "עקב", "בוצע", "נמצא", "תלונות", "מצב", "כללי", "טוב", "יציב", "כאבים",
    "חום", "המשך", "מעקב", "טיפול", "בדיקה", "ממצאים", "תקין", "חולה", "רופא", "מחלקה", "היום",
    "אתמול", "שבוע", "הומלץ"};

inline constexpr std::array<std::string_view, 15> kMedicalPrefixes = {
    "קרדיו", "נפרו", "גסטרו", "נוירו", "המטו", "אונקו", "דרמטו", "אנדו", "פנאומו", "אוסטאו",
    "היסטו", "אנגיו", "ארתרו", "קולו", "הפטו"};
inline constexpr std::array<std::string_view, 14> kMedicalSuffixes = {
    "לוגיה", "סקופיה", "גרפיה", "פתיה", "טומיה", "אקטומיה", "יטיס", "מגליה", "פלסטיקה", "תרפיה",
    "לוגי", "גרמה", "סטזיס", "אמיה"};
inline constexpr std::array<std::string_view, 40> kDrugsAndProcedures = {
    "טמוקסיפן", "מטפורמין", "אנוקספרין", "פרדניזון", "אמוקסיצילין", "ונקומיצין", "צפטריאקסון",
    "פוסיד", "אספירין", "קומדין", "הפרין", "אינסולין", "מורפין", "דקסמתזון", "ציספלטין",
    "קרבופלטין", "פקליטקסל", "דוקסורוביצין", "ריטוקסימאב", "טרסטוזומאב", "ניתוח", "הקרנה",
    "כימותרפיה", "ביופסיה", "צנתור", "אינטובציה", "אשפוז", "שחרור", "דיאליזה", "השתלה",
    "CT", "CT scan", "MRI", "PET-CT", "ECG", "EEG", "אולטרסאונד", "ממוגרפיה", "לפרוסקופיה", "אקו לב"};

inline constexpr std::array<std::string_view, 7> kProcliticStacks = {"ו", "ה", "ב", "ל", "וה", "וב", "של"};

namespace detail {

inline constexpr std::array<std::string_view, 22> kLetters = {
    "א", "ב", "ג", "ד", "ה", "ו", "ז", "ח", "ט", "י", "כ", "ל", "מ", "נ", "ס", "ע", "פ", "צ", "ק", "ר", "ש", "ת"};

inline std::string final_form(std::string word) {
  static const std::array<std::pair<std::string_view, std::string_view>, 5> finals = {
      {{"כ", "ך"}, {"מ", "ם"}, {"נ", "ן"}, {"פ", "ף"}, {"צ", "ץ"}}};
  for (const auto& [plain, fin] : finals) {
    if (word.size() >= plain.size() && word.compare(word.size() - plain.size(), plain.size(), plain) == 0) {
      word.replace(word.size() - plain.size(), plain.size(), fin);
      break;
    }
  }
  return word;
}

/// Every word that could collide with a synthetic identity: names (both
/// scripts), streets, institutions, split into single words.
inline morph::PhraseMatcher identity_words() {
  morph::PhraseMatcher m;
  std::size_t e = 0;
  auto add_words = [&](std::string_view phrase) {
    std::string w;
    for (char c : std::string(phrase) + " ") {
      if (c == ' ') {
        if (!w.empty()) m.add(w, e++);
        w.clear();
      } else {
        w.push_back(c);
      }
    }
  };
  for (auto s : kFirstNames) add_words(s);
  for (auto s : kFirstNamesLatin) add_words(s);
  for (auto s : kLastNames) add_words(s);
  for (auto s : kLastNamesLatin) add_words(s);
  for (auto s : kLatinDoctors) add_words(s);
  for (auto s : kStreets) add_words(s);
  for (auto s : kInstitutions) add_words(s);
  return m;
}

/// Zipf-like sampler over ranks 0..n-1.
class Zipf {
 public:
  Zipf(std::size_t n, double exponent) : cdf_(n) {
    double acc = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      acc += 1.0 / std::pow(static_cast<double>(r + 1), exponent);
      cdf_[r] = acc;
    }
    for (auto& c : cdf_) c /= acc;
  }

  std::size_t draw(Rng& rng) const {
    const double u = rng.unit();
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    return std::min<std::size_t>(static_cast<std::size_t>(it - cdf_.begin()), cdf_.size() - 1);
  }

 private:
  std::vector<double> cdf_;
};

}  // namespace detail

/// Fixed lexicon shared by every corpus: function words first, then
/// pseudo-Hebrew words. Nothing in it can be mistaken for a synthetic
/// identity, with or without proclitics.
struct Lexicon {
  std::vector<std::string> general;
  std::vector<std::string> domain_terms;
};

inline const Lexicon& lexicon() {
  static const Lexicon lex = [] {
    const morph::PhraseMatcher identities = detail::identity_words();
    auto clean = [&](const std::string& w) {
      if (!identities.find_all(unicode::decode(w)).empty()) return false;
      return std::none_of(kProcliticStacks.begin(), kProcliticStacks.end(), [&](std::string_view p) {
        return !identities.find_all(unicode::decode(std::string(p) + w)).empty();
      });
    };
    Lexicon l;
    std::unordered_set<std::string> seen;
    for (auto w : kFunctionWords) {
      if (clean(std::string(w)) && seen.insert(std::string(w)).second) l.general.emplace_back(w);
    }
    Rng rng(derive_seed(0x5eedULL, "synth.lexicon"));
    static constexpr std::array<std::string_view, 4> vowels = {"ו", "י", "א", "ה"};
    while (l.general.size() < 4000) {
      const std::size_t syllables = static_cast<std::size_t>(rng.between(1, 3));
      std::string w;
      for (std::size_t s = 0; s < syllables; ++s) {
        w += detail::kLetters[rng.below(detail::kLetters.size())];
        if (rng.chance(0.4)) w += vowels[rng.below(vowels.size())];
      }
      w += detail::kLetters[rng.below(detail::kLetters.size())];
      w = detail::final_form(std::move(w));
      if (clean(w) && seen.insert(w).second) l.general.push_back(std::move(w));
    }
    std::unordered_set<std::string> dseen;
    for (auto d : kDrugsAndProcedures) {
      if (dseen.insert(std::string(d)).second) l.domain_terms.emplace_back(d);
    }
    for (auto p : kMedicalPrefixes) {
      for (auto s : kMedicalSuffixes) {
        std::string t = std::string(p) + std::string(s);
        if (clean(t) && dseen.insert(t).second) l.domain_terms.push_back(std::move(t));
      }
    }
    return l;
  }();
  return lex;
}

/// Terms used for event marking: every domain term.
inline std::vector<std::string> event_terms() { return lexicon().domain_terms; }

inline std::vector<std::string> institutions() { return {kInstitutions.begin(), kInstitutions.end()}; }

struct ClinicalOptions {
  double domain_rate = 0.22;  // share of words that are domain terms
  double lab_rate = 0.04;
  bool with_pii = true;
};

namespace detail {

inline std::string pick_doc_type(Rng& rng) { return std::string(kDocTypes[rng.below(kDocTypes.size())]); }

inline std::string proclitic(Rng& rng) { return std::string(kProcliticStacks[rng.below(kProcliticStacks.size())]); }

inline std::string digits(Rng& rng, std::size_t n, bool nonzero_first = false) {
  std::string s;
  for (std::size_t i = 0; i < n; ++i) s.push_back(static_cast<char>('0' + rng.between(i == 0 && nonzero_first, 9)));
  return s;
}

inline std::string israeli_id(Rng& rng) {
  std::string s = digits(rng, 8, true);
  s.push_back(deid::detail::israeli_check_digit(s));
  return s;
}

inline std::string lab_value(Rng& rng) {
  switch (rng.below(3)) {
    case 0: return std::to_string(rng.between(100, 180)) + "-" + std::to_string(rng.between(60, 110));
    case 1: return std::to_string(rng.between(35, 40)) + "." + std::to_string(rng.between(0, 9));
    default: return std::to_string(rng.between(2, 500));
  }
}

struct Person {
  std::size_t first = 0;
  std::size_t last = 0;
  std::string hebrew() const { return std::string(kFirstNames[first]) + " " + std::string(kLastNames[last]); }
};

/// Words of one record plus which slots may host a PII mention.
struct Draft {
  std::vector<std::vector<std::string>> sentences;
};

inline Draft draft_text(Rng& rng, const ClinicalOptions& opt) {
  static const Zipf general_zipf(lexicon().general.size(), 1.0);
  static const Zipf domain_zipf(lexicon().domain_terms.size(), 0.8);
  const auto& lex = lexicon();
  Draft d;
  const std::size_t n_sentences = static_cast<std::size_t>(rng.between(3, 8));
  for (std::size_t s = 0; s < n_sentences; ++s) {
    std::vector<std::string> words;
    const std::size_t n_words = static_cast<std::size_t>(rng.between(6, 14));
    for (std::size_t w = 0; w < n_words; ++w) {
      const double u = rng.unit();
      if (u < opt.domain_rate) {
        std::string term = lex.domain_terms[domain_zipf.draw(rng)];
        const bool hebrew = static_cast<unsigned char>(term[0]) >= 0x80;
        if (hebrew && rng.chance(0.35)) term = proclitic(rng) + term;
        words.push_back(std::move(term));
      } else if (u < opt.domain_rate + opt.lab_rate) {
        words.push_back(lab_value(rng));
      } else {
        std::string w2 = lex.general[general_zipf.draw(rng)];
        if (rng.chance(0.15)) w2 = proclitic(rng) + w2;
        words.push_back(std::move(w2));
      }
    }
    d.sentences.push_back(std::move(words));
  }
  return d;
}

inline std::string render(const Draft& d, Rng& rng) {
  std::string text;
  for (std::size_t s = 0; s < d.sentences.size(); ++s) {
    if (s) text += rng.chance(0.1) ? "\n" : " ";
    for (std::size_t w = 0; w < d.sentences[s].size(); ++w) {
      if (w) text.push_back(' ');
      text += d.sentences[s][w];
    }
    text += rng.chance(0.9) ? "." : "?";
  }
  return text;
}

inline std::string record_id(std::string_view prefix, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*s-%06zu", static_cast<int>(prefix.size()), prefix.data(), i);
  return buf;
}

}  // namespace detail

/// General-domain record: function and pseudo words plus a few numbers.
inline Record general_record(std::size_t i, std::uint64_t seed) {
  Rng rng(derive_seed(seed, "synth.general:" + std::to_string(i)));
  Record r;
  r.id = detail::record_id("gen", i);
  r.department = "general";
  r.doc_type = "other";
  const auto d = detail::draft_text(rng, {0.0, 0.03, false});
  r.text = detail::render(d, rng);
  return r;
}

struct ClinicalRecord {
  Record record;
  std::size_t pii_mentions = 0;  // exact number of injected identifier occurrences
};

/// Clinical record; with PII, mentions replace interior words of sentences
/// and are never adjacent to one another.
inline ClinicalRecord clinical_record(std::size_t i, std::uint64_t seed, const ClinicalOptions& opt = {}) {
  Rng rng(derive_seed(seed, "synth.clinical:" + std::to_string(i)));
  ClinicalRecord out;
  Record& r = out.record;
  r.id = detail::record_id("clin", i);
  r.department = std::string(kDepartments[rng.below(kDepartments.size())]);
  r.doc_type = detail::pick_doc_type(rng);
  auto d = detail::draft_text(rng, opt);
  if (!opt.with_pii) {
    r.text = detail::render(d, rng);
    return out;
  }

  PiiManifest m;
  const detail::Person patient{rng.below(kFirstNames.size()), rng.below(kLastNames.size())};
  detail::Person relative{rng.below(kFirstNames.size()), rng.chance(0.5) ? patient.last : rng.below(kLastNames.size())};
  if (relative.first == patient.first) relative.first = (relative.first + 1) % kFirstNames.size();
  const bool latin_doctor = rng.chance(0.3);
  detail::Person doctor{rng.below(kFirstNames.size()), rng.below(kLastNames.size())};
  const std::string doctor_name =
      latin_doctor ? std::string(kLatinDoctors[rng.below(kLatinDoctors.size())]) : doctor.hebrew();
  m.patient_names = {patient.hebrew()};
  m.relative_names = {relative.hebrew()};
  m.doctor_names = {doctor_name};
  m.id_numbers = {detail::israeli_id(rng)};
  m.phone_numbers = {"05" + detail::digits(rng, 8)};
  m.emails = {std::string(kFirstNamesLatin[patient.first]) + "." + std::string(kLastNamesLatin[patient.last]) +
              detail::digits(rng, 2) + "@" + std::string(kMailDomains[rng.below(kMailDomains.size())])};
  m.zip_codes = {detail::digits(rng, 7, true)};
  m.addresses = {std::string(kStreets[rng.below(kStreets.size())]) + " " + std::to_string(rng.between(1, 120))};
  char date[16];
  std::snprintf(date, sizeof date, "%02d/%02d/%04d", static_cast<int>(rng.between(1, 28)),
                static_cast<int>(rng.between(1, 12)), static_cast<int>(rng.between(1990, 2023)));
  m.dates = {date};

  // Mention surfaces, each counted once.
  std::vector<std::string> mentions;
  auto name_form = [&](const detail::Person& p) {
    std::string s;
    switch (rng.below(3)) {
      case 0: s = p.hebrew(); break;
      case 1: s = std::string(kFirstNames[p.first]); break;
      default: s = std::string(kLastNames[p.last]); break;
    }
    if (rng.chance(0.5)) s = detail::proclitic(rng) + (rng.chance(0.15) ? "-" : "") + s;
    return s;
  };
  const std::size_t patient_mentions = static_cast<std::size_t>(rng.between(1, 3));
  for (std::size_t k = 0; k < patient_mentions; ++k) mentions.push_back(name_form(patient));
  if (rng.chance(0.5)) mentions.push_back(name_form(relative));
  if (rng.chance(0.6)) mentions.push_back(latin_doctor ? doctor_name : name_form(doctor));
  if (rng.chance(0.6)) mentions.push_back(m.id_numbers[0]);
  if (rng.chance(0.7)) {
    const auto& ph = m.phone_numbers[0];
    switch (rng.below(3)) {
      case 0: mentions.push_back(ph); break;
      case 1: mentions.push_back(ph.substr(0, 3) + "-" + ph.substr(3)); break;
      default: mentions.push_back(ph.substr(0, 3) + " " + ph.substr(3, 3) + " " + ph.substr(6)); break;
    }
  }
  if (rng.chance(0.4)) mentions.push_back(m.emails[0]);
  if (rng.chance(0.4)) mentions.push_back(m.zip_codes[0]);
  if (rng.chance(0.4)) mentions.push_back((rng.chance(0.3) ? "ב" : "") + m.addresses[0]);
  if (rng.chance(0.5)) {
    const std::string& ds = m.dates[0];
    const std::string dd = ds.substr(0, 2), mm = ds.substr(3, 2), yyyy = ds.substr(6, 4);
    switch (rng.below(3)) {
      case 0: mentions.push_back(ds); break;
      case 1: mentions.push_back(dd + "." + mm + "." + yyyy.substr(2)); break;
      default: mentions.push_back(yyyy + "-" + mm + "-" + dd); break;
    }
  }
  if (rng.chance(0.3)) {
    std::string inst(kInstitutions[rng.below(kInstitutions.size())]);
    const bool hebrew = static_cast<unsigned char>(inst[0]) >= 0x80;
    mentions.push_back(hebrew && rng.chance(0.5) ? "ב" + inst : inst);
  }
  shuffle(mentions, rng);

  // Interior slots (not first or last word of a sentence), at most one per
  // sentence window so mentions never touch.
  std::vector<std::pair<std::size_t, std::size_t>> slots;
  for (std::size_t s = 0; s < d.sentences.size(); ++s) {
    for (std::size_t w = 1; w + 1 < d.sentences[s].size(); w += 2) slots.emplace_back(s, w);
  }
  shuffle(slots, rng);
  const std::size_t used = std::min(slots.size(), mentions.size());
  for (std::size_t k = 0; k < used; ++k) d.sentences[slots[k].first][slots[k].second] = mentions[k];
  out.pii_mentions = used;
  r.text = detail::render(d, rng);
  r.pii = std::move(m);
  return out;
}

inline std::vector<Record> general_corpus(std::size_t n, std::uint64_t seed, std::size_t threads = 1) {
  std::vector<Record> out(n);
  parallel_for(n, threads, [&](std::size_t i) { out[i] = general_record(i, seed); });
  return out;
}

inline std::vector<ClinicalRecord> clinical_corpus(std::size_t n, std::uint64_t seed, const ClinicalOptions& opt = {},
                                                   std::size_t threads = 1) {
  std::vector<ClinicalRecord> out(n);
  parallel_for(n, threads, [&](std::size_t i) { out[i] = clinical_record(i, seed, opt); });
  return out;
}

/// One two-event record per pair, labels in exactly the given counts,
/// order shuffled.
inline std::vector<trc::EventPair> pairs_with_counts(const trc::LabelCounts& counts, std::uint64_t seed) {
  std::vector<trc::RelationLabel> labels;
  for (std::size_t l = 0; l < counts.size(); ++l) labels.insert(labels.end(), counts[l], static_cast<trc::RelationLabel>(l));
  Rng rng(derive_seed(seed, "synth.pairs"));
  shuffle(labels, rng);
  std::vector<trc::EventPair> out;
  out.reserve(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    trc::EventPair p;
    const std::string id = detail::record_id("pair", i);
    p.e1 = {id, 0, 5, "ניתוח", "ניתוח", trc::EventSource::term_list};
    p.e2 = {id, 6, 11, "הקרנה", "הקרנה", trc::EventSource::term_list};
    p.context = "ניתוח הקרנה.";
    p.context_span = {0, 12};
    p.gold = labels[i];
    out.push_back(std::move(p));
  }
  return out;
}

/// Gold labels drawn with the given relative weights (BEFORE, AFTER, EQUAL,
/// VAGUE, INVALID). Each pair's draw depends only on (seed, record, spans).
inline void assign_gold(std::vector<trc::EventPair>& pairs, std::span<const double> weights, std::uint64_t seed) {
  if (weights.size() != 5) throw ValidationError("label weights need five entries");
  double total = 0.0;
  for (double w : weights) total += w;
  if (!(total > 0.0)) throw ValidationError("label weights must be positive");
  for (auto& p : pairs) {
    Rng rng(derive_seed(seed, "synth.gold:" + p.e1.record_id + ":" + std::to_string(p.e1.start) + ":" +
                                  std::to_string(p.e2.start)));
    double u = rng.unit() * total;
    std::size_t l = 0;
    while (l + 1 < weights.size() && u >= weights[l]) u -= weights[l++];
    p.gold = static_cast<trc::RelationLabel>(l);
  }
}

/// Med-TRC-like label weights plus a small INVALID share.
inline constexpr std::array<double, 5> kMedTrcWeights = {2756.0, 826.0, 572.0, 108.0, 60.0};

/// Uniform [-1, 1) rows; each row depends only on (seed, token).
inline adapt::EmbeddingTable random_embeddings(const Vocabulary& vocab, std::size_t dim, std::uint64_t seed) {
  if (dim == 0) throw ValidationError("embedding dimension must be positive");
  adapt::EmbeddingTable t;
  t.dim = dim;
  for (const auto& tok : vocab.tokens()) {
    Rng rng(derive_seed(seed, "synth.emb:" + tok));
    std::vector<double> row(dim);
    for (auto& v : row) v = rng.unit() * 2.0 - 1.0;
    t.rows.emplace(tok, std::move(row));
  }
  return t;
}

}  // namespace medtok::synth
