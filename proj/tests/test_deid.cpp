#include <gtest/gtest.h>

#include "medtok/deid.hpp"
#include "medtok/synth.hpp"

using namespace medtok;
using deid::Category;

namespace {

Record rec(std::string text, std::string id = "r1") { return {std::move(id), "onc", "other", std::move(text), {}}; }

std::vector<std::string> found(const deid::MatcherSet& m, const std::string& text) {
  const auto cps = unicode::decode(text);
  std::vector<std::string> out;
  for (const auto& h : m.find(cps)) out.push_back(unicode::encode(std::u32string_view(cps).substr(h.start, h.end - h.start)));
  return out;
}

std::size_t digit_count(std::string_view s) { return deid::detail::ascii_digits(s).size(); }

}  // namespace

TEST(Dates, ParseLayouts) {
  const auto a = deid::parse_date("03/11/2021");
  ASSERT_TRUE(a);
  EXPECT_EQ(*a, (deid::CalendarDate{2021, 11, 3}));
  EXPECT_EQ(deid::parse_date("2021-11-03"), a);
  EXPECT_EQ(deid::parse_date("3.11.21"), a);
  EXPECT_FALSE(deid::parse_date("31/02/2021"));
  EXPECT_FALSE(deid::parse_date("120-90"));
}

TEST(Dates, ShiftAndFormatKeepLayout) {
  const auto p = deid::parse_date_at(U"28.02.24", 0);
  ASSERT_TRUE(p);
  EXPECT_EQ(p->length, 8u);
  const auto moved = deid::shift_date(p->date, 2);
  EXPECT_EQ(moved, (deid::CalendarDate{2024, 3, 1}));
  EXPECT_EQ(deid::format_date(moved, p->layout), "01.03.24");
  const auto iso = deid::parse_date_at(U"2023-12-31", 0);
  EXPECT_EQ(deid::format_date(deid::shift_date(iso->date, 1), iso->layout), "2024-01-01");
}

TEST(IsraeliId, CheckDigit) {
  EXPECT_TRUE(deid::detail::valid_israeli_id("000000018"));
  EXPECT_FALSE(deid::detail::valid_israeli_id("000000019"));
  EXPECT_EQ(deid::detail::israeli_check_digit("12345678"), '2');
  EXPECT_TRUE(deid::detail::valid_israeli_id("123456782"));
}

TEST(Matchers, NameWithProclitics) {
  PiiManifest m;
  m.patient_names = {"דנה"};
  const auto ms = deid::build_matchers(m, {});
  EXPECT_EQ(found(ms, "דנה הגיעה"), std::vector<std::string>{"דנה"});
  // Only the name itself is replaced; the prefix letters stay.
  EXPECT_EQ(found(ms, "ודנה"), std::vector<std::string>{"דנה"});
  EXPECT_EQ(found(ms, "לדנה"), std::vector<std::string>{"דנה"});
  EXPECT_EQ(found(ms, "ולדנה"), std::vector<std::string>{"דנה"});
  EXPECT_EQ(found(ms, "ו-דנה"), std::vector<std::string>{"דנה"});
  EXPECT_TRUE(found(ms, "ושלדנה").empty());  // three proclitics
  EXPECT_TRUE(found(ms, "דנהלה").empty());
  EXPECT_TRUE(found(ms, "אדנה").empty());
}

TEST(Matchers, LatinNamesFoldCase) {
  PiiManifest m;
  m.doctor_names = {"Dana Cohen"};
  const auto ms = deid::build_matchers(m, {});
  EXPECT_EQ(found(ms, "seen by DANA  cohen today"), std::vector<std::string>{"DANA  cohen"});
  EXPECT_EQ(found(ms, "Dr. Cohen"), std::vector<std::string>{"Cohen"});
  EXPECT_TRUE(found(ms, "Cohens").empty());
}

TEST(Matchers, EmptyManifestIsIdentity) {
  const auto ms = deid::build_matchers({}, {});
  EXPECT_TRUE(ms.empty());
  const auto r = deid::deidentify(rec("שלום 0521234567"), ms, 1);
  EXPECT_EQ(r.record.text, "שלום 0521234567");
  EXPECT_TRUE(r.log.entries.empty());
}

TEST(Matchers, PhoneGroupingVariants) {
  PiiManifest m;
  m.phone_numbers = {"0521234567"};
  const auto ms = deid::build_matchers(m, {});
  for (const std::string v : {"0521234567", "052-1234567", "052 123 4567", "052-123-4567", "052.1234567"}) {
    EXPECT_EQ(found(ms, "טל " + v + " ערב"), std::vector<std::string>{v}) << v;
  }
  EXPECT_TRUE(found(ms, "10521234567").empty());
  EXPECT_TRUE(found(ms, "05212345678").empty());
  EXPECT_TRUE(found(ms, "1-0521234567").empty());
}

TEST(Matchers, EmailsAndInstitutions) {
  PiiManifest m;
  m.emails = {"Dana.Cohen@Gmail.com"};
  deid::InstitutionList inst{{"בית חולים הדסה"}};
  const auto ms = deid::build_matchers(m, inst);
  EXPECT_EQ(found(ms, "mail dana.cohen@gmail.com."), std::vector<std::string>{"dana.cohen@gmail.com"});
  EXPECT_TRUE(found(ms, "xdana.cohen@gmail.com").empty());
  EXPECT_EQ(found(ms, "הועבר לבית חולים הדסה"), std::vector<std::string>{"בית חולים הדסה"});
}

TEST(Matchers, LongestThenLeftmost) {
  PiiManifest m;
  m.patient_names = {"דנה כהן"};
  m.addresses = {"כהן 5"};
  const auto ms = deid::build_matchers(m, {});
  const auto hits = found(ms, "דנה כהן 5");
  ASSERT_EQ(hits.size(), 1u);
  EXPECT_EQ(hits[0], "דנה כהן");
}

TEST(Deidentify, LabValuesUntouched) {
  PiiManifest m;
  m.id_numbers = {"123456782"};
  m.phone_numbers = {"0521234567"};
  m.zip_codes = {"9134001"};
  auto r = rec("לחץ דם 120-90 חום 37.5 ת.ז. 123456782");
  const auto out = deid::deidentify(r, deid::build_matchers(m, {}), 4);
  EXPECT_NE(out.record.text.find("120-90"), std::string::npos);
  EXPECT_NE(out.record.text.find("37.5"), std::string::npos);
  ASSERT_EQ(out.log.entries.size(), 1u);
  EXPECT_EQ(out.log.entries[0].category, Category::id);
}

TEST(Deidentify, RepeatedNameSameSurrogate) {
  PiiManifest m;
  m.patient_names = {"דנה כהן"};
  const auto ms = deid::build_matchers(m, {});
  const auto out = deid::deidentify(rec("דנה כהן הגיעה. ולדנה כהן יש חום. כהן בבית"), ms, 9);
  ASSERT_EQ(out.log.entries.size(), 3u);
  EXPECT_EQ(out.log.entries[0].surrogate, out.log.entries[1].surrogate);
  const auto parts = deid::detail::split_words(out.log.entries[0].surrogate);
  ASSERT_EQ(parts.size(), 2u);
  EXPECT_EQ(out.log.entries[2].surrogate, parts[1]);
  EXPECT_NE(out.record.text.find("ול" + out.log.entries[1].surrogate), std::string::npos);
  EXPECT_TRUE(deid::verify(out.record, m).empty());
}

TEST(Deidentify, NumericShapesPreserved) {
  PiiManifest m;
  m.id_numbers = {"123456782"};
  m.phone_numbers = {"0521234567"};
  m.zip_codes = {"9134001"};
  const auto out = deid::deidentify(rec("ת.ז. 123456782 טל 052-123-4567 מיקוד 9134001 שוב 0521234567"),
                                    deid::build_matchers(m, {}), 2);
  ASSERT_EQ(out.log.entries.size(), 4u);
  for (const auto& e : out.log.entries) {
    EXPECT_EQ(digit_count(e.original), digit_count(e.surrogate)) << e.original;
    EXPECT_EQ(unicode::count_scalars(e.original), unicode::count_scalars(e.surrogate));
    EXPECT_NE(e.original, e.surrogate);
  }
  EXPECT_TRUE(deid::detail::valid_israeli_id(out.log.entries[0].surrogate));
  const auto& phone = out.log.entries[1].surrogate;
  EXPECT_EQ(phone.substr(0, 3), "052");
  EXPECT_EQ(phone[3], '-');
  EXPECT_EQ(phone[7], '-');
  EXPECT_EQ(deid::detail::ascii_digits(phone), out.log.entries[3].surrogate);
  EXPECT_NE(out.log.entries[2].surrogate[0], '0');
}

TEST(Deidentify, DatesShiftedByOneOffset) {
  PiiManifest m;
  m.dates = {"01/03/2020", "11/03/2020"};
  const auto out = deid::deidentify(rec("נבדק 01/03/2020 ושוב ב-11.03.20 וגם 2020-03-01"), deid::build_matchers(m, {}), 5);
  ASSERT_EQ(out.log.entries.size(), 3u);
  const auto a = deid::parse_date(out.log.entries[0].surrogate);
  const auto b = deid::parse_date(out.log.entries[1].surrogate);
  const auto c = deid::parse_date(out.log.entries[2].surrogate);
  ASSERT_TRUE(a && b && c);
  EXPECT_EQ(*a, *c);
  EXPECT_EQ(deid::shift_date(*a, 10), *b);
  EXPECT_EQ(out.log.entries[1].surrogate.size(), 8u);
  EXPECT_EQ(out.log.entries[1].surrogate[2], '.');
  EXPECT_EQ(out.log.entries[2].surrogate[4], '-');
  EXPECT_TRUE(deid::verify(out.record, m).empty());
}

TEST(Deidentify, EmailPolicy) {
  PiiManifest m;
  m.emails = {"dana@gmail.com", "x@hospital.org.il"};
  const auto out = deid::deidentify(rec("dana@gmail.com x@hospital.org.il"), deid::build_matchers(m, {}), 1);
  ASSERT_EQ(out.log.entries.size(), 2u);
  EXPECT_EQ(out.log.entries[0].surrogate.size(), std::string("dana@gmail.com").size());
  EXPECT_TRUE(out.log.entries[0].surrogate.ends_with("@gmail.com"));
  EXPECT_TRUE(out.log.entries[1].surrogate.ends_with("@mail.example.org"));
}

TEST(Deidentify, TextChangesOnlyInsideLoggedSpans) {
  const auto corpus = synth::clinical_corpus(200, 77);
  const auto inst = deid::InstitutionList{synth::institutions()};
  for (const auto& cr : corpus) {
    const auto ms = deid::build_matchers(*cr.record.pii, inst);
    const auto out = deid::deidentify(cr.record, ms, 3);
    const auto in = unicode::decode(cr.record.text);
    const auto res = unicode::decode(out.record.text);
    std::size_t pi = 0, po = 0, prev_end = 0;
    for (const auto& e : out.log.entries) {
      ASSERT_GE(e.start, prev_end);
      const std::size_t gap = e.start - pi;
      EXPECT_EQ(in.substr(pi, gap), res.substr(po, gap));
      EXPECT_EQ(unicode::encode(in.substr(e.start, e.end - e.start)), e.original);
      po += gap;
      const auto s = unicode::decode(e.surrogate);
      EXPECT_EQ(res.substr(po, s.size()), s);
      po += s.size();
      pi = e.end;
      prev_end = e.end;
    }
    EXPECT_EQ(in.substr(pi), res.substr(po));
    EXPECT_EQ(out.log.entries.size(), cr.pii_mentions) << cr.record.id;
    EXPECT_TRUE(deid::verify(out.record, *cr.record.pii, inst).empty()) << cr.record.id;
    const auto again = deid::deidentify(cr.record, ms, 3);
    EXPECT_EQ(again.record.text, out.record.text);
  }
}

TEST(Verify, ReportsPrefixedLeak) {
  PiiManifest m;
  m.patient_names = {"דנה"};
  const auto res = deid::verify(rec("הגיעה לדנה אתמול"), m);
  ASSERT_EQ(res.size(), 1u);
  EXPECT_EQ(res[0].start, 7u);
  EXPECT_EQ(res[0].end, 10u);
  EXPECT_EQ(res[0].text, "דנה");
}

TEST(Verify, CleanTextHasNoResiduals) {
  PiiManifest m;
  m.patient_names = {"דנה"};
  EXPECT_TRUE(deid::verify(rec("אין כאן כלום"), m).empty());
}

TEST(Deidentify, BlankTextRejected) {
  EXPECT_THROW(deid::deidentify(rec("  "), deid::build_matchers({}, {}), 1), ValidationError);
}
