#pragma once

// Record and PII-manifest types plus their JSON-lines representation.

#include <algorithm>
#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "medtok/error.hpp"
#include "medtok/unicode.hpp"

namespace medtok {

using ordered_json = nlohmann::ordered_json;

/// Identity metadata for one record, retrieved from structured sources.
struct PiiManifest {
  std::vector<std::string> patient_names;
  std::vector<std::string> relative_names;
  std::vector<std::string> contact_names;
  std::vector<std::string> doctor_names;
  std::vector<std::string> id_numbers;
  std::vector<std::string> phone_numbers;
  std::vector<std::string> emails;
  std::vector<std::string> zip_codes;
  std::vector<std::string> addresses;
  std::vector<std::string> dates;

  bool empty() const {
    return patient_names.empty() && relative_names.empty() && contact_names.empty() &&
           doctor_names.empty() && id_numbers.empty() && phone_numbers.empty() &&
           emails.empty() && zip_codes.empty() && addresses.empty() && dates.empty();
  }

  bool operator==(const PiiManifest&) const = default;
};

inline constexpr std::array<std::string_view, 6> kDocTypes = {
    "visit_summary", "status", "discharge", "follow_up", "diagnosis", "other"};

inline bool is_doc_type(std::string_view s) {
  return std::find(kDocTypes.begin(), kDocTypes.end(), s) != kDocTypes.end();
}

struct Record {
  std::string id;
  std::string department;
  std::string doc_type = "other";
  std::string text;
  std::optional<PiiManifest> pii;

  bool operator==(const Record&) const = default;
};

namespace detail {

template <class Json>
std::vector<std::string> string_list(const Json& j, std::string_view key) {
  std::vector<std::string> out;
  const auto it = j.find(std::string(key));
  if (it == j.end() || it->is_null()) return out;
  if (!it->is_array()) throw ValidationError("pii." + std::string(key) + " must be an array");
  for (const auto& v : *it) {
    if (!v.is_string()) throw ValidationError("pii." + std::string(key) + " entries must be strings");
    auto s = v.template get<std::string>();
    if (unicode::trim(s).empty()) {
      throw ValidationError("pii." + std::string(key) + " contains an empty entry");
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace detail

template <class Json>
PiiManifest manifest_from_json(const Json& j) {
  if (!j.is_object()) throw ValidationError("pii must be an object");
  PiiManifest m;
  m.patient_names = detail::string_list(j, "patient_names");
  m.relative_names = detail::string_list(j, "relative_names");
  m.contact_names = detail::string_list(j, "contact_names");
  m.doctor_names = detail::string_list(j, "doctor_names");
  m.id_numbers = detail::string_list(j, "id_numbers");
  m.phone_numbers = detail::string_list(j, "phone_numbers");
  m.emails = detail::string_list(j, "emails");
  m.zip_codes = detail::string_list(j, "zip_codes");
  m.addresses = detail::string_list(j, "addresses");
  m.dates = detail::string_list(j, "dates");
  return m;
}

inline ordered_json to_json(const PiiManifest& m) {
  ordered_json j = ordered_json::object();
  auto put = [&](const char* key, const std::vector<std::string>& v) {
    if (!v.empty()) j[key] = v;
  };
  put("patient_names", m.patient_names);
  put("relative_names", m.relative_names);
  put("contact_names", m.contact_names);
  put("doctor_names", m.doctor_names);
  put("id_numbers", m.id_numbers);
  put("phone_numbers", m.phone_numbers);
  put("emails", m.emails);
  put("zip_codes", m.zip_codes);
  put("addresses", m.addresses);
  put("dates", m.dates);
  return j;
}

/// Parses one record line. Errors are ValidationError without location;
/// callers that know the line number re-wrap them.
inline Record parse_record(std::string_view line) {
  ordered_json j;
  try {
    j = ordered_json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw ValidationError("record must be a JSON object");

  auto required_string = [&](const char* key) {
    const auto it = j.find(key);
    if (it == j.end() || !it->is_string()) {
      throw ValidationError(std::string("missing or non-string field '") + key + "'");
    }
    return it->get<std::string>();
  };

  Record r;
  r.id = required_string("id");
  r.department = required_string("department");
  r.doc_type = required_string("doc_type");
  r.text = required_string("text");
  if (r.id.empty()) throw ValidationError("empty id");
  if (!is_doc_type(r.doc_type)) throw ValidationError("unknown doc_type '" + r.doc_type + "'");
  // decode() also rejects invalid UTF-8.
  if (unicode::is_blank(r.text)) throw ValidationError("empty text");
  if (const auto it = j.find("pii"); it != j.end() && !it->is_null()) {
    r.pii = manifest_from_json(*it);
  }
  return r;
}

inline ordered_json to_json(const Record& r) {
  ordered_json j;
  j["id"] = r.id;
  j["department"] = r.department;
  j["doc_type"] = r.doc_type;
  j["text"] = r.text;
  if (r.pii) j["pii"] = to_json(*r.pii);
  return j;
}

inline std::string dump_line(const ordered_json& j) {
  return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::strict);
}

}  // namespace medtok
