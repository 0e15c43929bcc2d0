#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include <json.hpp>

#include "gqm/decimal.hpp"
#include "gqm/expr.hpp"
#include "gqm/json_writer.hpp"
#include "gqm/period.hpp"
#include "gqm/schema.hpp"

namespace gqm {

using AttrValue = std::variant<double, std::string>;

// One timestamped observation. Attributes are validated against the kind's
// schema at ingestion; the map keeps them sorted by field name, which fixes
// the canonical serialization.
struct EvidenceRecord {
  std::string record_id;
  std::string kind;
  std::int64_t epoch = 0;     // UTC instant
  std::string timestamp;      // canonical UTC text
  std::map<std::string, AttrValue> attributes;

  friend bool operator==(const EvidenceRecord&, const EvidenceRecord&) = default;
};

struct RecordParse {
  std::optional<EvidenceRecord> record;
  std::string error;

  bool ok() const { return record.has_value(); }
};

// Parses and validates one newline-delimited JSON evidence line: required
// keys, known kind, the kind's required fields with matching types, closed
// value sets, and no attributes outside the schema.
inline RecordParse parse_record_line(std::string_view line) {
  auto fail = [](std::string msg) { return RecordParse{std::nullopt, std::move(msg)}; };
  nlohmann::json doc = nlohmann::json::parse(line, nullptr, false);
  if (doc.is_discarded()) {
    return fail("malformed JSON");
  }
  if (!doc.is_object()) {
    return fail("record must be a JSON object");
  }
  for (const auto& [key, value] : doc.items()) {
    if (key != "record_id" && key != "kind" && key != "timestamp" && key != "attributes") {
      return fail("unknown key '" + key + "'");
    }
  }
  for (const char* key : {"record_id", "kind", "timestamp", "attributes"}) {
    if (!doc.contains(key)) {
      return fail(std::string("missing key '") + key + "'");
    }
  }
  if (!doc["record_id"].is_string() || !doc["kind"].is_string() || !doc["timestamp"].is_string()) {
    return fail("record_id, kind and timestamp must be strings");
  }
  if (!doc["attributes"].is_object()) {
    return fail("attributes must be an object");
  }

  EvidenceRecord record;
  record.record_id = doc["record_id"].get<std::string>();
  if (record.record_id.empty()) {
    return fail("record_id must be non-empty");
  }
  record.kind = doc["kind"].get<std::string>();
  const KindSpec* kind = find_kind(record.kind);
  if (kind == nullptr) {
    return fail("unknown kind '" + record.kind + "'");
  }
  InstantParse instant = parse_instant(doc["timestamp"].get<std::string>());
  if (!instant.ok) {
    return fail("bad timestamp: " + instant.error);
  }
  record.epoch = instant.epoch;
  record.timestamp = instant.canonical;

  for (const auto& [name, value] : doc["attributes"].items()) {
    const FieldSpec* field = find_field(*kind, name);
    if (field == nullptr) {
      return fail("unknown attribute '" + name + "' for kind '" + record.kind + "'");
    }
    if (field->type == FieldType::number) {
      if (!value.is_number()) {
        return fail("attribute '" + name + "' must be a number");
      }
      double number = value.get<double>();
      if (!fits_six_places(number)) {
        return fail("attribute '" + name + "' exceeds 6 fractional digits");
      }
      record.attributes[name] = number;
    } else {
      if (!value.is_string()) {
        return fail("attribute '" + name + "' must be a string");
      }
      std::string text = value.get<std::string>();
      if (!field->allowed.empty()) {
        bool found = false;
        for (std::string_view allowed : field->allowed) {
          found = found || allowed == text;
        }
        if (!found) {
          return fail("attribute '" + name + "' has unsupported value '" + text + "'");
        }
      }
      record.attributes[name] = std::move(text);
    }
  }
  for (const FieldSpec& field : kind->fields) {
    if (!record.attributes.contains(std::string(field.name))) {
      return fail("missing attribute '" + std::string(field.name) + "' for kind '" + record.kind + "'");
    }
  }
  return {std::move(record), {}};
}

// Compact single-line form with fixed key order and sorted attributes; this
// is both the on-disk line format and the digest input.
inline std::string canonical_record_line(const EvidenceRecord& record) {
  JsonWriter w(JsonWriter::Layout::compact);
  w.begin_object();
  w.key("record_id");
  w.string_value(record.record_id);
  w.key("kind");
  w.string_value(record.kind);
  w.key("timestamp");
  w.string_value(record.timestamp);
  w.key("attributes");
  w.begin_object();
  for (const auto& [name, value] : record.attributes) {
    w.key(name);
    if (const double* number = std::get_if<double>(&value)) {
      w.number_value(*number);
    } else {
      w.string_value(std::get<std::string>(value));
    }
  }
  w.end_object();
  w.end_object();
  return w.take();
}

// Predicate semantics shared by store queries and formula evaluation.
// Typechecking guarantees the field exists with the right type; a record
// that slipped past it simply does not match.
inline bool matches(const EvidenceRecord& record, const Predicate& pred) {
  auto it = record.attributes.find(pred.field);
  if (it == record.attributes.end()) {
    return false;
  }
  if (const double* want = std::get_if<double>(&pred.literal)) {
    const double* have = std::get_if<double>(&it->second);
    if (have == nullptr) {
      return false;
    }
    switch (pred.op) {
      case CompareOp::eq: return *have == *want;
      case CompareOp::ne: return *have != *want;
      case CompareOp::lt: return *have < *want;
      case CompareOp::le: return *have <= *want;
      case CompareOp::gt: return *have > *want;
      case CompareOp::ge: return *have >= *want;
    }
    return false;
  }
  const std::string& want = std::get<std::string>(pred.literal);
  const std::string* have = std::get_if<std::string>(&it->second);
  if (have == nullptr) {
    return false;
  }
  switch (pred.op) {
    case CompareOp::eq: return *have == want;
    case CompareOp::ne: return *have != want;
    default: return false;  // text fields support equality only
  }
}

inline bool matches_all(const EvidenceRecord& record, std::span<const Predicate> preds) {
  for (const Predicate& pred : preds) {
    if (!matches(record, pred)) {
      return false;
    }
  }
  return true;
}

}  // namespace gqm
