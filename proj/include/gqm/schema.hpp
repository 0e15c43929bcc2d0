#pragma once

#include <span>
#include <string_view>

namespace gqm {

enum class FieldType { text, number };

// Attribute schema for one evidence kind. `allowed` closes the value set of
// boolean-like or enumerated text fields; empty means free text.
struct FieldSpec {
  std::string_view name;
  FieldType type = FieldType::text;
  std::span<const std::string_view> allowed;
};

struct KindSpec {
  std::string_view kind;
  std::span<const FieldSpec> fields;
};

namespace detail {

inline constexpr std::string_view kBool[] = {"true", "false"};
inline constexpr std::string_view kUpdateResult[] = {"success", "failure"};

inline constexpr FieldSpec kIncidentFields[] = {
    {"severity", FieldType::text, {}},
    {"source", FieldType::text, {}},
};
inline constexpr FieldSpec kAssessmentFields[] = {
    {"assessor_trained", FieldType::text, {}},
};
inline constexpr FieldSpec kCorrectiveActionFields[] = {
    {"status", FieldType::text, {}},
};
inline constexpr FieldSpec kSecurityUpdateFields[] = {
    {"result", FieldType::text, kUpdateResult},
    {"target", FieldType::text, {}},
};
inline constexpr FieldSpec kPersonnelFields[] = {
    {"role", FieldType::text, {}},
};
inline constexpr FieldSpec kTrainingFields[] = {
    {"course", FieldType::text, {}},
    {"attendee", FieldType::text, {}},
};
inline constexpr FieldSpec kPasswordAuditFields[] = {
    {"policy_compliant", FieldType::text, kBool},
    {"crack_time_hours", FieldType::number, {}},
    {"shared", FieldType::text, kBool},
    {"source", FieldType::text, {}},
};
inline constexpr FieldSpec kAccessControlFields[] = {
    {"method", FieldType::text, {}},
};
inline constexpr FieldSpec kSurveyResponseFields[] = {
    {"understood", FieldType::text, {}},
    {"subject", FieldType::text, {}},
};

inline constexpr KindSpec kKinds[] = {
    {"incident", kIncidentFields},
    {"audit_log_review", {}},
    {"assessment", kAssessmentFields},
    {"corrective_action", kCorrectiveActionFields},
    {"security_update", kSecurityUpdateFields},
    {"maintenance", {}},
    {"personnel", kPersonnelFields},
    {"training", kTrainingFields},
    {"password_audit", kPasswordAuditFields},
    {"access_control", kAccessControlFields},
    {"survey_response", kSurveyResponseFields},
};

}  // namespace detail

inline std::span<const KindSpec> evidence_schema() { return detail::kKinds; }

inline const KindSpec* find_kind(std::string_view kind) {
  for (const KindSpec& k : detail::kKinds) {
    if (k.kind == kind) {
      return &k;
    }
  }
  return nullptr;
}

inline const FieldSpec* find_field(const KindSpec& kind, std::string_view field) {
  for (const FieldSpec& f : kind.fields) {
    if (f.name == field) {
      return &f;
    }
  }
  return nullptr;
}

}  // namespace gqm
