#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "mg/markov_system.hpp"

namespace mg {

class ParseError : public Error {
 public:
  using Error::Error;
};

class InstanceValidationError : public Error {
 public:
  explicit InstanceValidationError(ValidationReport report)
      : Error("invalid instance: " + report.summary()), report_(std::move(report)) {}
  const ValidationReport& report() const { return report_; }

 private:
  ValidationReport report_;
};

/// Parses the JSON instance document and validates it. Throws ParseError on
/// malformed input and InstanceValidationError when invariants fail.
MetricInstance parse_instance_text(std::string_view text);
MetricInstance parse_instance(const std::filesystem::path& path);

/// Parses without running validation (used by `validate` to report every
/// violation instead of failing on the first).
MetricInstance parse_instance_unchecked(std::string_view text);

/// Canonical serialization: fixed field order, one matrix row per line,
/// shortest round-trip number formatting. Positions and availability are
/// emitted only when they differ from the defaults.
std::string serialize_instance(const MetricInstance& instance);
void write_instance(const MetricInstance& instance, const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace mg
