#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ddlab/harness.hpp"

namespace ddlab {

/// Parse or validation failure; message carries the line number and, for
/// semantic errors, the offending field name.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line, std::string field, const std::string& message)
      : std::runtime_error("config line " + std::to_string(line) +
                           (field.empty() ? "" : " (field '" + field + "')") +
                           ": " + message),
        line_(line),
        field_(std::move(field)) {}

  int line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  int line_;
  std::string field_;
};

/// Parses the line-oriented scenario format:
///
///   [scenario.NAME]
///   key = value        # comment
///
/// `estimator` is the only required key; every other key has a default.
/// Unknown keys and out-of-range values are rejected.
std::vector<Scenario> parse_config(const std::string& text);

/// Full-form rendering; parse_config(serialize_scenarios(s)) == s.
std::string serialize_scenarios(const std::vector<Scenario>& scenarios);

/// DDLAB_MASTER_SEED, when set, overrides every scenario's master seed.
std::optional<std::uint64_t> master_seed_from_env();

}  // namespace ddlab
