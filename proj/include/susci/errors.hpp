#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace susci {

// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Statistic is undefined for the given data (e.g. skewness of constant data).
class UndefinedStatistic : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Bad configuration: malformed scale file, unattainable simulation settings.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ValidationIssue {
  std::size_t row = 0;     // 1-based, 0 when not tied to a row
  std::size_t column = 0;  // 1-based, 0 when not tied to a column
  std::string field;       // e.g. "Q2", "score", "level"
  std::string message;
};

// User input failed validation. Carries every issue found, not just the first.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<ValidationIssue> issues);
  ValidationError(std::string message, ValidationIssue issue);

  const std::vector<ValidationIssue>& issues() const noexcept { return issues_; }

 private:
  std::vector<ValidationIssue> issues_;
};

}  // namespace susci
