#include "susci/errors.hpp"

namespace susci {

ValidationError::ValidationError(std::vector<ValidationIssue> issues)
    : std::runtime_error(issues.empty() ? std::string("validation failed") : issues.front().message),
      issues_(std::move(issues)) {}

ValidationError::ValidationError(std::string message, ValidationIssue issue)
    : std::runtime_error(std::move(message)), issues_{std::move(issue)} {}

}  // namespace susci
