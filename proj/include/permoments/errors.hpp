#pragma once

#include <stdexcept>
#include <string>

namespace permoments {

// Raised when a computation cannot be carried out for otherwise well-formed
// input: |x| outside the admissible disk, x too close to a root of unity,
// a size cap exceeded, or a truncation tolerance that cannot be met.
// Malformed arguments (arity mismatches, negative sizes) raise
// std::invalid_argument instead.
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

}  // namespace permoments

namespace permoments {

// A long-running computation observed a stop request.
class OperationCancelled : public std::runtime_error {
 public:
  OperationCancelled() : std::runtime_error("operation cancelled") {}
};

}  // namespace permoments
