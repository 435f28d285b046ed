#pragma once

#include <stdexcept>
#include <string>

namespace steinmetz {

/// Violated precondition or invalid configuration. The CLI maps it to exit code 1.
class ContractError : public std::logic_error {
 public:
  explicit ContractError(const std::string& what) : std::logic_error(what) {}
};

/// Shape mismatch between operands.
class DimensionError : public ContractError {
 public:
  explicit DimensionError(const std::string& what) : ContractError(what) {}
};

/// Malformed, missing or non-finite input data. The CLI maps it to exit code 2.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace steinmetz
