#pragma once

#include <stdexcept>
#include <string>

namespace ngf {

/// Base of every error thrown by the library. `kind()` groups errors into
/// the families the command-line tool maps onto exit codes.
class Error : public std::runtime_error {
 public:
  enum class Kind { kContract, kDimension, kDomain, kNumeric, kData, kUsage };

  Error(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

struct ContractError : Error {
  explicit ContractError(const std::string& what) : Error(Kind::kContract, what) {}
};

struct DimensionError : Error {
  explicit DimensionError(const std::string& what) : Error(Kind::kDimension, what) {}
};

struct DomainError : Error {
  explicit DomainError(const std::string& what) : Error(Kind::kDomain, what) {}
};

struct NumericError : Error {
  explicit NumericError(const std::string& what) : Error(Kind::kNumeric, what) {}
};

/// Schema violations, dangling references, empty sampling pools, infeasible
/// generator specs.
struct DataError : Error {
  explicit DataError(const std::string& what) : Error(Kind::kData, what) {}
};

struct UsageError : Error {
  explicit UsageError(const std::string& what) : Error(Kind::kUsage, what) {}
};

}  // namespace ngf
