#pragma once

#include <stdexcept>
#include <string>

namespace gg {

/// A caller broke an operation's precondition (bad input shape, wrong stage,
/// empty group). Maps to exit code 2 in the CLI and 400 in the service.
class ContractError : public std::invalid_argument {
 public:
  explicit ContractError(const std::string& what) : std::invalid_argument(what) {}
  ContractError(std::string field, const std::string& what)
      : std::invalid_argument(what), field_(std::move(field)) {}

  /// Dotted path of the offending field, when one is known.
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// The remote NLI judge could not be reached or answered badly.
class TransportError : public std::runtime_error {
 public:
  TransportError(std::string endpoint, long elapsed_ms, const std::string& detail)
      : std::runtime_error(detail + " (endpoint " + endpoint + ", " + std::to_string(elapsed_ms) +
                           " ms)"),
        endpoint_(std::move(endpoint)),
        detail_(detail),
        elapsed_ms_(elapsed_ms) {}

  const std::string& endpoint() const noexcept { return endpoint_; }
  long elapsed_ms() const noexcept { return elapsed_ms_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::string endpoint_;
  std::string detail_;
  long elapsed_ms_;
};

}  // namespace gg
