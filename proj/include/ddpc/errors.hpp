#pragma once

#include <stdexcept>
#include <string>

namespace ddpc {

/// Failure categories exposed to callers; the CLI maps each to an exit code.
enum class ErrorCategory {
  parse,       ///< malformed file or argument
  dimension,   ///< dimension mismatch, invalid window or configuration
  excitation,  ///< data fails a persistence-of-excitation / rank condition
  infeasible,  ///< optimization problem has no feasible point
  solver,      ///< solver failed to certify a solution
  generation,  ///< bounded random resampling exhausted
};

const char* to_string(ErrorCategory c);

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const { return category_; }

  static Error parse(const std::string& w) { return {ErrorCategory::parse, w}; }
  static Error dimension(const std::string& w) { return {ErrorCategory::dimension, w}; }
  static Error excitation(const std::string& w) { return {ErrorCategory::excitation, w}; }
  static Error infeasible(const std::string& w) { return {ErrorCategory::infeasible, w}; }
  static Error solver(const std::string& w) { return {ErrorCategory::solver, w}; }
  static Error generation(const std::string& w) { return {ErrorCategory::generation, w}; }

 private:
  ErrorCategory category_;
};

}  // namespace ddpc
