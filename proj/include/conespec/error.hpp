#pragma once

#include <stdexcept>
#include <string>

namespace conespec {

enum class ErrorCode {
  Domain,
  Unsupported,
  InvalidProfile,
  IncompleteEnumeration,
  SolverFailure,
  SolverDisagreement,
  Config,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::Domain: return "domain_error";
    case ErrorCode::Unsupported: return "unsupported";
    case ErrorCode::InvalidProfile: return "invalid_profile";
    case ErrorCode::IncompleteEnumeration: return "incomplete_enumeration";
    case ErrorCode::SolverFailure: return "solver_failure";
    case ErrorCode::SolverDisagreement: return "solver_disagreement";
    case ErrorCode::Config: return "config_error";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline void require(bool condition, ErrorCode code, const std::string& what) {
  if (!condition) throw Error(code, what);
}

}  // namespace conespec
