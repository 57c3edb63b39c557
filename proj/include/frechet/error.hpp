#pragma once

#include <stdexcept>
#include <string>

namespace frechet {

enum class ErrorCode {
  InvalidInput,
  Resource,
  AtomAtQuery,        // p = 1 gradient requested at an atom
  NonlinearAtAtom,    // p = 1 first variation requested at x = q
  StepSize,           // descent failed to make progress; retry with a smaller step
  SearchBudgetExhausted,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidInput: return "invalid-input";
    case ErrorCode::Resource: return "resource";
    case ErrorCode::AtomAtQuery: return "atom-at-query";
    case ErrorCode::NonlinearAtAtom: return "nonlinear-at-atom";
    case ErrorCode::StepSize: return "step-size";
    case ErrorCode::SearchBudgetExhausted: return "search-budget-exhausted";
  }
  return "unknown";
}

inline void require(bool cond, ErrorCode code, const std::string& msg) {
  if (!cond) throw Error(code, msg);
}

}  // namespace frechet
