#pragma once

#include <stdexcept>
#include <string>

namespace coopmag {

// Process exit codes used by the CLI: 0 success, 2 config/validation error,
// 3 numerical failure, 4 I/O error.
enum class ErrorClass : int { Validation = 2, Numerical = 3, Io = 4 };

class Error : public std::runtime_error {
 public:
  Error(ErrorClass cls, const std::string& msg)
      : std::runtime_error(msg), cls_(cls) {}
  ErrorClass error_class() const noexcept { return cls_; }
  int exit_code() const noexcept { return static_cast<int>(cls_); }

 private:
  ErrorClass cls_;
};

#define COOPMAG_DEFINE_ERROR(Name, Class)                    \
  class Name : public Error {                                \
   public:                                                   \
    explicit Name(const std::string& msg)                    \
        : Error(ErrorClass::Class, std::string(#Name ": ") + msg) {} \
  }

COOPMAG_DEFINE_ERROR(NonPositiveParameter, Validation);
COOPMAG_DEFINE_ERROR(GapExceedsQubitFrequency, Validation);
COOPMAG_DEFINE_ERROR(MissingTransportParameters, Validation);
COOPMAG_DEFINE_ERROR(CoincidentQubits, Validation);
COOPMAG_DEFINE_ERROR(DimensionMismatch, Validation);
COOPMAG_DEFINE_ERROR(DimensionTooLarge, Validation);
COOPMAG_DEFINE_ERROR(ConfigValidation, Validation);
COOPMAG_DEFINE_ERROR(DomainError, Numerical);
COOPMAG_DEFINE_ERROR(ConvergenceFailure, Numerical);
COOPMAG_DEFINE_ERROR(EigensolverFailure, Numerical);
COOPMAG_DEFINE_ERROR(StepSizeUnderflow, Numerical);
COOPMAG_DEFINE_ERROR(DisorderSamplingExhausted, Numerical);
COOPMAG_DEFINE_ERROR(SingularPoint, Numerical);
COOPMAG_DEFINE_ERROR(IoError, Io);

#undef COOPMAG_DEFINE_ERROR

}  // namespace coopmag
