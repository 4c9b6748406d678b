#pragma once

#include <stdexcept>
#include <string>

namespace instanton {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "Error"; }
};

#define INSTANTON_ERROR(Name)                                    \
  struct Name : Error {                                          \
    using Error::Error;                                          \
    const char* kind() const noexcept override { return #Name; } \
  }

INSTANTON_ERROR(DomainError);
INSTANTON_ERROR(OrderUnsupported);
INSTANTON_ERROR(OrderExceeded);
INSTANTON_ERROR(NonPositiveDefinite);
INSTANTON_ERROR(InconclusiveError);
INSTANTON_ERROR(TypeMismatch);
INSTANTON_ERROR(UnknownFamily);
INSTANTON_ERROR(ParamOutOfRange);
INSTANTON_ERROR(InsufficientRadii);
INSTANTON_ERROR(EigenformBranchError);
INSTANTON_ERROR(SignError);
INSTANTON_ERROR(FitError);
INSTANTON_ERROR(IntegrationError);
INSTANTON_ERROR(InvalidFan);
INSTANTON_ERROR(NonSmoothCorner);
INSTANTON_ERROR(ParseError);
INSTANTON_ERROR(UsageError);
INSTANTON_ERROR(IoError);

#undef INSTANTON_ERROR

}  // namespace instanton
