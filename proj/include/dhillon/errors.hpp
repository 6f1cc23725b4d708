#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace dhillon {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define DHILLON_DEFINE_ERROR(Name)        \
  class Name : public Error {             \
   public:                                \
    using Error::Error;                   \
  }

DHILLON_DEFINE_ERROR(DomainError);
DHILLON_DEFINE_ERROR(NoBracket);
DHILLON_DEFINE_ERROR(MaxIterExceeded);
DHILLON_DEFINE_ERROR(MomentDoesNotExist);
DHILLON_DEFINE_ERROR(MrlUndefined);
DHILLON_DEFINE_ERROR(DegenerateData);
DHILLON_DEFINE_ERROR(NotConverged);
DHILLON_DEFINE_ERROR(ImproperPosterior);
DHILLON_DEFINE_ERROR(DegenerateSeries);
DHILLON_DEFINE_ERROR(EmptyChain);
DHILLON_DEFINE_ERROR(EmptyInput);

#undef DHILLON_DEFINE_ERROR

/// Short rendering of a number for error messages.
inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace dhillon
