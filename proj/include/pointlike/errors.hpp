#pragma once

#include <stdexcept>
#include <string>

namespace pointlike {

/// Base class of every error raised by the library. `name()` is the short
/// identifier reported by the command line front-end.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* name() const noexcept = 0;
};

#define POINTLIKE_DEFINE_ERROR(Type)                                   \
  class Type : public Error {                                          \
   public:                                                             \
    using Error::Error;                                                \
    const char* name() const noexcept override { return #Type; }      \
  }

POINTLIKE_DEFINE_ERROR(DomainError);
POINTLIKE_DEFINE_ERROR(QuadratureError);
POINTLIKE_DEFINE_ERROR(StiffnessError);
POINTLIKE_DEFINE_ERROR(GuardBandError);
POINTLIKE_DEFINE_ERROR(NoConvergence);
POINTLIKE_DEFINE_ERROR(FitError);
POINTLIKE_DEFINE_ERROR(BracketError);
POINTLIKE_DEFINE_ERROR(TruncationError);
POINTLIKE_DEFINE_ERROR(ModelMismatch);
POINTLIKE_DEFINE_ERROR(OverflowError);
POINTLIKE_DEFINE_ERROR(ConfigError);

#undef POINTLIKE_DEFINE_ERROR

}  // namespace pointlike
