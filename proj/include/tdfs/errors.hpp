#pragma once

#include <stdexcept>
#include <string>

namespace tdfs {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define TDFS_DEFINE_ERROR(Name)       \
  class Name : public Error {         \
   public:                            \
    using Error::Error;               \
  }

TDFS_DEFINE_ERROR(DegenerateSet);
TDFS_DEFINE_ERROR(NonSquare);
TDFS_DEFINE_ERROR(DimensionMismatch);
TDFS_DEFINE_ERROR(InvalidArgument);
TDFS_DEFINE_ERROR(StateInvariantViolated);
TDFS_DEFINE_ERROR(DimensionChangeCrossed);
TDFS_DEFINE_ERROR(DerivativeUnavailable);
TDFS_DEFINE_ERROR(EigenconditionViolated);
TDFS_DEFINE_ERROR(ConditionsViolated);
TDFS_DEFINE_ERROR(EmptyKernel);

#undef TDFS_DEFINE_ERROR

}  // namespace tdfs
