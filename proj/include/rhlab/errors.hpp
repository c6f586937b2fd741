#pragma once

#include <stdexcept>
#include <string>

namespace rhlab {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "Error"; }
};

#define RHLAB_DECLARE_ERROR(Name)                                  \
  class Name : public Error {                                      \
   public:                                                         \
    using Error::Error;                                            \
    const char* kind() const noexcept override { return #Name; }   \
  };

RHLAB_DECLARE_ERROR(PreconditionError)
RHLAB_DECLARE_ERROR(DegenerateRegion)
RHLAB_DECLARE_ERROR(NonIntegrable)
RHLAB_DECLARE_ERROR(CoverFailed)
RHLAB_DECLARE_ERROR(BranchExplosion)
RHLAB_DECLARE_ERROR(CylinderNotFound)
RHLAB_DECLARE_ERROR(VerificationFailed)
RHLAB_DECLARE_ERROR(NotFound)
RHLAB_DECLARE_ERROR(SingularHit)
RHLAB_DECLARE_ERROR(InvariantViolation)

#undef RHLAB_DECLARE_ERROR

class TimeoutError : public Error {
 public:
  TimeoutError(const std::string& what, int n_max, double max_image_length)
      : Error(what), n_max_(n_max), max_image_length_(max_image_length) {}
  const char* kind() const noexcept override { return "Timeout"; }
  int n_max() const noexcept { return n_max_; }
  double max_image_length() const noexcept { return max_image_length_; }

 private:
  int n_max_;
  double max_image_length_;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw PreconditionError(message);
}

}  // namespace rhlab
