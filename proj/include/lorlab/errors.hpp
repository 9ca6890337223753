#pragma once

#include <stdexcept>
#include <string>

namespace lorlab {

// Base class for every diagnostic thrown by the library. The what() string
// always starts with the error kind so reports and tests can match on it.
struct Error : std::runtime_error {
  explicit Error(const std::string& kind, const std::string& msg)
      : std::runtime_error(kind + ": " + msg) {}
};

#define LORLAB_DEFINE_ERROR(Name)                          \
  struct Name : Error {                                    \
    explicit Name(const std::string& msg = "")             \
        : Error(#Name, msg) {}                             \
  };

LORLAB_DEFINE_ERROR(SingularMetric)        // |det g| below threshold
LORLAB_DEFINE_ERROR(OutOfDomain)           // point outside the chart box
LORLAB_DEFINE_ERROR(NotTimelikeFuture)     // vector/covector fails the cone test
LORLAB_DEFINE_ERROR(StepSizeUnderflow)     // adaptive integrator stalled
LORLAB_DEFINE_ERROR(NoConvergence)         // Newton ran out of iterations
LORLAB_DEFINE_ERROR(NotCausallyConnectable)// every Newton iterate left the cone
LORLAB_DEFINE_ERROR(NotCausal)             // action on a curve with a bad chord
LORLAB_DEFINE_ERROR(NotConverged)          // Busemann limit tail too large
LORLAB_DEFINE_ERROR(NotElliptic)           // coefficient spectrum touches zero
LORLAB_DEFINE_ERROR(SquareRootFailure)     // matrix sqrt of a non-positive form
LORLAB_DEFINE_ERROR(QuadratureDomainClip)  // bump support exits the chart box
LORLAB_DEFINE_ERROR(NewtonFail)            // level-set projection failed
LORLAB_DEFINE_ERROR(ConfigError)           // scenario/chart file diagnostics

#undef LORLAB_DEFINE_ERROR

}  // namespace lorlab
