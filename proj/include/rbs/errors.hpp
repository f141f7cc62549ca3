#ifndef RBS_ERRORS_HPP
#define RBS_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <vector>

#include "rbs/types.hpp"

namespace rbs {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad degree, bad sample count, bad upsampling target and similar caller errors.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Non-positive area element, singular inertia, overlapping bodies.
class GeometryError : public Error {
 public:
  using Error::Error;
};

class SingularEvaluation : public Error {
 public:
  using Error::Error;
};

class NearZoneViolation : public Error {
 public:
  using Error::Error;
};

/// Target on or inside a body where only fluid-domain targets are allowed.
class DomainError : public Error {
 public:
  using Error::Error;
};

class InvalidRotation : public Error {
 public:
  using Error::Error;
};

/// Operator built for different poses than the ones it is applied with.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

class ContactError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class NonConvergence : public Error {
 public:
  NonConvergence(const std::string& what, VecX best, std::vector<double> history)
      : Error(what), best_iterate(std::move(best)), residual_history(std::move(history)) {}

  VecX best_iterate;
  std::vector<double> residual_history;
};

}  // namespace rbs

#endif
