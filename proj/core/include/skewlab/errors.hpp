#pragma once

#include <stdexcept>
#include <string>

namespace skewlab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An integer matrix has an eigenvalue on (or within 1e-9 of) the unit circle,
/// or complex eigenvalues.
class NotHyperbolic : public Error {
 public:
  using Error::Error;
};

/// A preorbit policy found no admissible branch at some depth.
class PolicyInfeasible : public Error {
 public:
  PolicyInfeasible(const std::string& what, int depth)
      : Error(what), depth_(depth) {}
  int depth() const noexcept { return depth_; }

 private:
  int depth_;
};

/// Two candidate branches are equidistant from the reference preorbit.
class ShadowBreakdown : public Error {
 public:
  ShadowBreakdown(const std::string& what, int depth)
      : Error(what), depth_(depth) {}
  int depth() const noexcept { return depth_; }

 private:
  int depth_;
};

class DegenerateSeed : public Error {
 public:
  using Error::Error;
};

/// A leaf parameter left the eigenline chart (|t| >= 0.5).
class LegTooLong : public Error {
 public:
  using Error::Error;
};

class NotAccessibleNumerically : public Error {
 public:
  NotAccessibleNumerically(const std::string& what, double achieved_error)
      : Error(what), achieved_error_(achieved_error) {}
  double achieved_error() const noexcept { return achieved_error_; }

 private:
  double achieved_error_;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line)
      : Error(what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

class ValidationError : public Error {
 public:
  ValidationError(const std::string& key, const std::string& what)
      : Error(key + ": " + what), key_(key) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

}  // namespace skewlab
