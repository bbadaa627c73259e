#pragma once

#include <stdexcept>
#include <string>

namespace zigfast {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A root bracket could not be found or bisection did not reach tolerance.
class NonConvergence : public Error {
  public:
    using Error::Error;
};

/// The density failed validation (not decreasing, P(0) != 1, ...).
class InvalidSpec : public Error {
  public:
    using Error::Error;
};

class QuadratureFailure : public Error {
  public:
    using Error::Error;
};

/// A chord dipped below the density inside an overhang box.
class CurvatureViolation : public Error {
  public:
    using Error::Error;
};

class EmptyWeights : public Error {
  public:
    using Error::Error;
};

/// Table file could not be parsed: bad magic, schema, version or checksum.
class FormatError : public Error {
  public:
    using Error::Error;
};

class BitBudgetExceeded : public Error {
  public:
    using Error::Error;
};

}  // namespace zigfast
