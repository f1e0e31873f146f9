#pragma once

#include <stdexcept>
#include <string>

namespace akp {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Factorization failures, non-finite gradients.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Training data that cannot define a classifier (e.g. a single label).
class DegenerateData : public Error {
 public:
  using Error::Error;
};

/// Query outside the region a model is defined on.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Start or goal configuration in occupied space.
class InvalidEndpoint : public Error {
 public:
  using Error::Error;
};

class InvalidPose : public Error {
 public:
  using Error::Error;
};

/// File-system and document-format problems.
class IoError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace akp
