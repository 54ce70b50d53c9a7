#pragma once

#include <stdexcept>
#include <string>

namespace dvs {

// Base of every error the library raises. The CLI maps ConfigError to exit
// code 2 and everything else to exit code 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class BoundsError : public Error {
 public:
  using Error::Error;
};

class ValueError : public Error {
 public:
  using Error::Error;
};

class ClassRangeError : public Error {
 public:
  using Error::Error;
};

class UndefinedMeasureError : public Error {
 public:
  using Error::Error;
};

class CompletenessError : public Error {
 public:
  using Error::Error;
};

class LifecycleError : public Error {
 public:
  using Error::Error;
};

class SequenceError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace dvs
