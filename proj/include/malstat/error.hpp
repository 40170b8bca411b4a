#pragma once

#include <stdexcept>
#include <string>

namespace malstat {

/// Base error for all recoverable failures raised by the toolkit.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what) : Error(what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(what) {}
};

class TrainError : public Error {
 public:
  explicit TrainError(const std::string& what) : Error(what) {}
};

}  // namespace malstat
