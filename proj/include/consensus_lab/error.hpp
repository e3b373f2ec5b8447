#pragma once

#include <stdexcept>
#include <string>

namespace consensus_lab {

// Bad input: malformed files, out-of-domain parameters, violated preconditions.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

// A file could not be opened or read.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// A simulation produced a non-finite state.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, int round)
      : std::runtime_error(what), round_(round) {}
  int round() const { return round_; }

 private:
  int round_;
};

// An agent touched a link it is not incident to. Always a programming error.
class LocalityError : public std::logic_error {
 public:
  explicit LocalityError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace consensus_lab
