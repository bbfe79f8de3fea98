#pragma once

#include <stdexcept>
#include <string>

namespace xrl {

// Bad input: wrong dimensions, invalid configuration, precondition violations.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A non-finite value appeared while evaluating an objective or its gradient.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(std::string stage, const std::string& detail)
      : std::runtime_error("numerical failure in " + stage + ": " + detail),
        stage_(std::move(stage)) {}

  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

class IoError : public std::runtime_error {
 public:
  IoError(const std::string& path, const std::string& what)
      : std::runtime_error(path + ": " + what), path_(path) {}

  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

}  // namespace xrl
