#pragma once

#include <cstddef>
#include <exception>
#include <string>
#include <utility>
#include <vector>

namespace gamecat {

// Base of every error thrown by the library. The pipeline tags errors with
// the stage that raised them; the tag is prepended to what().
class Error : public std::exception {
 public:
  explicit Error(std::string message) : message_(std::move(message)) {
    rebuild();
  }

  const char* what() const noexcept override { return full_.c_str(); }
  const std::string& message() const noexcept { return message_; }
  const std::string& stage() const noexcept { return stage_; }

  void set_stage(std::string stage) {
    if (stage_.empty()) {
      stage_ = std::move(stage);
      rebuild();
    }
  }

 private:
  void rebuild() {
    full_ = stage_.empty() ? message_ : "[" + stage_ + "] " + message_;
  }

  std::string message_;
  std::string stage_;
  std::string full_;
};

// Precondition violated by a caller-supplied argument.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Malformed or inconsistent input data (corpus records, labels, configs).
class DataError : public Error {
 public:
  using Error::Error;
};

// nu lies outside (0, d] for at least one binary problem. Each entry of
// pairs() names the offending class pair.
class InfeasibleNuError : public Error {
 public:
  InfeasibleNuError(std::string message,
                    std::vector<std::pair<std::string, std::string>> pairs = {})
      : Error(std::move(message)), pairs_(std::move(pairs)) {}

  const std::vector<std::pair<std::string, std::string>>& pairs() const noexcept {
    return pairs_;
  }

 private:
  std::vector<std::pair<std::string, std::string>> pairs_;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(std::string message, long iterations)
      : Error(std::move(message)), iterations_(iterations) {}

  long iterations() const noexcept { return iterations_; }

 private:
  long iterations_;
};

// Unparseable model or config file; byte_offset() points into the input.
class FormatError : public Error {
 public:
  FormatError(std::string message, std::size_t byte_offset)
      : Error(std::move(message)), byte_offset_(byte_offset) {}

  std::size_t byte_offset() const noexcept { return byte_offset_; }

 private:
  std::size_t byte_offset_;
};

class VersionError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace gamecat
