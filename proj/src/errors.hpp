#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace etpsim {

// Every failure raised by the core derives from Error; the C API maps the
// concrete type onto a status code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InputError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ParseError : public InputError {
 public:
  ParseError(const std::string& what, std::size_t line)
      : InputError(what + " (line " + std::to_string(line) + ")"), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class InfeasibleError : public Error {
 public:
  InfeasibleError(const std::string& what, double r_min, double r_max)
      : Error(what), r_min_(r_min), r_max_(r_max) {}
  double r_min() const noexcept { return r_min_; }
  double r_max() const noexcept { return r_max_; }

 private:
  double r_min_;
  double r_max_;
};

// Carries the last iterate (natural parameters) when the fit gave up.
class FitError : public Error {
 public:
  explicit FitError(const std::string& what, std::vector<double> last_iterate = {})
      : Error(what), last_iterate_(std::move(last_iterate)) {}
  const std::vector<double>& last_iterate() const noexcept { return last_iterate_; }

 private:
  std::vector<double> last_iterate_;
};

class DegeneracyError : public FitError {
 public:
  using FitError::FitError;
};

class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace etpsim
