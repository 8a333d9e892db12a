#pragma once

#include <stdexcept>
#include <string>

namespace pldeconv {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Incompatible or degenerate array shapes.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A value violates a documented type invariant (kernel sum, key point origin...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A trajectory does not fit inside the kernel window.
class RenderError : public Error {
 public:
  RenderError(const std::string& what, double excursion)
      : Error(what), excursion_(excursion) {}
  double excursion() const noexcept { return excursion_; }

 private:
  double excursion_;
};

/// Malformed or unreadable file.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Failure inside the blind estimation pipeline, labeled with the stage.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what)
      : Error(stage + ": " + what), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

}  // namespace pldeconv
