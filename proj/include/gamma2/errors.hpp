#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gamma2 {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Positioned failure from the expression parser.
class ParseError : public Error {
 public:
  ParseError(std::size_t offset, std::string expected, std::string found)
      : Error("offset " + std::to_string(offset) + ": expected " + expected + ", found " + found),
        offset_(offset),
        expected_(std::move(expected)),
        found_(std::move(found)) {}

  std::size_t offset() const noexcept { return offset_; }
  const std::string& expected() const noexcept { return expected_; }
  const std::string& found() const noexcept { return found_; }

 private:
  std::size_t offset_;
  std::string expected_;
  std::string found_;
};

/// Division by a zero jet value, log/sqrt of a nonpositive value, and the like.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Non-SPD metric, off-boundary point, degenerate normal.
class GeometryError : public Error {
 public:
  using Error::Error;
};

class QuadratureError : public Error {
 public:
  using Error::Error;
};

/// A theorem check was handed data that violates its hypothesis (the Neumann gate).
class HypothesisError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace gamma2
