#pragma once

#include <stdexcept>
#include <string>

namespace stp {

// Base class for all recoverable errors raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed input text. `position` is the byte offset of the offending token.
class ParseError : public Error {
 public:
  ParseError(std::size_t position, const std::string& expected)
      : Error("parse error at offset " + std::to_string(position) + ": expected " + expected),
        position_(position),
        expected_(expected) {}

  std::size_t position() const { return position_; }
  const std::string& expected() const { return expected_; }

 private:
  std::size_t position_;
  std::string expected_;
};

// Input is well-formed but exceeds a configured bound (term depth, literal size).
class LimitError : public Error {
 public:
  explicit LimitError(const std::string& what) : Error(what) {}
};

// A proof whose step list violates the terminal-step rule.
class StructureError : public Error {
 public:
  explicit StructureError(const std::string& what) : Error(what) {}
};

// Invalid configuration values or files.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(what) {}
};

// Re-weighting cannot place all required matches.
class InfeasibleError : public Error {
 public:
  explicit InfeasibleError(const std::string& what) : Error(what) {}
};

// External generator endpoint unreachable at batch start.
class TransportError : public Error {
 public:
  explicit TransportError(const std::string& what) : Error(what) {}
};

// A run directory that lacks report rows.
class MissingRunError : public Error {
 public:
  explicit MissingRunError(const std::string& what) : Error(what) {}
};

}  // namespace stp
