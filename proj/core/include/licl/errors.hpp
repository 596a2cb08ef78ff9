#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace licl {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A state violates one of its structural invariants.
class InvalidState : public Error {
 public:
  using Error::Error;
};

// An action was applied while one of its preconditions failed. The message
// names the failed precondition and is reused verbatim in oracle feedback.
class PreconditionViolation : public Error {
 public:
  using Error::Error;
};

class DomainMismatch : public Error {
 public:
  using Error::Error;
};

class UnsupportedDomain : public Error {
 public:
  using Error::Error;
};

class GenerationError : public Error {
 public:
  using Error::Error;
};

class NoPlan : public Error {
 public:
  using Error::Error;
};

class OracleQueryError : public Error {
 public:
  using Error::Error;
};

class RoutingError : public Error {
 public:
  using Error::Error;
};

class AssemblyError : public Error {
 public:
  using Error::Error;
};

class TransportError : public Error {
 public:
  using Error::Error;
};

class PromptTooLarge : public Error {
 public:
  using Error::Error;
};

class ReportError : public Error {
 public:
  using Error::Error;
};

// Located parse failure: byte offset into the source text plus the token
// the parser expected at that point.
class ParseError : public Error {
 public:
  ParseError(std::size_t offset, std::string expected, const std::string& detail = {})
      : Error("parse error at byte " + std::to_string(offset) + ": expected " + expected +
              (detail.empty() ? std::string{} : " (" + detail + ")")),
        offset_(offset),
        expected_(std::move(expected)) {}

  std::size_t offset() const noexcept { return offset_; }
  const std::string& expected() const noexcept { return expected_; }

 private:
  std::size_t offset_;
  std::string expected_;
};

}  // namespace licl
