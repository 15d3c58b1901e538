#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace bdyn {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Expression evaluated outside its mathematical domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::string message, std::size_t offset, std::vector<std::string> expected = {})
      : Error(std::move(message)), offset_(offset), expected_(std::move(expected)) {}

  std::size_t offset() const { return offset_; }
  const std::vector<std::string>& expected() const { return expected_; }

 private:
  std::size_t offset_;
  std::vector<std::string> expected_;
};

class UnknownIdentifier : public ParseError {
 public:
  UnknownIdentifier(std::string name, std::size_t offset)
      : ParseError("unknown identifier '" + name + "'", offset), name_(std::move(name)) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class RankDeficient : public Error {
 public:
  using Error::Error;
};

class Degenerate : public Error {
 public:
  using Error::Error;
};

class NotMorse : public Error {
 public:
  using Error::Error;
};

class RegularValueViolation : public Error {
 public:
  using Error::Error;
};

class MorseInequalityViolation : public Error {
 public:
  using Error::Error;
};

class SpectralMismatch : public Error {
 public:
  using Error::Error;
};

class SignInconsistency : public Error {
 public:
  using Error::Error;
};

class StepUnderflow : public Error {
 public:
  using Error::Error;
};

class NonFiniteState : public Error {
 public:
  using Error::Error;
};

class CollisionError : public Error {
 public:
  using Error::Error;
};

class ScenarioError : public Error {
 public:
  using Error::Error;
};

}  // namespace bdyn
