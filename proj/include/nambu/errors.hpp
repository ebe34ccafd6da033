#pragma once

#include <stdexcept>
#include <string>

namespace nambu {

// Base class for all library errors. The CLI maps NonConvergent to exit
// code 2 and every other subtype to exit code 1.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t offset, const std::string& expected)
      : Error("syntax error at offset " + std::to_string(offset) +
              ": expected " + expected),
        offset(offset),
        expected(expected) {}
  std::size_t offset;
  std::string expected;
};

class UnknownVariable : public Error {
 public:
  UnknownVariable(const std::string& name, const std::string& allowed)
      : Error("unknown variable '" + name + "' (declared: " + allowed + ")"),
        name(name) {}
  std::string name;
};

class UnknownFunction : public Error {
 public:
  explicit UnknownFunction(const std::string& name)
      : Error("unknown function '" + name + "'"), name(name) {}
  std::string name;
};

class EvalDomainError : public Error {
 public:
  explicit EvalDomainError(const std::string& msg) : Error(msg) {}
};

class OffManifold : public Error {
 public:
  explicit OffManifold(const std::string& msg) : Error(msg) {}
};

class ResolutionTooLow : public Error {
 public:
  explicit ResolutionTooLow(const std::string& msg) : Error(msg) {}
};

class NotGeneric : public Error {
 public:
  explicit NotGeneric(const std::string& msg) : Error(msg) {}
};

class PoleViolation : public Error {
 public:
  explicit PoleViolation(const std::string& msg) : Error(msg) {}
};

class InconsistentSign : public Error {
 public:
  explicit InconsistentSign(const std::string& msg) : Error(msg) {}
};

class ScheduleTooFine : public Error {
 public:
  explicit ScheduleTooFine(const std::string& msg) : Error(msg) {}
};

class NonConvergent : public Error {
 public:
  explicit NonConvergent(const std::string& msg) : Error(msg) {}
};

class CutoffMismatch : public Error {
 public:
  explicit CutoffMismatch(const std::string& msg) : Error(msg) {}
};

class LocusMismatch : public Error {
 public:
  explicit LocusMismatch(const std::string& msg) : Error(msg) {}
};

class NotGenericTheta : public Error {
 public:
  explicit NotGenericTheta(const std::string& msg) : Error(msg) {}
};

class DegenerateGradient : public Error {
 public:
  explicit DegenerateGradient(const std::string& msg) : Error(msg) {}
};

class NotATree : public Error {
 public:
  explicit NotATree(const std::string& msg) : Error(msg) {}
};

class KTooLarge : public Error {
 public:
  explicit KTooLarge(const std::string& msg) : Error(msg) {}
};

class DomainMismatch : public Error {
 public:
  explicit DomainMismatch(const std::string& msg) : Error(msg) {}
};

class NotNormalized : public Error {
 public:
  explicit NotNormalized(const std::string& msg) : Error(msg) {}
};

class ZeroInsideRange : public Error {
 public:
  explicit ZeroInsideRange(const std::string& msg) : Error(msg) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& msg) : Error(msg) {}
};

// Scenario / precondition validation failures (bad keys, malformed input).
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& msg) : Error(msg) {}
};

}  // namespace nambu
