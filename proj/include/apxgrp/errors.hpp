#pragma once

#include <stdexcept>
#include <string>

namespace apxgrp {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UniverseMismatch : public Error {
 public:
  UniverseMismatch() : Error("operands live in different universes") {}
};

// Partial products in a windowed local group: either too many factors or a
// prefix left the window.
class LocalOverflow : public Error {
 public:
  enum class Reason { Arity, WindowExit };

  LocalOverflow(Reason r, std::string detail)
      : Error("local product undefined: " + std::move(detail)), reason(r) {}

  Reason reason;
};

class NotSymmetric : public Error {
 public:
  explicit NotSymmetric(const std::string& what) : Error(what) {}
};

class PreconditionViolated : public Error {
 public:
  explicit PreconditionViolated(const std::string& what) : Error(what) {}
};

class Uncoverable : public Error {
 public:
  explicit Uncoverable(const std::string& what) : Error(what) {}
};

class NotEquivalent : public Error {
 public:
  explicit NotEquivalent(const std::string& what) : Error(what) {}
};

class BudgetExceeded : public Error {
 public:
  explicit BudgetExceeded(const std::string& what) : Error(what) {}
};

class InternalInvariantBroken : public Error {
 public:
  explicit InternalInvariantBroken(const std::string& what) : Error(what) {}
};

class InvalidInstance : public Error {
 public:
  explicit InvalidInstance(const std::string& what) : Error(what) {}
};

}  // namespace apxgrp
