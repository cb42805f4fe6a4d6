#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hjm {

/// Process exit codes shared by every typed error.
enum class ExitCode : int {
  ok = 0,
  check_failed = 1,
  usage = 2,
  degenerate = 3,
  numeric = 4,
};

class Error : public std::runtime_error {
 public:
  Error(ExitCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ExitCode code() const noexcept { return code_; }

 private:
  ExitCode code_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t offset, const std::string& msg)
      : Error(ExitCode::usage, "syntax error at byte " + std::to_string(offset) + ": " + msg),
        offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class UnknownIdentifierError : public Error {
 public:
  explicit UnknownIdentifierError(const std::string& token)
      : Error(ExitCode::usage, "unknown identifier '" + token + "'"), token_(token) {}
  const std::string& token() const noexcept { return token_; }

 private:
  std::string token_;
};

class UnboundSymbolError : public Error {
 public:
  explicit UnboundSymbolError(const std::string& name)
      : Error(ExitCode::usage, "unbound symbol '" + name + "'"), name_(name) {}
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

/// Evaluation left the domain of a function (log of non-positive, even root of negative, 1/0).
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& msg) : Error(ExitCode::numeric, "domain error: " + msg) {}
};

class DomainExhaustedError : public Error {
 public:
  explicit DomainExhaustedError(const std::string& msg)
      : Error(ExitCode::numeric, "no valid sample point: " + msg) {}
};

class LevelOverflowError : public Error {
 public:
  explicit LevelOverflowError(const std::string& msg) : Error(ExitCode::usage, "level overflow: " + msg) {}
};

class ChartMismatchError : public Error {
 public:
  explicit ChartMismatchError(const std::string& msg) : Error(ExitCode::usage, "chart mismatch: " + msg) {}
};

class PreconditionError : public Error {
 public:
  explicit PreconditionError(const std::string& msg) : Error(ExitCode::usage, msg) {}
};

/// Gauge function fails the compatibility condition with the Lagrangian.
class IncompatibleGaugeError : public PreconditionError {
 public:
  explicit IncompatibleGaugeError(const std::string& msg) : PreconditionError("incompatible gauge function: " + msg) {}
};

/// Mixed velocity/auxiliary Hessian of the gauge function is singular.
class Cond2Error : public PreconditionError {
 public:
  explicit Cond2Error(const std::string& msg) : PreconditionError("gauge coupling is singular: " + msg) {}
};

class NotSolvableError : public Error {
 public:
  explicit NotSolvableError(const std::string& msg)
      : Error(ExitCode::numeric, "not symbolically solvable: " + msg) {}
};

class DegeneracyError : public Error {
 public:
  DegeneracyError(const std::string& msg, int rank, int size)
      : Error(ExitCode::degenerate, msg + " (rank " + std::to_string(rank) + " of " + std::to_string(size) + ")"),
        rank_(rank), size_(size) {}
  int rank() const noexcept { return rank_; }
  int size() const noexcept { return size_; }

 private:
  int rank_;
  int size_;
};

/// Constraint Jacobian w.r.t. the multipliers is rank deficient: no unique multiplier exists.
class SingularJacobianError : public DegeneracyError {
 public:
  SingularJacobianError(int rank, int size, double t)
      : DegeneracyError("singular constraint Jacobian at t=" + std::to_string(t), rank, size), t_(t) {}
  double time() const noexcept { return t_; }

 private:
  double t_;
};

class NumericFailure : public Error {
 public:
  explicit NumericFailure(const std::string& msg) : Error(ExitCode::numeric, msg) {}
};

class CheckFailed : public Error {
 public:
  explicit CheckFailed(const std::string& msg) : Error(ExitCode::check_failed, msg) {}
};

class ClosureError : public CheckFailed {
 public:
  ClosureError(int i, int j, double value)
      : CheckFailed("one-form not closed: d_" + std::to_string(j) + " g_" + std::to_string(i) + " - d_" +
                    std::to_string(i) + " g_" + std::to_string(j) + " = " + std::to_string(value)),
        i_(i), j_(j) {}
  int first() const noexcept { return i_; }
  int second() const noexcept { return j_; }

 private:
  int i_, j_;
};

}  // namespace hjm
