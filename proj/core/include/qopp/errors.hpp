#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace qopp {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: inconsistent sizes, non-finite data, bad schema.
class InvalidProblem : public Error {
 public:
  explicit InvalidProblem(const std::string& what,
                          std::vector<std::string> diagnostics = {})
      : Error(what), diagnostics_(std::move(diagnostics)) {}

  const std::vector<std::string>& diagnostics() const { return diagnostics_; }

 private:
  std::vector<std::string> diagnostics_;
};

class DimensionMismatch : public InvalidProblem {
 public:
  using InvalidProblem::InvalidProblem;
};

class NonFiniteCoefficient : public InvalidProblem {
 public:
  using InvalidProblem::InvalidProblem;
};

class DegeneratePath : public InvalidProblem {
 public:
  using InvalidProblem::InvalidProblem;
};

class ParseError : public InvalidProblem {
 public:
  using InvalidProblem::InvalidProblem;
};

/// A sample admits no positive path velocity.
class EmptyVelocityInterval : public Error {
 public:
  EmptyVelocityInterval(std::size_t sample, const std::string& what)
      : Error(what), sample_(sample) {}
  std::size_t sample() const { return sample_; }

 private:
  std::size_t sample_;
};

/// No assignment satisfies the constraints. `step` is the earliest step at
/// which the feasible set became empty; `rows` names the offending rows of
/// that step (all rows if the conflict is joint).
class Infeasible : public Error {
 public:
  Infeasible(std::size_t step, std::vector<std::size_t> rows,
             const std::string& what)
      : Error(what), step_(step), rows_(std::move(rows)) {}
  std::size_t step() const { return step_; }
  const std::vector<std::size_t>& rows() const { return rows_; }

 private:
  std::size_t step_;
  std::vector<std::size_t> rows_;
};

class NonConvex : public Error {
 public:
  NonConvex(std::size_t step, const std::string& what)
      : Error(what), step_(step) {}
  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

class EmptyDomain : public Error {
 public:
  using Error::Error;
};

/// The objective decreases without bound over the feasible set.
class Unbounded : public Error {
 public:
  using Error::Error;
};

/// Both endpoints of an interval have zero velocity; its traversal time is
/// infinite.
class Untraversable : public Error {
 public:
  Untraversable(std::size_t interval, const std::string& what)
      : Error(what), interval_(interval) {}
  std::size_t interval() const { return interval_; }

 private:
  std::size_t interval_;
};

class RankDeficient : public Error {
 public:
  using Error::Error;
};

class UnsupportedDimension : public Error {
 public:
  using Error::Error;
};

class NotConverged : public Error {
 public:
  using Error::Error;
};

}  // namespace qopp
