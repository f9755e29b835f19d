#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace irsnoma {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid scenario configuration or malformed configuration file.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Ill-formed optimization model (dimension mismatch, dangling variable, non-convex term).
class ModelingError : public Error {
 public:
  using Error::Error;
};

/// A convex subproblem did not terminate with an optimal certificate.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, int iteration = -1)
      : Error(what), iteration_(iteration) {}
  /// Outer-loop iteration at which the failure happened, or -1.
  int iteration() const { return iteration_; }

 private:
  int iteration_;
};

/// Optimality certificate failed independent recomputation.
class CertificationError : public Error {
 public:
  CertificationError(const std::string& what, std::string constraint)
      : Error(what), constraint_(std::move(constraint)) {}
  const std::string& constraint() const { return constraint_; }

 private:
  std::string constraint_;
};

/// The feasible-initial-point search hit its iteration cap.
class InitializationError : public Error {
 public:
  InitializationError(const std::string& what, std::vector<double> q_history = {})
      : Error(what), q_history_(std::move(q_history)) {}
  const std::vector<double>& q_history() const { return q_history_; }

 private:
  std::vector<double> q_history_;
};

/// Gaussian randomization produced no feasible candidate.
class RandomizationError : public Error {
 public:
  using Error::Error;
};

/// No candidate examined by a search algorithm met the QoS targets.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

}  // namespace irsnoma
