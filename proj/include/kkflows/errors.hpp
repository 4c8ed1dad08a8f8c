// Exception types shared by all modules.

#ifndef KKFLOWS_ERRORS_HPP
#define KKFLOWS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace kkflows {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the domain where a quantity is defined.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Malformed input such as unparsable JSON or inconsistent grids.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// A differential polynomial outside the subspace required by an operator.
class NotInP : public Error {
 public:
  using Error::Error;
};

class BranchCutError : public DomainError {
 public:
  using DomainError::DomainError;
};

class PoleOnPath : public DomainError {
 public:
  using DomainError::DomainError;
};

class InflectionPoint : public DomainError {
 public:
  explicit InflectionPoint(double t)
      : DomainError("inflection point at t = " + std::to_string(t)), t_(t) {}
  double where() const { return t_; }

 private:
  double t_;
};

class SextaticPoint : public DomainError {
 public:
  explicit SextaticPoint(double t)
      : DomainError("sextatic point at t = " + std::to_string(t)), t_(t) {}
  double where() const { return t_; }

 private:
  double t_;
};

class DegenerateFrame : public DomainError {
 public:
  using DomainError::DomainError;
};

class RepeatedEigenvalue : public DomainError {
 public:
  using DomainError::DomainError;
};

class NonRealFrame : public Error {
 public:
  using Error::Error;
};

class SingularS : public DomainError {
 public:
  using DomainError::DomainError;
};

class NotCongruence : public Error {
 public:
  using Error::Error;
};

class StepFailure : public Error {
 public:
  using Error::Error;
};

class OutOfDomain : public DomainError {
 public:
  using DomainError::DomainError;
};

class NearPole : public DomainError {
 public:
  using DomainError::DomainError;
};

class DegenerateInvariants : public DomainError {
 public:
  using DomainError::DomainError;
};

class MissingJetOrder : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

class BlowUp : public Error {
 public:
  explicit BlowUp(double t) : Error("solution blew up at t = " + std::to_string(t)), t_(t) {}
  double where() const { return t_; }

 private:
  double t_;
};

class ResolutionLoss : public Error {
 public:
  ResolutionLoss(double t, double tail)
      : Error("spectral tail " + std::to_string(tail) + " exceeded threshold at t = " + std::to_string(t)),
        t_(t) {}
  double where() const { return t_; }

 private:
  double t_;
};

}  // namespace kkflows

#endif  // KKFLOWS_ERRORS_HPP
