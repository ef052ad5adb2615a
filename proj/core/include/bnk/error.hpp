#pragma once

#include <stdexcept>
#include <string>

namespace bnk {

// Caller broke a documented precondition (bad unit normal, negative density...).
class ContractViolation : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

// Argument outside the mathematical domain of a formula.
class DomainError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

// Configuration or input data rejected before any compute starts.
class ValidationError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// A numerical procedure could not produce a trustworthy result.
class NumericalFailure : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Time step halved to its limit without the fixed-point iteration converging.
class StepUnderflow : public NumericalFailure {
  public:
    using NumericalFailure::NumericalFailure;
};

class IoError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace bnk
