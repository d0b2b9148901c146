#pragma once

#include <stdexcept>
#include <string>

namespace softguess {

// Base class for everything thrown by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Domain / validation failures (bad inputs, parameters out of range).
class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error(what) {}
};

// Resource-budget failures (inputs too large for exact computation).
class BudgetError : public Error {
public:
    explicit BudgetError(const std::string& what) : Error(what) {}
};

class EmptyInput : public DomainError {
public:
    EmptyInput() : DomainError("pmf input is empty") {}
};

class NotNormalized : public DomainError {
public:
    explicit NotNormalized(double sum)
        : DomainError("pmf does not sum to 1 (sum = " + std::to_string(sum) + ")"),
          sum(sum) {}
    double sum;
};

class BadParameter : public DomainError {
public:
    explicit BadParameter(const std::string& what) : DomainError(what) {}
};

class NegativeDistortion : public DomainError {
public:
    explicit NegativeDistortion(double d)
        : DomainError("distortion level must be >= 0 (got " + std::to_string(d) + ")") {}
};

class OutOfDomain : public DomainError {
public:
    explicit OutOfDomain(const std::string& what) : DomainError(what) {}
};

class DistortionAboveEntropy : public DomainError {
public:
    DistortionAboveEntropy(double d, double h)
        : DomainError("distortion " + std::to_string(d) +
                      " must be below the source entropy " + std::to_string(h)) {}
};

class TooLarge : public BudgetError {
public:
    explicit TooLarge(const std::string& what) : BudgetError(what) {}
};

class TooLargeForOracle : public BudgetError {
public:
    explicit TooLargeForOracle(std::size_t size, std::size_t limit)
        : BudgetError("brute-force oracle supports at most " + std::to_string(limit) +
                      " atoms (got " + std::to_string(size) + ")") {}
};

// The allocation solver stalled above its duality/oracle gap target.
class OptimizerNotConverged : public Error {
public:
    OptimizerNotConverged(double gap, double tol)
        : Error("allocation solver did not converge: residual improvement " +
                std::to_string(gap) + " exceeds tolerance " + std::to_string(tol)),
          gap(gap), tol(tol) {}
    double gap;
    double tol;
};

class SandwichViolation : public Error {
public:
    explicit SandwichViolation(const std::string& what) : Error(what) {}
};

} // namespace softguess
