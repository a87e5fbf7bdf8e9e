#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace prunebound {

// Two families of failure. ValidationError covers bad inputs, malformed files
// and violated preconditions; NumericalError covers solvers that fail to
// converge and bounds whose feasibility conditions cannot be met. The CLI maps
// them to exit codes 1 and 2.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class FormatError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class TruncatedFileError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class LabelRangeError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class VersionError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class ChecksumError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

// Thrown when a per-layer budget cannot be met, e.g. eps*Gamma >= ||A||/L.
class InfeasibleError : public NumericalError {
public:
    InfeasibleError(const std::string& what, std::size_t layer)
        : NumericalError(what), layer_(layer) {}
    std::size_t layer() const { return layer_; }

private:
    std::size_t layer_;
};

class ConvergenceError : public NumericalError {
public:
    ConvergenceError(const std::string& what, double residual, std::size_t iterations)
        : NumericalError(what), residual_(residual), iterations_(iterations) {}
    double residual() const { return residual_; }
    std::size_t iterations() const { return iterations_; }

private:
    double residual_;
    std::size_t iterations_;
};

class DivergenceError : public NumericalError {
public:
    DivergenceError(const std::string& what, std::size_t epoch)
        : NumericalError(what), epoch_(epoch) {}
    std::size_t epoch() const { return epoch_; }

private:
    std::size_t epoch_;
};

}  // namespace prunebound
