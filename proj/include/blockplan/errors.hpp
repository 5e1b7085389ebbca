#pragma once

#include <stdexcept>
#include <string>

namespace blockplan {

// Error taxonomy maps onto CLI exit codes: validation/input problems exit 1,
// internal failures (integration blow-up, logic errors) exit 2.
class Error : public std::runtime_error {
public:
    enum class Kind { validation, internal };

    Error(Kind kind, std::string message)
        : std::runtime_error(std::move(message)), kind_(kind) {}

    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

class ValidationError : public Error {
public:
    explicit ValidationError(std::string message)
        : Error(Kind::validation, std::move(message)) {}
};

class ParseError : public ValidationError {
public:
    explicit ParseError(std::string message) : ValidationError(std::move(message)) {}
};

class InfeasibleError : public ValidationError {
public:
    explicit InfeasibleError(std::string message) : ValidationError(std::move(message)) {}
};

class CapacityError : public ValidationError {
public:
    explicit CapacityError(std::string message) : ValidationError(std::move(message)) {}
};

class UnsupportedInputError : public ValidationError {
public:
    explicit UnsupportedInputError(std::string message) : ValidationError(std::move(message)) {}
};

class SingularFitError : public ValidationError {
public:
    explicit SingularFitError(std::string message) : ValidationError(std::move(message)) {}
};

class SimulationError : public Error {
public:
    SimulationError(std::string message, long step)
        : Error(Kind::internal, std::move(message)), step_(step) {}

    long step() const noexcept { return step_; }

private:
    long step_;
};

}  // namespace blockplan
