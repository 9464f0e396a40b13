#pragma once

#include <stdexcept>
#include <string>

namespace sepmp {

// Configuration / validation failures. CLI maps these to exit code 1.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Simulation blow-ups (NaN/inf state, positivity loss). CLI exit code 3.
class SimulationError : public std::runtime_error {
public:
    explicit SimulationError(const std::string& msg) : std::runtime_error(msg) {}
};

class NonFiniteState : public SimulationError {
public:
    explicit NonFiniteState(const std::string& msg) : SimulationError(msg) {}
};

class PositivityViolation : public SimulationError {
public:
    explicit PositivityViolation(const std::string& msg) : SimulationError(msg) {}
};

// Operation used in a mark-measurability mode it does not support.
class ModeError : public std::runtime_error {
public:
    explicit ModeError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace sepmp
