#pragma once

#include <stdexcept>
#include <string>

namespace slung {

// Bad argument to an algebra or model routine (non-unit quaternion, bad params).
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Rotation at (or numerically near) pi where the log map has no unique axis.
class SingularRotation : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Controller asked to produce a direction from a near-zero vector.
class DegenerateCommand : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Taut-cable state drifted off the unit sphere.
class ConstraintViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Wrong payload for the requested regime.
class InvalidState : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// Thrown by the simulation loop; carries the time at which the step failed.
class SimulationError : public std::runtime_error {
public:
    SimulationError(double t, const std::string& what)
        : std::runtime_error("t=" + std::to_string(t) + ": " + what), time_(t) {}
    double time() const noexcept { return time_; }

private:
    double time_;
};

} // namespace slung
