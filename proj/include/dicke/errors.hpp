#pragma once

#include <stdexcept>
#include <string>

namespace dicke {

// Adaptive integration failed (step-size underflow or step cap exceeded).
class IntegrationError : public std::runtime_error {
public:
    IntegrationError(const std::string& what, double tau)
        : std::runtime_error(what), tau_(tau) {}
    double tau() const noexcept { return tau_; }

private:
    double tau_;
};

// Series exponentiation did not converge within the term cap.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, int cap)
        : std::runtime_error(what), cap_(cap) {}
    int term_cap() const noexcept { return cap_; }

private:
    int cap_;
};

// Dense-matrix evolution requested beyond the configured ensemble cap.
class CapacityError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// eta_plus == eta_minus: the modulation function has no zeros, so no
// critical atom number exists.
class NoSuppressionError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A probe frequency fell inside the guard band of an intermediate-level pole.
class ResonanceError : public std::runtime_error {
public:
    ResonanceError(const std::string& what, int level)
        : std::runtime_error(what), level_(level) {}
    int level() const noexcept { return level_; }

private:
    int level_;
};

// The effective dipole moment vanished while a Stark parameter was requested.
class DegenerateCouplingError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace dicke
