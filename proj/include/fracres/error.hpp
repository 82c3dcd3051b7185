#pragma once

#include <stdexcept>
#include <string>

namespace fracres {

/// Invalid input: a parameter or configuration value outside its contract.
class ConfigError : public std::invalid_argument {
public:
    ConfigError(std::string field, const std::string& what)
        : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Raised when the integrator cannot advance (step underflow) or when the
/// state leaves the physical manifold by more than the hard tolerance.
class IntegrationFailure : public std::runtime_error {
public:
    IntegrationFailure(double t, const std::string& what)
        : std::runtime_error(what + " at t=" + std::to_string(t)), t_(t) {}

    double time() const noexcept { return t_; }

private:
    double t_;
};

}  // namespace fracres
