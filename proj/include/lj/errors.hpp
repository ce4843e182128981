#pragma once

#include <stdexcept>
#include <string>

namespace lj {

// Invalid argument outside an operation's stated domain.
class DomainError : public std::invalid_argument {
public:
    explicit DomainError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Two bodies closer than the collision cutoff (1e-12).
class SingularityError : public std::runtime_error {
public:
    explicit SingularityError(const std::string& msg) : std::runtime_error(msg) {}
};

// A required existence condition failed (e.g. negative squared angular speed).
class ExistenceError : public std::runtime_error {
public:
    ExistenceError(const std::string& msg, double offending_value)
        : std::runtime_error(msg), value(offending_value) {}
    double value;
};

// A threshold scan exhausted its search range.
class SearchError : public std::runtime_error {
public:
    explicit SearchError(const std::string& msg) : std::runtime_error(msg) {}
};

// An ODE integration failed (step underflow, energy drift, ...).
class IntegrationError : public std::runtime_error {
public:
    IntegrationError(const std::string& msg, double t_fail)
        : std::runtime_error(msg), time(t_fail) {}
    double time;
};

// Angular admissibility violated: squared angular rate went negative.
class AdmissibilityError : public std::runtime_error {
public:
    explicit AdmissibilityError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace lj
