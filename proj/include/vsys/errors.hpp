// errors.hpp — Exception types shared across the library

#pragma once

#include <stdexcept>
#include <string>

namespace vsys {

// A physical parameter violates its admissible range. what() names the bound.
class DomainError : public std::invalid_argument {
public:
    explicit DomainError(const std::string& msg) : std::invalid_argument(msg) {}
};

// The coefficient matrix is (numerically) singular, e.g. gamma = 0 or p = 1 with delta = 0.
class SingularGenerator : public std::runtime_error {
public:
    explicit SingularGenerator(const std::string& msg) : std::runtime_error(msg) {}
};

// The adaptive stepper could not make progress; carries the time reached.
class StepFailure : public std::runtime_error {
public:
    StepFailure(const std::string& msg, double t) : std::runtime_error(msg), time_reached(t) {}
    double time_reached;
};

// Parameters fall outside the strong-pumping expansion window.
class OutsideValidity : public std::runtime_error {
public:
    explicit OutsideValidity(const std::string& msg) : std::runtime_error(msg) {}
};

// An operation that assumes the overdamped regime was called elsewhere.
class WrongRegime : public std::runtime_error {
public:
    explicit WrongRegime(const std::string& msg) : std::runtime_error(msg) {}
};

// A closed-form branch was requested on the wrong side of the critical alignment.
class WrongBranch : public std::runtime_error {
public:
    explicit WrongBranch(const std::string& msg) : std::runtime_error(msg) {}
};

// The small-splitting forms were requested with delta/gamma beyond their cutoff.
class SplittingTooLarge : public std::runtime_error {
public:
    explicit SplittingTooLarge(const std::string& msg) : std::runtime_error(msg) {}
};

// No sign change of the discriminant inside the search bracket.
class NoRoot : public std::runtime_error {
public:
    explicit NoRoot(const std::string& msg) : std::runtime_error(msg) {}
};

// |z20| and |z22 x^2| never cross in the scanned alignment range.
class NoCrossing : public std::runtime_error {
public:
    explicit NoCrossing(const std::string& msg) : std::runtime_error(msg) {}
};

// The closed-form eigenvector denominator vanished (near-defective matrix).
class DegenerateEigenvector : public std::runtime_error {
public:
    explicit DegenerateEigenvector(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace vsys
