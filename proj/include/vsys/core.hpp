// core.hpp — Parameter and state value types for the thermally driven V-system
//
// A symmetric three-level V-system (one ground state, two excited states split
// by delta) coupled to a thermal bath with occupation number nbar. Both excited
// states decay at rate gamma and are pumped at r = nbar*gamma; p is the
// alignment of the two transition dipoles. All types here are immutable values.

#pragma once

#include <cmath>
#include <string>

#include "vsys/errors.hpp"

namespace vsys {

struct VParams {
    double gamma{1.0};  // spontaneous decay rate (sets the unit of time)
    double delta{0.0};  // excited-state splitting, same units as gamma
    double p{0.0};      // transition dipole alignment, dimensionless in [0,1]
    double nbar{0.0};   // effective thermal photon occupation number

    double r() const { return nbar * gamma; }                 // pumping rate
    double x() const { return 1.0 / nbar; }                   // small parameter 1/nbar
    double delta_over_gamma() const { return delta / gamma; }
};

// Validates all parameter bounds; returns the params unchanged on success.
inline VParams validate(const VParams& params) {
    if (!(params.gamma > 0.0))
        throw DomainError("gamma must be > 0 (got " + std::to_string(params.gamma) + ")");
    if (!(params.delta >= 0.0))
        throw DomainError("delta must be >= 0 (got " + std::to_string(params.delta) + ")");
    if (!(params.p >= 0.0 && params.p <= 1.0))
        throw DomainError("p must lie in [0, 1] (got " + std::to_string(params.p) + ")");
    if (!(params.nbar >= 0.0))
        throw DomainError("nbar must be >= 0 (got " + std::to_string(params.nbar) + ")");
    return params;
}

// Reduced Liouville state of the symmetric V-system. By symmetry rho_bb equals
// rho_aa and the ground-state population is fixed by trace conservation.
struct StateVector {
    double rho_aa{0.0};
    double rho_ab_re{0.0};
    double rho_ab_im{0.0};

    double rho_bb() const { return rho_aa; }
    double rho_cc() const { return 1.0 - 2.0 * rho_aa; }
    double coherence_mag() const { return std::hypot(rho_ab_re, rho_ab_im); }

    // Positivity diagnostic. Non-secular evolution is not guaranteed completely
    // positive, so violations are reported, never rejected.
    bool physically_admissible(double tol = 1e-9) const {
        if (rho_aa < -tol || rho_aa > 0.5 + tol) return false;
        return rho_ab_re * rho_ab_re + rho_ab_im * rho_ab_im <= rho_aa * rho_aa + tol;
    }
};

enum class RegimeTag { Underdamped, Overdamped, Critical };

inline const char* to_string(RegimeTag tag) {
    switch (tag) {
        case RegimeTag::Underdamped: return "underdamped";
        case RegimeTag::Overdamped: return "overdamped";
        case RegimeTag::Critical: return "critical";
    }
    return "?";
}

struct Regime {
    RegimeTag tag{RegimeTag::Underdamped};
    double discriminant_value{0.0};  // signed D, same sign convention everywhere
};

} // namespace vsys
