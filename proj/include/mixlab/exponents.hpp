#pragma once

// The coefficient-exponent system behind the Lyapunov functional: nine
// nonnegative integers (x0..x3, y0..y2, z1, z2) subject to twenty linear
// inequalities (nine chain-ordering conditions and eleven coupling
// conditions, each of the form <positive head> - <others> >= 1). All checks
// run in exact integer arithmetic; the optimizer is an exact rational
// simplex followed by integer rounding and monotone repair.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace mixlab {

struct ExponentAssignment {
    long long x0 = 0, x1 = 0, x2 = 0, x3 = 0;
    long long y0 = 0, y1 = 0, y2 = 0;
    long long z1 = 0, z2 = 0;

    static ExponentAssignment paper() { return {256, 448, 488, 492, 384, 480, 493, 472, 491}; }
    std::array<long long, 9> as_array() const { return {x0, x1, x2, x3, y0, y1, y2, z1, z2}; }
    static ExponentAssignment from_array(const std::array<long long, 9>& a) {
        return {a[0], a[1], a[2], a[3], a[4], a[5], a[6], a[7], a[8]};
    }
    long long max_exponent() const;
    long long sum() const;
};

struct ExponentConstraint {
    std::string name;
    std::array<long long, 9> coeff;  // sum_i coeff[i] * v[i] >= 1
    bool chain = false;              // chain-ordering vs coupling condition
};

const std::vector<ExponentConstraint>& exponent_constraints();

struct ExponentCheck {
    bool pass = false;
    std::vector<std::string> violated;
    std::vector<std::string> tight;           // all constraints met with equality
    std::vector<std::string> tight_coupling;  // equalities among the coupling set
};

ExponentCheck check_exponent_system(const ExponentAssignment& a);

enum class ExponentObjective { max_exponent, sum };

struct MinimizeResult {
    ExponentAssignment assignment;
    long long objective = 0;
    bool verified = false;       // re-checked by check_exponent_system
    std::string lp_value;        // exact rational LP optimum, as a string
};

MinimizeResult minimize_exponents(ExponentObjective objective);

/// Component-wise least feasible point, computed by monotone propagation of
/// the lower bounds from zero. Every feasible assignment dominates it, so it
/// is simultaneously optimal for both objectives; used as an independent
/// oracle for the LP route.
ExponentAssignment propagate_least_feasible();

}  // namespace mixlab
