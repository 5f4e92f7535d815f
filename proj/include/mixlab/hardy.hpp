#pragma once

// Hardy-Poincare constants.
//
// 1D: the best constant C in  int (H - mean H)^2 <= C int sin^2(x) (H')^2
// over pi-periodic H, and the plain Poincare constant on 2pi-periodic
// functions. Both come from generalized eigenproblems (mass against
// weighted stiffness) on the mean-zero subspace. The stiffness is assembled
// in the Fourier basis with exact quadrature of the sin^2 weight; a
// collocation stiffness would be singular (a discrete jump mode hides its
// derivative at the single weight zero), which the exact assembly avoids.
//
// 2D: the weight from the third-commutator analysis,
//   w^2(u) = cos^2(u1) cos^2(2 u2) + (1/4) sin^2(u1) sin^2(2 u2),
// degenerates linearly at finitely many points; the inequality
//   int g^2 <= C (int w^2 g^2 + int |grad g|^2)
// is probed empirically over random band-limited g.

#include <cstdint>

namespace mixlab {

struct Hardy1DResult {
    double weighted_constant = 0.0;    // best C for the sin^2-weighted bound
    double unweighted_constant = 0.0;  // plain Poincare constant (expected 1)
    int n = 0;                         // grid resolution (modes <= n/2 - 1)
    bool singular = false;             // eigensolve fell below tolerance
};

Hardy1DResult hardy_poincare_1d(int n);

struct Hardy2DResult {
    double min_ratio = 0.0;          // min over samples of (int w^2 g^2 + int|grad g|^2)/int g^2
    double const_field_ratio = 0.0;  // the g = const value, mean of w^2 (= 5/16)
    int n = 0;
    int samples = 0;
};

Hardy2DResult hardy_poincare_2d(int n, int samples, std::uint64_t seed);

/// The 2D weight squared, w^2(u1, u2).
double hardy_weight_sq(double u1, double u2);

}  // namespace mixlab
