#pragma once

// Uniform-grid scalar fields on the flat torus and their Fourier companions.
//
// Conventions (fixed project-wide):
//   * Grids are the lattice (2*pi/n)*{0..n-1}^d with n a power of two for
//     d = 2; the 6D two-point grids allow small even n.
//   * Angular wave numbers k in Z^d; coefficients
//       fhat(k) = (2*pi)^{-d} \int f(x) e^{-i k.x} dx  =  DFT(f)(k) / n^d.
//   * Parseval: ||f||_{L2}^2 = (2*pi)^d sum_k |fhat(k)|^2.
//   * Real fields are stored as real-to-complex half spectra (last axis
//     holds k_last in [0, n/2]); Hermitian symmetry is implicit.
//   * Dealiasing keeps |k_i| <= (n-1)/3 so one quadratic product is exact.

#include <vector>

#include "mixlab/common.hpp"

namespace mixlab {

/// Signed wave number of index `idx` on an n-point axis.
inline int wavenumber(int idx, int n) { return idx <= n / 2 ? idx : idx - n; }

/// Largest retained |k| under the 2/3 rule (products of two such fields do
/// not alias back into the retained band).
inline int dealias_cutoff(int n) { return (n - 1) / 3; }

// ---------------------------------------------------------------------------
// 2D
// ---------------------------------------------------------------------------

struct Field2D {
    int n = 0;
    std::vector<double> v;  // row-major, v[i1*n + i2]

    Field2D() = default;
    explicit Field2D(int n_) : n(n_), v(static_cast<std::size_t>(n_) * n_, 0.0) {}

    double& at(int i1, int i2) { return v[static_cast<std::size_t>(i1) * n + i2]; }
    double at(int i1, int i2) const { return v[static_cast<std::size_t>(i1) * n + i2]; }
    std::size_t size() const { return v.size(); }
};

struct Spectrum2D {
    int n = 0;
    std::vector<complex> c;  // c[i1*(n/2+1) + j2], k2 = j2 in [0, n/2]

    Spectrum2D() = default;
    explicit Spectrum2D(int n_) : n(n_), c(static_cast<std::size_t>(n_) * (n_ / 2 + 1)) {}

    int nc() const { return n / 2 + 1; }
    complex& at(int i1, int j2) { return c[static_cast<std::size_t>(i1) * nc() + j2]; }
    complex at(int i1, int j2) const { return c[static_cast<std::size_t>(i1) * nc() + j2]; }
    /// Coefficient at signed wave numbers (k1, k2); k2 < 0 resolved by symmetry.
    complex coeff(int k1, int k2) const;
};

Spectrum2D forward(const Field2D& f);
Field2D inverse(const Spectrum2D& s);

Spectrum2D spectral_derivative(const Spectrum2D& s, int axis);
Spectrum2D laplacian(const Spectrum2D& s);
void project_mean_zero(Spectrum2D& s);
void project_mean_zero(Field2D& f);
void apply_dealias(Spectrum2D& s);

double grid_mean(const Field2D& f);
double l2_norm_grid(const Field2D& f);  // quadrature on the lattice
double l2_norm(const Spectrum2D& s);    // Parseval

/// Homogeneous Sobolev norm of order s (k = 0 excluded). For s < 0 the mean
/// must vanish to 1e-10 relative; throws NonZeroMean otherwise.
double sobolev_norm(const Spectrum2D& s, double order);
double sobolev_norm(const Field2D& f, double order);

struct NonZeroMean : MixlabError {
    using MixlabError::MixlabError;
};

/// Mean-zero unit-L2 random field with |k_i| <= kmax (white noise filtered
/// through a band mask; deterministic in seed).
Field2D random_bandlimited_2d(int n, int kmax, std::uint64_t seed);

// ---------------------------------------------------------------------------
// 6D (two-point fields on T^4 x T^2, axis order x1,x2,x3,x4,y1,y2)
// ---------------------------------------------------------------------------

struct Field6D {
    int n = 0;
    std::vector<double> v;  // row-major, last axis fastest

    Field6D() = default;
    explicit Field6D(int n_);
    std::size_t size() const { return v.size(); }
};

struct Spectrum6D {
    int n = 0;
    std::vector<complex> c;  // last axis halved to n/2+1

    Spectrum6D() = default;
    explicit Spectrum6D(int n_);
    int nc() const { return n / 2 + 1; }
};

Spectrum6D forward(const Field6D& f);
Field6D inverse(const Spectrum6D& s);

Spectrum6D spectral_derivative(const Spectrum6D& s, int axis);
/// inverse(d/dx_axis), in one transform.
Field6D derivative_field(const Spectrum6D& s, int axis);
/// inverse(d^2/(dx_a dx_b)), in one transform.
Field6D second_derivative_field(const Spectrum6D& s, int axis_a, int axis_b);
void apply_dealias(Spectrum6D& s);

double grid_mean(const Field6D& f);
double l2_norm_grid(const Field6D& f);
double l2_norm(const Spectrum6D& s);
/// sum over modes of m(k)*|fhat(k)|^2*(2pi)^6 for a per-axis quadratic
/// multiplier; used for gradient/Laplacian norms without inverse transforms.
double weighted_mode_sum(const Spectrum6D& s, const std::vector<int>& axes, int power);
/// multiplier (sum_{a in A} k_a^2) * (sum_{b in B} k_b^2); covers mixed
/// blocks like ||grad_x grad_y f||^2.
double weighted_mode_sum_prod(const Spectrum6D& s, const std::vector<int>& axes_a,
                              const std::vector<int>& axes_b);

Field6D random_bandlimited_6d(int n, int kmax, std::uint64_t seed);

/// Largest |n^d|-grid admissible for Field6D before the memory guard trips.
inline constexpr int max_grid_6d = 16;

}  // namespace mixlab
