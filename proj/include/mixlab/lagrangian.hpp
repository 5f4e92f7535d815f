#pragma once

// Lagrangian side of the passive scalar problem: Euler-Maruyama particles
// for dX = v(t, X) dt + sqrt(2 kappa) dB on T^2, Feynman-Kac evaluation of
// theta(t, x) = E[theta0(X_t^{-1}(x))] via backward characteristics, and
// Monte-Carlo correlations Cor(h, g; t) = |int g(x) E[h(X_t(x))] dx|.
//
// Particle noise is addressed by (seed, particle, step) with the particle
// stream id, independent of the shift-process stream, so the two Brownian
// motions are uncorrelated and ensembles are scheduling-independent.

#include <cstdint>
#include <functional>
#include <vector>

#include "mixlab/flow.hpp"
#include "mixlab/scalar_solver.hpp"

namespace mixlab {

struct ParticleEnsemble {
    std::vector<Vec2> positions;  // wrapped into [0, 2 pi)^2
    std::vector<Vec2> unwrapped;  // same trajectories without the torus wrap
    double kappa = 0.0;
    std::uint64_t seed = 0;
    double time = 0.0;
    std::uint64_t step_index = 0;  // noise counter base, advances with time
};

/// M x M lattice cloud covering the torus uniformly.
ParticleEnsemble make_lattice_ensemble(int m, double kappa, std::uint64_t seed);

/// Forward Euler-Maruyama from ensemble.time to t_final in steps of dt.
void advance(ParticleEnsemble& ensemble, const FlowSpec& flow, double dt, double t_final);

struct FeynmanKacEstimate {
    std::vector<double> values;
    std::vector<double> stderrs;
};

/// theta(t, x_i) estimated by M backward characteristics per point:
/// integrate dX = -v(t - s, X) ds + sqrt(2 kappa) dB from x_i and average
/// theta0 over the endpoints. kappa = 0 admits only M = 1 (no dispersion).
FeynmanKacEstimate feynman_kac_estimate(const InitialData& theta0,
                                        const std::vector<Vec2>& eval_points,
                                        const FlowSpec& flow, double kappa, double t, int particles,
                                        double dt, std::uint64_t seed);

using ScalarFn = std::function<double(Vec2)>;

struct CorrelationOptions {
    int quad_n = 64;       // quadrature nodes per dimension
    int mc_samples = 1;    // kappa-noise samples per node (1 suffices at kappa = 0)
    double dt = 1e-3;
    std::uint64_t seed = 0;
};

/// |int g(x) E_kappa h(X_t(x)) dx| by forward particles from the quadrature
/// lattice. h and g must be mean-zero on the lattice (1e-8 tolerance).
double correlation(const ScalarFn& h, const ScalarFn& g, const FlowSpec& flow, double t,
                   double kappa, const CorrelationOptions& opt);

/// Cor at every integer time 0..n_max from a single particle sweep.
std::vector<double> correlation_series(const ScalarFn& h, const ScalarFn& g, const FlowSpec& flow,
                                       int n_max, double kappa, const CorrelationOptions& opt);

}  // namespace mixlab
