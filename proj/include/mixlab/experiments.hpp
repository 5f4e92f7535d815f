#pragma once

// Rate fitting and the ensemble experiments: exponential mixing in the
// H^-1 mix-norm (kappa = 0 and kappa > 0), the steady-flow control, the
// enhanced-dissipation sweep with its mu(kappa) log(1/kappa) diagnostic,
// correlation decay, and the forced Batchelor-spectrum run.
//
// Realizations use split seeds and run in parallel; results are aggregated
// in realization order, so ensembles are scheduling-independent.

#include <cstdint>
#include <string>
#include <vector>

#include "mixlab/lagrangian.hpp"
#include "mixlab/scalar_solver.hpp"

namespace mixlab {

struct DecayFit {
    double rate = 0.0;       // decay rate per unit time (positive = decaying)
    double intercept = 0.0;  // fitted log-value at t = 0
    double t0 = 0.0;
    double t1 = 0.0;
    double r_squared = 0.0;  // computed on log values
    bool degenerate = false;  // constant series: reported as a 0-slope fit
    bool truncated = false;   // window cut at the first nonpositive value
    std::string series_id;
};

/// Ordinary least squares of log(value) against t on [t0, t1]. Negative t0
/// selects the default window (drop the initial 20% of the horizon).
DecayFit fit_decay(const std::vector<double>& times, const std::vector<double>& values,
                   double t0 = -1.0, double t1 = -1.0, std::string series_id = {});

// ---------------------------------------------------------------------------
// Mixing
// ---------------------------------------------------------------------------

struct MixingOptions {
    int n = 256;
    double dt = 1e-3;
    double t_final = 30.0;
    double nu = 4.0;
    double kappa = 0.0;
    int realizations = 8;
    std::uint64_t seed = 1;
    int record_every = 100;
    double fit_t0 = -1.0;  // default window if negative
    double fit_t1 = -1.0;
    int threads = 2;
    FlowKind flow = FlowKind::random_cellular;
    InitialData theta0 = InitialData::sine();
};

struct MixingResult {
    std::vector<NormSeries> series;
    std::vector<DecayFit> fits;      // H^-1 per realization
    DecayFit averaged_fit;           // fit of the realization-averaged H^-1
    std::vector<double> avg_times;
    std::vector<double> avg_h_minus1;
    double rate_mean = 0.0;
    double rate_min = 0.0;
    double rate_max = 0.0;
    double rate_stddev = 0.0;
};

MixingResult mixing_experiment(const MixingOptions& opt);

// ---------------------------------------------------------------------------
// Enhanced dissipation
// ---------------------------------------------------------------------------

struct SweepOptions {
    std::vector<double> kappas;  // strictly decreasing, in (0, 1)
    double nu = 4.0;
    int realizations = 4;
    int n = 256;
    double dt = 1e-3;
    std::uint64_t seed = 1;
    int record_every = 100;
    int threads = 2;
    /// Mixing rate used to size the pre-uniform window
    /// [0, 0.8 log(1/kappa)/lambda]; estimated from a kappa = 0 run when <= 0.
    double lambda_hat = 0.0;
    FlowKind flow = FlowKind::random_cellular;
    InitialData theta0 = InitialData::sine();
};

struct KappaPoint {
    double kappa = 0.0;
    double mu_hat = 0.0;       // L2 rate on the pre-uniform window, averaged
    double mu_log = 0.0;       // mu_hat * log(1/kappa)
    double late_rate = 0.0;    // L2 rate on the uniform window
    double mu_stddev = 0.0;
    std::vector<DecayFit> fits;
};

struct SweepResult {
    std::vector<KappaPoint> points;
    double lambda_hat = 0.0;
};

SweepResult dissipation_sweep(const SweepOptions& opt);

// ---------------------------------------------------------------------------
// Correlation decay
// ---------------------------------------------------------------------------

struct CorrelationDecayOptions {
    double nu = 4.0;
    double kappa = 0.0;
    int n_max = 20;
    int realizations = 4;
    std::uint64_t seed = 1;
    double shift_dt = 1e-3;
    CorrelationOptions corr;
    int threads = 2;
};

struct CorrelationDecayResult {
    std::vector<std::vector<double>> series;  // per realization, Cor at n = 0..n_max
    std::vector<DecayFit> fits;               // per-realization gamma
    double gamma_mean = 0.0;
    std::vector<double> exceedance_by_n;      // fraction with Cor > exp(-gamma n / 2)
    double exceedance_fraction = 0.0;         // over all (n, realization) pairs
};

CorrelationDecayResult correlation_decay_experiment(const ScalarFn& h, const ScalarFn& g,
                                                    const CorrelationDecayOptions& opt);

// ---------------------------------------------------------------------------
// Batchelor spectrum (forced run)
// ---------------------------------------------------------------------------

struct BatchelorOptions {
    int n = 256;
    double kappa = 1e-4;
    double dt = 1e-3;
    double t_final = 20.0;
    double nu = 4.0;
    int force_kmin = 1;
    int force_kmax = 2;
    double amplitude = 1.0;
    std::uint64_t seed = 1;
    int annulus_width = 1;
    double average_after = 0.5;  // start of the time average, as a fraction
    int r_max = 0;               // default: dealias cutoff
    FlowKind flow = FlowKind::random_cellular;
};

struct BatchelorResult {
    std::vector<double> r;
    std::vector<double> energy;  // time-averaged annulus sums
    double loglog_slope = 0.0;   // fitted in the advective subrange
};

BatchelorResult batchelor_spectrum(const BatchelorOptions& opt);

}  // namespace mixlab
