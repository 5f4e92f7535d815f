#include "mixlab/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "mixlab/rng.hpp"

namespace mixlab {

DecayFit fit_decay(const std::vector<double>& times, const std::vector<double>& values,
                   double t0, double t1, std::string series_id) {
    if (times.size() != values.size() || times.size() < 2) {
        throw MixlabError("fit_decay needs matching series with >= 2 points");
    }
    DecayFit fit;
    fit.series_id = std::move(series_id);
    const double tmin = times.front();
    const double tmax = times.back();
    fit.t0 = t0 < 0.0 ? tmin + 0.2 * (tmax - tmin) : t0;
    fit.t1 = t1 < 0.0 ? tmax : t1;

    std::vector<double> ts, ls;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < fit.t0 - 1e-12 || times[i] > fit.t1 + 1e-12) continue;
        if (values[i] <= 0.0) {
            fit.truncated = true;  // norm hit the floating-point floor
            break;
        }
        ts.push_back(times[i]);
        ls.push_back(std::log(values[i]));
    }
    if (ts.size() < 2) throw MixlabError("fit_decay window has fewer than 2 usable points");

    const double m = static_cast<double>(ts.size());
    double st = 0, sl = 0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        st += ts[i];
        sl += ls[i];
    }
    const double tbar = st / m, lbar = sl / m;
    double stt = 0, stl = 0, sll = 0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const double dt = ts[i] - tbar;
        const double dl = ls[i] - lbar;
        stt += dt * dt;
        stl += dt * dl;
        sll += dl * dl;
    }
    if (sll < 1e-20) {
        fit.degenerate = true;  // constant series; R^2 undefined
        fit.rate = 0.0;
        fit.intercept = lbar;
        fit.r_squared = 0.0;
        return fit;
    }
    const double slope = stl / stt;
    fit.rate = -slope;
    fit.intercept = lbar - slope * tbar;
    double ssres = 0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const double pred = fit.intercept + slope * ts[i];
        ssres += (ls[i] - pred) * (ls[i] - pred);
    }
    fit.r_squared = 1.0 - ssres / sll;
    return fit;
}

// ---------------------------------------------------------------------------
// Mixing
// ---------------------------------------------------------------------------

namespace {

template <typename Fn>
void parallel_realizations(int count, int threads, Fn&& body) {
    std::atomic<int> next{0};
    auto worker = [&]() {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= count) return;
            body(i);
        }
    };
    const int nw = std::max(1, std::min(threads, count));
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(nw));
    for (int w = 0; w < nw; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
}

SimulationConfig make_config(int n, double kappa, double dt, double t_final, FlowKind flow,
                             double nu, const InitialData& theta0, int record_every,
                             std::uint64_t seed, std::uint64_t realization) {
    SimulationConfig cfg;
    cfg.n = n;
    cfg.kappa = kappa;
    cfg.dt = dt;
    cfg.t_final = t_final;
    cfg.record_every = record_every;
    cfg.theta0 = theta0;
    cfg.realization = realization;
    cfg.flow.kind = flow;
    if (flow == FlowKind::random_cellular) {
        cfg.flow.shift = std::make_shared<ShiftPath>(
            sample_shift_path(nu, dt, t_final, split_seed(seed, realization)));
    }
    return cfg;
}

}  // namespace

MixingResult mixing_experiment(const MixingOptions& opt) {
    if (opt.realizations < 1) throw MixlabError("mixing_experiment needs realizations >= 1");
    MixingResult out;
    out.series.resize(static_cast<std::size_t>(opt.realizations));
    parallel_realizations(opt.realizations, opt.threads, [&](int r) {
        const SimulationConfig cfg =
            make_config(opt.n, opt.kappa, opt.dt, opt.t_final, opt.flow, opt.nu, opt.theta0,
                        opt.record_every, opt.seed, static_cast<std::uint64_t>(r));
        out.series[static_cast<std::size_t>(r)] = solve(cfg);
    });
    if (out.series[0].times.size() < 2) throw MixlabError("fewer than 2 recorded times");

    for (int r = 0; r < opt.realizations; ++r) {
        out.fits.push_back(fit_decay(out.series[r].times, out.series[r].h_minus1, opt.fit_t0,
                                     opt.fit_t1, "realization " + std::to_string(r)));
    }
    out.avg_times = out.series[0].times;
    out.avg_h_minus1.assign(out.avg_times.size(), 0.0);
    for (const auto& s : out.series) {
        for (std::size_t i = 0; i < s.h_minus1.size(); ++i) {
            out.avg_h_minus1[i] += s.h_minus1[i] / opt.realizations;
        }
    }
    out.averaged_fit = fit_decay(out.avg_times, out.avg_h_minus1, opt.fit_t0, opt.fit_t1,
                                 "ensemble average");

    out.rate_min = out.rate_max = out.fits[0].rate;
    double sum = 0.0, sumsq = 0.0;
    for (const auto& f : out.fits) {
        sum += f.rate;
        sumsq += f.rate * f.rate;
        out.rate_min = std::min(out.rate_min, f.rate);
        out.rate_max = std::max(out.rate_max, f.rate);
    }
    out.rate_mean = sum / opt.realizations;
    out.rate_stddev =
        std::sqrt(std::max(0.0, sumsq / opt.realizations - out.rate_mean * out.rate_mean));
    return out;
}

// ---------------------------------------------------------------------------
// Enhanced dissipation
// ---------------------------------------------------------------------------

SweepResult dissipation_sweep(const SweepOptions& opt) {
    for (double k : opt.kappas) {
        if (k <= 0.0 || k >= 1.0) throw MixlabError("sweep kappas must lie in (0, 1)");
    }
    SweepResult out;
    out.lambda_hat = opt.lambda_hat;
    if (out.lambda_hat <= 0.0) {
        MixingOptions mo;
        mo.n = opt.n;
        mo.dt = opt.dt;
        mo.t_final = 20.0;
        mo.nu = opt.nu;
        mo.kappa = 0.0;
        mo.realizations = 2;
        mo.seed = split_seed(opt.seed, 0x717);
        mo.record_every = opt.record_every;
        mo.threads = opt.threads;
        mo.flow = opt.flow;
        mo.theta0 = opt.theta0;
        out.lambda_hat = mixing_experiment(mo).averaged_fit.rate;
    }
    if (out.lambda_hat <= 0.0) throw MixlabError("could not estimate a positive mixing rate");

    for (std::size_t ki = 0; ki < opt.kappas.size(); ++ki) {
        const double kappa = opt.kappas[ki];
        KappaPoint pt;
        pt.kappa = kappa;
        const double logk = std::log(1.0 / kappa);
        const double t_mu = 0.8 * logk / out.lambda_hat;
        const double t_total = t_mu + std::max(10.0, 0.5 * t_mu);

        std::vector<NormSeries> series(static_cast<std::size_t>(opt.realizations));
        parallel_realizations(opt.realizations, opt.threads, [&](int r) {
            const SimulationConfig cfg = make_config(
                opt.n, kappa, opt.dt, t_total, opt.flow, opt.nu, opt.theta0, opt.record_every,
                split_seed(opt.seed, 1000 + ki), static_cast<std::uint64_t>(r));
            series[static_cast<std::size_t>(r)] = solve(cfg);
        });

        double mu_sum = 0.0, mu_sq = 0.0, late_sum = 0.0;
        for (int r = 0; r < opt.realizations; ++r) {
            DecayFit f = fit_decay(series[r].times, series[r].l2, 0.0, t_mu,
                                   "mu kappa=" + std::to_string(kappa));
            pt.fits.push_back(f);
            mu_sum += f.rate;
            mu_sq += f.rate * f.rate;
            late_sum += fit_decay(series[r].times, series[r].l2, t_mu, t_total).rate;
        }
        pt.mu_hat = mu_sum / opt.realizations;
        pt.mu_stddev =
            std::sqrt(std::max(0.0, mu_sq / opt.realizations - pt.mu_hat * pt.mu_hat));
        pt.mu_log = pt.mu_hat * logk;
        pt.late_rate = late_sum / opt.realizations;
        out.points.push_back(std::move(pt));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Correlation decay
// ---------------------------------------------------------------------------

CorrelationDecayResult correlation_decay_experiment(const ScalarFn& h, const ScalarFn& g,
                                                    const CorrelationDecayOptions& opt) {
    CorrelationDecayResult out;
    out.series.resize(static_cast<std::size_t>(opt.realizations));
    parallel_realizations(opt.realizations, opt.threads, [&](int r) {
        const std::uint64_t seed_r = split_seed(opt.seed, static_cast<std::uint64_t>(r));
        FlowSpec flow;
        flow.kind = FlowKind::random_cellular;
        flow.shift = std::make_shared<ShiftPath>(sample_shift_path(
            opt.nu, opt.shift_dt, static_cast<double>(opt.n_max), seed_r));
        CorrelationOptions co = opt.corr;
        co.seed = seed_r;
        out.series[static_cast<std::size_t>(r)] =
            correlation_series(h, g, flow, opt.n_max, opt.kappa, co);
    });

    std::vector<double> ns(static_cast<std::size_t>(opt.n_max) + 1);
    for (int i = 0; i <= opt.n_max; ++i) ns[static_cast<std::size_t>(i)] = i;
    double gsum = 0.0;
    for (int r = 0; r < opt.realizations; ++r) {
        DecayFit f = fit_decay(ns, out.series[static_cast<std::size_t>(r)], 1.0,
                               static_cast<double>(opt.n_max),
                               "correlation realization " + std::to_string(r));
        gsum += f.rate;
        out.fits.push_back(std::move(f));
    }
    out.gamma_mean = gsum / opt.realizations;

    out.exceedance_by_n.assign(static_cast<std::size_t>(opt.n_max) + 1, 0.0);
    int exceed = 0, total = 0;
    for (int n = 1; n <= opt.n_max; ++n) {
        int count = 0;
        for (int r = 0; r < opt.realizations; ++r) {
            if (out.series[static_cast<std::size_t>(r)][static_cast<std::size_t>(n)] >
                std::exp(-0.5 * out.gamma_mean * n)) {
                ++count;
            }
        }
        out.exceedance_by_n[static_cast<std::size_t>(n)] =
            static_cast<double>(count) / opt.realizations;
        exceed += count;
        total += opt.realizations;
    }
    out.exceedance_fraction = total > 0 ? static_cast<double>(exceed) / total : 0.0;
    return out;
}

// ---------------------------------------------------------------------------
// Batchelor spectrum
// ---------------------------------------------------------------------------

BatchelorResult batchelor_spectrum(const BatchelorOptions& opt) {
    if (opt.kappa <= 0.0) throw MixlabError("batchelor run needs kappa > 0");
    FlowSpec flow;
    flow.kind = opt.flow;
    if (opt.flow == FlowKind::random_cellular) {
        flow.shift = std::make_shared<ShiftPath>(
            sample_shift_path(opt.nu, opt.dt, opt.t_final, split_seed(opt.seed, 1)));
    }
    ScalarSolver solver(opt.n, opt.kappa, flow);
    solver.set_state(Field2D(opt.n));  // start from rest, forcing injects energy

    const GaussianStream noise(split_seed(opt.seed, 2), rng_stream::forcing);
    const int r_max = opt.r_max > 0 ? opt.r_max : dealias_cutoff(opt.n);
    std::vector<CompensatedSum> acc(static_cast<std::size_t>(r_max) + 1);
    std::size_t averaged = 0;

    const auto steps = static_cast<std::size_t>(std::llround(opt.t_final / opt.dt));
    const auto start_avg = static_cast<std::size_t>(opt.average_after * steps);
    const double amp = opt.amplitude * std::sqrt(opt.dt);
    Field2D white(opt.n);

    for (std::size_t m = 0; m < steps; ++m) {
        solver.step(static_cast<double>(m) * opt.dt, opt.dt);
        // white-in-time band-limited forcing, applied post-step
        for (std::size_t i = 0; i < white.size(); ++i) {
            white.v[i] = noise.pair((m << 32) | (i & 0xFFFFFFFFull))[0];
        }
        Spectrum2D ws = forward(white);
        const int n = opt.n;
        for (int i1 = 0; i1 < n; ++i1) {
            const int k1 = wavenumber(i1, n);
            for (int j2 = 0; j2 < ws.nc(); ++j2) {
                const double kk = std::sqrt(static_cast<double>(k1) * k1 +
                                            static_cast<double>(j2) * j2);
                if (kk < opt.force_kmin - 0.5 || kk > opt.force_kmax + 0.5) {
                    ws.at(i1, j2) = complex(0.0);
                }
            }
        }
        Spectrum2D state = solver.state();
        for (std::size_t i = 0; i < state.c.size(); ++i) state.c[i] += amp * ws.c[i];
        solver.set_state(std::move(state));

        if (m >= start_avg && m % 50 == 0) {
            const Spectrum2D& s = solver.state();
            for (int i1 = 0; i1 < opt.n; ++i1) {
                const int k1 = wavenumber(i1, opt.n);
                for (int j2 = 0; j2 < s.nc(); ++j2) {
                    const double w = (j2 == 0 || j2 == opt.n / 2) ? 1.0 : 2.0;
                    const double kk = std::sqrt(static_cast<double>(k1) * k1 +
                                                static_cast<double>(j2) * j2);
                    const int bin = static_cast<int>(std::floor(kk / opt.annulus_width));
                    const int r = bin * opt.annulus_width;
                    if (r >= 1 && r <= r_max) {
                        acc[static_cast<std::size_t>(r)].add(w * std::norm(s.at(i1, j2)));
                    }
                }
            }
            ++averaged;
        }
    }

    BatchelorResult out;
    for (int r = 1; r <= r_max; r += opt.annulus_width) {
        const double e = acc[static_cast<std::size_t>(r)].value() / std::max<std::size_t>(1, averaged);
        if (e > 0.0) {
            out.r.push_back(r);
            out.energy.push_back(e);
        }
    }
    // slope over the advective subrange, clear of forcing and of the cutoff
    std::vector<double> lr, le;
    const double r_hi = std::min(static_cast<double>(r_max) / 2.0,
                                 0.5 / std::sqrt(opt.kappa));
    for (std::size_t i = 0; i < out.r.size(); ++i) {
        if (out.r[i] >= opt.force_kmax + 2 && out.r[i] <= r_hi) {
            lr.push_back(std::log(out.r[i]));
            le.push_back(out.energy[i]);
        }
    }
    if (lr.size() >= 2) {
        const DecayFit f = fit_decay(lr, le, lr.front(), lr.back(), "batchelor");
        out.loglog_slope = -f.rate;  // fit_decay returns the decay rate in log r
    }
    return out;
}

}  // namespace mixlab
