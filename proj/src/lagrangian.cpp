#include "mixlab/lagrangian.hpp"

#include <cmath>

#include "mixlab/rng.hpp"

namespace mixlab {

namespace {

// Purpose tags keep the sub-streams of one base seed disjoint.
constexpr std::uint64_t tag_advance = 0xAD7A;
constexpr std::uint64_t tag_feynman_kac = 0xF14C;
constexpr std::uint64_t tag_correlation = 0xC0BB;

std::uint64_t noise_index(std::uint64_t particle, std::uint64_t step) {
    return (particle << 32) | (step & 0xFFFFFFFFull);
}

}  // namespace

ParticleEnsemble make_lattice_ensemble(int m, double kappa, std::uint64_t seed) {
    if (m < 1) throw MixlabError("ensemble needs at least one particle per axis");
    ParticleEnsemble e;
    e.kappa = kappa;
    e.seed = seed;
    e.positions.reserve(static_cast<std::size_t>(m) * m);
    const double h = two_pi / m;
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            e.positions.push_back({h * i, h * j});
        }
    }
    e.unwrapped = e.positions;
    return e;
}

void advance(ParticleEnsemble& ensemble, const FlowSpec& flow, double dt, double t_final) {
    if (dt <= 0.0) throw MixlabError("particle step dt must be positive");
    const GaussianStream gs(split_seed(ensemble.seed, tag_advance), rng_stream::particle);
    const double amp = std::sqrt(2.0 * ensemble.kappa * dt);
    const auto steps =
        static_cast<std::uint64_t>(std::llround((t_final - ensemble.time) / dt));
    if (ensemble.unwrapped.size() != ensemble.positions.size()) {
        ensemble.unwrapped = ensemble.positions;
    }
    for (std::uint64_t m = 0; m < steps; ++m) {
        const double t = ensemble.time + static_cast<double>(m) * dt;
        for (std::size_t p = 0; p < ensemble.positions.size(); ++p) {
            Vec2& x = ensemble.positions[p];
            const Vec2 v = flow.velocity(t, x);
            double dx = v.x * dt;
            double dy = v.y * dt;
            if (amp > 0.0) {
                const auto xi = gs.pair(noise_index(p, ensemble.step_index + m));
                dx += amp * xi[0];
                dy += amp * xi[1];
            }
            ensemble.unwrapped[p] = ensemble.unwrapped[p] + Vec2{dx, dy};
            x = {wrap_torus(x.x + dx), wrap_torus(x.y + dy)};
        }
    }
    ensemble.step_index += steps;
    ensemble.time = t_final;
}

FeynmanKacEstimate feynman_kac_estimate(const InitialData& theta0,
                                        const std::vector<Vec2>& eval_points,
                                        const FlowSpec& flow, double kappa, double t,
                                        int particles, double dt, std::uint64_t seed) {
    if (particles < 1) throw MixlabError("feynman_kac needs at least one particle");
    if (kappa == 0.0 && particles > 1) {
        // No dispersion without noise: one backward characteristic is exact.
        particles = 1;
    }
    const GaussianStream gs(split_seed(seed, tag_feynman_kac), rng_stream::particle);
    const double amp = std::sqrt(2.0 * kappa * dt);
    const auto steps = static_cast<std::uint64_t>(std::llround(t / dt));

    FeynmanKacEstimate out;
    out.values.resize(eval_points.size());
    out.stderrs.resize(eval_points.size());
    for (std::size_t q = 0; q < eval_points.size(); ++q) {
        CompensatedSum sum, sumsq;
        for (int p = 0; p < particles; ++p) {
            // Backward characteristic: dX = -v(t - s, X) ds + sqrt(2k) dB.
            Vec2 x = eval_points[q];
            const std::uint64_t pid = q * static_cast<std::uint64_t>(particles) + p;
            for (std::uint64_t m = 0; m < steps; ++m) {
                const double s = static_cast<double>(m) * dt;
                const Vec2 v = flow.velocity(t - s, x);
                double nx = x.x - v.x * dt;
                double ny = x.y - v.y * dt;
                if (amp > 0.0) {
                    const auto xi = gs.pair(noise_index(pid, m));
                    nx += amp * xi[0];
                    ny += amp * xi[1];
                }
                x = {wrap_torus(nx), wrap_torus(ny)};
            }
            const double val = theta0.eval(x);
            sum.add(val);
            sumsq.add(val * val);
        }
        const double mean = sum.value() / particles;
        out.values[q] = mean;
        if (particles > 1) {
            const double var =
                std::max(0.0, sumsq.value() / particles - mean * mean) /
                static_cast<double>(particles - 1);
            out.stderrs[q] = std::sqrt(var);
        } else {
            out.stderrs[q] = 0.0;
        }
    }
    return out;
}

namespace {

void check_mean_zero(const ScalarFn& fn, int quad_n, const char* which) {
    CompensatedSum acc;
    const double h = two_pi / quad_n;
    for (int i = 0; i < quad_n; ++i) {
        for (int j = 0; j < quad_n; ++j) acc.add(fn({h * i, h * j}));
    }
    const double mean = acc.value() / (static_cast<double>(quad_n) * quad_n);
    if (std::abs(mean) > 1e-8) {
        throw MixlabError(std::string(which) + " must be mean-zero for correlations");
    }
}

}  // namespace

std::vector<double> correlation_series(const ScalarFn& h, const ScalarFn& g, const FlowSpec& flow,
                                       int n_max, double kappa, const CorrelationOptions& opt) {
    check_mean_zero(h, opt.quad_n, "h");
    check_mean_zero(g, opt.quad_n, "g");
    const int nq = opt.quad_n;
    const int mc = kappa == 0.0 ? 1 : std::max(1, opt.mc_samples);
    const std::size_t nodes = static_cast<std::size_t>(nq) * nq;
    const double cell = (two_pi / nq) * (two_pi / nq);

    std::vector<Vec2> pos(nodes * static_cast<std::size_t>(mc));
    std::vector<double> gv(nodes);
    const double hg = two_pi / nq;
    for (int i = 0; i < nq; ++i) {
        for (int j = 0; j < nq; ++j) {
            const std::size_t node = static_cast<std::size_t>(i) * nq + j;
            gv[node] = g({hg * i, hg * j});
            for (int s = 0; s < mc; ++s) pos[node * mc + s] = {hg * i, hg * j};
        }
    }

    const GaussianStream gs(split_seed(opt.seed, tag_correlation), rng_stream::particle);
    const double amp = std::sqrt(2.0 * kappa * opt.dt);
    const auto steps_per_unit = static_cast<std::uint64_t>(std::llround(1.0 / opt.dt));

    std::vector<double> cor(static_cast<std::size_t>(n_max) + 1);
    auto record = [&](int nt) {
        CompensatedSum acc;
        for (std::size_t node = 0; node < nodes; ++node) {
            CompensatedSum mean_h;
            for (int s = 0; s < mc; ++s) mean_h.add(h(pos[node * mc + s]));
            acc.add(gv[node] * mean_h.value() / mc);
        }
        cor[static_cast<std::size_t>(nt)] = std::abs(acc.value() * cell);
    };

    record(0);
    std::uint64_t step = 0;
    for (int nt = 1; nt <= n_max; ++nt) {
        for (std::uint64_t m = 0; m < steps_per_unit; ++m, ++step) {
            const double t = static_cast<double>(step) * opt.dt;
            for (std::size_t p = 0; p < pos.size(); ++p) {
                Vec2& x = pos[p];
                const Vec2 v = flow.velocity(t, x);
                double nx = x.x + v.x * opt.dt;
                double ny = x.y + v.y * opt.dt;
                if (amp > 0.0) {
                    const auto xi = gs.pair(noise_index(p, step));
                    nx += amp * xi[0];
                    ny += amp * xi[1];
                }
                x = {wrap_torus(nx), wrap_torus(ny)};
            }
        }
        record(nt);
    }
    return cor;
}

double correlation(const ScalarFn& h, const ScalarFn& g, const FlowSpec& flow, double t,
                   double kappa, const CorrelationOptions& opt) {
    if (t < 0.0) throw MixlabError("correlation time must be nonnegative");
    check_mean_zero(h, opt.quad_n, "h");
    check_mean_zero(g, opt.quad_n, "g");
    const int nq = opt.quad_n;
    const int mc = kappa == 0.0 ? 1 : std::max(1, opt.mc_samples);
    const std::size_t nodes = static_cast<std::size_t>(nq) * nq;
    const double cell = (two_pi / nq) * (two_pi / nq);
    const double hg = two_pi / nq;

    std::vector<Vec2> pos(nodes * static_cast<std::size_t>(mc));
    std::vector<double> gv(nodes);
    for (int i = 0; i < nq; ++i) {
        for (int j = 0; j < nq; ++j) {
            const std::size_t node = static_cast<std::size_t>(i) * nq + j;
            gv[node] = g({hg * i, hg * j});
            for (int s = 0; s < mc; ++s) pos[node * mc + s] = {hg * i, hg * j};
        }
    }

    const auto steps = static_cast<std::uint64_t>(std::max(0.0, std::round(t / opt.dt)));
    const double dt = steps > 0 ? t / static_cast<double>(steps) : 0.0;
    const GaussianStream gs(split_seed(opt.seed, tag_correlation), rng_stream::particle);
    const double amp = std::sqrt(2.0 * kappa * dt);
    for (std::uint64_t m = 0; m < steps; ++m) {
        const double tau = static_cast<double>(m) * dt;
        for (std::size_t p = 0; p < pos.size(); ++p) {
            Vec2& x = pos[p];
            const Vec2 v = flow.velocity(tau, x);
            double nx = x.x + v.x * dt;
            double ny = x.y + v.y * dt;
            if (amp > 0.0) {
                const auto xi = gs.pair(noise_index(p, m));
                nx += amp * xi[0];
                ny += amp * xi[1];
            }
            x = {wrap_torus(nx), wrap_torus(ny)};
        }
    }
    CompensatedSum acc;
    for (std::size_t node = 0; node < nodes; ++node) {
        CompensatedSum mean_h;
        for (int s = 0; s < mc; ++s) mean_h.add(h(pos[node * mc + s]));
        acc.add(gv[node] * mean_h.value() / mc);
    }
    return std::abs(acc.value() * cell);
}

}  // namespace mixlab
