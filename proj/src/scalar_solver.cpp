#include "mixlab/scalar_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mixlab/rng.hpp"

namespace mixlab {

// ---------------------------------------------------------------------------
// Initial data
// ---------------------------------------------------------------------------

InitialData InitialData::sine() {
    InitialData d;
    d.kind_ = InitialKind::sine;
    d.name_ = "sine";
    return d;
}

InitialData InitialData::disk(int grid_n) {
    InitialData d;
    d.kind_ = InitialKind::disk;
    d.name_ = "disk";
    d.grid_n_ = grid_n;
    // Area-balanced radius: pi r^2 = (2 pi)^2 / 2.
    const double r0 = std::sqrt(two_pi);
    const double w = 4.0 * two_pi / grid_n;
    // Quadrature mean of the mollified profile, removed so eval() is
    // mean-zero like the sampled field.
    const int m = 512;
    CompensatedSum acc;
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            const double dx = two_pi * i / m - pi;
            const double dy = two_pi * j / m - pi;
            acc.add(std::tanh((r0 - std::sqrt(dx * dx + dy * dy)) / w));
        }
    }
    d.mean_offset_ = acc.value() / (m * m);
    return d;
}

InitialData InitialData::random_bandlimited(int kmax, std::uint64_t seed) {
    InitialData d;
    d.kind_ = InitialKind::random_bandlimited;
    d.name_ = "random_bandlimited";
    GaussianStream gs(seed, rng_stream::initial);
    std::uint64_t ctr = 0;
    double sq = 0.0;
    // Half-plane of wave vectors (k1 > 0, or k1 = 0 and k2 > 0).
    for (int k1 = 0; k1 <= kmax; ++k1) {
        for (int k2 = (k1 == 0 ? 1 : -kmax); k2 <= kmax; ++k2) {
            const auto z = gs.pair(ctr++);
            d.modes_.push_back({k1, k2, z[0], z[1]});
            sq += z[0] * z[0] + z[1] * z[1];
        }
    }
    // ||a cos + b sin||^2 = (a^2 + b^2) (2 pi)^2 / 2 per mode; normalize to
    // unit L2.
    const double scale = 1.0 / std::sqrt(sq * two_pi * two_pi / 2.0);
    for (auto& mo : d.modes_) {
        mo.a *= scale;
        mo.b *= scale;
    }
    return d;
}

InitialData InitialData::from_name(const std::string& name, int grid_n, int kmax,
                                   std::uint64_t seed) {
    if (name == "sine") return sine();
    if (name == "disk") return disk(grid_n);
    if (name == "random_bandlimited") return random_bandlimited(kmax, seed);
    throw MixlabError("unknown initial datum: " + name);
}

double InitialData::eval(Vec2 x) const {
    switch (kind_) {
        case InitialKind::sine:
            return std::sin(x.x);
        case InitialKind::disk: {
            const double r0 = std::sqrt(two_pi);
            const double w = 4.0 * two_pi / grid_n_;
            double dx = std::remainder(x.x - pi, two_pi);
            double dy = std::remainder(x.y - pi, two_pi);
            return std::tanh((r0 - std::sqrt(dx * dx + dy * dy)) / w) - mean_offset_;
        }
        case InitialKind::random_bandlimited: {
            double s = 0.0;
            for (const auto& mo : modes_) {
                const double ph = mo.k1 * x.x + mo.k2 * x.y;
                s += mo.a * std::cos(ph) + mo.b * std::sin(ph);
            }
            return s;
        }
    }
    return 0.0;
}

Field2D InitialData::sample(int n) const {
    Field2D f(n);
    const double h = two_pi / n;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            f.at(i, j) = eval({h * i, h * j});
        }
    }
    if (kind_ == InitialKind::disk) {
        // Mollify to band limit and restore the exact zero mean.
        Spectrum2D s = forward(f);
        apply_dealias(s);
        project_mean_zero(s);
        f = inverse(s);
    }
    return f;
}

// ---------------------------------------------------------------------------
// Solver
// ---------------------------------------------------------------------------

ScalarSolver::ScalarSolver(int n, double kappa, FlowSpec flow)
    : n_(n), kappa_(kappa), flow_(std::move(flow)), theta_(n) {
    if (kappa < 0.0) throw MixlabError("kappa must be nonnegative");
    vx_.assign(static_cast<std::size_t>(n) * n, 0.0);
    vy_.assign(static_cast<std::size_t>(n) * n, 0.0);
    sin_x_.resize(n);
    cos_x_.resize(n);
    for (int i = 0; i < n; ++i) {
        sin_x_[i] = std::sin(two_pi * i / n);
        cos_x_[i] = std::cos(two_pi * i / n);
    }
}

void ScalarSolver::set_time_reversal(double t_reflect) {
    reversed_ = true;
    t_reflect_ = t_reflect;
}

void ScalarSolver::set_state(const Field2D& theta0) { theta_ = forward(theta0); }

void ScalarSolver::set_state(Spectrum2D theta0) { theta_ = std::move(theta0); }

double ScalarSolver::cfl_limit() const {
    if (flow_.kind == FlowKind::zero) return std::numeric_limits<double>::infinity();
    const double vmax = flow_.kind == FlowKind::tilted_cellular ? std::sqrt(2.0) : 1.0;
    return 0.5 * (two_pi / n_) / vmax;
}

void ScalarSolver::sample_velocity(double t) {
    const double tau = reversed_ ? t_reflect_ - t : t;
    const double sign = reversed_ ? -1.0 : 1.0;
    if (flow_.kind == FlowKind::zero) {
        std::fill(vx_.begin(), vx_.end(), 0.0);
        std::fill(vy_.begin(), vy_.end(), 0.0);
        return;
    }
    if (flow_.kind == FlowKind::tilted_cellular) {
        for (int i = 0; i < n_; ++i) {
            for (int j = 0; j < n_; ++j) {
                vx_[static_cast<std::size_t>(i) * n_ + j] = sign * sin_x_[j];
                vy_[static_cast<std::size_t>(i) * n_ + j] = sign * sin_x_[i];
            }
        }
        return;
    }
    Vec2 y{0.0, 0.0};
    if (flow_.kind == FlowKind::random_cellular) {
        if (!flow_.shift) throw MixlabError("random_cellular flow needs a shift path");
        y = flow_.shift->position(tau);
    }
    // v_c(x - y) factorizes into 1D tables: sin(x_i - y) expands through the
    // angle-difference identities, so the stage costs O(n) trig calls.
    const double c1 = std::cos(y.x), s1 = std::sin(y.x);
    const double c2 = std::cos(y.y), s2 = std::sin(y.y);
    std::vector<double> sa(n_), ca(n_), sb(n_), cb(n_);
    for (int i = 0; i < n_; ++i) {
        sa[i] = sin_x_[i] * c1 - cos_x_[i] * s1;
        ca[i] = cos_x_[i] * c1 + sin_x_[i] * s1;
        sb[i] = sin_x_[i] * c2 - cos_x_[i] * s2;
        cb[i] = cos_x_[i] * c2 + sin_x_[i] * s2;
    }
    for (int i = 0; i < n_; ++i) {
        const std::size_t row = static_cast<std::size_t>(i) * n_;
        for (int j = 0; j < n_; ++j) {
            vx_[row + j] = sign * sa[i] * cb[j];
            vy_[row + j] = -sign * ca[i] * sb[j];
        }
    }
}

Spectrum2D ScalarSolver::advection_rhs(const Spectrum2D& s, double t) {
    sample_velocity(t);
    const Field2D dx = inverse(spectral_derivative(s, 0));
    const Field2D dy = inverse(spectral_derivative(s, 1));
    Field2D adv(n_);
    for (std::size_t i = 0; i < adv.size(); ++i) {
        adv.v[i] = -(vx_[i] * dx.v[i] + vy_[i] * dy.v[i]);
    }
    Spectrum2D out = forward(adv);
    apply_dealias(out);
    return out;
}

void ScalarSolver::step(double t, double dt) {
    const int nc = theta_.nc();
    auto diffuse = [&](double tau) {
        if (kappa_ <= 0.0) return;
        for (int i1 = 0; i1 < n_; ++i1) {
            const int k1 = wavenumber(i1, n_);
            for (int j2 = 0; j2 < nc; ++j2) {
                const double kk = static_cast<double>(k1) * k1 + static_cast<double>(j2) * j2;
                theta_.at(i1, j2) *= std::exp(-kappa_ * kk * tau);
            }
        }
    };

    diffuse(0.5 * dt);

    const Spectrum2D k1 = advection_rhs(theta_, t);
    Spectrum2D tmp(n_);
    auto axpy = [&](const Spectrum2D& base, double c, const Spectrum2D& d) {
        for (std::size_t i = 0; i < tmp.c.size(); ++i) tmp.c[i] = base.c[i] + c * d.c[i];
    };
    axpy(theta_, 0.5 * dt, k1);
    const Spectrum2D k2 = advection_rhs(tmp, t + 0.5 * dt);
    axpy(theta_, 0.5 * dt, k2);
    const Spectrum2D k3 = advection_rhs(tmp, t + 0.5 * dt);
    axpy(theta_, dt, k3);
    const Spectrum2D k4 = advection_rhs(tmp, t + dt);
    for (std::size_t i = 0; i < theta_.c.size(); ++i) {
        theta_.c[i] += dt / 6.0 * (k1.c[i] + 2.0 * k2.c[i] + 2.0 * k3.c[i] + k4.c[i]);
    }

    diffuse(0.5 * dt);

    if (!std::isfinite(theta_.at(0, 0).real())) {
        throw MixlabError("scalar solver produced NaN at t = " + std::to_string(t + dt));
    }
}

NormSeries solve(const SimulationConfig& cfg,
                 const std::function<void(double, const Spectrum2D&)>& on_record) {
    ScalarSolver solver(cfg.n, cfg.kappa, cfg.flow);

    NormSeries series;
    series.realization = cfg.realization;
    series.config_hash = cfg.config_hash;

    Field2D theta0 = cfg.theta0.sample(cfg.n);
    Spectrum2D s0 = forward(theta0);
    const double mean_amp = std::abs(s0.at(0, 0));
    if (mean_amp > 1e-12) {
        series.warnings.push_back("theta0 had nonzero mean; projected");
        project_mean_zero(s0);
    }
    apply_dealias(s0);
    solver.set_state(std::move(s0));

    if (cfg.dt > solver.cfl_limit() && cfg.kappa == 0.0) {
        series.cfl_violated = true;
        series.warnings.push_back("dt exceeds the advective CFL bound");
    }

    const auto steps = static_cast<std::size_t>(std::llround(cfg.t_final / cfg.dt));
    auto record = [&](double t) {
        const Spectrum2D& s = solver.state();
        series.times.push_back(t);
        series.h_minus1.push_back(sobolev_norm(s, -1.0));
        series.l2.push_back(l2_norm(s));
        series.h1.push_back(sobolev_norm(s, 1.0));
        if (!std::isfinite(series.l2.back())) throw MixlabError("NaN norm during solve");
        if (on_record) on_record(t, s);
    };

    record(0.0);
    for (std::size_t m = 0; m < steps; ++m) {
        const double t = static_cast<double>(m) * cfg.dt;
        solver.step(t, cfg.dt);
        if ((m + 1) % static_cast<std::size_t>(std::max(1, cfg.record_every)) == 0 ||
            m + 1 == steps) {
            record(static_cast<double>(m + 1) * cfg.dt);
        }
    }
    return series;
}

}  // namespace mixlab
