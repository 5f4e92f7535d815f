#include "mixlab/flow.hpp"

#include <cmath>
#include <fstream>

#include "mixlab/rng.hpp"

namespace mixlab {

double verify_spiral_transform(int n) {
    // v_c(x) = d^{-1} R^T vtilde_c(d R x), d = sqrt(2), R = rot(45deg):
    // d R x = (x1 - x2, x1 + x2) and d^{-1} R^T = [[1,1],[-1,1]] / 2.
    double worst = 0.0;
    const double h = two_pi / n;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const Vec2 x{h * i, h * j};
            const Vec2 lhs = cellular_velocity(x);
            const Vec2 tv = tilted_velocity({x.x - x.y, x.x + x.y});
            const Vec2 rhs{0.5 * (tv.x + tv.y), 0.5 * (-tv.x + tv.y)};
            worst = std::max(worst, std::max(std::abs(lhs.x - rhs.x), std::abs(lhs.y - rhs.y)));
        }
    }
    return worst;
}

double enstrophy(const Field2D& vx, const Field2D& vy) {
    double sum = 0.0;
    for (const Field2D* comp : {&vx, &vy}) {
        const Spectrum2D s = forward(*comp);
        for (int axis = 0; axis < 2; ++axis) {
            const double g = l2_norm(spectral_derivative(s, axis));
            sum += g * g;
        }
    }
    return std::sqrt(sum);
}

ShiftPath sample_shift_path(double nu, double dt, double t_final, std::uint64_t seed,
                            bool uniform_start) {
    if (nu <= 0.0) throw MixlabError("shift diffusivity nu must be positive");
    if (dt <= 0.0) throw MixlabError("shift step dt must be positive");
    const auto steps = static_cast<std::size_t>(std::ceil(t_final / dt - 1e-12));
    std::vector<Vec2> path(steps + 1);
    GaussianStream gs(seed, rng_stream::shift);
    if (uniform_start) {
        // Counter 2^63 reserved for the starting point, clear of increments.
        const GaussianStream us(seed, rng_stream::shift);
        path[0] = {two_pi * us.uniform(1ull << 63), two_pi * us.uniform((1ull << 63) + 1)};
    } else {
        path[0] = {0.0, 0.0};
    }
    const double amp = std::sqrt(2.0 * nu * dt);
    for (std::size_t m = 0; m < steps; ++m) {
        const auto xi = gs.pair(m);
        path[m + 1] = {path[m].x + amp * xi[0], path[m].y + amp * xi[1]};
    }
    return ShiftPath(nu, dt, std::move(path), seed);
}

Vec2 ShiftPath::position(double t) const {
    if (unwrapped_.empty()) throw MixlabError("empty shift path");
    if (unwrapped_.size() == 1 || dt_ <= 0.0) return sample(0);
    const double s = std::min(std::max(t / dt_, 0.0), static_cast<double>(steps()));
    const auto m = static_cast<std::size_t>(s);
    if (m >= steps()) return sample(steps());
    const double w = s - static_cast<double>(m);
    const Vec2 a = unwrapped_[m];
    const Vec2 b = unwrapped_[m + 1];
    return {wrap_torus(a.x + w * (b.x - a.x)), wrap_torus(a.y + w * (b.y - a.y))};
}

void ShiftPath::export_csv(const std::filesystem::path& path) const {
    std::ofstream os(path);
    if (!os) throw MixlabError("cannot open " + path.string());
    os.precision(17);
    os << "step,y1,y2\n";
    for (std::size_t m = 0; m < unwrapped_.size(); ++m) {
        const Vec2 p = sample(m);
        os << m << "," << p.x << "," << p.y << "\n";
    }
}

FlowKind flow_kind_from_string(const std::string& s) {
    if (s == "steady_cellular") return FlowKind::steady_cellular;
    if (s == "random_cellular") return FlowKind::random_cellular;
    if (s == "tilted_cellular") return FlowKind::tilted_cellular;
    if (s == "zero") return FlowKind::zero;
    throw MixlabError("unknown flow kind: " + s);
}

std::string to_string(FlowKind k) {
    switch (k) {
        case FlowKind::steady_cellular: return "steady_cellular";
        case FlowKind::random_cellular: return "random_cellular";
        case FlowKind::tilted_cellular: return "tilted_cellular";
        case FlowKind::zero: return "zero";
    }
    return "?";
}

std::pair<Field2D, Field2D> FlowSpec::sample(double t, int n) const {
    Field2D vx(n);
    Field2D vy(n);
    const double h = two_pi / n;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const Vec2 v = velocity(t, {h * i, h * j});
            vx.at(i, j) = v.x;
            vy.at(i, j) = v.y;
        }
    }
    return {std::move(vx), std::move(vy)};
}

}  // namespace mixlab
