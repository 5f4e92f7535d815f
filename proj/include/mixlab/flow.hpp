#pragma once

// Velocity models on T^2: the steady cellular flow, its tilted (spiral
// rotated) companion, and the random cellular flow obtained by shifting the
// cell grid along a torus Brownian path Y with diffusivity nu,
//   dY = sqrt(2 nu) dB,   v(t, x) = v_c(x - Y(t)).
// Both velocity fields are divergence-free with mean enstrophy normalized to
// ||grad v||_{L2(T^2)} = 2*pi.

#include <cstdint>
#include <filesystem>
#include <memory>
#include <vector>

#include "mixlab/common.hpp"
#include "mixlab/spectral.hpp"

namespace mixlab {

/// v_c(x - y) for the cellular stream function sin(x1)sin(x2).
inline Vec2 cellular_velocity(Vec2 x, Vec2 y = {0.0, 0.0}) {
    const double a = x.x - y.x;
    const double b = x.y - y.y;
    return {std::sin(a) * std::cos(b), -std::cos(a) * std::sin(b)};
}

/// The tilted cellular flow (sin x2, sin x1).
inline Vec2 tilted_velocity(Vec2 x) { return {std::sin(x.y), std::sin(x.x)}; }

/// Max-norm residual of v_c(x) = d^{-1} R^T vtilde_c(d R x) over an n x n
/// grid, with d = sqrt(2) and R the 45-degree rotation.
double verify_spiral_transform(int n);

/// ||grad v||_{L2(T^2)} of a velocity field sampled on the grid.
double enstrophy(const Field2D& vx, const Field2D& vy);

/// One realization of the torus Brownian shift, stored unwrapped at the
/// sampling cadence; intermediate times use linear interpolation of the
/// unwrapped increments.
class ShiftPath {
public:
    ShiftPath() = default;
    ShiftPath(double nu, double dt, std::vector<Vec2> unwrapped, std::uint64_t seed)
        : nu_(nu), dt_(dt), unwrapped_(std::move(unwrapped)), seed_(seed) {}

    double nu() const { return nu_; }
    double dt() const { return dt_; }
    std::uint64_t seed() const { return seed_; }
    std::size_t steps() const { return unwrapped_.empty() ? 0 : unwrapped_.size() - 1; }
    double t_final() const { return dt_ * static_cast<double>(steps()); }
    const std::vector<Vec2>& unwrapped() const { return unwrapped_; }

    /// Wrapped sample at step m.
    Vec2 sample(std::size_t m) const {
        const Vec2 p = unwrapped_.at(m);
        return {wrap_torus(p.x), wrap_torus(p.y)};
    }

    /// Wrapped position at time t (linear interpolation, clamped endpoints).
    Vec2 position(double t) const;

    void export_csv(const std::filesystem::path& path) const;

private:
    double nu_ = 0.0;
    double dt_ = 0.0;
    std::vector<Vec2> unwrapped_;
    std::uint64_t seed_ = 0;
};

/// Path of ceil(t_final/dt)+1 samples; Y0 = 0 unless uniform_start, in which
/// case Y0 is drawn uniformly from the torus (translation invariance makes
/// either admissible).
ShiftPath sample_shift_path(double nu, double dt, double t_final, std::uint64_t seed,
                            bool uniform_start = false);

enum class FlowKind { steady_cellular, random_cellular, tilted_cellular, zero };

FlowKind flow_kind_from_string(const std::string& s);
std::string to_string(FlowKind k);

/// A velocity model queryable at (t, x). random_cellular requires a path.
struct FlowSpec {
    FlowKind kind = FlowKind::steady_cellular;
    std::shared_ptr<const ShiftPath> shift;

    Vec2 velocity(double t, Vec2 x) const {
        switch (kind) {
            case FlowKind::steady_cellular:
                return cellular_velocity(x);
            case FlowKind::tilted_cellular:
                return tilted_velocity(x);
            case FlowKind::random_cellular:
                if (!shift) throw MixlabError("random_cellular flow needs a shift path");
                return cellular_velocity(x, shift->position(t));
            case FlowKind::zero:
                return {0.0, 0.0};
        }
        return {};
    }

    /// Velocity components sampled on the n x n lattice at time t.
    std::pair<Field2D, Field2D> sample(double t, int n) const;
};

}  // namespace mixlab
