#include "mixlab/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include "mixlab/rng.hpp"

namespace mixlab {

namespace {

// FFTW's planner is not thread-safe; executions on private buffers are.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

struct PlanSet {
    int n = 0;
    int rank = 0;
    std::size_t nreal = 0;
    std::size_t ncplx = 0;
    double* real = nullptr;
    fftw_complex* cplx = nullptr;
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;

    PlanSet(int n_, int rank_) : n(n_), rank(rank_) {
        nreal = 1;
        for (int d = 0; d < rank; ++d) nreal *= static_cast<std::size_t>(n);
        ncplx = nreal / n * (n / 2 + 1);
        real = fftw_alloc_real(nreal);
        cplx = fftw_alloc_complex(ncplx);
        std::vector<int> dims(static_cast<std::size_t>(rank), n);
        std::lock_guard<std::mutex> lock(planner_mutex());
        // FFTW_ESTIMATE: deterministic plan choice, so reruns are bit-stable.
        fwd = fftw_plan_dft_r2c(rank, dims.data(), real, cplx, FFTW_ESTIMATE);
        bwd = fftw_plan_dft_c2r(rank, dims.data(), cplx, real, FFTW_ESTIMATE);
        if (fwd == nullptr || bwd == nullptr) throw MixlabError("fftw plan creation failed");
    }
    PlanSet(const PlanSet&) = delete;
    PlanSet& operator=(const PlanSet&) = delete;
    // Deliberately never destroyed: plan sets live for the process so that
    // thread-exit ordering cannot race the planner.
};

PlanSet& plans(int n, int rank) {
    thread_local std::map<std::pair<int, int>, PlanSet*> cache;
    auto key = std::make_pair(n, rank);
    auto it = cache.find(key);
    if (it == cache.end()) {
        it = cache.emplace(key, new PlanSet(n, rank)).first;
    }
    return *it->second;
}

void forward_into(const double* src, std::size_t nreal, complex* dst, std::size_t ncplx,
                  PlanSet& p) {
    std::copy(src, src + nreal, p.real);
    fftw_execute(p.fwd);
    const double scale = 1.0 / static_cast<double>(nreal);
    for (std::size_t i = 0; i < ncplx; ++i) {
        dst[i] = complex(p.cplx[i][0] * scale, p.cplx[i][1] * scale);
    }
}

void inverse_into(const complex* src, std::size_t ncplx, double* dst, std::size_t nreal,
                  PlanSet& p) {
    for (std::size_t i = 0; i < ncplx; ++i) {
        p.cplx[i][0] = src[i].real();
        p.cplx[i][1] = src[i].imag();
    }
    fftw_execute(p.bwd);
    std::copy(p.real, p.real + nreal, dst);
}

void require_power_of_two(int n) {
    if (n < 4 || (n & (n - 1)) != 0) {
        throw MixlabError("grid size must be a power of two >= 4, got " + std::to_string(n));
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// 2D
// ---------------------------------------------------------------------------

complex Spectrum2D::coeff(int k1, int k2) const {
    int i1 = k1 >= 0 ? k1 : k1 + n;
    if (k2 >= 0) return at(i1, k2);
    int i1c = (n - i1) % n;
    return std::conj(at(i1c, -k2));
}

Spectrum2D forward(const Field2D& f) {
    require_power_of_two(f.n);
    Spectrum2D s(f.n);
    auto& p = plans(f.n, 2);
    forward_into(f.v.data(), p.nreal, s.c.data(), p.ncplx, p);
    return s;
}

Field2D inverse(const Spectrum2D& s) {
    require_power_of_two(s.n);
    Field2D f(s.n);
    auto& p = plans(s.n, 2);
    inverse_into(s.c.data(), p.ncplx, f.v.data(), p.nreal, p);
    return f;
}

Spectrum2D spectral_derivative(const Spectrum2D& s, int axis) {
    if (axis < 0 || axis > 1) throw MixlabError("2D derivative axis out of range");
    const int n = s.n;
    const int nc = s.nc();
    Spectrum2D out(n);
    for (int i1 = 0; i1 < n; ++i1) {
        const int k1 = wavenumber(i1, n);
        for (int j2 = 0; j2 < nc; ++j2) {
            const int k = axis == 0 ? k1 : j2;
            // The unmatched Nyquist mode has no well-defined odd derivative.
            const bool nyq = (axis == 0 && i1 == n / 2) || (axis == 1 && j2 == n / 2);
            out.at(i1, j2) = nyq ? complex(0.0) : complex(0.0, k) * s.at(i1, j2);
        }
    }
    return out;
}

Spectrum2D laplacian(const Spectrum2D& s) {
    const int n = s.n;
    const int nc = s.nc();
    Spectrum2D out(n);
    for (int i1 = 0; i1 < n; ++i1) {
        const int k1 = wavenumber(i1, n);
        for (int j2 = 0; j2 < nc; ++j2) {
            const double k2 = static_cast<double>(k1) * k1 + static_cast<double>(j2) * j2;
            out.at(i1, j2) = -k2 * s.at(i1, j2);
        }
    }
    return out;
}

void project_mean_zero(Spectrum2D& s) { s.at(0, 0) = complex(0.0); }

void project_mean_zero(Field2D& f) {
    const double m = grid_mean(f);
    for (double& x : f.v) x -= m;
}

void apply_dealias(Spectrum2D& s) {
    const int n = s.n;
    const int kd = dealias_cutoff(n);
    const int nc = s.nc();
    for (int i1 = 0; i1 < n; ++i1) {
        const int k1 = std::abs(wavenumber(i1, n));
        for (int j2 = 0; j2 < nc; ++j2) {
            if (k1 > kd || j2 > kd) s.at(i1, j2) = complex(0.0);
        }
    }
}

double grid_mean(const Field2D& f) {
    CompensatedSum acc;
    for (double x : f.v) acc.add(x);
    return acc.value() / static_cast<double>(f.size());
}

double l2_norm_grid(const Field2D& f) {
    CompensatedSum acc;
    for (double x : f.v) acc.add(x * x);
    const double cell = two_pi * two_pi / static_cast<double>(f.size());
    return std::sqrt(acc.value() * cell);
}

namespace {

// Shared Parseval-weighted mode sums. weight(j)=2 for interior half-axis
// columns (conjugate pair represented once).
template <typename ModeFn>
double mode_sum_2d(const Spectrum2D& s, ModeFn fn) {
    const int n = s.n;
    const int nc = s.nc();
    CompensatedSum acc;
    for (int i1 = 0; i1 < n; ++i1) {
        const int k1 = wavenumber(i1, n);
        for (int j2 = 0; j2 < nc; ++j2) {
            const double w = (j2 == 0 || j2 == n / 2) ? 1.0 : 2.0;
            const complex c = s.at(i1, j2);
            acc.add(w * fn(k1, j2) * std::norm(c));
        }
    }
    return acc.value() * two_pi * two_pi;
}

}  // namespace

double l2_norm(const Spectrum2D& s) {
    return std::sqrt(mode_sum_2d(s, [](int, int) { return 1.0; }));
}

double sobolev_norm(const Spectrum2D& s, double order) {
    if (order < -4.0 || order > 4.0) throw MixlabError("sobolev order outside [-4, 4]");
    const double l2 = l2_norm(s);
    if (order < 0.0) {
        const double mean_amp = std::abs(s.at(0, 0)) * two_pi * two_pi;
        if (l2 > 0.0 && mean_amp > 1e-10 * l2) {
            throw NonZeroMean("negative-order Sobolev norm requires a mean-zero field");
        }
    }
    const double sum = mode_sum_2d(s, [order](int k1, int k2) {
        const double kk = static_cast<double>(k1) * k1 + static_cast<double>(k2) * k2;
        return kk == 0.0 ? 0.0 : std::pow(kk, order);
    });
    return std::sqrt(sum);
}

double sobolev_norm(const Field2D& f, double order) { return sobolev_norm(forward(f), order); }

Field2D random_bandlimited_2d(int n, int kmax, std::uint64_t seed) {
    Field2D f(n);
    GaussianStream gs(seed, rng_stream::sampling);
    for (std::size_t i = 0; i < f.size(); i += 2) {
        auto z = gs.pair(i / 2);
        f.v[i] = z[0];
        if (i + 1 < f.size()) f.v[i + 1] = z[1];
    }
    Spectrum2D s = forward(f);
    const int nc = s.nc();
    for (int i1 = 0; i1 < n; ++i1) {
        const int k1 = std::abs(wavenumber(i1, n));
        for (int j2 = 0; j2 < nc; ++j2) {
            if (k1 > kmax || j2 > kmax || (k1 == 0 && j2 == 0)) s.at(i1, j2) = complex(0.0);
        }
    }
    const double norm = l2_norm(s);
    for (auto& c : s.c) c /= norm;
    return inverse(s);
}

// ---------------------------------------------------------------------------
// 6D
// ---------------------------------------------------------------------------

namespace {

void check_6d_size(int n) {
    if (n < 4 || n % 2 != 0) throw MixlabError("6D grid size must be even and >= 4");
    if (n > max_grid_6d) {
        throw MixlabError("6D grid size " + std::to_string(n) + " exceeds the memory guard (" +
                          std::to_string(max_grid_6d) + ")");
    }
}

std::size_t pow6(int n) {
    std::size_t r = 1;
    for (int i = 0; i < 6; ++i) r *= static_cast<std::size_t>(n);
    return r;
}

}  // namespace

Field6D::Field6D(int n_) : n(n_) {
    check_6d_size(n_);
    v.assign(pow6(n_), 0.0);
}

Spectrum6D::Spectrum6D(int n_) : n(n_) {
    check_6d_size(n_);
    c.assign(pow6(n_) / n_ * (n_ / 2 + 1), complex(0.0));
}

Spectrum6D forward(const Field6D& f) {
    Spectrum6D s(f.n);
    auto& p = plans(f.n, 6);
    forward_into(f.v.data(), p.nreal, s.c.data(), p.ncplx, p);
    return s;
}

Field6D inverse(const Spectrum6D& s) {
    Field6D f(s.n);
    auto& p = plans(s.n, 6);
    inverse_into(s.c.data(), p.ncplx, f.v.data(), p.nreal, p);
    return f;
}

namespace {

// Applies `fn(k0..k5) -> complex multiplier` to a spectrum. The last axis
// index runs over [0, n/2]; all others carry signed wave numbers.
template <typename Fn>
Spectrum6D apply_multiplier(const Spectrum6D& s, Fn fn) {
    const int n = s.n;
    const int nc = s.nc();
    Spectrum6D out(n);
    int k[6];
    std::size_t idx = 0;
    for (int i0 = 0; i0 < n; ++i0) {
        k[0] = wavenumber(i0, n);
        for (int i1 = 0; i1 < n; ++i1) {
            k[1] = wavenumber(i1, n);
            for (int i2 = 0; i2 < n; ++i2) {
                k[2] = wavenumber(i2, n);
                for (int i3 = 0; i3 < n; ++i3) {
                    k[3] = wavenumber(i3, n);
                    for (int i4 = 0; i4 < n; ++i4) {
                        k[4] = wavenumber(i4, n);
                        for (int j5 = 0; j5 < nc; ++j5, ++idx) {
                            k[5] = j5;
                            out.c[idx] = fn(k) * s.c[idx];
                        }
                    }
                }
            }
        }
    }
    return out;
}

}  // namespace

Spectrum6D spectral_derivative(const Spectrum6D& s, int axis) {
    if (axis < 0 || axis > 5) throw MixlabError("6D derivative axis out of range");
    const int half = s.n / 2;
    return apply_multiplier(s, [axis, half](const int* k) {
        if (std::abs(k[axis]) == half) return complex(0.0);
        return complex(0.0, k[axis]);
    });
}

Field6D derivative_field(const Spectrum6D& s, int axis) {
    return inverse(spectral_derivative(s, axis));
}

Field6D second_derivative_field(const Spectrum6D& s, int axis_a, int axis_b) {
    const int half = s.n / 2;
    auto d2 = apply_multiplier(s, [axis_a, axis_b, half](const int* k) {
        if (std::abs(k[axis_a]) == half || std::abs(k[axis_b]) == half) return complex(0.0);
        return complex(-static_cast<double>(k[axis_a]) * k[axis_b], 0.0);
    });
    return inverse(d2);
}

void apply_dealias(Spectrum6D& s) {
    const int kd = dealias_cutoff(s.n);
    auto masked = apply_multiplier(s, [kd](const int* k) {
        for (int a = 0; a < 6; ++a) {
            if (std::abs(k[a]) > kd) return complex(0.0);
        }
        return complex(1.0);
    });
    s = std::move(masked);
}

double grid_mean(const Field6D& f) {
    CompensatedSum acc;
    for (double x : f.v) acc.add(x);
    return acc.value() / static_cast<double>(f.size());
}

double l2_norm_grid(const Field6D& f) {
    CompensatedSum acc;
    for (double x : f.v) acc.add(x * x);
    const double cell = std::pow(two_pi, 6) / static_cast<double>(f.size());
    return std::sqrt(acc.value() * cell);
}

double weighted_mode_sum(const Spectrum6D& s, const std::vector<int>& axes, int power) {
    const int n = s.n;
    const int nc = s.nc();
    const double vol = std::pow(two_pi, 6);
    CompensatedSum acc;
    int k[6];
    std::size_t idx = 0;
    for (int i0 = 0; i0 < n; ++i0) {
        k[0] = wavenumber(i0, n);
        for (int i1 = 0; i1 < n; ++i1) {
            k[1] = wavenumber(i1, n);
            for (int i2 = 0; i2 < n; ++i2) {
                k[2] = wavenumber(i2, n);
                for (int i3 = 0; i3 < n; ++i3) {
                    k[3] = wavenumber(i3, n);
                    for (int i4 = 0; i4 < n; ++i4) {
                        k[4] = wavenumber(i4, n);
                        for (int j5 = 0; j5 < nc; ++j5, ++idx) {
                            k[5] = j5;
                            double kk = 0.0;
                            for (int a : axes) kk += static_cast<double>(k[a]) * k[a];
                            double m = 1.0;
                            for (int q = 0; q < power; ++q) m *= kk;
                            const double w = (j5 == 0 || j5 == n / 2) ? 1.0 : 2.0;
                            acc.add(w * m * std::norm(s.c[idx]));
                        }
                    }
                }
            }
        }
    }
    return acc.value() * vol;
}

double weighted_mode_sum_prod(const Spectrum6D& s, const std::vector<int>& axes_a,
                              const std::vector<int>& axes_b) {
    const int n = s.n;
    const int nc = s.nc();
    CompensatedSum acc;
    int k[6];
    std::size_t idx = 0;
    for (int i0 = 0; i0 < n; ++i0) {
        k[0] = wavenumber(i0, n);
        for (int i1 = 0; i1 < n; ++i1) {
            k[1] = wavenumber(i1, n);
            for (int i2 = 0; i2 < n; ++i2) {
                k[2] = wavenumber(i2, n);
                for (int i3 = 0; i3 < n; ++i3) {
                    k[3] = wavenumber(i3, n);
                    for (int i4 = 0; i4 < n; ++i4) {
                        k[4] = wavenumber(i4, n);
                        for (int j5 = 0; j5 < nc; ++j5, ++idx) {
                            k[5] = j5;
                            double ka = 0.0, kb = 0.0;
                            for (int a : axes_a) ka += static_cast<double>(k[a]) * k[a];
                            for (int b : axes_b) kb += static_cast<double>(k[b]) * k[b];
                            const double w = (j5 == 0 || j5 == n / 2) ? 1.0 : 2.0;
                            acc.add(w * ka * kb * std::norm(s.c[idx]));
                        }
                    }
                }
            }
        }
    }
    return acc.value() * std::pow(two_pi, 6);
}

double l2_norm(const Spectrum6D& s) { return std::sqrt(weighted_mode_sum(s, {}, 0)); }

Field6D random_bandlimited_6d(int n, int kmax, std::uint64_t seed) {
    Field6D f(n);
    GaussianStream gs(seed, rng_stream::sampling);
    for (std::size_t i = 0; i < f.size(); i += 2) {
        auto z = gs.pair(i / 2);
        f.v[i] = z[0];
        if (i + 1 < f.size()) f.v[i + 1] = z[1];
    }
    Spectrum6D s = forward(f);
    auto masked = apply_multiplier(s, [kmax](const int* k) {
        bool zero = true;
        for (int a = 0; a < 6; ++a) {
            if (std::abs(k[a]) > kmax) return complex(0.0);
            if (k[a] != 0) zero = false;
        }
        return zero ? complex(0.0) : complex(1.0);
    });
    const double norm = l2_norm(masked);
    for (auto& c : masked.c) c /= norm;
    return inverse(masked);
}

}  // namespace mixlab
