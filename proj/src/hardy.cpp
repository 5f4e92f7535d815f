#include "mixlab/hardy.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "mixlab/common.hpp"
#include "mixlab/rng.hpp"
#include "mixlab/spectral.hpp"

namespace mixlab {

namespace {

// Weighted stiffness of int_0^pi sin^2(x) (H')^2 dx for pi-periodic
// H = sum a_m cos(2mx) + b_m sin(2mx): the cos and sin blocks decouple into
// identical tridiagonal forms  pi * [ sum m^2 a_m^2 - sum m(m+1) a_m a_{m+1} ],
// against the mass  (pi/2) sum a_m^2.  Hence C = 1 / (2 lambda_min(T)).
double weighted_constant_from_modes(int modes, bool& singular) {
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(modes, modes);
    for (int m = 1; m <= modes; ++m) {
        T(m - 1, m - 1) = static_cast<double>(m) * m;
        if (m < modes) {
            T(m - 1, m) = -0.5 * m * (m + 1);
            T(m, m - 1) = T(m - 1, m);
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
    const double lmin = es.eigenvalues()(0);
    if (lmin <= 1e-10) {
        singular = true;
        return 0.0;
    }
    return 1.0 / (2.0 * lmin);
}

}  // namespace

Hardy1DResult hardy_poincare_1d(int n) {
    if (n < 64) throw MixlabError("hardy_poincare_1d needs n >= 64");
    Hardy1DResult out;
    out.n = n;
    const int modes = n / 2 - 1;

    // Unweighted constant on 2pi-periodic functions: mass vs plain stiffness,
    // diag(m^2) in the Fourier basis.
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(modes, modes);
    for (int m = 1; m <= modes; ++m) A(m - 1, m - 1) = static_cast<double>(m) * m;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
    out.unweighted_constant = 1.0 / es.eigenvalues()(0);

    out.weighted_constant = weighted_constant_from_modes(modes, out.singular);
    return out;
}

double hardy_weight_sq(double u1, double u2) {
    const double c1 = std::cos(u1), s1 = std::sin(u1);
    const double c22 = std::cos(2.0 * u2), s22 = std::sin(2.0 * u2);
    return c1 * c1 * c22 * c22 + 0.25 * s1 * s1 * s22 * s22;
}

Hardy2DResult hardy_poincare_2d(int n, int samples, std::uint64_t seed) {
    Hardy2DResult out;
    out.n = n;
    out.samples = samples;

    Field2D w2(n);
    const double h = two_pi / n;
    CompensatedSum w2_mean;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            w2.at(i, j) = hardy_weight_sq(h * i, h * j);
            w2_mean.add(w2.at(i, j));
        }
    }
    out.const_field_ratio = w2_mean.value() / static_cast<double>(w2.size());

    out.min_ratio = std::numeric_limits<double>::infinity();
    for (int s = 0; s < samples; ++s) {
        const Field2D g = random_bandlimited_2d(n, 6, split_seed(seed, s));
        const Spectrum2D gs = forward(g);
        const double grad2 = [&] {
            double acc = 0.0;
            for (int axis = 0; axis < 2; ++axis) {
                const double gn = l2_norm(spectral_derivative(gs, axis));
                acc += gn * gn;
            }
            return acc;
        }();
        CompensatedSum wgg, gg;
        for (std::size_t i = 0; i < g.size(); ++i) {
            wgg.add(w2.v[i] * g.v[i] * g.v[i]);
            gg.add(g.v[i] * g.v[i]);
        }
        const double cell = two_pi * two_pi / static_cast<double>(g.size());
        const double ratio = (wgg.value() * cell + grad2) / (gg.value() * cell);
        out.min_ratio = std::min(out.min_ratio, ratio);
    }
    return out;
}

}  // namespace mixlab
