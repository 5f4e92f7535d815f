#include "mixlab/two_point.hpp"

#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

#include "mixlab/rng.hpp"

namespace mixlab {

// ---------------------------------------------------------------------------
// Tables and coefficients
// ---------------------------------------------------------------------------

TrigTables::TrigTables(int n_) : n(n_), sin_(n_), cos_(n_) {
    for (int i = 0; i < n_; ++i) {
        sin_[i] = std::sin(two_pi * i / n_);
        cos_[i] = std::cos(two_pi * i / n_);
    }
}

CoefficientSet CoefficientSet::paper(double eps, double nu) {
    CoefficientSet c;
    c.epsilon = eps;
    c.nu = nu;
    c.x = {256.0, 448.0, 488.0, 492.0};
    c.y = {384.0, 480.0, 493.0};
    c.z = {472.0, 491.0};
    return c;
}

CoefficientSet CoefficientSet::moderate(double eps, double nu) {
    CoefficientSet c = paper(eps, nu);
    for (auto& v : c.x) v /= 64.0;
    for (auto& v : c.y) v /= 64.0;
    for (auto& v : c.z) v /= 64.0;
    return c;
}

CoefficientSet CoefficientSet::preset(const std::string& name, double eps, double nu) {
    if (name == "paper") return paper(eps, nu);
    if (name == "moderate") return moderate(eps, nu);
    throw MixlabError("unknown coefficient preset: " + name);
}

SignedLog SignedLog::from_value(double v) {
    if (v == 0.0) return {};
    return {std::log(std::abs(v)), v > 0.0 ? 1 : -1};
}

SignedLog log_add(SignedLog a, SignedLog b) {
    if (a.sign == 0) return b;
    if (b.sign == 0) return a;
    if (a.log_abs < b.log_abs) std::swap(a, b);
    const double d = std::exp(b.log_abs - a.log_abs);
    if (a.sign == b.sign) return {a.log_abs + std::log1p(d), a.sign};
    const double r = 1.0 - d;
    if (r <= 0.0) return {};
    return {a.log_abs + std::log(r), a.sign};
}

// ---------------------------------------------------------------------------
// Pointwise machinery
// ---------------------------------------------------------------------------

namespace {

// Visits grid points in storage order; fn(idx, trig, i3, i4).
template <typename Fn>
void foreach_point(const TrigTables& tt, Fn&& fn) {
    const int n = tt.n;
    std::size_t idx = 0;
    TrigPoint t{};
    for (int i1 = 0; i1 < n; ++i1) {
        for (int i2 = 0; i2 < n; ++i2) {
            for (int i3 = 0; i3 < n; ++i3) {
                t.s3 = tt.sin_[i3];
                t.c3 = tt.cos_[i3];
                for (int i4 = 0; i4 < n; ++i4) {
                    t.s4 = tt.sin_[i4];
                    t.c4 = tt.cos_[i4];
                    for (int j1 = 0; j1 < n; ++j1) {
                        const int a2 = (i2 + j1) % n;
                        t.s2 = tt.sin_[a2];
                        t.c2 = tt.cos_[a2];
                        for (int j2 = 0; j2 < n; ++j2, ++idx) {
                            const int a1 = (i1 + j2) % n;
                            t.s1 = tt.sin_[a1];
                            t.c1 = tt.cos_[a1];
                            fn(idx, t, i3, i4);
                        }
                    }
                }
            }
        }
    }
}

double cell_volume(int n) {
    double v = 1.0;
    for (int i = 0; i < 6; ++i) v *= two_pi / n;
    return v;
}

}  // namespace

OpPoint eval_ops(const TrigPoint& t, double d1, double d2, double d3, double d4) {
    OpPoint o;
    o.ugrad = t.c4 * t.s2 * d1 + t.c3 * t.s1 * d2 + t.s4 * t.c2 * d3 + t.s3 * t.c1 * d4;
    o.c1a = t.c4 * t.c2 * d1 - t.s4 * t.s2 * d3;
    o.c1b = t.c3 * t.c1 * d2 - t.s3 * t.s1 * d4;
    o.s1a = t.c4 * t.s2 * d1 + t.s4 * t.c2 * d3;
    o.s1b = t.c3 * t.s1 * d2 + t.s3 * t.c1 * d4;
    o.c2a = t.s3 * t.c1 * (t.s4 * t.c2 * d1 + t.c4 * t.s2 * d3) +
            t.s4 * t.s2 * (t.s3 * t.s1 * d2 - t.c3 * t.c1 * d4);
    o.c2b = t.s3 * t.s1 * (t.s4 * t.s2 * d1 - t.c4 * t.c2 * d3) +
            t.s4 * t.c2 * (t.s3 * t.c1 * d2 + t.c3 * t.s1 * d4);
    o.s2a = t.s3 * t.c1 * (t.s4 * t.s2 * d1 - t.c4 * t.c2 * d3) -
            t.s4 * t.c2 * (t.s3 * t.s1 * d2 - t.c3 * t.c1 * d4);
    o.s2b = t.s3 * t.s1 * (t.s4 * t.c2 * d1 + t.c4 * t.s2 * d3) -
            t.s4 * t.s2 * (t.s3 * t.c1 * d2 + t.c3 * t.s1 * d4);
    o.c3a = t.c3 * t.c1 * (t.s2 * t.s2 - t.c2 * t.c2) * d1 - 2.0 * t.c4 * t.c1 * t.s1 * t.s2 * d2;
    o.c3b = t.c4 * (t.s1 * t.s1 - t.c1 * t.c1) * t.c2 * d2 - 2.0 * t.c3 * t.c2 * t.s1 * t.s2 * d1;
    return o;
}

XDerivs x_derivatives(const Spectrum6D& F) {
    return {derivative_field(F, 0), derivative_field(F, 1), derivative_field(F, 2),
            derivative_field(F, 3)};
}

XDerivs x_derivatives_of(const Spectrum6D& F, int axis) {
    return {second_derivative_field(F, 0, axis), second_derivative_field(F, 1, axis),
            second_derivative_field(F, 2, axis), second_derivative_field(F, 3, axis)};
}

XDerivs x_derivatives_of2(const Spectrum6D& F, int axis_a, int axis_b) {
    // third derivative: multiply by (i k_x)(i k_a)(i k_b)
    XDerivs out{Field6D(F.n), Field6D(F.n), Field6D(F.n), Field6D(F.n)};
    for (int x_axis = 0; x_axis < 4; ++x_axis) {
        Spectrum6D d2 = spectral_derivative(spectral_derivative(F, axis_a), axis_b);
        Spectrum6D d3 = spectral_derivative(d2, x_axis);
        Field6D* slot[4] = {&out.d1, &out.d2, &out.d3, &out.d4};
        *slot[x_axis] = inverse(d3);
    }
    return out;
}

namespace {

template <typename Pick>
VecField2 apply_vec_op(const TrigTables& tt, const XDerivs& xd, Pick pick) {
    VecField2 out{Field6D(xd.n()), Field6D(xd.n())};
    foreach_point(tt, [&](std::size_t idx, const TrigPoint& t, int, int) {
        const OpPoint o = eval_ops(t, xd.d1.v[idx], xd.d2.v[idx], xd.d3.v[idx], xd.d4.v[idx]);
        const auto [a, b] = pick(o);
        out.a.v[idx] = a;
        out.b.v[idx] = b;
    });
    return out;
}

}  // namespace

Field6D apply_u_grad(const TrigTables& tt, const XDerivs& xd) {
    Field6D out(xd.n());
    foreach_point(tt, [&](std::size_t idx, const TrigPoint& t, int, int) {
        out.v[idx] = t.c4 * t.s2 * xd.d1.v[idx] + t.c3 * t.s1 * xd.d2.v[idx] +
                     t.s4 * t.c2 * xd.d3.v[idx] + t.s3 * t.c1 * xd.d4.v[idx];
    });
    return out;
}

VecField2 apply_C1(const TrigTables& tt, const XDerivs& xd) {
    return apply_vec_op(tt, xd, [](const OpPoint& o) { return std::pair{o.c1a, o.c1b}; });
}
VecField2 apply_S1(const TrigTables& tt, const XDerivs& xd) {
    return apply_vec_op(tt, xd, [](const OpPoint& o) { return std::pair{o.s1a, o.s1b}; });
}
VecField2 apply_C2(const TrigTables& tt, const XDerivs& xd) {
    return apply_vec_op(tt, xd, [](const OpPoint& o) { return std::pair{o.c2a, o.c2b}; });
}
VecField2 apply_S2(const TrigTables& tt, const XDerivs& xd) {
    return apply_vec_op(tt, xd, [](const OpPoint& o) { return std::pair{o.s2a, o.s2b}; });
}
VecField2 apply_C3(const TrigTables& tt, const XDerivs& xd) {
    return apply_vec_op(tt, xd, [](const OpPoint& o) { return std::pair{o.c3a, o.c3b}; });
}
VecField2 apply_grad_prime(const XDerivs& xd) { return {xd.d1, xd.d2}; }

std::array<Field6D, 4> apply_M1_grad(const TrigTables& tt, const XDerivs& xd) {
    std::array<Field6D, 4> out{Field6D(xd.n()), Field6D(xd.n()), Field6D(xd.n()),
                               Field6D(xd.n())};
    foreach_point(tt, [&](std::size_t idx, const TrigPoint& t, int, int) {
        out[0].v[idx] = t.c4 * xd.d1.v[idx];
        out[1].v[idx] = t.c3 * xd.d2.v[idx];
        out[2].v[idx] = t.s4 * xd.d3.v[idx];
        out[3].v[idx] = t.s3 * xd.d4.v[idx];
    });
    return out;
}

std::array<Field6D, 4> apply_M2_grad(const TrigTables& tt, const XDerivs& xd) {
    std::array<Field6D, 4> out{Field6D(xd.n()), Field6D(xd.n()), Field6D(xd.n()),
                               Field6D(xd.n())};
    foreach_point(tt, [&](std::size_t idx, const TrigPoint& t, int, int) {
        out[0].v[idx] = t.s3 * xd.d1.v[idx];
        out[1].v[idx] = t.s4 * xd.d2.v[idx];
        out[2].v[idx] = t.s3 * xd.d3.v[idx];
        out[3].v[idx] = t.s4 * xd.d4.v[idx];
    });
    return out;
}

// ---------------------------------------------------------------------------
// Functionals
// ---------------------------------------------------------------------------

namespace {

struct OpQuadForms {
    double c1 = 0, s1 = 0, c2 = 0, s2 = 0, c3 = 0, gp = 0;  // squared norms
    double ip_gy_c1 = 0, ip_c1_c2 = 0, ip_c2_c3 = 0;
};

/// One sweep: operator norms of the derivative quadruple, plus the three Phi
/// cross terms when the y-gradient fields are supplied.
OpQuadForms op_quad_forms(const TrigTables& tt, const XDerivs& xd, const Field6D* gy1,
                          const Field6D* gy2) {
    CompensatedSum c1, s1, c2, s2, c3, gp, ip0, ip1, ip2;
    foreach_point(tt, [&](std::size_t idx, const TrigPoint& t, int, int) {
        const double d1 = xd.d1.v[idx], d2 = xd.d2.v[idx], d3 = xd.d3.v[idx], d4 = xd.d4.v[idx];
        const OpPoint o = eval_ops(t, d1, d2, d3, d4);
        c1.add(o.c1a * o.c1a + o.c1b * o.c1b);
        s1.add(o.s1a * o.s1a + o.s1b * o.s1b);
        c2.add(o.c2a * o.c2a + o.c2b * o.c2b);
        s2.add(o.s2a * o.s2a + o.s2b * o.s2b);
        c3.add(o.c3a * o.c3a + o.c3b * o.c3b);
        gp.add(d1 * d1 + d2 * d2);
        if (gy1 != nullptr) {
            ip0.add(gy1->v[idx] * o.c1a + gy2->v[idx] * o.c1b);
            ip1.add(o.c1a * o.c2a + o.c1b * o.c2b);
            ip2.add(o.c2a * o.c3a + o.c2b * o.c3b);
        }
    });
    const double cell = cell_volume(tt.n);
    OpQuadForms q;
    q.c1 = c1.value() * cell;
    q.s1 = s1.value() * cell;
    q.c2 = c2.value() * cell;
    q.s2 = s2.value() * cell;
    q.c3 = c3.value() * cell;
    q.gp = gp.value() * cell;
    q.ip_gy_c1 = ip0.value() * cell;
    q.ip_c1_c2 = ip1.value() * cell;
    q.ip_c2_c3 = ip2.value() * cell;
    return q;
}

void push_term(std::vector<FunctionalTerm>& terms, SignedLog& total, const std::string& name,
               LogCoeff coeff, double nu, double quad) {
    SignedLog t{};
    if (quad != 0.0) {
        t.log_abs = coeff.log_value(nu) + std::log(std::abs(quad));
        t.sign = quad > 0.0 ? 1 : -1;
    }
    total = log_add(total, t);
    terms.push_back({name, t, quad});
}

}  // namespace

PhiPsiValues evaluate_phi_psi(const Field6D& f, double kappa_tilde, const CoefficientSet& co) {
    const int n = f.n;
    const TrigTables tt(n);
    const double nu = co.nu;
    const Spectrum6D E = forward(f);

    const double n2_f = weighted_mode_sum(E, {}, 0);
    const double n2_gy = weighted_mode_sum(E, {4, 5}, 1);
    const double n2_lapy = weighted_mode_sum_prod(E, {4, 5}, {4, 5});
    const double n2_gp_gy = weighted_mode_sum_prod(E, {0, 1}, {4, 5});

    const XDerivs xd = x_derivatives(E);
    const Field6D gy1 = derivative_field(E, 4);
    const Field6D gy2 = derivative_field(E, 5);
    const OpQuadForms q = op_quad_forms(tt, xd, &gy1, &gy2);
    const OpQuadForms qy1 = op_quad_forms(tt, x_derivatives_of(E, 4), nullptr, nullptr);
    const OpQuadForms qy2 = op_quad_forms(tt, x_derivatives_of(E, 5), nullptr, nullptr);

    PhiPsiValues out;
    const LogCoeff one{0.0, 0.0};
    const LogCoeff nu_c{0.0, -1.0};

    // Phi
    push_term(out.phi_terms, out.phi_log, "l2/2", one.half(), nu, n2_f);
    push_term(out.phi_terms, out.phi_log, "a0/2 |grad_y f|^2", co.alpha(0).half(), nu, n2_gy);
    push_term(out.phi_terms, out.phi_log, "b0 <grad_y f, C1 f>", co.beta(0), nu, q.ip_gy_c1);
    push_term(out.phi_terms, out.phi_log, "a1/2 |C1 f|^2", co.alpha(1).half(), nu, q.c1);
    push_term(out.phi_terms, out.phi_log, "g1/2 |S1 f|^2", co.gamma(1).half(), nu, q.s1);
    push_term(out.phi_terms, out.phi_log, "b1 <C1 f, C2 f>", co.beta(1), nu, q.ip_c1_c2);
    push_term(out.phi_terms, out.phi_log, "a2/2 |C2 f|^2", co.alpha(2).half(), nu, q.c2);
    push_term(out.phi_terms, out.phi_log, "g2/2 |S2 f|^2", co.gamma(2).half(), nu, q.s2);
    push_term(out.phi_terms, out.phi_log, "b2 <C2 f, C3 f>", co.beta(2), nu, q.ip_c2_c3);
    push_term(out.phi_terms, out.phi_log, "a3/2 |grad' f|^2", co.alpha(3).half(), nu, q.gp);

    // Psi
    push_term(out.psi_terms, out.psi_log, "nu |grad_y f|^2", nu_c, nu, n2_gy);
    push_term(out.psi_terms, out.psi_log, "nu a0 |lap_y f|^2", co.alpha(0).times_nu(), nu,
              n2_lapy);
    push_term(out.psi_terms, out.psi_log, "b0 |C1 f|^2", co.beta(0), nu, q.c1);
    push_term(out.psi_terms, out.psi_log, "nu a1 |C1 grad_y f|^2", co.alpha(1).times_nu(), nu,
              qy1.c1 + qy2.c1);
    push_term(out.psi_terms, out.psi_log, "nu g1 |S1 grad_y f|^2", co.gamma(1).times_nu(), nu,
              qy1.s1 + qy2.s1);
    push_term(out.psi_terms, out.psi_log, "b1 |C2 f|^2", co.beta(1), nu, q.c2);
    push_term(out.psi_terms, out.psi_log, "nu a2 |C2 grad_y f|^2", co.alpha(2).times_nu(), nu,
              qy1.c2 + qy2.c2);
    push_term(out.psi_terms, out.psi_log, "nu g2 |S2 grad_y f|^2", co.gamma(2).times_nu(), nu,
              qy1.s2 + qy2.s2);
    push_term(out.psi_terms, out.psi_log, "b2 |C3 f|^2", co.beta(2), nu, q.c3);
    push_term(out.psi_terms, out.psi_log, "nu a3 |grad' grad_y f|^2", co.alpha(3).times_nu(), nu,
              n2_gp_gy);

    if (kappa_tilde > 0.0) {
        const double n2_gx = weighted_mode_sum(E, {0, 1, 2, 3}, 1);
        const double n2_lapx = weighted_mode_sum_prod(E, {0, 1, 2, 3}, {0, 1, 2, 3});
        const double n2_gx_gy = weighted_mode_sum_prod(E, {0, 1, 2, 3}, {4, 5});
        const double n2_gp_gx = weighted_mode_sum_prod(E, {0, 1}, {0, 1, 2, 3});
        OpQuadForms qx[4];
        for (int a = 0; a < 4; ++a) qx[a] = op_quad_forms(tt, x_derivatives_of(E, a), nullptr,
                                                          nullptr);
        auto sum4 = [&](double OpQuadForms::*m) {
            return qx[0].*m + qx[1].*m + qx[2].*m + qx[3].*m;
        };
        const LogCoeff kd{std::log(kappa_tilde) + std::log(co.delta().value(nu)), 0.0};
        push_term(out.phi_terms, out.phi_log, "k d/2 |grad_x f|^2", kd.half(), nu, n2_gx);

        const LogCoeff k{std::log(kappa_tilde), 0.0};
        auto kappa_term = [&](const std::string& name, LogCoeff c, double quad) {
            const LogCoeff merged{k.log_mantissa + c.log_mantissa, c.nu_power};
            push_term(out.psi_terms, out.psi_log, name, merged, nu, quad);
        };
        kappa_term("k |grad_x f|^2", one, n2_gx);
        kappa_term("k a0 |grad_x grad_y f|^2", co.alpha(0), n2_gx_gy);
        kappa_term("k^2 d |lap_x f|^2", LogCoeff{k.log_mantissa + co.delta().log_mantissa, 0.0},
                   n2_lapx);
        kappa_term("k a1 |C1 grad_x f|^2", co.alpha(1), sum4(&OpQuadForms::c1));
        kappa_term("k g1 |S1 grad_x f|^2", co.gamma(1), sum4(&OpQuadForms::s1));
        kappa_term("k a2 |C2 grad_x f|^2", co.alpha(2), sum4(&OpQuadForms::c2));
        kappa_term("k g2 |S2 grad_x f|^2", co.gamma(2), sum4(&OpQuadForms::s2));
        kappa_term("k a3 |grad' grad_x f|^2", co.alpha(3), n2_gp_gx);
    }

    out.phi = out.phi_log.value();
    out.psi = out.psi_log.value();
    out.phi_negative = out.phi_log.sign < 0;
    return out;
}

double lyapunov_phi(const Field6D& f, double kappa_tilde, const CoefficientSet& coeffs) {
    return evaluate_phi_psi(f, kappa_tilde, coeffs).phi;
}

double dissipation_psi(const Field6D& f, double kappa_tilde, const CoefficientSet& coeffs) {
    return evaluate_phi_psi(f, kappa_tilde, coeffs).psi;
}

double weighted_h1_norm(const Field6D& f, double kappa_tilde) {
    const int n = f.n;
    const TrigTables tt(n);
    const Spectrum6D E = forward(f);
    const double l2 = std::sqrt(weighted_mode_sum(E, {}, 0));
    const double d1 = std::sqrt(weighted_mode_sum(E, {0}, 1));
    const double d2 = std::sqrt(weighted_mode_sum(E, {1}, 1));
    const double gx = std::sqrt(weighted_mode_sum(E, {0, 1, 2, 3}, 1));
    const double gy = std::sqrt(weighted_mode_sum(E, {4, 5}, 1));
    const Field6D f3 = derivative_field(E, 2);
    const Field6D f4 = derivative_field(E, 3);
    CompensatedSum w3, w4;
    foreach_point(tt, [&](std::size_t idx, const TrigPoint& t, int, int) {
        const double w = t.s3 * t.s3 + t.s4 * t.s4;
        w3.add(w * f3.v[idx] * f3.v[idx]);
        w4.add(w * f4.v[idx] * f4.v[idx]);
    });
    const double cell = cell_volume(n);
    return l2 + d1 + d2 + std::sqrt(w3.value() * cell) + std::sqrt(w4.value() * cell) +
           std::sqrt(kappa_tilde) * gx + gy;
}

// ---------------------------------------------------------------------------
// State and integrator
// ---------------------------------------------------------------------------

Field2D uniform_density(int n) {
    Field2D rho(n);
    const double c = 1.0 / (two_pi * two_pi);
    for (auto& v : rho.v) v = c;
    return rho;
}

Field6D build_initial(const Field2D& theta0, const Field2D& rho0) {
    if (theta0.n != rho0.n) throw MixlabError("theta0 and rho0 must share a grid");
    const int n = theta0.n;
    double rho_min = rho0.v[0];
    CompensatedSum mass;
    for (double r : rho0.v) {
        rho_min = std::min(rho_min, r);
        mass.add(r);
    }
    if (rho_min < -1e-12) throw MixlabError("rho0 must be nonnegative");
    const double total = mass.value() / rho0.size() * two_pi * two_pi;
    if (std::abs(total - 1.0) > 1e-10) {
        throw MixlabError("rho0 mass " + std::to_string(total) + " differs from 1");
    }

    Field6D f(n);
    std::size_t idx = 0;
    for (int i1 = 0; i1 < n; ++i1) {
        for (int i2 = 0; i2 < n; ++i2) {
            for (int i3 = 0; i3 < n; ++i3) {
                const int p1 = (i1 - i3 + n) % n;
                const int q1 = (i1 + i3) % n;
                for (int i4 = 0; i4 < n; ++i4) {
                    const int p2 = (i2 - i4 + n) % n;
                    const int q2 = (i2 + i4) % n;
                    const double prod = theta0.at(p1, p2) * theta0.at(q1, q2);
                    for (int j1 = 0; j1 < n; ++j1) {
                        const int r2 = (n - j1) % n;
                        for (int j2 = 0; j2 < n; ++j2, ++idx) {
                            const int r1 = (n - j2) % n;
                            f.v[idx] = prod * rho0.at(r1, r2);
                        }
                    }
                }
            }
        }
    }
    return f;
}

void project_xmean(Field6D& f) {
    const int n = f.n;
    const std::size_t ny = static_cast<std::size_t>(n) * n;
    const std::size_t nx = f.size() / ny;
    std::vector<double> mean(ny, 0.0);
    for (std::size_t bx = 0; bx < nx; ++bx) {
        const double* block = f.v.data() + bx * ny;
        for (std::size_t iy = 0; iy < ny; ++iy) mean[iy] += block[iy];
    }
    for (auto& m : mean) m /= static_cast<double>(nx);
    for (std::size_t bx = 0; bx < nx; ++bx) {
        double* block = f.v.data() + bx * ny;
        for (std::size_t iy = 0; iy < ny; ++iy) block[iy] -= mean[iy];
    }
}

double max_xmean(const Field6D& f) {
    const int n = f.n;
    const std::size_t ny = static_cast<std::size_t>(n) * n;
    const std::size_t nx = f.size() / ny;
    std::vector<double> mean(ny, 0.0);
    for (std::size_t bx = 0; bx < nx; ++bx) {
        const double* block = f.v.data() + bx * ny;
        for (std::size_t iy = 0; iy < ny; ++iy) mean[iy] += block[iy];
    }
    double worst = 0.0;
    for (double m : mean) worst = std::max(worst, std::abs(m) / static_cast<double>(nx));
    return worst;
}

TwoPointState make_two_point_state(Field6D f, double kappa, double nu) {
    if (kappa < 0.0) throw MixlabError("kappa must be nonnegative");
    if (nu <= 0.0) throw MixlabError("nu must be positive");
    project_xmean(f);
    return TwoPointState{std::move(f), kappa / 4.0, nu};
}

double advective_cfl_limit_6d(int n) { return 0.5 * (two_pi / n) / std::sqrt(2.0); }

namespace {

void diffuse_6d(Spectrum6D& F, double nu, double kappa_tilde, double tau) {
    const int n = F.n;
    const int nc = F.nc();
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
                        const double kx2 = static_cast<double>(k[0]) * k[0] +
                                           static_cast<double>(k[1]) * k[1] +
                                           static_cast<double>(k[2]) * k[2] +
                                           static_cast<double>(k[3]) * k[3];
                        const double ky2_base = static_cast<double>(k[4]) * k[4];
                        for (int j5 = 0; j5 < nc; ++j5, ++idx) {
                            const double ky2 = ky2_base + static_cast<double>(j5) * j5;
                            F.c[idx] *= std::exp(-(nu * ky2 + kappa_tilde * kx2) * tau);
                        }
                    }
                }
            }
        }
    }
}

Spectrum6D advection_rhs_6d(const TrigTables& tt, const Spectrum6D& S) {
    const XDerivs xd = x_derivatives(S);
    Field6D adv(S.n);
    foreach_point(tt, [&](std::size_t idx, const TrigPoint& t, int, int) {
        adv.v[idx] = -(t.c4 * t.s2 * xd.d1.v[idx] + t.c3 * t.s1 * xd.d2.v[idx] +
                       t.s4 * t.c2 * xd.d3.v[idx] + t.s3 * t.c1 * xd.d4.v[idx]);
    });
    Spectrum6D R = forward(adv);
    apply_dealias(R);
    return R;
}

}  // namespace

void two_point_step(TwoPointState& state, double dt) {
    const int n = state.f.n;
    const TrigTables tt(n);
    Spectrum6D F = forward(state.f);
    diffuse_6d(F, state.nu, state.kappa_tilde, 0.5 * dt);

    const Spectrum6D k1 = advection_rhs_6d(tt, F);
    Spectrum6D tmp(n);
    auto axpy = [&](const Spectrum6D& base, double c, const Spectrum6D& d) {
        for (std::size_t i = 0; i < tmp.c.size(); ++i) tmp.c[i] = base.c[i] + c * d.c[i];
    };
    axpy(F, 0.5 * dt, k1);
    const Spectrum6D k2 = advection_rhs_6d(tt, tmp);
    axpy(F, 0.5 * dt, k2);
    const Spectrum6D k3 = advection_rhs_6d(tt, tmp);
    axpy(F, dt, k3);
    const Spectrum6D k4 = advection_rhs_6d(tt, tmp);
    for (std::size_t i = 0; i < F.c.size(); ++i) {
        F.c[i] += dt / 6.0 * (k1.c[i] + 2.0 * k2.c[i] + 2.0 * k3.c[i] + k4.c[i]);
    }

    diffuse_6d(F, state.nu, state.kappa_tilde, 0.5 * dt);
    state.f = inverse(F);
    if (!std::isfinite(state.f.v[0])) throw MixlabError("two-point solver produced NaN");
}

TwoPointSeries two_point_solve(TwoPointState& state, const CoefficientSet& coeffs, double dt,
                               double t_final, int record_every) {
    if (dt > advective_cfl_limit_6d(state.f.n)) {
        throw MixlabError("dt exceeds the 6D advective CFL bound");
    }
    {
        Spectrum6D F = forward(state.f);
        apply_dealias(F);
        state.f = inverse(F);
    }

    TwoPointSeries series;
    const auto steps = static_cast<std::size_t>(std::llround(t_final / dt));
    const auto cadence = static_cast<std::size_t>(std::max(1, record_every));

    double pending_phi = 0.0;
    double pending_psi = 0.0;
    bool pending = false;
    auto record = [&](double t) {
        const PhiPsiValues pp = evaluate_phi_psi(state.f, state.kappa_tilde, coeffs);
        series.times.push_back(t);
        series.l2.push_back(l2_norm_grid(state.f));
        series.phi.push_back(pp.phi);
        series.psi.push_back(pp.psi);
        series.h1w.push_back(weighted_h1_norm(state.f, state.kappa_tilde));
        series.xmean.push_back(max_xmean(state.f));
        series.gronwall_residual.push_back(std::numeric_limits<double>::quiet_NaN());
        pending_phi = pp.phi;
        pending_psi = pp.psi;
        pending = true;
    };

    for (std::size_t m = 0; m < steps; ++m) {
        if (m % cadence == 0) record(static_cast<double>(m) * dt);
        two_point_step(state, dt);
        if (pending) {
            const double phi_after = lyapunov_phi(state.f, state.kappa_tilde, coeffs);
            series.gronwall_residual.back() =
                (phi_after - pending_phi) / dt + 0.5 * pending_psi;
            pending = false;
        }
    }
    record(t_final);
    return series;
}

// ---------------------------------------------------------------------------
// Ratio brackets
// ---------------------------------------------------------------------------

RatioBracket phi_h1_ratio_bracket(int n, int samples, int kmax, const CoefficientSet& coeffs,
                                  std::uint64_t seed) {
    RatioBracket out;
    out.samples = samples;
    out.min_ratio = std::numeric_limits<double>::infinity();
    for (int i = 0; i < samples; ++i) {
        const Field6D f = random_bandlimited_6d(n, kmax, split_seed(seed, i));
        const double phi = lyapunov_phi(f, 0.0, coeffs);
        const double h1 = weighted_h1_norm(f, 0.0);
        const double ratio = phi / (h1 * h1);
        out.min_ratio = std::min(out.min_ratio, ratio);
        out.max_ratio = std::max(out.max_ratio, ratio);
    }
    return out;
}

PhiPsiRatio psi_controls_phi_ratio(int n, int samples, int kmax, const CoefficientSet& coeffs,
                                   std::uint64_t seed) {
    PhiPsiRatio out;
    out.samples = samples;
    for (int i = 0; i < samples; ++i) {
        Field6D f = random_bandlimited_6d(n, kmax, split_seed(seed, i));
        project_xmean(f);
        const PhiPsiValues pp = evaluate_phi_psi(f, 0.0, coeffs);
        if (pp.psi <= 0.0) {
            if (pp.phi > 0.0) out.violation = true;
            continue;
        }
        out.max_ratio = std::max(out.max_ratio, pp.phi / pp.psi);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Identity suite
// ---------------------------------------------------------------------------

namespace {

double norm2_grid(const Field6D& a) {
    CompensatedSum s;
    for (double v : a.v) s.add(v * v);
    return s.value();
}

double vec_norm(const VecField2& v) { return std::sqrt(norm2_grid(v.a) + norm2_grid(v.b)); }

Field6D sub(const Field6D& a, const Field6D& b) {
    Field6D out(a.n);
    for (std::size_t i = 0; i < out.size(); ++i) out.v[i] = a.v[i] - b.v[i];
    return out;
}

VecField2 sub(const VecField2& a, const VecField2& b) {
    return {sub(a.a, b.a), sub(a.b, b.b)};
}

XDerivs add_xd(const XDerivs& a, const XDerivs& b) {
    XDerivs out = a;
    for (std::size_t i = 0; i < out.d1.size(); ++i) {
        out.d1.v[i] += b.d1.v[i];
        out.d2.v[i] += b.d2.v[i];
        out.d3.v[i] += b.d3.v[i];
        out.d4.v[i] += b.d4.v[i];
    }
    return out;
}

double rel(double resid_norm, double ref_norm) {
    return resid_norm / std::max(ref_norm, 1e-300);
}

struct FieldIdentityResult {
    IdentityReport r;  // per-field values; maxima taken by the caller
};

/// Coefficient first derivative (D_j A) f = d/dy_j (A f) - A (d/dy_j f),
/// with everything routed through the transforms.
Field6D coeff_dy(const Spectrum6D& FAf, int y_axis, const Field6D& A_dyf) {
    return sub(derivative_field(FAf, y_axis), A_dyf);
}

FieldIdentityResult check_field(int n, int kmax, std::uint64_t seed) {
    FieldIdentityResult res;
    IdentityReport& r = res.r;
    r.fields = 1;
    const TrigTables tt(n);

    const Field6D f = random_bandlimited_6d(n, kmax, seed);
    const Spectrum6D F = forward(f);
    const XDerivs xd = x_derivatives(F);

    const VecField2 C1 = apply_C1(tt, xd);
    const VecField2 S1 = apply_S1(tt, xd);
    const VecField2 C2 = apply_C2(tt, xd);
    const VecField2 S2 = apply_S2(tt, xd);
    const VecField2 C3 = apply_C3(tt, xd);
    const Field6D ug = apply_u_grad(tt, xd);

    // skew symmetry <u.grad f, f> = 0
    {
        CompensatedSum ip, nf;
        for (std::size_t i = 0; i < f.size(); ++i) {
            ip.add(ug.v[i] * f.v[i]);
            nf.add(f.v[i] * f.v[i]);
        }
        r.skew_ugrad = std::abs(ip.value()) / std::max(nf.value(), 1e-300);
    }

    const Spectrum6D Fug = forward(ug);
    const XDerivs xd_ug = x_derivatives(Fug);
    const XDerivs xd_y1 = x_derivatives_of(F, 4);
    const XDerivs xd_y2 = x_derivatives_of(F, 5);
    const VecField2 C1y1 = apply_C1(tt, xd_y1);
    const VecField2 C1y2 = apply_C1(tt, xd_y2);

    // (i) defining commutator: C1 f = grad_y(u.grad f) - u.grad(grad_y f)
    {
        const Field6D ra = sub(sub(derivative_field(Fug, 4), apply_u_grad(tt, xd_y1)), C1.a);
        const Field6D rb = sub(sub(derivative_field(Fug, 5), apply_u_grad(tt, xd_y2)), C1.b);
        r.defining_c1 = rel(vec_norm({ra, rb}), vec_norm(C1));
    }

    const Spectrum6D FC1a = forward(C1.a);
    const Spectrum6D FC1b = forward(C1.b);

    // (ii) div_y C1 = -u.grad_x (the coefficient part of the divergence)
    {
        Field6D div = sub(derivative_field(FC1a, 4), C1y1.a);
        const Field6D part2 = sub(derivative_field(FC1b, 5), C1y2.b);
        for (std::size_t i = 0; i < div.size(); ++i) div.v[i] += part2.v[i] + ug.v[i];
        r.div_c1 = rel(std::sqrt(norm2_grid(div)), std::sqrt(norm2_grid(ug)));
    }

    // (iv) S1 component relations
    {
        const VecField2 dC1{coeff_dy(FC1a, 4, C1y1.a), coeff_dy(FC1b, 5, C1y2.b)};
        VecField2 resid = dC1;
        for (std::size_t i = 0; i < resid.a.size(); ++i) {
            resid.a.v[i] += S1.a.v[i];
            resid.b.v[i] += S1.b.v[i];
        }
        r.s1_from_c1 = rel(vec_norm(resid), vec_norm(S1));
    }
    const Spectrum6D FS1a = forward(S1.a);
    const Spectrum6D FS1b = forward(S1.b);
    const VecField2 S1y1 = apply_S1(tt, xd_y1);
    const VecField2 S1y2 = apply_S1(tt, xd_y2);
    {
        const VecField2 dS1{coeff_dy(FS1a, 4, S1y1.a), coeff_dy(FS1b, 5, S1y2.b)};
        const VecField2 resid = sub(dS1, C1);
        r.c1_from_s1 = rel(vec_norm(resid), vec_norm(C1));
    }

    // (v) [(C1)_i, (S1)_i] = 0, componentwise scalar operators
    {
        const XDerivs xd_S1a = x_derivatives(FS1a);
        const XDerivs xd_S1b = x_derivatives(FS1b);
        const XDerivs xd_C1a = x_derivatives(FC1a);
        const XDerivs xd_C1b = x_derivatives(FC1b);
        const VecField2 c1_of_s1{apply_C1(tt, xd_S1a).a, apply_C1(tt, xd_S1b).b};
        const VecField2 s1_of_c1{apply_S1(tt, xd_C1a).a, apply_S1(tt, xd_C1b).b};
        const VecField2 resid = sub(c1_of_s1, s1_of_c1);
        r.commute_c1s1 = rel(vec_norm(resid), vec_norm(c1_of_s1));

        // R2: [C1, u.grad] f - C2 f = (c4 c2 (C1f)_2 + c3 s1 (S1f)_1,
        //                              c3 c1 (C1f)_1 + c4 s2 (S1f)_2)
        const VecField2 C1_ug = apply_C1(tt, xd_ug);
        const Field6D ug_C1a = apply_u_grad(tt, xd_C1a);
        const Field6D ug_C1b = apply_u_grad(tt, xd_C1b);
        Field6D res_a(n), res_b(n);
        foreach_point(tt, [&](std::size_t i, const TrigPoint& t, int, int) {
            const double lhs_a = C1_ug.a.v[i] - ug_C1a.v[i];
            const double lhs_b = C1_ug.b.v[i] - ug_C1b.v[i];
            const double r2a = t.c4 * t.c2 * C1.b.v[i] + t.c3 * t.s1 * S1.a.v[i];
            const double r2b = t.c3 * t.c1 * C1.a.v[i] + t.c4 * t.s2 * S1.b.v[i];
            res_a.v[i] = lhs_a - C2.a.v[i] - r2a;
            res_b.v[i] = lhs_b - C2.b.v[i] - r2b;
        });
        r.r2_residual = rel(vec_norm({res_a, res_b}),
                            std::max(vec_norm(C2), vec_norm(C1_ug)));

        // Q2: [S1, u.grad] f - (-1,1)^T (S2 f)_1 = Q2 f with
        // Q2 f = (-c3 s1 (C1f)_1 + c4 s2 (C1f)_2, c3 s1 (C1f)_1 - c4 s2 (C1f)_2)
        const VecField2 S1_ug = apply_S1(tt, xd_ug);
        const Field6D ug_S1a = apply_u_grad(tt, xd_S1a);
        const Field6D ug_S1b = apply_u_grad(tt, xd_S1b);
        foreach_point(tt, [&](std::size_t i, const TrigPoint& t, int, int) {
            const double lhs_a = S1_ug.a.v[i] - ug_S1a.v[i];
            const double lhs_b = S1_ug.b.v[i] - ug_S1b.v[i];
            const double q2a = -t.c3 * t.s1 * C1.a.v[i] + t.c4 * t.s2 * C1.b.v[i];
            const double q2b = t.c3 * t.s1 * C1.a.v[i] - t.c4 * t.s2 * C1.b.v[i];
            res_a.v[i] = lhs_a + S2.a.v[i] - q2a;
            res_b.v[i] = lhs_b - S2.a.v[i] - q2b;
        });
        r.q2_residual = rel(vec_norm({res_a, res_b}),
                            std::max(vec_norm(S2), vec_norm(S1_ug)));
    }

    // Pointwise Pythagoras + the M2 lower bound + R3/C4 ratios
    {
        const XDerivs xd_C2a = x_derivatives(forward(C2.a));
        const XDerivs xd_C2b = x_derivatives(forward(C2.b));
        const VecField2 C2_ug = apply_C2(tt, xd_ug);
        const Field6D ug_C2a = apply_u_grad(tt, xd_C2a);
        const Field6D ug_C2b = apply_u_grad(tt, xd_C2b);

        const XDerivs xd_C3a = x_derivatives(forward(C3.a));
        const XDerivs xd_C3b = x_derivatives(forward(C3.b));
        const VecField2 C3_ug = apply_C3(tt, xd_ug);
        const Field6D ug_C3a = apply_u_grad(tt, xd_C3a);
        const Field6D ug_C3b = apply_u_grad(tt, xd_C3b);
        const XDerivs xd_d1 = x_derivatives_of(F, 0);
        const XDerivs xd_d2 = x_derivatives_of(F, 1);
        const Field6D ug_d1 = apply_u_grad(tt, xd_d1);
        const Field6D ug_d2 = apply_u_grad(tt, xd_d2);

        double worst_pyth = 0.0;
        double min_margin = std::numeric_limits<double>::infinity();
        double scale = 0.0;
        double r3_ratio = 0.0;
        double c4_ratio = 0.0;
        foreach_point(tt, [&](std::size_t i, const TrigPoint& t, int, int) {
            const double d1 = xd.d1.v[i], d2 = xd.d2.v[i], d3 = xd.d3.v[i], d4 = xd.d4.v[i];
            const double m1sq = t.c4 * t.c4 * d1 * d1 + t.c3 * t.c3 * d2 * d2 +
                                t.s4 * t.s4 * d3 * d3 + t.s3 * t.s3 * d4 * d4;
            const double m2sq = t.s3 * t.s3 * d1 * d1 + t.s4 * t.s4 * d2 * d2 +
                                t.s3 * t.s3 * d3 * d3 + t.s4 * t.s4 * d4 * d4;
            const double c1sq = C1.a.v[i] * C1.a.v[i] + C1.b.v[i] * C1.b.v[i];
            const double s1sq = S1.a.v[i] * S1.a.v[i] + S1.b.v[i] * S1.b.v[i];
            const double c2sq = C2.a.v[i] * C2.a.v[i] + C2.b.v[i] * C2.b.v[i];
            const double s2sq = S2.a.v[i] * S2.a.v[i] + S2.b.v[i] * S2.b.v[i];
            worst_pyth = std::max(
                worst_pyth, std::abs(m1sq - c1sq - s1sq) / std::max(m1sq, 1e-300));
            const double rhs = c2sq + s2sq + 3.0 * m1sq;
            min_margin = std::min(min_margin, rhs - m2sq);
            scale = std::max(scale, rhs);

            // R3 f = [C2, u.grad] f - C3 f
            const double r3a = C2_ug.a.v[i] - ug_C2a.v[i] - C3.a.v[i];
            const double r3b = C2_ug.b.v[i] - ug_C2b.v[i] - C3.b.v[i];
            const double denom = std::sqrt(m1sq) + std::sqrt(m2sq) + 1e-13;
            r3_ratio = std::max(r3_ratio, std::sqrt(r3a * r3a + r3b * r3b) / denom);

            // fourth order: |[C3,u.grad]f| + |[grad',u.grad]f|
            const double f4a = C3_ug.a.v[i] - ug_C3a.v[i];
            const double f4b = C3_ug.b.v[i] - ug_C3b.v[i];
            const double g4a = xd_ug.d1.v[i] - ug_d1.v[i];
            const double g4b = xd_ug.d2.v[i] - ug_d2.v[i];
            const double gp = std::sqrt(d1 * d1 + d2 * d2);
            const double denom4 = std::sqrt(m2sq) + gp + 1e-13;
            c4_ratio = std::max(c4_ratio, (std::sqrt(f4a * f4a + f4b * f4b) +
                                           std::sqrt(g4a * g4a + g4b * g4b)) /
                                              denom4);
        });
        r.pythagoras_m1 = worst_pyth;
        r.l1_min_margin = min_margin;
        r.l1_scale = scale;
        r.r3_ratio = r3_ratio;
        r.c4_ratio = c4_ratio;
    }

    // (iii) coefficient y-Laplacians. For an operator A with trig
    // coefficients, (Lap_y^coeff A) f = Lap_y(Af) - A(Lap_y f)
    //   - 2 sum_j [ d/dy_j (A d/dy_j f) - A d^2/dy_j^2 f ].
    {
        const XDerivs xdd_y1 = x_derivatives_of2(F, 4, 4);
        const XDerivs xdd_y2 = x_derivatives_of2(F, 5, 5);
        const XDerivs xd_lap = add_xd(xdd_y1, xdd_y2);

        auto coeff_lap = [&](const VecField2& Af, const Spectrum6D& FAa, const Spectrum6D& FAb,
                             const VecField2& Ay1, const VecField2& Ay2, const VecField2& Add1,
                             const VecField2& Add2, const VecField2& Alap) {
            VecField2 out{Field6D(n), Field6D(n)};
            const Field6D lap_a = inverse(spectral_derivative(spectral_derivative(FAa, 4), 4));
            const Field6D lap_a2 = inverse(spectral_derivative(spectral_derivative(FAa, 5), 5));
            const Field6D lap_b = inverse(spectral_derivative(spectral_derivative(FAb, 4), 4));
            const Field6D lap_b2 = inverse(spectral_derivative(spectral_derivative(FAb, 5), 5));
            const Field6D dy1_Ay1a = derivative_field(forward(Ay1.a), 4);
            const Field6D dy2_Ay2a = derivative_field(forward(Ay2.a), 5);
            const Field6D dy1_Ay1b = derivative_field(forward(Ay1.b), 4);
            const Field6D dy2_Ay2b = derivative_field(forward(Ay2.b), 5);
            for (std::size_t i = 0; i < out.a.size(); ++i) {
                out.a.v[i] = lap_a.v[i] + lap_a2.v[i] - Alap.a.v[i] -
                             2.0 * (dy1_Ay1a.v[i] - Add1.a.v[i] + dy2_Ay2a.v[i] - Add2.a.v[i]);
                out.b.v[i] = lap_b.v[i] + lap_b2.v[i] - Alap.b.v[i] -
                             2.0 * (dy1_Ay1b.v[i] - Add1.b.v[i] + dy2_Ay2b.v[i] - Add2.b.v[i]);
            }
            (void)Af;
            return out;
        };

        const VecField2 C1dd1 = apply_C1(tt, xdd_y1);
        const VecField2 C1dd2 = apply_C1(tt, xdd_y2);
        const VecField2 C1lap = apply_C1(tt, xd_lap);
        const VecField2 lapC1 =
            coeff_lap(C1, FC1a, FC1b, C1y1, C1y2, C1dd1, C1dd2, C1lap);
        VecField2 resid{Field6D(n), Field6D(n)};
        for (std::size_t i = 0; i < resid.a.size(); ++i) {
            resid.a.v[i] = lapC1.a.v[i] + C1.a.v[i];
            resid.b.v[i] = lapC1.b.v[i] + C1.b.v[i];
        }
        r.lap_c1 = rel(vec_norm(resid), vec_norm(C1));

        // C2: componentwise, (d/dy_i)^2 applied to component i only.
        const Spectrum6D FC2a = forward(C2.a);
        const Spectrum6D FC2b = forward(C2.b);
        const VecField2 C2y1 = apply_C2(tt, xd_y1);
        const VecField2 C2y2 = apply_C2(tt, xd_y2);
        const VecField2 C2dd1 = apply_C2(tt, xdd_y1);
        const VecField2 C2dd2 = apply_C2(tt, xdd_y2);
        const Field6D d2a = inverse(spectral_derivative(spectral_derivative(FC2a, 4), 4));
        const Field6D d2b = inverse(spectral_derivative(spectral_derivative(FC2b, 5), 5));
        const Field6D dy1_C2y1a = derivative_field(forward(C2y1.a), 4);
        const Field6D dy2_C2y2b = derivative_field(forward(C2y2.b), 5);
        Field6D res_a(n), res_b(n);
        for (std::size_t i = 0; i < res_a.size(); ++i) {
            const double diag_a =
                d2a.v[i] - 2.0 * (dy1_C2y1a.v[i] - C2dd1.a.v[i]) - C2dd1.a.v[i];
            const double diag_b =
                d2b.v[i] - 2.0 * (dy2_C2y2b.v[i] - C2dd2.b.v[i]) - C2dd2.b.v[i];
            res_a.v[i] = diag_a + C2.a.v[i];
            res_b.v[i] = diag_b + C2.b.v[i];
        }
        r.lap_c2_diag = rel(vec_norm({res_a, res_b}), vec_norm(C2));

        // C3: full coefficient Laplacian; compare against -3 (as stated) and
        // -5, and report the measured Rayleigh quotient.
        const Spectrum6D FC3a = forward(C3.a);
        const Spectrum6D FC3b = forward(C3.b);
        const VecField2 C3y1 = apply_C3(tt, xd_y1);
        const VecField2 C3y2 = apply_C3(tt, xd_y2);
        const VecField2 C3dd1 = apply_C3(tt, xdd_y1);
        const VecField2 C3dd2 = apply_C3(tt, xdd_y2);
        const VecField2 C3lap = apply_C3(tt, xd_lap);
        const VecField2 lapC3 =
            coeff_lap(C3, FC3a, FC3b, C3y1, C3y2, C3dd1, C3dd2, C3lap);
        VecField2 res3{Field6D(n), Field6D(n)};
        VecField2 res5{Field6D(n), Field6D(n)};
        CompensatedSum ray_num, ray_den;
        for (std::size_t i = 0; i < res3.a.size(); ++i) {
            res3.a.v[i] = lapC3.a.v[i] + 3.0 * C3.a.v[i];
            res3.b.v[i] = lapC3.b.v[i] + 3.0 * C3.b.v[i];
            res5.a.v[i] = lapC3.a.v[i] + 5.0 * C3.a.v[i];
            res5.b.v[i] = lapC3.b.v[i] + 5.0 * C3.b.v[i];
            ray_num.add(lapC3.a.v[i] * C3.a.v[i] + lapC3.b.v[i] * C3.b.v[i]);
            ray_den.add(C3.a.v[i] * C3.a.v[i] + C3.b.v[i] * C3.b.v[i]);
        }
        r.lap_c3_minus3 = rel(vec_norm(res3), vec_norm(C3));
        r.lap_c3_minus5 = rel(vec_norm(res5), vec_norm(C3));
        r.lap_c3_rayleigh = ray_num.value() / std::max(ray_den.value(), 1e-300);
    }

    return res;
}

}  // namespace

IdentityReport run_identity_suite(int n, int n_fields, int kmax, std::uint64_t seed,
                                  int threads) {
    IdentityReport total;
    total.l1_min_margin = std::numeric_limits<double>::infinity();
    total.lap_c3_rayleigh = 0.0;
    std::mutex mu;
    std::atomic<int> next{0};
    auto worker = [&]() {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= n_fields) return;
            FieldIdentityResult res = check_field(n, kmax, split_seed(seed, i));
            std::lock_guard<std::mutex> lock(mu);
            auto mx = [](double& a, double b) { a = std::max(a, b); };
            mx(total.defining_c1, res.r.defining_c1);
            mx(total.div_c1, res.r.div_c1);
            mx(total.lap_c1, res.r.lap_c1);
            mx(total.lap_c2_diag, res.r.lap_c2_diag);
            mx(total.lap_c3_minus3, res.r.lap_c3_minus3);
            mx(total.lap_c3_minus5, res.r.lap_c3_minus5);
            mx(total.s1_from_c1, res.r.s1_from_c1);
            mx(total.c1_from_s1, res.r.c1_from_s1);
            mx(total.commute_c1s1, res.r.commute_c1s1);
            mx(total.pythagoras_m1, res.r.pythagoras_m1);
            mx(total.r2_residual, res.r.r2_residual);
            mx(total.q2_residual, res.r.q2_residual);
            mx(total.skew_ugrad, res.r.skew_ugrad);
            mx(total.r3_ratio, res.r.r3_ratio);
            mx(total.c4_ratio, res.r.c4_ratio);
            mx(total.l1_scale, res.r.l1_scale);
            total.l1_min_margin = std::min(total.l1_min_margin, res.r.l1_min_margin);
            // Rayleigh quotients agree across fields; keep the last one.
            total.lap_c3_rayleigh = res.r.lap_c3_rayleigh;
            total.fields += 1;
        }
    };
    std::vector<std::thread> pool;
    const int nw = std::max(1, std::min(threads, n_fields));
    pool.reserve(static_cast<std::size_t>(nw));
    for (int w = 0; w < nw; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    return total;
}

}  // namespace mixlab
