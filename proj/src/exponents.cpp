#include "mixlab/exponents.hpp"

#include <algorithm>
#include <stdexcept>

#include <boost/multiprecision/cpp_int.hpp>

#include "mixlab/common.hpp"

namespace mixlab {

namespace {

using Rat = boost::multiprecision::cpp_rational;
using Int = boost::multiprecision::cpp_int;

// Variable order: x0 x1 x2 x3 y0 y1 y2 z1 z2
enum : int { X0, X1, X2, X3, Y0, Y1, Y2, Z1, Z2 };

std::vector<ExponentConstraint> build_constraints() {
    std::vector<ExponentConstraint> cs;
    auto add = [&](const std::string& name, std::array<long long, 9> c, bool chain) {
        cs.push_back({name, c, chain});
    };
    // chain ordering
    add("x0 >= 1", {1, 0, 0, 0, 0, 0, 0, 0, 0}, true);
    add("y0 >= 1 + x0", {-1, 0, 0, 0, 1, 0, 0, 0, 0}, true);
    add("x1 >= 1 + y0", {0, 1, 0, 0, -1, 0, 0, 0, 0}, true);
    add("z1 >= 1 + x1", {0, -1, 0, 0, 0, 0, 0, 1, 0}, true);
    add("y1 >= 1 + z1", {0, 0, 0, 0, 0, 1, 0, -1, 0}, true);
    add("x2 >= 1 + y1", {0, 0, 1, 0, 0, -1, 0, 0, 0}, true);
    add("z2 >= 1 + x2", {0, 0, -1, 0, 0, 0, 0, 0, 1}, true);
    add("x3 >= 1 + z2", {0, 0, 0, 1, 0, 0, 0, 0, -1}, true);
    add("y2 >= 1 + x3", {0, 0, 0, -1, 0, 0, 1, 0, 0}, true);
    // coupling
    add("2x0 >= 1 + y0", {2, 0, 0, 0, -1, 0, 0, 0, 0}, false);
    add("2y0 >= 1 + y1", {0, 0, 0, 0, 2, -1, 0, 0, 0}, false);
    add("2x1 >= 1 + y0 + y1", {0, 2, 0, 0, -1, -1, 0, 0, 0}, false);
    add("2x2 >= 1 + y1 + y2", {0, 0, 2, 0, 0, -1, -1, 0, 0}, false);
    add("2y0 >= 1 + x0 + x1", {-1, -1, 0, 0, 2, 0, 0, 0, 0}, false);
    add("2y1 >= 1 + x1 + x2", {0, -1, -1, 0, 0, 2, 0, 0, 0}, false);
    add("2y2 >= 1 + x2 + x3", {0, 0, -1, -1, 0, 0, 2, 0, 0}, false);
    add("2y1 >= 1 + y0 + y2", {0, 0, 0, 0, -1, 2, -1, 0, 0}, false);
    add("2x1 >= 1 + y0 + z1", {0, 2, 0, 0, -1, 0, 0, -1, 0}, false);
    add("2z1 >= 1 + x1 + x2", {0, -1, -1, 0, 0, 0, 0, 2, 0}, false);
    add("2z2 >= 1 + x2 + y2", {0, 0, -1, 0, 0, 0, -1, 0, 2}, false);
    return cs;
}

// ---------------------------------------------------------------------------
// Exact rational simplex (two-phase, Bland's rule), for
//   minimize c.x  s.t.  A x >= b, x >= 0.
// Problem sizes here are tiny (<= 10 variables, <= 29 rows).
// ---------------------------------------------------------------------------

struct LpResult {
    bool feasible = false;
    std::vector<Rat> x;
    Rat objective;
};

class Simplex {
public:
    Simplex(const std::vector<std::vector<Rat>>& A, const std::vector<Rat>& b,
            const std::vector<Rat>& c)
        : m_(A.size()), n_(c.size()) {
        // columns: n structural, m surplus, m artificial, then rhs
        cols_ = n_ + 2 * m_ + 1;
        tab_.assign(m_, std::vector<Rat>(cols_, 0));
        basis_.resize(m_);
        for (std::size_t i = 0; i < m_; ++i) {
            for (std::size_t j = 0; j < n_; ++j) tab_[i][j] = A[i][j];
            tab_[i][n_ + i] = -1;           // surplus
            tab_[i][n_ + m_ + i] = 1;       // artificial
            tab_[i][cols_ - 1] = b[i];      // b >= 0 by construction
            basis_[i] = n_ + m_ + i;
        }
        cost_.assign(cols_ - 1, Rat(0));
        for (std::size_t j = 0; j < n_; ++j) cost_[j] = c[j];
    }

    LpResult solve() {
        // phase 1: minimize the artificial sum
        std::vector<Rat> phase1(cols_ - 1, Rat(0));
        for (std::size_t j = n_ + m_; j < cols_ - 1; ++j) phase1[j] = 1;
        run(phase1, cols_ - 1);
        Rat art = 0;
        for (std::size_t i = 0; i < m_; ++i) {
            if (basis_[i] >= n_ + m_) art += tab_[i][cols_ - 1];
        }
        LpResult res;
        if (art != 0) return res;
        // drive leftover artificials out of the basis where possible
        for (std::size_t i = 0; i < m_; ++i) {
            if (basis_[i] < n_ + m_) continue;
            for (std::size_t j = 0; j < n_ + m_; ++j) {
                if (tab_[i][j] != 0) {
                    pivot(i, j);
                    break;
                }
            }
        }
        // phase 2 over structural + surplus columns only
        run(cost_, n_ + m_);
        res.feasible = true;
        res.x.assign(n_, Rat(0));
        for (std::size_t i = 0; i < m_; ++i) {
            if (basis_[i] < n_) res.x[basis_[i]] = tab_[i][cols_ - 1];
        }
        res.objective = 0;
        for (std::size_t j = 0; j < n_; ++j) res.objective += cost_[j] * res.x[j];
        return res;
    }

private:
    void run(const std::vector<Rat>& d, std::size_t ncols) {
        for (int guard = 0; guard < 100000; ++guard) {
            // reduced costs r_j = d_j - sum_i d_basis(i) * T(i,j)
            std::size_t enter = ncols;
            for (std::size_t j = 0; j < ncols; ++j) {
                Rat r = j < d.size() ? d[j] : Rat(0);
                for (std::size_t i = 0; i < m_; ++i) {
                    const std::size_t bj = basis_[i];
                    const Rat db = bj < d.size() ? d[bj] : Rat(0);
                    if (db != 0) r -= db * tab_[i][j];
                }
                if (r < 0) {
                    enter = j;  // Bland: first improving index
                    break;
                }
            }
            if (enter == ncols) return;  // optimal
            std::size_t leave = m_;
            Rat best;
            for (std::size_t i = 0; i < m_; ++i) {
                if (tab_[i][enter] <= 0) continue;
                const Rat ratio = tab_[i][cols_ - 1] / tab_[i][enter];
                if (leave == m_ || ratio < best ||
                    (ratio == best && basis_[i] < basis_[leave])) {
                    leave = i;
                    best = ratio;
                }
            }
            if (leave == m_) throw MixlabError("LP unbounded");
            pivot(leave, enter);
        }
        throw MixlabError("simplex iteration guard tripped");
    }

    void pivot(std::size_t row, std::size_t col) {
        const Rat p = tab_[row][col];
        for (auto& v : tab_[row]) v /= p;
        for (std::size_t i = 0; i < m_; ++i) {
            if (i == row || tab_[i][col] == 0) continue;
            const Rat f = tab_[i][col];
            for (std::size_t j = 0; j < cols_; ++j) tab_[i][j] -= f * tab_[row][j];
        }
        basis_[row] = col;
    }

    std::size_t m_, n_, cols_;
    std::vector<std::vector<Rat>> tab_;
    std::vector<std::size_t> basis_;
    std::vector<Rat> cost_;
};

long long ceil_to_ll(const Rat& q) {
    const Int num = numerator(q);
    const Int den = denominator(q);  // positive by normalization
    Int quot = num / den;
    if (num % den != 0 && num > 0) quot += 1;
    return quot.convert_to<long long>();
}

/// Monotone repair: raise each constraint's head variable to the least value
/// satisfying it; iterate to the fixpoint. Heads have coefficient +1 or +2
/// and every loop passes through a head of weight 2, so the iteration
/// contracts and terminates.
std::array<long long, 9> propagate(std::array<long long, 9> v) {
    const auto& cs = exponent_constraints();
    for (int rounds = 0; rounds < 100000; ++rounds) {
        bool changed = false;
        for (const auto& c : cs) {
            int head = -1;
            long long head_coef = 0;
            long long rest = 0;
            for (int i = 0; i < 9; ++i) {
                if (c.coeff[i] > 0) {
                    head = i;
                    head_coef = c.coeff[i];
                } else {
                    rest += -c.coeff[i] * v[i];
                }
            }
            const long long need = 1 + rest;  // head_coef * v[head] >= need
            const long long target = (need + head_coef - 1) / head_coef;
            if (v[head] < target) {
                v[head] = target;
                changed = true;
            }
        }
        if (!changed) return v;
    }
    throw MixlabError("exponent propagation did not converge");
}

}  // namespace

const std::vector<ExponentConstraint>& exponent_constraints() {
    static const std::vector<ExponentConstraint> cs = build_constraints();
    return cs;
}

long long ExponentAssignment::max_exponent() const {
    const auto a = as_array();
    return *std::max_element(a.begin(), a.end());
}

long long ExponentAssignment::sum() const {
    long long s = 0;
    for (long long v : as_array()) s += v;
    return s;
}

ExponentCheck check_exponent_system(const ExponentAssignment& a) {
    ExponentCheck out;
    const auto v = a.as_array();
    for (const auto& c : exponent_constraints()) {
        long long lhs = 0;
        for (int i = 0; i < 9; ++i) lhs += c.coeff[i] * v[i];
        if (lhs < 1) {
            out.violated.push_back(c.name);
        } else if (lhs == 1) {
            out.tight.push_back(c.name);
            if (!c.chain) out.tight_coupling.push_back(c.name);
        }
    }
    out.pass = out.violated.empty();
    return out;
}

ExponentAssignment propagate_least_feasible() {
    return ExponentAssignment::from_array(propagate({0, 0, 0, 0, 0, 0, 0, 0, 0}));
}

MinimizeResult minimize_exponents(ExponentObjective objective) {
    const auto& cs = exponent_constraints();
    const bool minimax = objective == ExponentObjective::max_exponent;
    const std::size_t nvars = minimax ? 10 : 9;  // optional bound variable t

    std::vector<std::vector<Rat>> A;
    std::vector<Rat> b;
    for (const auto& c : cs) {
        std::vector<Rat> row(nvars, 0);
        for (int i = 0; i < 9; ++i) row[i] = c.coeff[i];
        A.push_back(std::move(row));
        b.emplace_back(1);
    }
    std::vector<Rat> cost(nvars, 0);
    if (minimax) {
        for (int i = 0; i < 9; ++i) {
            std::vector<Rat> row(nvars, 0);
            row[9] = 1;
            row[i] = -1;
            A.push_back(std::move(row));  // t - v_i >= 0
            b.emplace_back(0);
        }
        cost[9] = 1;
    } else {
        for (int i = 0; i < 9; ++i) cost[i] = 1;
    }

    const LpResult lp = Simplex(A, b, cost).solve();
    if (!lp.feasible) throw MixlabError("exponent LP infeasible (cannot happen)");

    std::array<long long, 9> rounded{};
    for (int i = 0; i < 9; ++i) rounded[i] = std::max(0ll, ceil_to_ll(lp.x[i]));
    const auto repaired = propagate(rounded);

    MinimizeResult res;
    res.assignment = ExponentAssignment::from_array(repaired);
    res.objective = minimax ? res.assignment.max_exponent() : res.assignment.sum();
    res.verified = check_exponent_system(res.assignment).pass;
    res.lp_value = lp.objective.str();
    return res;
}

}  // namespace mixlab
