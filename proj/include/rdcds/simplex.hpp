#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "rdcds/error.hpp"
#include "rdcds/rational.hpp"

namespace rdcds {

enum class Sense { GE, LE };

struct LPConstraint {
    std::vector<Rational> a;
    Sense sense = Sense::GE;
    Rational b;
};

/// minimize c^T x subject to the constraints and x >= 0.
struct LPProblem {
    int nvars = 0;
    std::vector<int> varServer;  // server index of each variable (informational)
    std::vector<Rational> c;
    std::vector<LPConstraint> rows;
    bool sampled = false;  // true when only a subset of the covering rows was generated

    long long count(Sense s) const {
        return std::count_if(rows.begin(), rows.end(), [s](const LPConstraint& r) { return r.sense == s; });
    }
};

struct LPSolution {
    Rational value;
    std::vector<Rational> x;
    std::vector<Rational> y;  // multipliers of the >=-normalized rows (empty on the primal route)
    bool dualRoute = false;
};

namespace detail {

/// Dense tableau for  max d^T z  s.t.  M z = h, z >= 0, started from a feasible basis whose
/// columns form an identity. Bland's rule on both entering and leaving choices.
class Tableau {
public:
    Tableau(std::vector<std::vector<mpq_class>> M, std::vector<mpq_class> h, std::vector<mpq_class> d,
            std::vector<int> basis)
        : T_(std::move(M)), h_(std::move(h)), d_(std::move(d)), basis_(std::move(basis)) {
        const std::size_t m = T_.size();
        const std::size_t n = d_.size();
        r_ = d_;
        for (std::size_t i = 0; i < m; ++i) {
            const mpq_class& db = d_[basis_[i]];
            if (db == 0) continue;
            for (std::size_t j = 0; j < n; ++j) r_[j] -= db * T_[i][j];
        }
    }

    /// Returns false when the objective is unbounded.
    bool solve(const std::vector<char>* allowed = nullptr) {
        const std::size_t m = T_.size();
        const std::size_t n = d_.size();
        while (true) {
            std::size_t enter = n;
            for (std::size_t j = 0; j < n; ++j)
                if (r_[j] > 0 && (!allowed || (*allowed)[j])) {
                    enter = j;
                    break;
                }
            if (enter == n) return true;
            std::size_t leave = m;
            mpq_class best;
            for (std::size_t i = 0; i < m; ++i) {
                if (T_[i][enter] <= 0) continue;
                mpq_class ratio = h_[i] / T_[i][enter];
                if (leave == m || ratio < best || (ratio == best && basis_[i] < basis_[leave])) {
                    leave = i;
                    best = ratio;
                }
            }
            if (leave == m) return false;
            pivot(leave, enter);
        }
    }

    void pivot(std::size_t row, std::size_t col) {
        const std::size_t m = T_.size();
        const std::size_t n = d_.size();
        const mpq_class p = T_[row][col];
        for (std::size_t j = 0; j < n; ++j)
            if (T_[row][j] != 0) T_[row][j] /= p;
        h_[row] /= p;
        for (std::size_t i = 0; i < m; ++i) {
            if (i == row || T_[i][col] == 0) continue;
            const mpq_class f = T_[i][col];
            for (std::size_t j = 0; j < n; ++j)
                if (T_[row][j] != 0) T_[i][j] -= f * T_[row][j];
            h_[i] -= f * h_[row];
        }
        if (r_[col] != 0) {
            const mpq_class f = r_[col];
            for (std::size_t j = 0; j < n; ++j)
                if (T_[row][j] != 0) r_[j] -= f * T_[row][j];
        }
        basis_[row] = static_cast<int>(col);
    }

    std::vector<mpq_class> values() const {
        std::vector<mpq_class> z(d_.size());
        for (std::size_t i = 0; i < basis_.size(); ++i) z[basis_[i]] = h_[i];
        return z;
    }
    const std::vector<mpq_class>& reduced() const { return r_; }
    std::vector<int>& basis() { return basis_; }
    std::vector<std::vector<mpq_class>>& rows() { return T_; }
    std::vector<mpq_class>& rhs() { return h_; }
    void set_objective(std::vector<mpq_class> d) {
        d_ = std::move(d);
        r_ = d_;
        for (std::size_t i = 0; i < T_.size(); ++i) {
            const mpq_class db = d_[basis_[i]];
            if (db == 0) continue;
            for (std::size_t j = 0; j < d_.size(); ++j) r_[j] -= db * T_[i][j];
        }
    }

private:
    std::vector<std::vector<mpq_class>> T_;
    std::vector<mpq_class> h_;
    std::vector<mpq_class> d_;
    std::vector<mpq_class> r_;
    std::vector<int> basis_;
};

struct GeRow {
    std::vector<mpq_class> a;
    mpq_class b;
    bool operator<(const GeRow& o) const {
        if (b != o.b) return b < o.b;
        return a < o.a;
    }
};

/// All rows as a x >= b, duplicates removed.
inline std::vector<GeRow> normalized_rows(const LPProblem& p) {
    std::set<GeRow> seen;
    std::vector<GeRow> out;
    for (const auto& r : p.rows) {
        if (static_cast<int>(r.a.size()) != p.nvars) throw Error(ErrorCode::ShapeMismatch, "LP row width");
        GeRow g;
        const int s = r.sense == Sense::GE ? 1 : -1;
        for (const auto& v : r.a) g.a.push_back(s * v.get());
        g.b = s * r.b.get();
        if (seen.insert(g).second) out.push_back(std::move(g));
    }
    return out;
}

inline bool primal_feasible(const std::vector<GeRow>& rows, const std::vector<mpq_class>& x) {
    for (const auto& v : x)
        if (v < 0) return false;
    for (const auto& r : rows) {
        mpq_class s = 0;
        for (std::size_t j = 0; j < x.size(); ++j) s += r.a[j] * x[j];
        if (s < r.b) return false;
    }
    return true;
}

/// Dual route for c >= 0: max b^T y, A^T y + s = c, y, s >= 0 from the slack basis.
/// Primal x is read from the slack reduced costs; both certificates are re-checked.
inline LPSolution solve_via_dual(const LPProblem& p, const std::vector<GeRow>& rows) {
    const std::size_t n = p.nvars, m = rows.size();
    std::vector<std::vector<mpq_class>> M(n, std::vector<mpq_class>(m + n));
    std::vector<mpq_class> h(n), d(m + n);
    std::vector<int> basis(n);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = 0; k < m; ++k) M[j][k] = rows[k].a[j];
        M[j][m + j] = 1;
        h[j] = p.c[j].get();
        basis[j] = static_cast<int>(m + j);
    }
    for (std::size_t k = 0; k < m; ++k) d[k] = rows[k].b;
    Tableau tab(std::move(M), std::move(h), std::move(d), std::move(basis));
    if (!tab.solve()) throw Error(ErrorCode::Infeasible, "LP infeasible (dual unbounded)");

    const auto z = tab.values();
    std::vector<mpq_class> x(n);
    for (std::size_t j = 0; j < n; ++j) x[j] = -tab.reduced()[m + j];
    mpq_class dual_obj = 0, primal_obj = 0;
    for (std::size_t k = 0; k < m; ++k) dual_obj += rows[k].b * z[k];
    for (std::size_t j = 0; j < n; ++j) primal_obj += p.c[j].get() * x[j];
    if (!primal_feasible(rows, x) || primal_obj != dual_obj)
        throw Error(ErrorCode::Infeasible, "internal: simplex certificates disagree");

    LPSolution sol;
    sol.value = Rational(primal_obj);
    for (const auto& v : x) sol.x.emplace_back(v);
    for (std::size_t k = 0; k < m; ++k) sol.y.emplace_back(z[k]);
    sol.dualRoute = true;
    return sol;
}

/// Two-phase primal simplex on a x - s = b (rows sign-flipped so b >= 0) with artificials.
inline LPSolution solve_primal(const LPProblem& p, const std::vector<GeRow>& rows) {
    const std::size_t n = p.nvars, m = rows.size();
    const std::size_t cols = n + 2 * m;  // x, surplus, artificial
    std::vector<std::vector<mpq_class>> M(m, std::vector<mpq_class>(cols));
    std::vector<mpq_class> h(m), d1(cols);
    std::vector<int> basis(m);
    for (std::size_t k = 0; k < m; ++k) {
        const int s = rows[k].b < 0 ? -1 : 1;
        for (std::size_t j = 0; j < n; ++j) M[k][j] = s * rows[k].a[j];
        M[k][n + k] = -s;
        M[k][n + m + k] = 1;
        h[k] = s * rows[k].b;
        basis[k] = static_cast<int>(n + m + k);
        d1[n + m + k] = -1;
    }
    Tableau tab(std::move(M), std::move(h), d1, std::move(basis));
    tab.solve();
    mpq_class art = 0;
    for (std::size_t j = n + m; j < cols; ++j) art += tab.values()[j];
    if (art != 0) throw Error(ErrorCode::Infeasible, "LP infeasible");
    // Drive remaining (zero-valued) artificials out of the basis where possible.
    for (std::size_t i = 0; i < m; ++i) {
        if (tab.basis()[i] < static_cast<int>(n + m)) continue;
        for (std::size_t j = 0; j < n + m; ++j)
            if (tab.rows()[i][j] != 0) {
                tab.pivot(i, j);
                break;
            }
    }
    std::vector<mpq_class> d2(cols);
    for (std::size_t j = 0; j < n; ++j) d2[j] = -p.c[j].get();
    tab.set_objective(d2);
    std::vector<char> allowed(cols, 1);
    for (std::size_t j = n + m; j < cols; ++j) allowed[j] = 0;
    if (!tab.solve(&allowed)) throw Error(ErrorCode::Infeasible, "LP unbounded below");
    const auto z = tab.values();
    std::vector<mpq_class> x(z.begin(), z.begin() + n);
    if (!primal_feasible(rows, x)) throw Error(ErrorCode::Infeasible, "internal: primal solution infeasible");
    LPSolution sol;
    mpq_class obj = 0;
    for (std::size_t j = 0; j < n; ++j) obj += p.c[j].get() * x[j];
    sol.value = Rational(obj);
    for (const auto& v : x) sol.x.emplace_back(v);
    return sol;
}

} // namespace detail

/// Exact LP optimum. Nonnegative objectives go through the dual (few rows, many columns);
/// anything else falls back to a two-phase primal simplex.
inline LPSolution lp_solve(const LPProblem& p) {
    if (static_cast<int>(p.c.size()) != p.nvars) throw Error(ErrorCode::ShapeMismatch, "LP objective width");
    const auto rows = detail::normalized_rows(p);
    const bool nonneg = std::all_of(p.c.begin(), p.c.end(), [](const Rational& v) { return v.sign() >= 0; });
    return nonneg ? detail::solve_via_dual(p, rows) : detail::solve_primal(p, rows);
}

inline Rational lp_min(const LPProblem& p) { return lp_solve(p).value; }

} // namespace rdcds
