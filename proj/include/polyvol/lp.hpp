#pragma once

// Dense two-phase primal simplex: Dantzig pricing, Bland's rule on stalls.
//
// Every polytope oracle that is not a plain ratio test goes through here:
// V/Z membership, V/Z chords, Chebyshev balls and the V-intersection system.
// The problems are small and dense, so a full tableau is kept.

#include "polyvol/core.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace polyvol {

enum class LPStatus { optimal, infeasible, unbounded };

/// maximize objective·x subject to
///   eq_rows·x = eq_rhs, ineq_rows·x <= ineq_rhs, lower <= x <= upper.
/// Empty `lower`/`upper` mean -inf/+inf for every variable.
template <typename Scalar>
struct LinearProgram {
    Vec<Scalar> objective;
    Mat<Scalar> eq_rows;
    Vec<Scalar> eq_rhs;
    Mat<Scalar> ineq_rows;
    Vec<Scalar> ineq_rhs;
    Vec<Scalar> lower;
    Vec<Scalar> upper;
    // Optional crash basis: variables flagged here with both bounds finite
    // start at their upper bound instead of the lower one.
    std::vector<bool> start_at_upper;

    explicit LinearProgram(Index d = 0)
        : objective(Vec<Scalar>::Zero(d)), eq_rows(0, d), eq_rhs(0), ineq_rows(0, d), ineq_rhs(0)
    {
    }

    Index dimension() const { return objective.size(); }

    void add_eq(const Vec<Scalar>& row, Scalar rhs) { append(eq_rows, eq_rhs, row, rhs); }
    void add_ineq(const Vec<Scalar>& row, Scalar rhs) { append(ineq_rows, ineq_rhs, row, rhs); }

    void set_bounds(Scalar lo, Scalar hi)
    {
        lower = Vec<Scalar>::Constant(dimension(), lo);
        upper = Vec<Scalar>::Constant(dimension(), hi);
    }

private:
    static void append(Mat<Scalar>& rows, Vec<Scalar>& rhs, const Vec<Scalar>& row, Scalar b)
    {
        require(row.size() == rows.cols(), "LinearProgram: row dimension mismatch");
        rows.conservativeResize(rows.rows() + 1, Eigen::NoChange);
        rhs.conservativeResize(rhs.size() + 1);
        rows.row(rows.rows() - 1) = row.transpose();
        rhs(rhs.size() - 1) = b;
    }
};

template <typename Scalar>
struct LPResult {
    LPStatus status = LPStatus::infeasible;
    Vec<Scalar> solution;          // present iff optimal
    Scalar objective_value = 0;
    Vec<Scalar> dual_values;       // multipliers of ineq rows, >= 0
    Vec<Scalar> eq_dual_values;    // multipliers of eq rows, free sign
    Scalar phase1_value = 0;       // sum of artificials left after phase I
    std::size_t iterations = 0;

    bool optimal() const { return status == LPStatus::optimal; }
};

struct LPTolerances {
    double feasibility = 1e-9;
    double pivot = 1e-10;
};

namespace detail {

// Tableau in the row-flipped standard form  T x~ = rhs, 0 <= x~ <= cap.
// Finite capacities are handled by the bounded-variable rule: a column at its
// upper bound is complemented (x~ -> cap - x~) so every nonbasic column sits
// at zero.
template <typename Scalar>
class SimplexTableau {
public:
    SimplexTableau(Mat<Scalar> rows, Vec<Scalar> rhs, Vec<Scalar> cap, Index n_struct, Index n_slack,
                   LPTolerances tol)
        : m_(rows.rows()), n_struct_(n_struct), n_slack_(n_slack), tol_(tol)
    {
        const Index n = n_struct_ + n_slack_ + m_;
        tab_ = Mat<Scalar>::Zero(m_, n + 1);
        sign_.resize(m_);
        for (Index i = 0; i < m_; ++i) {
            Scalar s = rhs(i) < 0 ? Scalar(-1) : Scalar(1);
            sign_[i] = s;
            tab_.row(i).head(n_struct_ + n_slack_) = s * rows.row(i);
            tab_(i, n_struct_ + n_slack_ + i) = 1;
            tab_(i, n) = s * rhs(i);
        }
        cap_ = Vec<Scalar>::Constant(n, std::numeric_limits<Scalar>::infinity());
        cap_.head(cap.size()) = cap;
        flipped_.assign(static_cast<std::size_t>(n), false);
        basis_.resize(m_);
        for (Index i = 0; i < m_; ++i) basis_[i] = n_struct_ + n_slack_ + i;
    }

    Index columns() const { return n_struct_ + n_slack_ + m_; }

    // Puts flagged nonbasic columns at their upper bound before phase I and
    // re-orients rows so the artificials stay nonnegative.
    void start_at_upper(const std::vector<bool>& flags)
    {
        const Index n = columns();
        for (Index j = 0; j < static_cast<Index>(flags.size()) && j < n; ++j)
            if (flags[std::size_t(j)] && std::isfinite(cap_(j)) && !flipped_[std::size_t(j)]) complement(j);
        for (Index i = 0; i < m_; ++i) {
            if (tab_(i, n) < Scalar(0)) {
                tab_.row(i) = -tab_.row(i);
                tab_(i, n_struct_ + n_slack_ + i) = 1;
                sign_[std::size_t(i)] = -sign_[std::size_t(i)];
            }
        }
    }

    bool is_artificial(Index j) const { return j >= n_struct_ + n_slack_; }

    // Maximizes cost·x from the current basis. Returns false if unbounded.
    bool optimize(const Vec<Scalar>& cost, bool allow_artificial, std::size_t& iters, std::size_t cap)
    {
        const Index n = columns();
        Vec<Scalar> reduced = reduced_costs(cost);
        const Scalar inf = std::numeric_limits<Scalar>::infinity();
        int degenerate_run = 0;
        while (true) {
            // Dantzig pricing; Bland's rule once pivots stall, which rules out cycling
            const bool bland = degenerate_run >= kBlandAfter;
            Index enter = -1;
            Scalar most = -Scalar(tol_.feasibility);
            for (Index j = 0; j < n; ++j) {
                if (!allow_artificial && is_artificial(j)) continue;
                if (reduced(j) < most) {
                    enter = j;
                    if (bland) break;
                    most = reduced(j);
                }
            }
            if (enter < 0) return true;

            Index leave = -1;
            bool leave_at_upper = false;
            Scalar best = inf;
            for (Index i = 0; i < m_; ++i) {
                Scalar a = tab_(i, enter);
                Scalar ratio;
                bool upper;
                if (a > Scalar(tol_.pivot)) {
                    ratio = tab_(i, n) / a;
                    upper = false;
                } else if (a < -Scalar(tol_.pivot) && std::isfinite(cap_(basis_[i]))) {
                    ratio = (cap_(basis_[i]) - tab_(i, n)) / -a;
                    upper = true;
                } else {
                    continue;
                }
                if (ratio < best || (ratio == best && basis_[i] < basis_[leave])) {
                    best = ratio;
                    leave = i;
                    leave_at_upper = upper;
                }
            }
            if (++iters > cap) throw NumericalError("solve_lp: iteration cap exceeded");
            if (std::min(best, cap_(enter)) > Scalar(0))
                degenerate_run = 0;
            else
                ++degenerate_run;
            if (cap_(enter) <= best) {
                if (!std::isfinite(cap_(enter))) {
                    unbounded_column_ = enter;
                    return false;
                }
                complement(enter);
                reduced(enter) = -reduced(enter);
                continue;
            }
            const Index out = basis_[leave];
            pivot(leave, enter);
            Scalar f = reduced(enter);
            reduced -= f * tab_.row(leave).head(n).transpose();
            if (leave_at_upper) {
                complement(out);
                reduced(out) = -reduced(out);
            }
        }
    }

    Vec<Scalar> reduced_costs(const Vec<Scalar>& cost) const
    {
        const Index n = columns();
        Vec<Scalar> c = effective(cost);
        Vec<Scalar> cb(m_);
        for (Index i = 0; i < m_; ++i) cb(i) = c(basis_[i]);
        Vec<Scalar> r = (cb.transpose() * tab_.leftCols(n)).transpose() - c;
        return r;
    }

    void pivot(Index row, Index col)
    {
        tab_.row(row) /= tab_(row, col);
        for (Index i = 0; i < m_; ++i) {
            if (i == row) continue;
            Scalar f = tab_(i, col);
            if (f != Scalar(0)) tab_.row(i) -= f * tab_.row(row);
        }
        basis_[row] = col;
    }

    // After phase I: move zero-level artificials out of the basis where a
    // real column can take their place; rows where none can are redundant.
    void expel_artificials()
    {
        for (Index i = 0; i < m_; ++i) {
            if (!is_artificial(basis_[i])) continue;
            for (Index j = 0; j < n_struct_ + n_slack_; ++j) {
                if (std::abs(tab_(i, j)) > Scalar(tol_.pivot) * 100 && !is_basic(j)) {
                    pivot(i, j);
                    break;
                }
            }
        }
    }

    Vec<Scalar> primal() const
    {
        const Index n = columns();
        Vec<Scalar> x = Vec<Scalar>::Zero(n);
        for (Index i = 0; i < m_; ++i) x(basis_[i]) = std::max(Scalar(0), tab_(i, n));
        for (Index j = 0; j < n; ++j)
            if (flipped_[std::size_t(j)]) x(j) = cap_(j) - x(j);
        return x;
    }

    // Row multipliers y = c_B B^-1 in the caller's (unflipped) orientation.
    Vec<Scalar> duals(const Vec<Scalar>& cost) const
    {
        Vec<Scalar> r = reduced_costs(cost);
        Vec<Scalar> y(m_);
        for (Index i = 0; i < m_; ++i) y(i) = sign_[i] * r(n_struct_ + n_slack_ + i);
        return y;
    }

    Index rows() const { return m_; }
    Index n_struct() const { return n_struct_; }
    Index n_slack() const { return n_slack_; }
    Index unbounded_column() const { return unbounded_column_; }

private:
    static constexpr int kBlandAfter = 20;

    bool is_basic(Index j) const
    {
        for (Index b : basis_)
            if (b == j) return true;
        return false;
    }

    Vec<Scalar> effective(const Vec<Scalar>& cost) const
    {
        Vec<Scalar> c = cost;
        for (Index j = 0; j < c.size(); ++j)
            if (flipped_[std::size_t(j)]) c(j) = -c(j);
        return c;
    }

    // x~_j -> cap_j - x~_j for a nonbasic column.
    void complement(Index j)
    {
        const Index n = columns();
        tab_.col(n) -= cap_(j) * tab_.col(j);
        tab_.col(j) = -tab_.col(j);
        flipped_[std::size_t(j)] = !flipped_[std::size_t(j)];
    }

    Index m_, n_struct_, n_slack_;
    LPTolerances tol_;
    Mat<Scalar> tab_;
    Vec<Scalar> cap_;
    std::vector<bool> flipped_;
    std::vector<Scalar> sign_;
    std::vector<Index> basis_;
    Index unbounded_column_ = -1;
};

}  // namespace detail

template <typename Scalar>
LPResult<Scalar> solve_lp(const LinearProgram<Scalar>& lp, LPTolerances tol = {})
{
    const Index d = lp.dimension();
    require(lp.eq_rows.cols() == d && lp.ineq_rows.cols() == d, "solve_lp: row dimension mismatch");
    require(lp.eq_rhs.size() == lp.eq_rows.rows() && lp.ineq_rhs.size() == lp.ineq_rows.rows(),
            "solve_lp: rhs size mismatch");
    require(lp.lower.size() == 0 || lp.lower.size() == d, "solve_lp: lower bound size mismatch");
    require(lp.upper.size() == 0 || lp.upper.size() == d, "solve_lp: upper bound size mismatch");

    const Scalar inf = std::numeric_limits<Scalar>::infinity();
    LPResult<Scalar> result;

    // x_j = offset_j + sum over mapped columns of (+-1) * x~_col, x~ >= 0.
    struct VarMap {
        Index col;
        Scalar sign;
        Index col2 = -1;  // second column for free variables (negative part)
    };
    std::vector<VarMap> map(d);
    Vec<Scalar> offset = Vec<Scalar>::Zero(d);
    std::vector<std::pair<Index, Scalar>> bounded;  // (column, capacity)
    Index n_struct = 0;
    for (Index j = 0; j < d; ++j) {
        Scalar lo = lp.lower.size() ? lp.lower(j) : -inf;
        Scalar hi = lp.upper.size() ? lp.upper(j) : inf;
        if (lo > hi) {
            result.status = LPStatus::infeasible;
            result.phase1_value = lo - hi;
            return result;
        }
        if (std::isfinite(lo)) {
            map[j] = {n_struct++, Scalar(1)};
            offset(j) = lo;
            if (std::isfinite(hi)) bounded.emplace_back(map[j].col, hi - lo);
        } else if (std::isfinite(hi)) {
            map[j] = {n_struct++, Scalar(-1)};
            offset(j) = hi;
        } else {
            map[j] = {n_struct, Scalar(1), n_struct + 1};
            n_struct += 2;
        }
    }

    auto transform_row = [&](const auto& row) {
        Vec<Scalar> out = Vec<Scalar>::Zero(n_struct);
        for (Index j = 0; j < d; ++j) {
            out(map[j].col) += map[j].sign * row(j);
            if (map[j].col2 >= 0) out(map[j].col2) -= row(j);
        }
        return out;
    };

    const Index n_eq = lp.eq_rows.rows();
    const Index n_ineq = lp.ineq_rows.rows();
    const Index m = n_eq + n_ineq;
    Mat<Scalar> rows = Mat<Scalar>::Zero(m, n_struct + n_ineq);
    Vec<Scalar> rhs(m);
    for (Index i = 0; i < n_eq; ++i) {
        rows.row(i).head(n_struct) = transform_row(lp.eq_rows.row(i).transpose()).transpose();
        rhs(i) = lp.eq_rhs(i) - lp.eq_rows.row(i).dot(offset);
    }
    for (Index i = 0; i < n_ineq; ++i) {
        rows.row(n_eq + i).head(n_struct) = transform_row(lp.ineq_rows.row(i).transpose()).transpose();
        rows(n_eq + i, n_struct + i) = 1;
        rhs(n_eq + i) = lp.ineq_rhs(i) - lp.ineq_rows.row(i).dot(offset);
    }
    Vec<Scalar> caps = Vec<Scalar>::Constant(n_struct + n_ineq, inf);
    for (const auto& [col, c] : bounded) caps(col) = c;

    detail::SimplexTableau<Scalar> tab(rows, rhs, caps, n_struct, n_ineq, tol);
    if (!lp.start_at_upper.empty()) {
        require(static_cast<Index>(lp.start_at_upper.size()) == d, "solve_lp: start hint size mismatch");
        std::vector<bool> flags(static_cast<std::size_t>(n_struct), false);
        for (Index j = 0; j < d; ++j)
            if (lp.start_at_upper[std::size_t(j)] && map[j].sign > 0 && map[j].col2 < 0) flags[std::size_t(map[j].col)] = true;
        tab.start_at_upper(flags);
    }
    const Index n = tab.columns();
    const std::size_t cap = 50 * static_cast<std::size_t>(n + m);

    Vec<Scalar> phase1 = Vec<Scalar>::Zero(n);
    phase1.tail(m).setConstant(Scalar(-1));
    tab.optimize(phase1, true, result.iterations, cap);
    Vec<Scalar> x1 = tab.primal();
    result.phase1_value = x1.tail(m).sum();
    if (result.phase1_value > Scalar(tol.feasibility)) {
        result.status = LPStatus::infeasible;
        return result;
    }
    tab.expel_artificials();

    Vec<Scalar> cost = Vec<Scalar>::Zero(n);
    cost.head(n_struct) = transform_row(lp.objective);
    if (!tab.optimize(cost, false, result.iterations, cap)) {
        result.status = LPStatus::unbounded;
        return result;
    }

    Vec<Scalar> xt = tab.primal();
    Vec<Scalar> x = offset;
    for (Index j = 0; j < d; ++j) {
        x(j) += map[j].sign * xt(map[j].col);
        if (map[j].col2 >= 0) x(j) -= xt(map[j].col2);
    }
    Vec<Scalar> y = tab.duals(cost);
    result.status = LPStatus::optimal;
    result.solution = x;
    result.objective_value = lp.objective.dot(x);
    result.eq_dual_values = y.head(n_eq);
    result.dual_values = y.segment(n_eq, n_ineq);
    return result;
}

template <typename Scalar>
struct FeasibilityResult {
    bool feasible = false;
    Vec<Scalar> point;
    Scalar phase1_value = 0;
};

/// Finds some point satisfying the constraints of `lp` (its objective is ignored).
template <typename Scalar>
FeasibilityResult<Scalar> feasible_point(LinearProgram<Scalar> lp, LPTolerances tol = {})
{
    lp.objective.setZero();
    LPResult<Scalar> r = solve_lp(lp, tol);
    FeasibilityResult<Scalar> out;
    out.phase1_value = r.phase1_value;
    if (r.status == LPStatus::optimal) {
        out.feasible = true;
        out.point = r.solution;
    }
    return out;
}

/// Largest absolute constraint violation of x; bounds included.
template <typename Scalar>
Scalar max_residual(const LinearProgram<Scalar>& lp, const Vec<Scalar>& x)
{
    Scalar worst = 0;
    if (lp.eq_rows.rows()) worst = std::max(worst, (lp.eq_rows * x - lp.eq_rhs).cwiseAbs().maxCoeff());
    if (lp.ineq_rows.rows()) worst = std::max(worst, (lp.ineq_rows * x - lp.ineq_rhs).maxCoeff());
    if (lp.lower.size()) worst = std::max(worst, (lp.lower - x).maxCoeff());
    if (lp.upper.size()) worst = std::max(worst, (x - lp.upper).maxCoeff());
    return worst;
}

}  // namespace polyvol
