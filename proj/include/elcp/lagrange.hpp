#pragma once

// Lagrange multiplier of the restricted two-sample empirical likelihood.
// The multiplier solves the p-dimensional estimating equation
//
//   g(lambda) = sum_{i<=k} z_i / (th + lambda' z_i)
//             - sum_{j>k}  z_j / (1 - th - lambda' z_j) = 0,
//
// which is the stationarity condition of the concave log-EL objective
//
//   f(lambda) = 2 sum_{i<=k} log(1 + lambda' z_i / th)
//             + 2 sum_{j>k}  log(1 - lambda' z_j / (1 - th)).
//
// Damped Newton from lambda = 0: full step, halved until the iterate stays
// strictly inside the feasible polytope (margin 1e-10) and f does not
// decrease.

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <utility>

#include "elcp/errors.hpp"
#include "elcp/score.hpp"

namespace elcp {

struct LagrangeSolution {
    Eigen::VectorXd lambda;
    double residual_norm = 0.0;     // max-norm of g at lambda
    Eigen::VectorXd implied_q1;     // per-segment probabilities, each sums to 1
    Eigen::VectorXd implied_q2;
    int iterations = 0;
    bool converged = false;
};

namespace detail {

inline constexpr double kFeasibilityMargin = 1e-10;

// Per-observation denominators: d1_i = th + lambda'z_i, d2_j = 1 - th - lambda'z_j.
inline std::pair<Eigen::VectorXd, Eigen::VectorXd> segment_denominators(
    const ScoreSet& s, const Eigen::VectorXd& lambda) {
    const Eigen::VectorXd t = s.Z * lambda;
    const double th = s.theta();
    Eigen::VectorXd d1 = t.head(s.k).array() + th;
    Eigen::VectorXd d2 = (1.0 - th) - t.tail(s.n() - s.k).array();
    return {std::move(d1), std::move(d2)};
}

inline bool strictly_feasible(const Eigen::VectorXd& d1, const Eigen::VectorXd& d2) {
    return d1.minCoeff() > kFeasibilityMargin && d2.minCoeff() > kFeasibilityMargin;
}

inline double log_el_objective(const ScoreSet& s, const Eigen::VectorXd& d1,
                               const Eigen::VectorXd& d2) {
    const double th = s.theta();
    return 2.0 * (d1.array() / th).log().sum() + 2.0 * (d2.array() / (1.0 - th)).log().sum();
}

}  // namespace detail

// g(lambda); the solver drives its max-norm below tol.
inline Eigen::VectorXd constraint_residual(const ScoreSet& s, const Eigen::VectorXd& lambda) {
    if (lambda.size() != s.p()) throw DimensionError("lambda length does not match scores");
    auto [d1, d2] = detail::segment_denominators(s, lambda);
    Eigen::VectorXd w(s.n());
    w.head(s.k) = d1.cwiseInverse();
    w.tail(s.n() - s.k) = -d2.cwiseInverse();
    return s.Z.transpose() * w;
}

inline LagrangeSolution solve_lagrange(const ScoreSet& s, double tol = 1e-8,
                                       int max_iter = 100) {
    if (!(tol > 0.0) || max_iter < 1) throw Error("solve_lagrange: invalid tol/max_iter");
    const int n = s.n(), p = s.p(), k = s.k;

    LagrangeSolution sol;
    sol.lambda = Eigen::VectorXd::Zero(p);

    const bool seg1_zero = s.Z.topRows(k).isZero(0.0);
    const bool seg2_zero = s.Z.bottomRows(n - k).isZero(0.0);
    if (seg1_zero || seg2_zero) {
        Eigen::VectorXd g0 = constraint_residual(s, sol.lambda);
        if (!g0.isZero(0.0))
            throw DegenerateSegmentError("a score segment is identically zero");
        sol.residual_norm = 0.0;
        sol.converged = true;
        sol.implied_q1 = Eigen::VectorXd::Constant(k, 1.0 / k);
        sol.implied_q2 = Eigen::VectorXd::Constant(n - k, 1.0 / (n - k));
        return sol;
    }

    auto [d1, d2] = detail::segment_denominators(s, sol.lambda);
    Eigen::VectorXd g = constraint_residual(s, sol.lambda);
    double f = detail::log_el_objective(s, d1, d2);
    sol.residual_norm = g.lpNorm<Eigen::Infinity>();

    for (int it = 0; it < max_iter && sol.residual_norm > tol; ++it) {
        sol.iterations = it + 1;

        // -J = Z1' diag(d1^-2) Z1 + Z2' diag(d2^-2) Z2, Newton step solves (-J) d = g.
        Eigen::MatrixXd A1 = s.Z.topRows(k).array().colwise() / d1.array();
        Eigen::MatrixXd A2 = s.Z.bottomRows(n - k).array().colwise() / d2.array();
        Eigen::MatrixXd H = A1.transpose() * A1 + A2.transpose() * A2;

        Eigen::VectorXd dir;
        Eigen::LLT<Eigen::MatrixXd> llt(H);
        if (llt.info() == Eigen::Success) {
            dir = llt.solve(g);
        } else {
            Eigen::LDLT<Eigen::MatrixXd> ldlt(H);
            if (ldlt.info() != Eigen::Success) break;
            dir = ldlt.solve(g);
        }
        if (!dir.allFinite()) break;

        double step = 1.0;
        bool accepted = false;
        for (int h = 0; h < 60; ++h, step *= 0.5) {
            const Eigen::VectorXd cand = sol.lambda + step * dir;
            auto [c1, c2] = detail::segment_denominators(s, cand);
            if (!detail::strictly_feasible(c1, c2)) continue;
            const double fc = detail::log_el_objective(s, c1, c2);
            if (!std::isfinite(fc) || fc < f - 1e-10 * (1.0 + std::abs(f))) continue;
            sol.lambda = cand;
            d1 = std::move(c1);
            d2 = std::move(c2);
            f = fc;
            accepted = true;
            break;
        }
        if (!accepted) break;

        g = constraint_residual(s, sol.lambda);
        sol.residual_norm = g.lpNorm<Eigen::Infinity>();
    }

    sol.converged = sol.residual_norm <= tol;

    // Implied probabilities q_i ~ 1/(k + n lambda'z_i), q_j ~ 1/(n - k - n lambda'z_j),
    // normalized within each segment.
    Eigen::VectorXd raw1 = (d1.array() * n).inverse();
    Eigen::VectorXd raw2 = (d2.array() * n).inverse();
    sol.implied_q1 = raw1 / raw1.sum();
    sol.implied_q2 = raw2 / raw2.sum();
    return sol;
}

// Fast multiplier: solve V lambda = psi through an existing factorization.
inline Eigen::VectorXd lambda_approx(const Eigen::VectorXd& psi,
                                     const Eigen::LLT<Eigen::MatrixXd>& v_chol) {
    if (v_chol.info() != Eigen::Success)
        throw SingularDesignError("lambda_approx: factorization invalid");
    return v_chol.solve(psi);
}

inline Eigen::VectorXd lambda_approx(const Eigen::VectorXd& psi, const Eigen::MatrixXd& V) {
    Eigen::LLT<Eigen::MatrixXd> llt(V);
    if (llt.info() != Eigen::Success)
        throw SingularDesignError("lambda_approx: V is not positive definite");
    return llt.solve(psi);
}

// EL_nk at a given multiplier:
//   2 sum_{i<=k} log(1 + (n/k) lambda'z_i) + 2 sum_{j>k} log(1 - (n/(n-k)) lambda'z_j).
inline double el_statistic(const ScoreSet& s, const Eigen::VectorXd& lambda) {
    if (lambda.size() != s.p()) throw DimensionError("lambda length does not match scores");
    auto [d1, d2] = detail::segment_denominators(s, lambda);
    if (d1.minCoeff() <= 0.0 || d2.minCoeff() <= 0.0)
        throw InfeasibleMultiplierError("el_statistic: multiplier outside the log domain");
    return detail::log_el_objective(s, d1, d2);
}

}  // namespace elcp
