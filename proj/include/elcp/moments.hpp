#pragma once

// The Delta_n normalizer. Delta_n^2 = sum_i sigma_i^2 with, for a_i = X_i'V^-1 X_i
// and V_(i) = sigma^2 X_i X_i',
//
//   sigma_1^2 = th^-4 [ a_1^2 E[eps^4] - tr(V^-1 V_(1))^2 ]
//
// first-segment observations add 4 th^-4 sum_{l<i} tr(V^-1 V_(i) V^-1 V_(l)) to the
// same bracket; second-segment observations weight the cross sums by
// 4 / (th^2 (1-th)^2) over phase one and 4 / (1-th)^4 within phase two, with the
// bracket scaled by (1-th)^-4.
//
// Every trace reduces through rank-one structure:
//   tr(V^-1 V_(l))            = sigma^2 a_l
//   tr(V^-1 V_(i) V^-1 V_(l)) = sigma^4 (X_i' V^-1 X_l)^2
// so the running cross sums are quadratic forms u_i' P u_i in the prefix Gram
// matrix P_m = sum_{l<=m} X_l X_l' with u_i = V^-1 X_i. Total cost O(n p^2 + p^3).
//
// The theorem statement assigns observation k+1 to the first-segment formula;
// the martingale increments in the proof put it on the second-segment one.
// Both conventions are implemented; they differ only at i = k+1.

#include <Eigen/Dense>
#include <cmath>
#include <utility>
#include <vector>

#include "elcp/errors.hpp"
#include "elcp/score.hpp"

namespace elcp {

enum class SigmaConvention { kProofConsistent, kTheoremText };

namespace detail {

// Kahan-compensated accumulation of rank-one updates into a Gram matrix.
class CompensatedGram {
public:
    explicit CompensatedGram(int p)
        : sum_(Eigen::MatrixXd::Zero(p, p)), comp_(Eigen::MatrixXd::Zero(p, p)) {}

    void add_outer(const Eigen::VectorXd& x) {
        const Eigen::MatrixXd term = x * x.transpose();
        const Eigen::MatrixXd y = term - comp_;
        const Eigen::MatrixXd t = sum_ + y;
        comp_ = (t - sum_) - y;
        sum_ = t;
    }

    double quad(const Eigen::VectorXd& u) const { return u.dot(sum_ * u); }

private:
    Eigen::MatrixXd sum_;
    Eigen::MatrixXd comp_;
};

inline std::vector<double> sigma_i_squared_impl(const Eigen::MatrixXd& X, int k,
                                                const Eigen::LLT<Eigen::MatrixXd>& v_chol,
                                                double sigma2, double fourth,
                                                SigmaConvention conv) {
    const int n = static_cast<int>(X.rows());
    const int p = static_cast<int>(X.cols());
    const double th = static_cast<double>(k) / n;
    const double s4 = sigma2 * sigma2;

    // u_i = V^-1 X_i as columns; a_i = X_i' u_i.
    const Eigen::MatrixXd U = v_chol.solve(X.transpose());
    const Eigen::VectorXd a = (X.array() * U.transpose().array()).rowwise().sum();

    const double w1 = 1.0 / (th * th * th * th);
    const double w2a = 1.0 / (th * th * (1.0 - th) * (1.0 - th));
    const double w2b = 1.0 / ((1.0 - th) * (1.0 - th) * (1.0 - th) * (1.0 - th));

    CompensatedGram phase1(p);
    CompensatedGram phase2(p);
    std::vector<double> out(static_cast<std::size_t>(n));

    for (int i = 0; i < n; ++i) {
        const Eigen::VectorXd u = U.col(i);
        const double bracket = a[i] * a[i] * (fourth - s4);

        double value, positive_scale;
        if (i < k) {
            const double cross = s4 * std::max(phase1.quad(u), 0.0);
            value = w1 * (4.0 * cross + bracket);
            positive_scale = w1 * (4.0 * cross + std::abs(bracket));
        } else if (i == k && conv == SigmaConvention::kTheoremText) {
            const double cross = s4 * std::max(phase1.quad(u), 0.0);
            value = w1 * (4.0 * cross + bracket);
            positive_scale = w1 * (4.0 * cross + std::abs(bracket));
        } else {
            const double crossA = s4 * std::max(phase1.quad(u), 0.0);
            const double crossB = s4 * std::max(phase2.quad(u), 0.0);
            value = 4.0 * w2a * crossA + 4.0 * w2b * crossB + w2b * bracket;
            positive_scale = 4.0 * w2a * crossA + 4.0 * w2b * crossB + w2b * std::abs(bracket);
        }

        if (value < -1e-9 * std::max(positive_scale, 1e-300))
            throw NumericalInconsistencyError("sigma_i^2 negative beyond rounding tolerance");
        out[static_cast<std::size_t>(i)] = std::max(value, 0.0);

        if (i < k)
            phase1.add_outer(X.row(i).transpose());
        else
            phase2.add_outer(X.row(i).transpose());
    }
    return out;
}

inline void check_moment_args(double sigma2, double fourth) {
    if (!(sigma2 > 0.0)) throw Error("sigma2 must be positive");
    if (fourth < sigma2 * sigma2 * (1.0 - 1e-12))
        throw Error("fourth moment must be at least sigma2^2");
}

}  // namespace detail

inline std::vector<double> sigma_i_squared(const Design& design, double sigma2, double fourth,
                                           SigmaConvention conv = SigmaConvention::kProofConsistent) {
    detail::check_moment_args(sigma2, fourth);
    const Eigen::MatrixXd V = v_n_matrix(design, sigma2);
    Eigen::LLT<Eigen::MatrixXd> llt(V);
    return detail::sigma_i_squared_impl(design.X, design.k, llt, sigma2, fourth, conv);
}

inline double delta_n(const Design& design, double sigma2, double fourth,
                      SigmaConvention conv = SigmaConvention::kProofConsistent) {
    const std::vector<double> s = sigma_i_squared(design, sigma2, fourth, conv);
    double sum = 0.0, comp = 0.0;
    for (double v : s) {
        const double y = v - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return std::sqrt(sum);
}

struct MomentSummary {
    Eigen::VectorXd psi;
    Eigen::MatrixXd S;
    Eigen::MatrixXd V;
    Eigen::LLT<Eigen::MatrixXd> V_chol;
    double delta = 0.0;
    double sigma2 = 0.0;
    double fourth_moment = 0.0;
    double theta = 0.0;
};

inline MomentSummary make_moment_summary(const Design& design, const ScoreSet& scores,
                                         double sigma2, double fourth,
                                         SigmaConvention conv = SigmaConvention::kProofConsistent) {
    if (scores.n() != design.n() || scores.p() != design.p() || scores.k != design.k)
        throw DimensionError("score set does not match design");
    detail::check_moment_args(sigma2, fourth);

    MomentSummary m;
    m.psi = psi_n(scores);
    m.S = s_n_matrix(scores);
    m.V = v_n_matrix(design, sigma2);
    m.V_chol.compute(m.V);
    if (m.V_chol.info() != Eigen::Success)
        throw SingularDesignError("V_n is not positive definite");

    const auto s = detail::sigma_i_squared_impl(design.X, design.k, m.V_chol, sigma2, fourth, conv);
    double sum = 0.0, comp = 0.0;
    for (double v : s) {
        const double y = v - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    m.delta = std::sqrt(sum);
    m.sigma2 = sigma2;
    m.fourth_moment = fourth;
    m.theta = design.theta();
    return m;
}

}  // namespace elcp
