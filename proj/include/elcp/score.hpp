#pragma once

// Score vectors z_i(beta) = X_i (Y_i - X_i' beta) and the weighted first and
// second moments built from them:
//
//   psi_n = (n th)^{-1} sum_{i<=k} z_i - (n (1-th))^{-1} sum_{j>k} z_j
//   S_n   = (n th^2)^{-1} sum_{i<=k} z_i z_i' + (n (1-th)^2)^{-1} sum_{j>k} z_j z_j'
//   V_n   = sigma^2 [ (n th^2)^{-1} sum_{i<=k} X_i X_i' + (n (1-th)^2)^{-1} sum_{j>k} X_j X_j' ]
//
// with th = k/n.

#include <Eigen/Dense>
#include <utility>

#include "elcp/errors.hpp"
#include "elcp/model.hpp"

namespace elcp {

struct ScoreSet {
    Eigen::MatrixXd Z;     // n x p, row i is z_i(beta)'
    Eigen::VectorXd beta;  // the coefficient vector used
    int k = 0;

    ScoreSet(Eigen::MatrixXd Z_, Eigen::VectorXd beta_, int k_)
        : Z(std::move(Z_)), beta(std::move(beta_)), k(k_) {
        if (k < 1 || k >= Z.rows()) throw DimensionError("score set: 1 <= k < n required");
        if (!Z.allFinite()) throw Error("score set has non-finite entries");
    }

    int n() const { return static_cast<int>(Z.rows()); }
    int p() const { return static_cast<int>(Z.cols()); }
    double theta() const { return static_cast<double>(k) / n(); }
};

inline ScoreSet score_vectors(const Design& design, const Eigen::VectorXd& y,
                              const Eigen::VectorXd& beta) {
    if (y.size() != design.n()) throw DimensionError("response length does not match design");
    if (beta.size() != design.p()) throw DimensionError("beta length does not match design");
    const Eigen::VectorXd resid = y - design.X * beta;
    Eigen::MatrixXd Z = design.X.array().colwise() * resid.array();
    return ScoreSet(std::move(Z), beta, design.k);
}

inline Eigen::VectorXd psi_n(const ScoreSet& s) {
    const int n = s.n(), k = s.k;
    const double th = s.theta();
    const Eigen::VectorXd sum1 = s.Z.topRows(k).colwise().sum();
    const Eigen::VectorXd sum2 = s.Z.bottomRows(n - k).colwise().sum();
    return sum1 / (n * th) - sum2 / (n * (1.0 - th));
}

inline Eigen::MatrixXd s_n_matrix(const ScoreSet& s) {
    const int n = s.n(), k = s.k;
    const double th = s.theta();
    Eigen::MatrixXd S = (s.Z.topRows(k).transpose() * s.Z.topRows(k)) / (n * th * th) +
                        (s.Z.bottomRows(n - k).transpose() * s.Z.bottomRows(n - k)) /
                            (n * (1.0 - th) * (1.0 - th));
    S = 0.5 * (S + S.transpose()).eval();
    return S;
}

inline Eigen::MatrixXd v_n_matrix(const Design& design, double sigma2) {
    if (!(sigma2 > 0.0)) throw Error("v_n_matrix: sigma2 must be positive");
    const int n = design.n(), k = design.k;
    const double th = design.theta();
    Eigen::MatrixXd V =
        (design.X.topRows(k).transpose() * design.X.topRows(k)) * (sigma2 / (n * th * th)) +
        (design.X.bottomRows(n - k).transpose() * design.X.bottomRows(n - k)) *
            (sigma2 / (n * (1.0 - th) * (1.0 - th)));
    V = 0.5 * (V + V.transpose()).eval();
    Eigen::LLT<Eigen::MatrixXd> llt(V);
    if (llt.info() != Eigen::Success)
        throw SingularDesignError("V_n is not positive definite");
    return V;
}

}  // namespace elcp
