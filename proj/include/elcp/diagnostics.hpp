#pragma once

// Second-order moment diagnostics: the whitened sample second moment of the
// scores minus its population counterpart (the identity),
//
//   omega2 = V^{-1/2} S_n V^{-1/2} - I,
//
// which collects the omega^{t1 t2} variables of order two. Entries shrink
// under the null as the sample grows.

#include <Eigen/Dense>

#include "elcp/errors.hpp"
#include "elcp/score.hpp"

namespace elcp {

struct MomentDiagnostics {
    Eigen::MatrixXd omega2;
    double max_abs_omega2 = 0.0;
};

inline MomentDiagnostics moment_diagnostics(const ScoreSet& scores, const Eigen::MatrixXd& V) {
    if (V.rows() != scores.p() || V.cols() != scores.p())
        throw DimensionError("V shape does not match scores");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(V);
    if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 0.0)
        throw SingularDesignError("moment_diagnostics: V is not positive definite");
    const Eigen::MatrixXd W = es.operatorInverseSqrt();

    MomentDiagnostics d;
    d.omega2 = W * s_n_matrix(scores) * W -
               Eigen::MatrixXd::Identity(scores.p(), scores.p());
    d.omega2 = 0.5 * (d.omega2 + d.omega2.transpose()).eval();
    d.max_abs_omega2 = d.omega2.cwiseAbs().maxCoeff();
    return d;
}

}  // namespace elcp
