#pragma once

// User-facing change-point test at a known candidate index k.
//
//   Z = (n psi' V^-1 psi - p) / (Delta_n / n)
//
// compared two-sided against c_{1-alpha/2}. With beta0 unknown it is replaced
// by the first-segment least-squares fit; sigma^2 by
// (k-p)^{-1} sum_{i<=k} (Y_i - X_i' b)^2 and E[eps^4] by the raw plug-in
// fourth moment of the same residuals.

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "elcp/errors.hpp"
#include "elcp/model.hpp"
#include "elcp/moments.hpp"
#include "elcp/score.hpp"
#include "elcp/stats.hpp"

namespace elcp {

struct TestConfig {
    double alpha = 0.05;
    std::optional<Eigen::VectorXd> beta0;          // absent: estimate on 1..k
    std::optional<double> fixed_critical;          // absent: normal quantile
    SigmaConvention convention = SigmaConvention::kProofConsistent;
    std::optional<double> sigma2_override;         // replace the residual plug-ins
    std::optional<double> fourth_moment_override;
};

struct AssumptionReport {
    int q = 4;
    double a5_first = 0.0;   // p * k^{(2-q)/(2q)}
    double a5_second = 0.0;  // p * (n-k)^{(2-q)/(2q)}
    double a6_first = 0.0;   // p^{2+4/q} / k
    double a6_second = 0.0;  // p^{2+4/q} / (n-k)
    double p_cubed_over_n = 0.0;
    std::vector<std::string> warnings;
};

struct TestResult {
    double z_value = 0.0;
    double critical_value = 0.0;
    bool reject = false;
    double p_value = 1.0;
    Eigen::VectorXd beta_used;
    bool beta_estimated = false;
    double sigma2_used = 0.0;
    double fourth_moment_used = 0.0;
    AssumptionReport assumption_report;
    bool degenerate = false;
};

struct ConfidenceQuery {
    Eigen::VectorXd delta;  // hypothesized beta0 - beta2
};

inline AssumptionReport check_assumptions(int n, int k, int p, int q = 4) {
    if (q < 4) throw Error("check_assumptions: q >= 4 required");
    if (n < 2 || k < 1 || k >= n || p < 1) throw DimensionError("check_assumptions: bad sizes");

    AssumptionReport r;
    r.q = q;
    const double e5 = (2.0 - q) / (2.0 * q);
    const double e6 = 2.0 + 4.0 / q;
    r.a5_first = p * std::pow(static_cast<double>(k), e5);
    r.a5_second = p * std::pow(static_cast<double>(n - k), e5);
    r.a6_first = std::pow(static_cast<double>(p), e6) / k;
    r.a6_second = std::pow(static_cast<double>(p), e6) / (n - k);
    r.p_cubed_over_n = std::pow(static_cast<double>(p), 3) / n;

    auto warn = [&r](double v, const std::string& what) {
        if (v >= 1.0) r.warnings.push_back(what + " = " + std::to_string(v) + " >= 1");
    };
    warn(r.a5_first, "moment growth ratio p*k^{(2-q)/(2q)}");
    warn(r.a5_second, "moment growth ratio p*(n-k)^{(2-q)/(2q)}");
    warn(r.a6_first, "dimension ratio p^{2+4/q}/k");
    warn(r.a6_second, "dimension ratio p^{2+4/q}/(n-k)");
    if (r.p_cubed_over_n >= 1.0)
        r.warnings.push_back("normal approximation degrades: p^3/n = " +
                             std::to_string(r.p_cubed_over_n) + " >= 1");
    return r;
}

inline std::pair<Eigen::VectorXd, double> estimate_first_segment(const Design& design,
                                                                 const Eigen::VectorXd& y) {
    if (y.size() != design.n()) throw DimensionError("response length does not match design");
    const int k = design.k, p = design.p();
    if (k - p < 1) throw InsufficientDataError("first segment too short: need k - p >= 1");

    const Eigen::MatrixXd Xk = design.X.topRows(k);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Xk);
    if (qr.rank() < p) throw SingularDesignError("first-segment design is rank deficient");
    const Eigen::VectorXd beta = qr.solve(y.head(k));
    const double rss = (y.head(k) - Xk * beta).squaredNorm();
    return {beta, rss / (k - p)};
}

inline double z_statistic(const Eigen::VectorXd& psi, const Eigen::LLT<Eigen::MatrixXd>& v_chol,
                          double delta, int n, int p) {
    if (!(delta > 0.0)) throw Error("z_statistic: delta_n must be positive");
    const double quad = psi.dot(v_chol.solve(psi));
    return (n * quad - p) / (delta / n);
}

inline double z_statistic(const Eigen::VectorXd& psi, const Eigen::MatrixXd& V, double delta,
                          int n, int p) {
    Eigen::LLT<Eigen::MatrixXd> llt(V);
    if (llt.info() != Eigen::Success)
        throw SingularDesignError("z_statistic: V is not positive definite");
    return z_statistic(psi, llt, delta, n, p);
}

namespace detail {

inline void check_config(const TestConfig& config, int p) {
    if (!(config.alpha > 0.0 && config.alpha < 1.0)) throw Error("alpha must lie in (0,1)");
    if (config.fixed_critical && !(*config.fixed_critical > 0.0))
        throw Error("fixed critical value must be positive");
    if (config.beta0 && config.beta0->size() != p)
        throw DimensionError("beta0 length does not match design");
}

inline double critical_value(const TestConfig& config) {
    return config.fixed_critical ? *config.fixed_critical
                                 : normal_quantile(1.0 - config.alpha / 2.0);
}

// Shared tail of the test: residuals already evaluated at the working beta
// (possibly shifted by a confidence query on the second segment). y_scale is
// the mean square of the first-segment response, used to separate genuinely
// zero residual variance from least-squares rounding.
inline TestResult run_test(const Design& design, const Eigen::VectorXd& resid,
                           Eigen::VectorXd beta_used, bool beta_estimated,
                           const TestConfig& config, double y_scale) {
    const int n = design.n(), p = design.p(), k = design.k;
    TestResult out;
    out.beta_used = std::move(beta_used);
    out.beta_estimated = beta_estimated;
    out.critical_value = critical_value(config);
    out.assumption_report = check_assumptions(n, k, p);

    double sigma2, fourth;
    if (config.sigma2_override && config.fourth_moment_override) {
        sigma2 = *config.sigma2_override;
        fourth = *config.fourth_moment_override;
    } else {
        if (k - p < 1)
            throw InsufficientDataError("variance plug-in needs k - p >= 1");
        const auto head = resid.head(k);
        double s2_hat = head.squaredNorm() / (k - p);
        if (s2_hat <= 1e-20 * y_scale) s2_hat = 0.0;
        sigma2 = config.sigma2_override.value_or(s2_hat);
        double m4_hat = 0.0;
        if (!config.fourth_moment_override && sigma2 > 0.0) {
            // Plug in the sample kurtosis ratio, rescaled to the sigma^2 that
            // actually enters V. The ratio is >= 1, so fourth >= sigma2^2
            // holds whatever denominator sigma2 uses.
            const ErrorSpec emp =
                ErrorSpec::empirical(std::vector<double>(head.begin(), head.end()));
            const double kurtosis = emp.fourth_moment() / (emp.sigma2() * emp.sigma2());
            m4_hat = kurtosis * sigma2 * sigma2;
        }
        fourth = config.fourth_moment_override.value_or(m4_hat);
    }

    Eigen::MatrixXd Z = design.X.array().colwise() * resid.array();
    ScoreSet scores(std::move(Z), out.beta_used, k);

    if (!(sigma2 > 0.0)) {
        // Zero residual variance: the normalization is undefined; report the
        // direction of the evidence instead of failing. Evidence means
        // second-segment residuals beyond rounding scale.
        out.degenerate = true;
        const double tol = 1e-8 * std::sqrt(std::max(y_scale, 0.0));
        const bool evidence = resid.tail(n - k).cwiseAbs().maxCoeff() > tol;
        out.z_value = evidence ? std::numeric_limits<double>::infinity() : 0.0;
        out.p_value = two_sided_p(out.z_value);
        out.reject = std::abs(out.z_value) >= out.critical_value;
        return out;
    }

    const MomentSummary m = make_moment_summary(design, scores, sigma2, fourth, config.convention);
    out.sigma2_used = sigma2;
    out.fourth_moment_used = fourth;
    out.z_value = z_statistic(m.psi, m.V_chol, m.delta, n, p);
    out.p_value = two_sided_p(out.z_value);
    out.reject = std::abs(out.z_value) >= out.critical_value;
    return out;
}

}  // namespace detail

inline TestResult test_changepoint(const Design& design, const Eigen::VectorXd& y,
                                   const TestConfig& config) {
    if (y.size() != design.n()) throw DimensionError("response length does not match design");
    detail::check_config(config, design.p());

    Eigen::VectorXd beta;
    bool estimated = false;
    if (config.beta0) {
        beta = *config.beta0;
    } else {
        beta = estimate_first_segment(design, y).first;
        estimated = true;
    }
    const Eigen::VectorXd resid = y - design.X * beta;
    const double y_scale = y.head(design.k).squaredNorm() / design.k;
    return detail::run_test(design, resid, std::move(beta), estimated, config, y_scale);
}

// Membership of delta in the (1 - alpha)-level region {delta : |Z| < c}.
// Second-segment scores are evaluated at beta0 - delta; delta = 0 reproduces
// test_changepoint exactly.
inline std::pair<bool, double> confidence_region_membership(const Design& design,
                                                            const Eigen::VectorXd& y,
                                                            const Eigen::VectorXd& beta0,
                                                            const ConfidenceQuery& query,
                                                            const TestConfig& config) {
    if (y.size() != design.n()) throw DimensionError("response length does not match design");
    if (beta0.size() != design.p()) throw DimensionError("beta0 length does not match design");
    if (query.delta.size() != design.p())
        throw DimensionError("query delta length does not match design");
    if (!query.delta.allFinite()) throw Error("query delta must be finite");
    detail::check_config(config, design.p());

    const int n = design.n(), k = design.k;
    Eigen::VectorXd resid = y - design.X * beta0;
    resid.tail(n - k) += design.X.bottomRows(n - k) * query.delta;

    const double y_scale = y.head(k).squaredNorm() / k;
    const TestResult r = detail::run_test(design, resid, beta0, false, config, y_scale);
    return {std::abs(r.z_value) < r.critical_value, r.z_value};
}

}  // namespace elcp
