#pragma once

// Two-phase linear model data: fixed design, error laws, synthetic generation.
//
//   Y_i = X_i' beta   + eps_i   for i = 1..k
//   Y_i = X_i' beta_2 + eps_i   for i = k+1..n
//
// The design is fixed: one realization per (n, p, seed), reused across
// Monte Carlo replicates. Column 1 is an intercept; columns 2..p are one
// draw of a centered Gaussian with covariance Sigma_hl = 2^{-|h-l|}.

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "elcp/errors.hpp"
#include "elcp/prng.hpp"

namespace elcp {

struct Design {
    Eigen::MatrixXd X;  // n x p
    int k = 0;          // 1-based last index of phase one

    Design(Eigen::MatrixXd X_, int k_) : X(std::move(X_)), k(k_) {
        if (X.rows() < 2 || X.cols() < 1)
            throw DimensionError("design needs n >= 2 and p >= 1");
        if (k < 1 || k >= X.rows())
            throw DimensionError("change-point k must satisfy 1 <= k < n");
        if (!X.allFinite()) throw Error("design matrix has non-finite entries");
    }

    int n() const { return static_cast<int>(X.rows()); }
    int p() const { return static_cast<int>(X.cols()); }
    double theta() const { return static_cast<double>(k) / n(); }
};

enum class ErrorLaw { kGaussian, kCenteredExponential, kEmpirical };

class ErrorSpec {
public:
    static ErrorSpec gaussian(double variance) {
        if (!(variance > 0.0)) throw Error("gaussian variance must be positive");
        return ErrorSpec(ErrorLaw::kGaussian, variance, variance, 3.0 * variance * variance, {});
    }

    static ErrorSpec centered_exponential(double rate) {
        if (!(rate > 0.0)) throw Error("exponential rate must be positive");
        const double s2 = 1.0 / (rate * rate);
        return ErrorSpec(ErrorLaw::kCenteredExponential, rate, s2, 9.0 * s2 * s2, {});
    }

    static ErrorSpec empirical(std::vector<double> residuals) {
        if (residuals.size() < 2)
            throw InsufficientDataError("empirical law needs at least 2 residuals");
        double s2 = 0.0, m4 = 0.0;
        for (double r : residuals) {
            const double r2 = r * r;
            s2 += r2;
            m4 += r2 * r2;
        }
        s2 /= static_cast<double>(residuals.size());
        m4 /= static_cast<double>(residuals.size());
        if (!(s2 > 0.0)) throw InsufficientDataError("empirical residuals have zero variance");
        return ErrorSpec(ErrorLaw::kEmpirical, 0.0, s2, m4, std::move(residuals));
    }

    ErrorLaw law() const { return law_; }
    double sigma2() const { return sigma2_; }
    double fourth_moment() const { return fourth_; }
    double param() const { return param_; }  // variance (Gaussian) or rate (exponential)

    double draw(Rng& rng) const {
        switch (law_) {
            case ErrorLaw::kGaussian:
                return rng.normal(param_);
            case ErrorLaw::kCenteredExponential:
                return rng.centered_exponential(param_);
            default:
                throw UnsupportedLawError("cannot generate draws from an empirical law");
        }
    }

private:
    ErrorSpec(ErrorLaw law, double param, double s2, double m4, std::vector<double> res)
        : law_(law), param_(param), sigma2_(s2), fourth_(m4), residuals_(std::move(res)) {
        if (fourth_ < sigma2_ * sigma2_ * (1.0 - 1e-12))
            throw NumericalInconsistencyError("fourth moment below sigma2^2");
    }

    ErrorLaw law_;
    double param_;
    double sigma2_;
    double fourth_;
    std::vector<double> residuals_;
};

inline std::pair<double, double> error_moments(const ErrorSpec& err) {
    return {err.sigma2(), err.fourth_moment()};
}

struct CoefficientPair {
    Eigen::VectorXd beta1;
    Eigen::VectorXd beta2;

    CoefficientPair(Eigen::VectorXd b1, Eigen::VectorXd b2)
        : beta1(std::move(b1)), beta2(std::move(b2)) {
        if (beta1.size() != beta2.size())
            throw DimensionError("coefficient vectors must have equal length");
        if (!beta1.allFinite() || !beta2.allFinite())
            throw Error("coefficients must be finite");
    }
};

// beta0 = (1, 2, ..., p), the no-change coefficients of the simulation study.
inline Eigen::VectorXd sequence_beta(int p) {
    Eigen::VectorXd b(p);
    for (int j = 0; j < p; ++j) b[j] = static_cast<double>(j + 1);
    return b;
}

inline Design generate_design(int n, int p, int k, std::uint64_t seed) {
    if (n < 2 || p < 1) throw DimensionError("generate_design: need n >= 2, p >= 1");
    if (k < 1 || k >= n) throw DimensionError("generate_design: need 1 <= k < n");

    Eigen::MatrixXd X(n, p);
    X.col(0).setOnes();
    if (p > 1) {
        const int m = p - 1;
        Eigen::MatrixXd sigma(m, m);
        for (int h = 0; h < m; ++h)
            for (int l = 0; l < m; ++l) sigma(h, l) = std::exp2(-std::abs(h - l));
        Eigen::LLT<Eigen::MatrixXd> llt(sigma);
        if (llt.info() != Eigen::Success)
            throw SingularDesignError("design covariance failed to factor");
        const Eigen::MatrixXd L = llt.matrixL();

        Rng rng(seed);
        Eigen::VectorXd g(m);
        for (int i = 0; i < n; ++i) {
            for (int s = 0; s < m; ++s) g[s] = rng.normal();
            X.row(i).tail(m) = (L * g).transpose();
        }
    }
    return Design(std::move(X), k);
}

inline Eigen::VectorXd generate_response(const Design& design, const CoefficientPair& coeffs,
                                         const ErrorSpec& err, std::uint64_t seed) {
    if (coeffs.beta1.size() != design.p())
        throw DimensionError("coefficient length does not match design");
    if (err.law() == ErrorLaw::kEmpirical)
        throw UnsupportedLawError("generate_response: empirical law unsupported");

    const Eigen::VectorXd mean1 = design.X * coeffs.beta1;
    const Eigen::VectorXd mean2 = design.X * coeffs.beta2;
    Eigen::VectorXd y(design.n());
    Rng rng(seed);
    for (int i = 0; i < design.n(); ++i)
        y[i] = (i < design.k ? mean1[i] : mean2[i]) + err.draw(rng);
    return y;
}

}  // namespace elcp
