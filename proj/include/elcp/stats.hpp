#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "elcp/errors.hpp"

namespace elcp {

inline double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

inline double normal_pdf(double x) {
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

// Inverse standard normal CDF: Acklam's rational approximation refined by one
// Newton step through erfc, accurate to ~1e-15 over (0, 1).
inline double normal_quantile(double q) {
    if (!(q > 0.0 && q < 1.0)) throw Error("normal_quantile: q must lie in (0,1)");

    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};

    const double plow = 0.02425;
    double x;
    if (q < plow) {
        const double u = std::sqrt(-2.0 * std::log(q));
        x = (((((c[0] * u + c[1]) * u + c[2]) * u + c[3]) * u + c[4]) * u + c[5]) /
            ((((d[0] * u + d[1]) * u + d[2]) * u + d[3]) * u + 1.0);
    } else if (q <= 1.0 - plow) {
        const double u = q - 0.5;
        const double t = u * u;
        x = (((((a[0] * t + a[1]) * t + a[2]) * t + a[3]) * t + a[4]) * t + a[5]) * u /
            (((((b[0] * t + b[1]) * t + b[2]) * t + b[3]) * t + b[4]) * t + 1.0);
    } else {
        const double u = std::sqrt(-2.0 * std::log(1.0 - q));
        x = -(((((c[0] * u + c[1]) * u + c[2]) * u + c[3]) * u + c[4]) * u + c[5]) /
            ((((d[0] * u + d[1]) * u + d[2]) * u + d[3]) * u + 1.0);
    }
    // One Newton step: x <- x - (Phi(x) - q) / phi(x).
    const double e = normal_cdf(x) - q;
    x -= e / normal_pdf(x);
    return x;
}

// 2 * (1 - Phi(|z|)) == erfc(|z| / sqrt(2)).
inline double two_sided_p(double z) {
    if (std::isnan(z)) return 1.0;
    return std::erfc(std::abs(z) / std::numbers::sqrt2);
}

// Order-statistic (type-1) quantile: value at 1-based index ceil(q * M).
inline double empirical_quantile_type1(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) throw Error("empirical_quantile_type1: empty sample");
    const auto m = static_cast<double>(sorted.size());
    auto idx = static_cast<std::ptrdiff_t>(std::ceil(q * m));
    idx = std::clamp<std::ptrdiff_t>(idx, 1, static_cast<std::ptrdiff_t>(sorted.size()));
    return sorted[static_cast<std::size_t>(idx - 1)];
}

// max(c1, |c2|) with c1, c2 the upper/lower alpha/2 sample quantiles.
inline double critical_from_samples(std::vector<double> z, double alpha) {
    if (z.size() < 100) throw InsufficientReplicatesError("critical value needs >= 100 samples");
    std::sort(z.begin(), z.end());
    const double c1 = empirical_quantile_type1(z, 1.0 - alpha / 2.0);
    const double c2 = empirical_quantile_type1(z, alpha / 2.0);
    return std::max(c1, std::abs(c2));
}

// Kolmogorov-Smirnov distance between the sample and the standard normal.
inline double ks_distance_normal(std::vector<double> z) {
    if (z.empty()) throw Error("ks_distance_normal: empty sample");
    std::sort(z.begin(), z.end());
    const double m = static_cast<double>(z.size());
    double d = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        const double f = normal_cdf(z[i]);
        d = std::max(d, std::abs(f - static_cast<double>(i) / m));
        d = std::max(d, std::abs(static_cast<double>(i + 1) / m - f));
    }
    return d;
}

}  // namespace elcp
