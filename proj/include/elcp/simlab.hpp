#pragma once

// Monte Carlo experiments: coverage rates, empirical powers and empirical
// critical values over a fixed design. The design is drawn once per spec from
// the master seed; replicate r draws its errors from stream r, so outcomes do
// not depend on the worker count.

#include <Eigen/Dense>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <thread>
#include <utility>
#include <vector>

#include "elcp/errors.hpp"
#include "elcp/inference.hpp"
#include "elcp/model.hpp"
#include "elcp/moments.hpp"
#include "elcp/prng.hpp"
#include "elcp/score.hpp"
#include "elcp/stats.hpp"

namespace elcp {

struct Alternative {
    enum class Kind { kNone, kOneMinusBeta0, kSparse, kExplicit };

    Kind kind = Kind::kNone;
    std::vector<std::pair<int, double>> sparse;  // (1-based coefficient index, offset)
    Eigen::VectorXd beta2;                       // explicit second-phase coefficients

    static Alternative none() { return {}; }
    static Alternative one_minus_beta0() { return {Kind::kOneMinusBeta0, {}, {}}; }
    static Alternative sparse_shift(std::vector<std::pair<int, double>> entries) {
        return {Kind::kSparse, std::move(entries), {}};
    }
    static Alternative explicit_beta2(Eigen::VectorXd b2) {
        return {Kind::kExplicit, {}, std::move(b2)};
    }

    Eigen::VectorXd resolve(const Eigen::VectorXd& beta0) const {
        switch (kind) {
            case Kind::kNone:
                return beta0;
            case Kind::kOneMinusBeta0:
                return Eigen::VectorXd::Ones(beta0.size()) - beta0;
            case Kind::kSparse: {
                Eigen::VectorXd b2 = beta0;
                for (const auto& [idx, offset] : sparse) {
                    if (idx < 1 || idx > beta0.size())
                        throw DimensionError("sparse shift index out of range");
                    b2[idx - 1] += offset;
                }
                return b2;
            }
            case Kind::kExplicit:
                if (beta2.size() != beta0.size())
                    throw DimensionError("explicit beta2 length does not match p");
                return beta2;
        }
        throw Error("unreachable");
    }
};

struct ExperimentSpec {
    int n = 0, k = 0, p = 0;
    ErrorLaw error_law = ErrorLaw::kGaussian;
    std::optional<Eigen::VectorXd> beta0;  // default (1, 2, ..., p)
    Alternative alternative;
    int replications = 0;  // M
    std::uint64_t master_seed = 0;
    double alpha = 0.05;
    std::optional<double> fixed_critical;  // absent: normal quantile
    bool estimate_beta = false;
    SigmaConvention convention = SigmaConvention::kProofConsistent;
};

struct ExperimentOutcome {
    double coverage_rate = 0.0;
    std::optional<double> power;
    double critical_value_used = 0.0;
    std::vector<double> z_samples;
    int failures = 0;
    double runtime_seconds = 0.0;
};

namespace detail {

inline void validate_spec(const ExperimentSpec& spec) {
    if (spec.replications < 1) throw Error("experiment needs M >= 1 replications");
    if (spec.n < 2 || spec.p < 1 || spec.k < 1 || spec.k >= spec.n)
        throw DimensionError("experiment sizes violate 1 <= k < n, p >= 1");
    if (spec.error_law == ErrorLaw::kEmpirical)
        throw UnsupportedLawError("experiments require a generating error law");
    if (!(spec.alpha > 0.0 && spec.alpha < 1.0)) throw Error("alpha must lie in (0,1)");
    if (spec.beta0 && spec.beta0->size() != spec.p)
        throw DimensionError("beta0 length does not match p");
}

inline int resolve_workers(int workers) {
    if (workers > 0) return workers;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

// Z samples for M replicates of the spec'd experiment. Failed replicates
// (factorization or feasibility breakdowns on the estimation path) record
// +infinity, which counts as a rejection.
inline std::vector<double> simulate_z_samples(const ExperimentSpec& spec, int replications,
                                              int workers, int* failures_out) {
    const Design design =
        generate_design(spec.n, spec.p, spec.k, derive_stream_seed(spec.master_seed, kDesignStream));
    const Eigen::VectorXd beta0 = spec.beta0 ? *spec.beta0 : sequence_beta(spec.p);
    const Eigen::VectorXd beta2 = spec.alternative.resolve(beta0);
    const ErrorSpec err = spec.error_law == ErrorLaw::kGaussian
                              ? ErrorSpec::gaussian(1.0)
                              : ErrorSpec::centered_exponential(1.0);

    const int n = spec.n, p = spec.p, k = spec.k;
    const double th = design.theta();

    // shift_i = X_i'(beta2 - beta0): the post-change score displacement.
    const Eigen::VectorXd shift = design.X * (beta2 - beta0);

    Eigen::LLT<Eigen::MatrixXd> v_chol;
    double delta = 0.0;
    Eigen::VectorXd weights(n);
    Eigen::VectorXd mean1, mean2;
    if (!spec.estimate_beta) {
        const Eigen::MatrixXd V = v_n_matrix(design, err.sigma2());
        v_chol.compute(V);
        if (v_chol.info() != Eigen::Success)
            throw SingularDesignError("V_n is not positive definite");
        delta = delta_n(design, err.sigma2(), err.fourth_moment(), spec.convention);
        weights.head(k).setConstant(1.0 / (n * th));
        weights.tail(n - k).setConstant(-1.0 / (n * (1.0 - th)));
    } else {
        mean1 = design.X * beta0;
        mean2 = design.X * beta2;
    }

    std::vector<double> z(static_cast<std::size_t>(replications));
    std::atomic<int> next{0};
    std::atomic<int> failures{0};

    auto worker = [&]() {
        Eigen::VectorXd eps(n), resid(n), psi(p), y(n);
        for (;;) {
            const int r = next.fetch_add(1);
            if (r >= replications) return;
            Rng rng(derive_stream_seed(spec.master_seed, static_cast<std::uint64_t>(r)));
            for (int i = 0; i < n; ++i) eps[i] = err.draw(rng);
            try {
                double zv;
                if (!spec.estimate_beta) {
                    resid = eps;
                    resid.tail(n - k) += shift.tail(n - k);
                    psi.noalias() = design.X.transpose() * weights.cwiseProduct(resid);
                    zv = z_statistic(psi, v_chol, delta, n, p);
                } else {
                    for (int i = 0; i < n; ++i)
                        y[i] = (i < k ? mean1[i] : mean2[i]) + eps[i];
                    TestConfig cfg;
                    cfg.alpha = spec.alpha;
                    cfg.convention = spec.convention;
                    zv = test_changepoint(design, y, cfg).z_value;
                }
                if (std::isnan(zv)) throw NumericalInconsistencyError("Z is NaN");
                z[static_cast<std::size_t>(r)] = zv;
            } catch (const Error&) {
                z[static_cast<std::size_t>(r)] = std::numeric_limits<double>::infinity();
                failures.fetch_add(1);
            }
        }
    };

    const int nw = std::min(resolve_workers(workers), replications);
    if (nw <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(nw));
        for (int t = 0; t < nw; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    if (failures_out) *failures_out = failures.load();
    return z;
}

inline double resolve_critical(const ExperimentSpec& spec) {
    return spec.fixed_critical ? *spec.fixed_critical
                               : normal_quantile(1.0 - spec.alpha / 2.0);
}

}  // namespace detail

// Coverage rate: fraction of replicates with |Z| < c under no change.
inline ExperimentOutcome run_coverage(const ExperimentSpec& spec, int workers = 0) {
    detail::validate_spec(spec);
    if (spec.alternative.kind != Alternative::Kind::kNone)
        throw Error("run_coverage requires alternative = none");

    const auto start = std::chrono::steady_clock::now();
    ExperimentOutcome out;
    out.critical_value_used = detail::resolve_critical(spec);
    out.z_samples =
        detail::simulate_z_samples(spec, spec.replications, workers, &out.failures);
    int covered = 0;
    for (double zv : out.z_samples)
        if (std::abs(zv) < out.critical_value_used) ++covered;
    out.coverage_rate = static_cast<double>(covered) / spec.replications;
    out.runtime_seconds = std::chrono::duration<double>(
                              std::chrono::steady_clock::now() - start).count();
    return out;
}

// Empirical power: fraction of replicates with |Z| >= c under the alternative.
inline ExperimentOutcome run_power(const ExperimentSpec& spec, int workers = 0) {
    detail::validate_spec(spec);
    if (spec.alternative.kind == Alternative::Kind::kNone)
        throw Error("run_power requires a non-null alternative");

    const auto start = std::chrono::steady_clock::now();
    ExperimentOutcome out;
    out.critical_value_used = detail::resolve_critical(spec);
    out.z_samples =
        detail::simulate_z_samples(spec, spec.replications, workers, &out.failures);
    int rejected = 0;
    for (double zv : out.z_samples)
        if (std::abs(zv) >= out.critical_value_used) ++rejected;
    out.coverage_rate = 1.0 - static_cast<double>(rejected) / spec.replications;
    out.power = static_cast<double>(rejected) / spec.replications;
    out.runtime_seconds = std::chrono::duration<double>(
                              std::chrono::steady_clock::now() - start).count();
    return out;
}

// max(c1, |c2|) over M null replicates, with c1 and c2 the empirical
// (1 - alpha/2) and alpha/2 quantiles of the Z samples.
inline double empirical_critical_value(const ExperimentSpec& spec, int replications = 10000,
                                       int workers = 0) {
    detail::validate_spec(spec);
    if (spec.alternative.kind != Alternative::Kind::kNone)
        throw Error("empirical_critical_value requires alternative = none");
    if (replications < 100)
        throw InsufficientReplicatesError("empirical critical value needs M >= 100");

    const std::vector<double> z =
        detail::simulate_z_samples(spec, replications, workers, nullptr);
    return critical_from_samples(z, spec.alpha);
}

}  // namespace elcp
