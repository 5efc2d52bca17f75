#pragma once

#include <cstdint>

#include "elcp/model.hpp"
#include "elcp/score.hpp"

namespace helpers {

// Null-model scores: fixed design from (seed, design stream), fresh errors
// from (seed, replicate).
inline elcp::ScoreSet h0_scores(const elcp::Design& design, std::uint64_t seed,
                                std::uint64_t replicate,
                                elcp::ErrorLaw law = elcp::ErrorLaw::kGaussian) {
    const Eigen::VectorXd beta0 = elcp::sequence_beta(design.p());
    const elcp::ErrorSpec err = law == elcp::ErrorLaw::kGaussian
                                    ? elcp::ErrorSpec::gaussian(1.0)
                                    : elcp::ErrorSpec::centered_exponential(1.0);
    const Eigen::VectorXd y =
        elcp::generate_response(design, elcp::CoefficientPair(beta0, beta0), err,
                                elcp::derive_stream_seed(seed, replicate));
    return elcp::score_vectors(design, y, beta0);
}

}  // namespace helpers
