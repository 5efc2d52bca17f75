#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "elcp/prng.hpp"

using elcp::Rng;

TEST_CASE("same seed reproduces the draw sequence", "[prng]") {
    Rng a(12345), b(12345);
    for (int i = 0; i < 1000; ++i) {
        REQUIRE(a.next_u64() == b.next_u64());
    }
    Rng c(12345), d(12346);
    bool all_equal = true;
    for (int i = 0; i < 16; ++i) all_equal = all_equal && (c.next_u64() == d.next_u64());
    REQUIRE_FALSE(all_equal);
}

TEST_CASE("stream seeds separate replicates from the design draw", "[prng]") {
    const std::uint64_t master = 99;
    REQUIRE(elcp::derive_stream_seed(master, 0) != elcp::derive_stream_seed(master, 1));
    REQUIRE(elcp::derive_stream_seed(master, 0) !=
            elcp::derive_stream_seed(master, elcp::kDesignStream));
    REQUIRE(elcp::derive_stream_seed(master, 7) != elcp::derive_stream_seed(master + 1, 7));
}

TEST_CASE("uniform draws live in [0,1)", "[prng]") {
    Rng r(7);
    for (int i = 0; i < 100000; ++i) {
        const double u = r.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
    }
}

TEST_CASE("generated errors have mean zero", "[prng]") {
    const int m = 100000;
    const double tol = 4.0 / std::sqrt(static_cast<double>(m));  // 4 sigma, unit variance

    Rng g(2024);
    double sum = 0.0;
    for (int i = 0; i < m; ++i) sum += g.normal();
    REQUIRE(std::abs(sum / m) < tol);

    Rng e(2025);
    sum = 0.0;
    for (int i = 0; i < m; ++i) sum += e.centered_exponential(1.0);
    REQUIRE(std::abs(sum / m) < tol);
}

TEST_CASE("centered exponential fourth moment is near 9", "[prng][slow]") {
    const int m = 1000000;
    Rng r(31);
    double m4 = 0.0;
    for (int i = 0; i < m; ++i) {
        const double x = r.centered_exponential(1.0);
        m4 += x * x * x * x;
    }
    m4 /= m;
    REQUIRE(m4 == Catch::Approx(9.0).epsilon(0.05));
}
