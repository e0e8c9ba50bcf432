#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "burstpdmp/rng.hpp"

using namespace burstpdmp;

// Reference sequences computed with an independent implementation of
// SplitMix64 seeding + xoshiro256++ (checked against the published
// recurrences).  These freeze the bit-level output contract.
TEST_CASE("rng reference sequences") {
    {
        RngStream r(42, 0);
        const std::uint64_t want[6] = {2658823927167969883ULL,  10466840365000369316ULL,
                                       10464424440210412906ULL, 6923483076220254690ULL,
                                       3534352335112830425ULL,  12383555345479944637ULL};
        for (std::uint64_t w : want) CHECK(r.next_u64() == w);
    }
    {
        RngStream r(42, 7);
        const std::uint64_t want[6] = {9679481484408251750ULL,  14280519228486782031ULL,
                                       17738383229970756321ULL, 16466144026183291303ULL,
                                       5720634802471201218ULL,  13518990873547161493ULL};
        for (std::uint64_t w : want) CHECK(r.next_u64() == w);
    }
    {
        RngStream r(20260814, 3);
        const std::uint64_t want[6] = {10559762513008569981ULL, 1514756285977678175ULL,
                                       7960692770069095591ULL,  10914821480927858794ULL,
                                       15188204628749793435ULL, 2439382241303947478ULL};
        for (std::uint64_t w : want) CHECK(r.next_u64() == w);
    }
}

TEST_CASE("rng uniform01 reference values and range") {
    RngStream r(42, 0);
    CHECK(r.uniform01() == doctest::Approx(0.14413513390459765).epsilon(1e-15));
    CHECK(r.uniform01() == doctest::Approx(0.5674085531396185).epsilon(1e-15));
    CHECK(r.uniform01() == doctest::Approx(0.5672775855943268).epsilon(1e-15));
    for (int i = 0; i < 10000; ++i) {
        const double u = r.uniform01();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("rng determinism and stream separation") {
    RngStream a(123, 5), b(123, 5), c(123, 6), d(124, 5);
    for (int i = 0; i < 64; ++i) CHECK(a.next_u64() == b.next_u64());
    // distinct streams and seeds diverge immediately with overwhelming odds
    CHECK(RngStream(123, 5).next_u64() != c.next_u64());
    CHECK(RngStream(123, 5).next_u64() != d.next_u64());
}

TEST_CASE("rng state words are distinct after seeding") {
    // Regression: the SplitMix64 counter must advance between state words,
    // otherwise all four words coincide and outputs correlate.
    for (std::uint64_t seed : {0ULL, 1ULL, 42ULL}) {
        RngStream r(seed, 0);
        std::vector<std::uint64_t> first;
        for (int i = 0; i < 4; ++i) first.push_back(r.next_u64());
        // with identical state words the first output would be
        // rotl(2 * w, 23) + w for every stream; just check variability
        CHECK(first[0] != first[1]);
        CHECK(first[1] != first[2]);
    }
}

TEST_CASE("rng exponential moments") {
    RngStream r(7, 0);
    const int n = 200000;
    double s = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = r.exponential_mean(2.5);
        CHECK(x >= 0.0);
        s += x;
        s2 += x * x;
    }
    const double mean = s / n;
    const double var = s2 / n - mean * mean;
    // exponential(mean m): sd of the sample mean is m/sqrt(n)
    CHECK(std::abs(mean - 2.5) < 5.0 * 2.5 / std::sqrt(double(n)));
    CHECK(var == doctest::Approx(2.5 * 2.5).epsilon(0.05));

    RngStream q(7, 1);
    double t = 0.0;
    for (int i = 0; i < n; ++i) t += q.exponential_rate(4.0);
    CHECK(std::abs(t / n - 0.25) < 5.0 * 0.25 / std::sqrt(double(n)));
}

TEST_CASE("rng uniform(a,b) stays in range") {
    RngStream r(3, 3);
    for (int i = 0; i < 1000; ++i) {
        const double u = r.uniform(2.0, 5.0);
        CHECK(u >= 2.0);
        CHECK(u < 5.0);
    }
}
