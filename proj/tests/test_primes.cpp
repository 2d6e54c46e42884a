#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdint>
#include <random>

#include "bfree/primes.hpp"

using namespace bfree;

TEST_CASE("primes_up_to matches the classical tables") {
    auto p100 = primes_up_to(100);
    std::vector<std::uint32_t> expect{2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37, 41,
                                      43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97};
    CHECK(p100 == expect);
    CHECK(primes_up_to(1).empty());
    CHECK(primes_up_to(2) == std::vector<std::uint32_t>{2});
    CHECK(primes_up_to(1000000).size() == 78498);  // pi(10^6)
}

TEST_CASE("is_prime_u64 agrees with the sieve and known values") {
    auto small = primes_up_to(20000);
    std::size_t idx = 0;
    for (std::uint64_t n = 0; n <= 20000; ++n) {
        bool in_sieve = idx < small.size() && small[idx] == n;
        if (in_sieve) ++idx;
        CHECK(is_prime_u64(n) == in_sieve);
    }
    CHECK(is_prime_u64(2147483647ull));   // 2^31 - 1
    CHECK(!is_prime_u64(2147483649ull));  // 3 * 715827883
    CHECK(!is_prime_u64(561));            // Carmichael
    CHECK(!is_prime_u64(1));
}

TEST_CASE("factorize reconstructs its input") {
    auto f = factorize(360);
    REQUIRE(f.size() == 3);
    CHECK(f[0].p == 2);
    CHECK(f[0].e == 3);
    CHECK(f[1].p == 3);
    CHECK(f[1].e == 2);
    CHECK(f[2].p == 5);
    CHECK(f[2].e == 1);

    CHECK(factorize(1).empty());
    auto fp = factorize(1009);
    REQUIRE(fp.size() == 1);
    CHECK(fp[0].p == 1009);
    CHECK(fp[0].e == 1);

    std::mt19937_64 rng(42);
    for (int t = 0; t < 200; ++t) {
        std::uint64_t n = 2 + rng() % 1000000000ull;
        std::uint64_t prod = 1;
        std::uint64_t prev = 0;
        for (const PrimePower& pp : factorize(n)) {
            CHECK(pp.p > prev);
            CHECK(is_prime_u64(pp.p));
            prev = pp.p;
            for (unsigned i = 0; i < pp.e; ++i) prod *= pp.p;
        }
        CHECK(prod == n);
    }
}

TEST_CASE("iroot is the exact floor of the k-th root") {
    CHECK(iroot(0, 2) == 0);
    CHECK(iroot(1, 5) == 1);
    CHECK(iroot(100, 2) == 10);
    CHECK(iroot(99, 2) == 9);
    CHECK(iroot(1000000, 3) == 100);
    CHECK(iroot(999999, 3) == 99);
    CHECK(iroot(1ull << 62, 62) == 2);

    std::mt19937_64 rng(7);
    for (int t = 0; t < 500; ++t) {
        unsigned k = 2 + rng() % 5;
        std::uint64_t n = rng() >> (rng() % 30);
        std::uint64_t r = iroot(n, k);
        // r^k <= n < (r+1)^k, in 128-bit to dodge overflow
        unsigned __int128 lo = 1, hi = 1;
        for (unsigned i = 0; i < k; ++i) {
            lo *= r;
            hi *= r + 1;
        }
        CHECK(lo <= n);
        CHECK(hi > n);
    }
}

TEST_CASE("mul_within guards overflow against the cap") {
    std::uint64_t out = 0;
    CHECK(mul_within(3, 4, 12, out));
    CHECK(out == 12);
    CHECK(!mul_within(3, 5, 12, out));
    CHECK(!mul_within(1ull << 40, 1ull << 40, UINT64_MAX, out));
    CHECK(mul_within(0, UINT64_MAX, 5, out));
    CHECK(out == 0);
}
