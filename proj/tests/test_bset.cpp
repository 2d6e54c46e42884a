#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdint>
#include <random>

#include "bfree/bset.hpp"
#include "bfree/parallel.hpp"

using namespace bfree;

TEST_CASE("BSpec JSON round-trips and rejects malformed input") {
    BSpec e = BSpec::from_json(R"({"explicit":[25,4,9,9]})");
    CHECK(e.kind == BSpec::Kind::Explicit);
    CHECK(e.elements == std::vector<std::uint64_t>{4, 9, 25});  // sorted, deduped
    CHECK(BSpec::from_json(e.to_json()).elements == e.elements);

    BSpec k = BSpec::from_json(R"({"kfree":{"k":2,"exclude":[2]}})");
    CHECK(k.is_preset());
    CHECK(k.k == 2);
    CHECK(k.excluded_primes == std::vector<std::uint64_t>{2});
    CHECK(BSpec::from_json(k.to_json()).to_json() == k.to_json());

    CHECK_THROWS_AS(BSpec::from_json("not json"), validation_error);
    CHECK_THROWS_AS(BSpec::from_json(R"({"bogus":1})"), validation_error);
    CHECK_THROWS_AS(BSpec::from_json(R"({"kfree":{"k":1}})"), validation_error);
    CHECK_THROWS_AS(BSpec::from_json(R"({"explicit":[0,3]})"), validation_error);
}

TEST_CASE("validation enforces pairwise coprimality and prime exclusions") {
    CHECK(validate_bspec(BSpec::make_explicit({3, 5, 7})).valid);
    CHECK(validate_bspec(BSpec::make_explicit({})).valid);  // B = {} is allowed

    ValidationReport r = validate_bspec(BSpec::make_explicit({4, 6}));
    CHECK(!r.valid);  // gcd(4,6) = 2

    CHECK(validate_bspec(BSpec::make_explicit({2, 3})).contains_two);
    CHECK(!validate_bspec(BSpec::kfree(2)).contains_two);  // p^k >= 4

    CHECK_THROWS_AS(require_valid(BSpec::make_explicit({1, 3})), validation_error);
    CHECK_THROWS_AS(require_valid(BSpec::kfree(2, {4})), validation_error);  // 4 not prime
    CHECK(validate_bspec(BSpec::kfree(2, {2, 7})).valid);
}

TEST_CASE("elements_up_to materializes the preset lazily") {
    CHECK(BSpec::kfree(2).elements_up_to(50) == std::vector<std::uint64_t>{4, 9, 25, 49});
    CHECK(BSpec::kfree(2, {2}).elements_up_to(50) == std::vector<std::uint64_t>{9, 25, 49});
    CHECK(BSpec::kfree(3).elements_up_to(100) == std::vector<std::uint64_t>{8, 27});
    CHECK(BSpec::make_explicit({4, 9}).elements_up_to(5) == std::vector<std::uint64_t>{4});
}

TEST_CASE("sieve window reproduces the hand-computed indicators") {
    SieveWindow w = sieve_window(BSpec::kfree(2), 1, 10);
    CHECK(w.bits == std::vector<std::uint8_t>{1, 1, 1, 0, 1, 1, 1, 0, 0, 1});

    SieveWindow odd = sieve_window(BSpec::make_explicit({2}), 1, 5);
    CHECK(odd.bits == std::vector<std::uint8_t>{1, 0, 1, 0, 1});

    SieveWindow all = sieve_window(BSpec::make_explicit({}), 7, 4);
    CHECK(all.bits == std::vector<std::uint8_t>{1, 1, 1, 1});
}

TEST_CASE("sieve agrees with per-point factorization on random windows") {
    std::mt19937_64 rng(1234);
    for (BSpec spec : {BSpec::kfree(2), BSpec::kfree(3, {3}), BSpec::make_explicit({4, 9, 25})}) {
        std::uint64_t start = 1 + rng() % 5000000;
        SieveWindow w = sieve_window(spec, start, 2000);
        for (int t = 0; t < 300; ++t) {
            std::uint64_t n = start + rng() % w.length();
            CHECK(w.bits[n - start] == (is_bfree_direct(spec, n) ? 1 : 0));
        }
    }
}

TEST_CASE("sieving in blocks equals one shot bit for bit") {
    BSpec spec = BSpec::kfree(2);
    std::uint64_t lo = 999950, hi = 1000450;
    SieveWindow whole = sieve_window(spec, lo, hi - lo + 1);
    std::vector<std::uint8_t> stitched;
    for_each_sieve_block(spec, lo, hi, 97, [&](const SieveWindow& blk) {
        stitched.insert(stitched.end(), blk.bits.begin(), blk.bits.end());
    });
    CHECK(stitched == whole.bits);
}

TEST_CASE("count_pattern on the first decade, zero offset implicit") {
    SieveWindow w = sieve_window(BSpec::kfree(2), 1, 10);
    CHECK(count_pattern(w, {}) == 7);      // 1,2,3,5,6,7,10
    CHECK(count_pattern(w, {1}) == 4);     // (1,2),(2,3),(5,6),(6,7)
    CHECK(count_pattern(w, {2}) == 3);     // (1,3),(3,5),(5,7)
    CHECK(count_pattern(w, {0, 1}) == 4);  // 0 deduped
    CHECK(count_pattern(w, {1, 2}) == 2);  // (1,2,3),(5,6,7)
    CHECK_THROWS_AS(count_pattern(w, {10}), validation_error);

    SieveWindow odd = sieve_window(BSpec::make_explicit({2}), 1, 100);
    CHECK(count_pattern(odd, {1}) == 0);  // consecutive odds impossible
}

TEST_CASE("pattern counts at a million match the frozen sieve census") {
    // counts computed once by an independent sieve and frozen here
    constexpr std::uint64_t X = 1000000;
    CHECK(pattern_count(BSpec::kfree(2), X, {}) == 607926);
    CHECK(pattern_count(BSpec::kfree(2), X, {1}) == 322619);
    CHECK(pattern_count(BSpec::kfree(2), X, {2}) == 322665);
    CHECK(pattern_count(BSpec::kfree(2), X, {1, 3}) == 125504);
    CHECK(pattern_count(BSpec::kfree(2), X, {4}) == 483951);
    CHECK(pattern_count(BSpec::kfree(3), X, {1, 2}) == 534563);
    CHECK(pattern_count(BSpec::kfree(5), X, {}) == 964388);
    CHECK(pattern_count(BSpec::make_explicit({4, 9, 25}), X, {}) == 639999);
    CHECK(pattern_count(BSpec::make_explicit({4, 9, 25}), X, {5}) == 357777);
    CHECK(pattern_count(BSpec::kfree(2, {2}), X, {}) == 810575);
}

TEST_CASE("pattern_count is identical for any worker count") {
    BSpec spec = BSpec::kfree(2);
    std::uint64_t one = pattern_count(spec, 3000000, {1, 4}, 1);
    std::uint64_t many = pattern_count(spec, 3000000, {1, 4}, 8);
    CHECK(one == many);
}

TEST_CASE("excluding a prime can only enlarge the B-free set") {
    std::uint64_t base = pattern_count(BSpec::kfree(2), 100000, {});
    std::uint64_t fewer = pattern_count(BSpec::kfree(2, {2}), 100000, {});
    CHECK(fewer >= base);

    // B = {2}: exactly half of any even prefix survives
    CHECK(pattern_count(BSpec::make_explicit({2}), 1000, {}) == 500);
}
