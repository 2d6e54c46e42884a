#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <set>

#include "bfree/analytic.hpp"
#include "bfree/correlations.hpp"

using namespace bfree;

TEST_CASE("residue_count follows the distinct-residue definition") {
    CHECK(residue_count(5, {5, 7}) == 2);  // {0, 0, 2}
    CHECK(residue_count(2, {1}) == 2);
    CHECK(residue_count(9, {}) == 1);
    CHECK(residue_count(4, {1, 2, 3}) == 4);
    CHECK(residue_count(4, {4, 8, 12}) == 1);

    // oracle: brute set of residues with shift invariance of the full pattern
    std::mt19937_64 rng(5);
    for (int t = 0; t < 200; ++t) {
        std::uint64_t b = 2 + rng() % 50;
        std::vector<std::uint64_t> offs;
        for (unsigned i = 0, r = rng() % 4; i < r; ++i) offs.push_back(rng() % 100);
        std::set<std::uint64_t> base{0};
        for (auto h : offs) base.insert(h % b);
        CHECK(residue_count(b, offs) == base.size());
        std::uint64_t shift = rng() % b;
        std::set<std::uint64_t> shifted;
        for (auto r2 : base) shifted.insert((r2 + shift) % b);
        CHECK(shifted.size() == base.size());
    }
}

TEST_CASE("explicit correlations are the finite products") {
    CorrelationContext c35(BSpec::make_explicit({3, 5}));
    CorrValue v = corr_exact(c35, {3});
    CHECK(v.v.value == doctest::Approx(2.0 / 5));  // (1-1/3)(1-2/5)
    CHECK(!v.degenerate);

    CorrelationContext c23(BSpec::make_explicit({2, 3}));
    CorrValue zero = corr_exact(c23, {1});
    CHECK(zero.v.value == 0);
    CHECK(zero.degenerate);
    CHECK(density(c23).value == doctest::Approx(1.0 / 3));

    CorrelationContext cempty(BSpec::make_explicit({}));
    CHECK(density(cempty).value == 1);
    CHECK(corr_exact(cempty, {1, 2, 3}).v.value == 1);
}

TEST_CASE("preset density matches 1/zeta(k)") {
    CorrelationContext c2(BSpec::kfree(2));
    CHECK(fabsl(c2.rho().value - 0.607927101854026628663276779258L) <= 1e-13L);
    CorrelationContext c3(BSpec::kfree(3));
    CHECK(fabsl(c3.rho().value - 0.831907372580707468683126278821L) <= 1e-13L);
    CorrelationContext c5(BSpec::kfree(5));
    CHECK(fabsl(c5.rho().value - 0.964387340429262459126436588445L) <= 1e-13L);
}

TEST_CASE("pair correlation: constant off the divisor set, corrected on it") {
    CorrelationContext ctx(BSpec::kfree(2));
    real_t C = base_product(BSpec::kfree(2), 2).value;
    // no square divides h: c2(h) = C
    for (std::uint64_t h : {1ull, 2ull, 6ull, 30ull, 105ull}) {
        CHECK(fabsl(corr_exact(ctx, {h}).v.value - C) <= 1e-13L);
    }
    // b = 4 divides h = 4: factor (1 - 1/4) replaces (1 - 2/4)
    CHECK(fabsl(corr_exact(ctx, {4}).v.value - C * 1.5L) <= 1e-13L);
    // h = 36: both 4 and 9 divide; ratios (b-1)/(b-2) = 3/2 and 8/7
    CHECK(fabsl(corr_exact(ctx, {36}).v.value - C * 1.5L * (8.0L / 7)) <= 1e-13L);
}

TEST_CASE("preset and explicit evaluation agree on a truncated B-set") {
    // squares up to 1e8 as an explicit list: the preset result must fall
    // just below that partial product, by no more than the missing tail
    BSpec preset = BSpec::kfree(2);
    BSpec truncated = BSpec::make_explicit(preset.elements_up_to(100000000));
    CorrelationContext cp(preset);
    CorrelationContext ct(truncated);
    for (std::vector<std::uint64_t> offs :
         {std::vector<std::uint64_t>{}, {1}, {4}, {2, 6}, {9, 27}}) {
        real_t full = corr_exact(cp, offs).v.value;
        real_t part = corr_exact(ct, offs).v.value;
        CHECK(full <= part);
        CHECK(part - full <= 1e-4L * part);  // prod(1 - a/p^2) tail past p = 1e4
    }
}

TEST_CASE("adding offsets never raises the correlation") {
    CorrelationContext ctx(BSpec::kfree(2));
    std::mt19937_64 rng(11);
    for (int t = 0; t < 50; ++t) {
        std::vector<std::uint64_t> offs;
        real_t prev = corr_exact(ctx, offs).v.value;
        for (int i = 0; i < 3; ++i) {
            offs.push_back(rng() % 40);
            real_t cur = corr_exact(ctx, offs).v.value;
            CHECK(cur <= prev + 1e-15L);
            prev = cur;
        }
    }
}

TEST_CASE("reflection of the pattern preserves the correlation") {
    // A_b of a set equals A_b of its reflection, so c(S) = c(max(S) - S)
    CorrelationContext ctx(BSpec::kfree(2));
    std::mt19937_64 rng(17);
    for (int t = 0; t < 30; ++t) {
        std::uint64_t h1 = 1 + rng() % 30, h2 = h1 + 1 + rng() % 30;
        std::vector<std::uint64_t> refl{h2 - h1, h2};
        real_t a = corr_exact(ctx, {h1, h2}).v.value;
        real_t b = corr_exact(ctx, refl).v.value;
        CHECK(fabsl(a - b) <= 1e-16L);
    }
}

TEST_CASE("frozen census at one million confirms three-point patterns") {
    CorrelationContext ctx(BSpec::kfree(2));
    CHECK(fabsl(corr_exact(ctx, {1, 3}).v.value - 0.125504L) <= 2e-3L);
    CorrelationContext c3(BSpec::kfree(3));
    CHECK(fabsl(corr_exact(c3, {1, 2}).v.value - 0.534563L) <= 2e-3L);
    CorrelationContext ce(BSpec::make_explicit({4, 9, 25}));
    CHECK(corr_exact(ce, {5}).v.value ==
          doctest::Approx(0.5 * (7.0 / 9) * (23.0 / 25)).epsilon(1e-12));
}

TEST_CASE("oversized patterns and context limits") {
    CorrelationContext ctx(BSpec::kfree(2));
    std::vector<std::uint64_t> big;
    for (std::uint64_t i = 1; i <= CorrelationContext::kMaxPatternSize; ++i) big.push_back(i);
    CHECK_THROWS_AS(corr_exact(ctx, big), validation_error);  // 13 points with 0
    big.pop_back();
    CHECK_NOTHROW(corr_exact(ctx, big));  // 12 points is the cap
}
