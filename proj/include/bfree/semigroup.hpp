#pragma once

#include <cstdint>
#include <vector>

#include "bfree/analytic.hpp"
#include "bfree/bset.hpp"

namespace bfree {

// All B-integers (products of B elements with repetition, 1 included) up to
// limit, ascending.
std::vector<std::uint64_t> enumerate_b_integers(const BSpec& spec, std::uint64_t limit);

// #{n in Z^B : 1 <= n <= N}. For the k-free preset with no exclusions this
// is floor(N^(1/k)).
std::uint64_t counting_function(const BSpec& spec, std::uint64_t N);

// (A, alpha, beta) with N^B(N) = A N^alpha + O(N^beta). Closed form for
// presets: alpha = 1/k, beta = 0, A = prod over excluded p of (1 - 1/p)
// (the semigroup is the k-th powers of integers coprime to the exclusions).
// Explicit finite B grows logarithmically: no valid parameters exist.
AsymptoticParams asymptotic_params(const BSpec& spec);

// One B-squarefree integer m (product of distinct b) with its section-5
// weight g = prod_{b | m, b in B} 1/(b-2).
struct WeightedBSquarefree {
    std::uint64_t m = 1;
    real_t g = 1;
    std::uint64_t g_den = 1;   // exact denominator prod (b-2) when it fits
    bool den_exact = true;     // false when the u64 denominator overflowed
};

// All m in Q^B with m <= limit, sorted by m. Requires 2 not in B.
std::vector<WeightedBSquarefree> enumerate_b_squarefree(const BSpec& spec, std::uint64_t limit);

} // namespace bfree
