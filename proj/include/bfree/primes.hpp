#pragma once

#include <cstdint>
#include <vector>

#include "bfree/types.hpp"

namespace bfree {

// Primes <= limit, ascending. Plain sieve of Eratosthenes; fine up to ~1e8.
std::vector<std::uint32_t> primes_up_to(std::uint64_t limit);

bool is_prime_u64(std::uint64_t n);

// Distinct prime factors of n with exponents, ascending by prime.
struct PrimePower {
    std::uint64_t p;
    unsigned e;
};
std::vector<PrimePower> factorize(std::uint64_t n);

// floor(n^(1/k)), exact in integer arithmetic.
std::uint64_t iroot(std::uint64_t n, unsigned k);

// Overflow-checked multiply: returns false if a*b > cap.
inline bool mul_within(std::uint64_t a, std::uint64_t b, std::uint64_t cap, std::uint64_t& out) {
    if (a != 0 && b > cap / a) return false;
    out = a * b;
    return out <= cap;
}

} // namespace bfree
