#include "bfree/primes.hpp"

#include <cmath>
#include <cstdlib>

namespace bfree {

std::uint64_t memory_budget_bytes() {
    static const std::uint64_t cached = [] {
        std::uint64_t mb = 4096;
        if (const char* env = std::getenv("BFREE_MEM_BUDGET_MB")) {
            char* end = nullptr;
            unsigned long long v = std::strtoull(env, &end, 10);
            if (end && *end == '\0' && v > 0) mb = v;
        }
        return mb * 1024ull * 1024ull;
    }();
    return cached;
}

std::vector<std::uint32_t> primes_up_to(std::uint64_t limit) {
    std::vector<std::uint32_t> out;
    if (limit < 2) return out;
    if (limit + 1 > memory_budget_bytes())
        throw resource_error("prime sieve exceeds memory budget");
    std::vector<bool> comp(limit + 1, false);
    for (std::uint64_t i = 2; i * i <= limit; ++i)
        if (!comp[i])
            for (std::uint64_t j = i * i; j <= limit; j += i) comp[j] = true;
    for (std::uint64_t i = 2; i <= limit; ++i)
        if (!comp[i]) out.push_back(static_cast<std::uint32_t>(i));
    return out;
}

bool is_prime_u64(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t d : {2ull, 3ull, 5ull}) {
        if (n == d) return true;
        if (n % d == 0) return false;
    }
    // trial division by 6k+-1; inputs here are small (B elements, window ends)
    for (std::uint64_t d = 7; d * d <= n; d += 6) {
        if (n % d == 0) return false;
        if (n % (d + 4) == 0) return false;
    }
    return true;
}

std::vector<PrimePower> factorize(std::uint64_t n) {
    std::vector<PrimePower> out;
    for (std::uint64_t p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
        if (n % p) continue;
        unsigned e = 0;
        while (n % p == 0) { n /= p; ++e; }
        out.push_back({p, e});
    }
    if (n > 1) out.push_back({n, 1});
    return out;
}

std::uint64_t iroot(std::uint64_t n, unsigned k) {
    if (k == 0) throw validation_error("iroot: k must be >= 1");
    if (k == 1 || n < 2) return n;
    // float seed, then correct; powl is exact enough to land within +-1
    std::uint64_t r = static_cast<std::uint64_t>(powl(static_cast<long double>(n), 1.0L / k));
    auto pow_le = [&](std::uint64_t b) {
        // does b^k <= n without overflow
        std::uint64_t acc = 1;
        for (unsigned i = 0; i < k; ++i) {
            if (b != 0 && acc > n / b) return false;
            acc *= b;
        }
        return acc <= n;
    };
    while (r > 0 && !pow_le(r)) --r;
    while (pow_le(r + 1)) ++r;
    return r;
}

} // namespace bfree
