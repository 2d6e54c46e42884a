#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace bfree {

// All analytic work runs in extended precision (80-bit on x86-64, eps ~ 5.4e-20).
// The variance identity cancels two O(N^2) terms at N = 1e4 and still needs
// ~1e-10 of the result, so ingredient accuracy must sit well below 1e-12.
using real_t = long double;

// Value with a certified absolute error bound.
struct Bounded {
    real_t value = 0;
    real_t err = 0;

    Bounded() = default;
    Bounded(real_t v, real_t e) : value(v), err(e) {}

    Bounded operator*(const Bounded& o) const {
        // |ab - a'b'| <= |a| eb + |b| ea + ea eb
        real_t av = value < 0 ? -value : value;
        real_t bv = o.value < 0 ? -o.value : o.value;
        return {value * o.value, av * o.err + bv * err + err * o.err};
    }
    Bounded operator*(real_t c) const {
        real_t ac = c < 0 ? -c : c;
        return {value * c, err * ac};
    }
    Bounded operator+(const Bounded& o) const { return {value + o.value, err + o.err}; }
    Bounded operator-(const Bounded& o) const { return {value - o.value, err + o.err}; }
};

// Exit code 1: bad input (spec violation, domain error, inapplicable request).
class validation_error : public std::runtime_error {
public:
    explicit validation_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Exit code 2: a computation would exceed the configured memory/output budget.
class resource_error : public std::runtime_error {
public:
    explicit resource_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Sieve allocation cap in bytes; reads BFREE_MEM_BUDGET_MB (default 4096 MB).
std::uint64_t memory_budget_bytes();

} // namespace bfree
