#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "bfree/types.hpp"

namespace bfree {

// A B-set: either an explicit finite list of moduli, or the k-free preset
// B = {p^k : p prime, p not excluded}. Elements must be pairwise coprime (A1);
// sum of reciprocals finite (A2) holds for both shapes by construction.
struct BSpec {
    enum class Kind { Explicit, KFreePreset };

    Kind kind = Kind::Explicit;
    std::vector<std::uint64_t> elements;         // Explicit: ascending, each > 1
    unsigned k = 0;                              // KFreePreset
    std::vector<std::uint64_t> excluded_primes;  // KFreePreset

    static BSpec make_explicit(std::vector<std::uint64_t> elems);
    static BSpec kfree(unsigned k, std::vector<std::uint64_t> exclude = {});

    // {"explicit":[4,9,25]} or {"kfree":{"k":2,"exclude":[2]}}
    static BSpec from_json(const std::string& text);
    std::string to_json() const;

    bool contains_two() const;
    bool is_preset() const { return kind == Kind::KFreePreset; }

    // All b in B with b <= limit, ascending. Presets materialize lazily:
    // only b <= limit can divide anything in a window ending at limit.
    std::vector<std::uint64_t> elements_up_to(std::uint64_t limit) const;

    std::string describe() const;
};

struct ValidationReport {
    bool valid = true;
    bool contains_two = false;
    std::vector<std::string> violations;
};

ValidationReport validate_bspec(const BSpec& spec);

// Throws validation_error when the spec fails its axioms.
void require_valid(const BSpec& spec);

struct SieveWindow {
    std::uint64_t start = 1;
    std::vector<std::uint8_t> bits;  // bits[j] = mu^B(start + j)

    std::uint64_t length() const { return bits.size(); }
};

// Exact mu^B over [start, start+length). Allocation is checked against the
// memory budget; callers needing more should iterate blocks.
SieveWindow sieve_window(const BSpec& spec, std::uint64_t start, std::uint64_t length);

// Per-element recomputation of mu^B(n), used as the sieve's ground truth.
bool is_bfree_direct(const BSpec& spec, std::uint64_t n);

// Number of n with n + max(offsets) inside the window and n + h B-free for
// every h in {0} union offsets. Offsets are deduplicated; h0 = 0 is implicit.
std::uint64_t count_pattern(const SieveWindow& window, std::vector<std::uint64_t> offsets);

// Visits mu^B over [lo, hi] in consecutive blocks (ascending, no overlap).
void for_each_sieve_block(const BSpec& spec, std::uint64_t lo, std::uint64_t hi,
                          std::uint64_t block_len,
                          const std::function<void(const SieveWindow&)>& visit);

inline constexpr std::uint64_t kDefaultBlockLen = 1ull << 22;

// #{n <= X : n+h B-free for all h in {0} union offsets}; block-sieved,
// deterministic for any thread count (integer chunk sums, fixed order).
std::uint64_t pattern_count(const BSpec& spec, std::uint64_t X,
                            const std::vector<std::uint64_t>& offsets, unsigned threads = 1);

// pattern_count / X.
real_t empirical_correlation(const BSpec& spec, std::uint64_t X,
                             const std::vector<std::uint64_t>& offsets, unsigned threads = 1);

} // namespace bfree
