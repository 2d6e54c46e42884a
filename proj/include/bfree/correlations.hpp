#pragma once

#include <cstdint>
#include <vector>

#include "bfree/analytic.hpp"
#include "bfree/bset.hpp"
#include "bfree/types.hpp"

namespace bfree {

// Correlation value: the density of n with n+h B-free for all h in the
// pattern. degenerate marks a local factor that is exactly zero (the pattern
// covers every residue class of some b), which forces the value 0.
struct CorrValue {
    Bounded v;
    bool degenerate = false;
};

// Immutable per-spec context: the density and the tail products
// prod_{b > cutoff}(1 - a/b) for pattern sizes a = 1..kMaxPatternSize.
// For explicit B everything is a finite product and the cache is unused.
class CorrelationContext {
public:
    static constexpr unsigned kMaxPatternSize = 12;
    // Tail products start above this bound; small b are handled directly,
    // which keeps every cached factor strictly positive (a <= 12 < 129 <= b).
    static constexpr std::uint64_t kSmallBCap = 128;

    explicit CorrelationContext(BSpec spec);

    const BSpec& spec() const { return spec_; }
    Bounded rho() const { return rho_; }
    real_t truncation_eps() const { return truncation_eps_; }

    // prod over b in B, b > kSmallBCap, of (1 - a/b); preset-only cache.
    Bounded tail_base(unsigned a) const;

private:
    BSpec spec_;
    Bounded rho_;
    std::vector<Bounded> tail_;  // index a, presets only
    real_t truncation_eps_ = 0;
};

// Distinct residues of {0} union offsets mod b.
unsigned residue_count(std::uint64_t b, const std::vector<std::uint64_t>& offsets);

// prod_{b in B} (1 - A_b/b) for the pattern {0} union offsets.
CorrValue corr_exact(const CorrelationContext& ctx, const std::vector<std::uint64_t>& offsets);

// corr_exact of the empty pattern.
Bounded density(const CorrelationContext& ctx);

} // namespace bfree
