#include "bfree/correlations.hpp"


#include <cmath>
#include <algorithm>

#include "bfree/primes.hpp"

namespace bfree {

namespace {

std::vector<std::uint64_t> canonical_pattern(std::vector<std::uint64_t> offsets) {
    offsets.push_back(0);
    std::sort(offsets.begin(), offsets.end());
    offsets.erase(std::unique(offsets.begin(), offsets.end()), offsets.end());
    return offsets;
}

} // namespace

CorrelationContext::CorrelationContext(BSpec spec) : spec_(std::move(spec)) {
    require_valid(spec_);
    if (spec_.is_preset()) {
        tail_.resize(kMaxPatternSize + 1);
        // primes whose p^k falls at or below the direct-handling bound
        std::vector<std::uint64_t> excl = spec_.excluded_primes;
        for (std::uint64_t b : spec_.elements_up_to(kSmallBCap)) {
            std::uint64_t p = iroot(b, spec_.k);
            excl.push_back(p);
        }
        for (unsigned a = 1; a <= kMaxPatternSize; ++a) {
            EulerProductSpec eps;
            eps.terms = {{-static_cast<real_t>(a), spec_.k}};
            eps.excluded_primes = excl;
            tail_[a] = euler_product(eps);
            real_t rel = tail_[a].err / fabsl(tail_[a].value);
            if (rel > truncation_eps_) truncation_eps_ = rel;
        }
    }
    CorrValue r = corr_exact(*this, {});
    rho_ = r.v;
}

Bounded CorrelationContext::tail_base(unsigned a) const {
    if (!spec_.is_preset() || a == 0 || a > kMaxPatternSize)
        throw validation_error("tail product unavailable for this pattern size");
    return tail_[a];
}

unsigned residue_count(std::uint64_t b, const std::vector<std::uint64_t>& offsets) {
    if (b < 2) throw validation_error("residue_count needs b >= 2");
    std::vector<std::uint64_t> res;
    res.push_back(0);
    for (std::uint64_t h : offsets) res.push_back(h % b);
    std::sort(res.begin(), res.end());
    res.erase(std::unique(res.begin(), res.end()), res.end());
    return static_cast<unsigned>(res.size());
}

CorrValue corr_exact(const CorrelationContext& ctx, const std::vector<std::uint64_t>& offsets) {
    const BSpec& spec = ctx.spec();
    std::vector<std::uint64_t> hs = canonical_pattern(offsets);
    unsigned npts = static_cast<unsigned>(hs.size());
    std::vector<std::uint64_t> rest(hs.begin() + 1, hs.end());  // residue_count re-adds 0
    std::uint64_t hmax = hs.back();

    if (!spec.is_preset()) {
        real_t v = 1;
        bool degenerate = false;
        for (std::uint64_t b : spec.elements) {
            unsigned a = residue_count(b, rest);
            if (a == b) degenerate = true;
            v *= 1 - static_cast<real_t>(a) / static_cast<real_t>(b);
        }
        if (degenerate) return {{0, 0}, true};
        real_t err = fabsl(v) * 1e-18L * (2 + static_cast<real_t>(spec.elements.size()));
        return {{v, err}, false};
    }

    if (npts > CorrelationContext::kMaxPatternSize)
        throw validation_error("preset patterns support at most 11 offsets");

    // Finite part: every b <= kSmallBCap directly, plus any larger b that
    // actually collapses residues (A_b < npts forces b | h_i or b | h_i-h_j,
    // so b <= hmax). For b > max(cap, hmax) the factor is (1 - npts/b).
    Bounded tail = ctx.tail_base(npts);
    std::uint64_t direct_limit = std::max<std::uint64_t>(CorrelationContext::kSmallBCap, hmax);
    real_t finite = 1;
    unsigned nfactors = 0;
    bool degenerate = false;
    for (std::uint64_t b : spec.elements_up_to(direct_limit)) {
        unsigned a = residue_count(b, rest);
        real_t rb = static_cast<real_t>(b);
        if (b <= CorrelationContext::kSmallBCap) {
            if (a == b) degenerate = true;
            finite *= 1 - a / rb;
        } else if (a < npts) {
            // swap the tail's generic factor for the collapsed one
            finite *= (1 - a / rb) / (1 - npts / rb);
        }
        ++nfactors;
    }
    if (degenerate) return {{0, 0}, true};
    real_t v = tail.value * finite;
    real_t err = fabsl(finite) * tail.err + fabsl(v) * 1e-18L * (2 + nfactors);
    return {{v, err}, false};
}

Bounded density(const CorrelationContext& ctx) { return ctx.rho(); }

} // namespace bfree
