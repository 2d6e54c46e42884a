#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "bfree/analytic.hpp"
#include "bfree/correlations.hpp"

namespace bfree {

// S(N) = sum_{h=1}^{N-1} (N-h) c2(h), compensated summation, certified bound.
Bounded s_of_n(const CorrelationContext& ctx, std::uint64_t N);

struct VarianceExact {
    Bounded var;
    Bounded S;
    // set when the 2S vs (rho N)^2 cancellation leaves < 6 significant digits
    bool low_precision = false;
};

// Var(N) = 2 S(N) + rho N - (rho N)^2: the limit variance of the B-free
// count over windows [x, x+N) with uniformly random start.
VarianceExact variance_exact(const CorrelationContext& ctx, std::uint64_t N);

// (1/X) sum_{x=1}^{X} (count_{[x,x+N)} - rho N)^2 with the exact rho as the
// centering. Window sums and their squares accumulate as integers, so the
// result is byte-identical for any thread count.
real_t variance_empirical(const BSpec& spec, std::uint64_t N, std::uint64_t X, real_t rho,
                          unsigned threads = 1);

struct VarianceReport {
    std::uint64_t N = 0;
    real_t var_exact = 0;
    real_t err_bound = 0;
    bool low_precision = false;
    std::optional<real_t> var_empirical;
    std::uint64_t X = 0;
    real_t c_n_alpha = 0;  // C * N^alpha
    real_t ratio = 0;      // var_exact / (C * N^alpha)
};

// One row per N: exact variance, the Theorem-1 comparison C N^alpha, their
// ratio, and (when X > 0) the sliding-window estimate at that X.
std::vector<VarianceReport> convergence_table(const CorrelationContext& ctx,
                                              const AsymptoticParams& params,
                                              const std::vector<std::uint64_t>& n_list,
                                              std::uint64_t empirical_X = 0, unsigned threads = 1);

struct ExceptionalReport {
    std::uint64_t N = 0;
    std::uint64_t X = 0;
    std::uint64_t count = 0;  // windows [x, x+N), x <= X, with no B-free number
    real_t p_hat = 0;
    std::optional<real_t> bound_ratio;  // p_hat * N^(2-alpha) when params exist
};

ExceptionalReport exceptional_probability(const BSpec& spec, std::uint64_t N, std::uint64_t X,
                                          const std::optional<AsymptoticParams>& params,
                                          unsigned threads = 1);

} // namespace bfree
