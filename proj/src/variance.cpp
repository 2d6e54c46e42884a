#include "bfree/variance.hpp"

#include <algorithm>
#include <cmath>

#include "bfree/parallel.hpp"

namespace bfree {

namespace {

// Neumaier variant of Kahan summation; the returned .err is the rounding
// allowance only (term-wise certified error is accumulated by callers).
struct CompensatedSum {
    real_t s = 0, c = 0, abs = 0;

    void add(real_t x) {
        real_t t = s + x;
        if (fabsl(s) >= fabsl(x))
            c += (s - t) + x;
        else
            c += (x - t) + s;
        s = t;
        abs += fabsl(x);
    }
    real_t value() const { return s + c; }
    real_t rounding() const { return abs * 1e-18L; }
};

struct WindowMoments {
    unsigned __int128 sum = 0;
    unsigned __int128 sum_sq = 0;
    std::uint64_t zeros = 0;
};

// Window counts of mu^B over [x, x+N), x in [x_lo, x_hi], as exact integer
// moments. One sieve block per chunk; rolling update per unit shift.
WindowMoments window_moments_range(const BSpec& spec, std::uint64_t N, std::uint64_t x_lo,
                                   std::uint64_t x_hi) {
    SieveWindow w = sieve_window(spec, x_lo, x_hi - x_lo + N);
    WindowMoments m;
    std::uint64_t cnt = 0;
    for (std::uint64_t j = 0; j < N; ++j) cnt += w.bits[j];
    for (std::uint64_t x = x_lo;; ++x) {
        m.sum += cnt;
        m.sum_sq += static_cast<unsigned __int128>(cnt) * cnt;
        m.zeros += (cnt == 0);
        if (x == x_hi) break;
        cnt -= w.bits[x - x_lo];
        cnt += w.bits[x - x_lo + N];
    }
    return m;
}

WindowMoments window_moments(const BSpec& spec, std::uint64_t N, std::uint64_t X,
                             unsigned threads) {
    if (N < 1 || X < 1) throw validation_error("window sweep needs N >= 1 and X >= 1");
    require_valid(spec);
    std::uint64_t chunk = kDefaultBlockLen;
    std::uint64_t n_chunks = (X + chunk - 1) / chunk;
    std::vector<WindowMoments> parts = parallel_map<WindowMoments>(
        n_chunks, threads, [&](std::uint64_t i) {
            std::uint64_t a = 1 + i * chunk;
            std::uint64_t b = std::min(X, a + chunk - 1);
            return window_moments_range(spec, N, a, b);
        });
    WindowMoments total;
    for (const auto& p : parts) {
        total.sum += p.sum;
        total.sum_sq += p.sum_sq;
        total.zeros += p.zeros;
    }
    return total;
}

real_t u128_to_real(unsigned __int128 v) {
    return static_cast<real_t>(static_cast<std::uint64_t>(v >> 64)) * 18446744073709551616.0L +
           static_cast<real_t>(static_cast<std::uint64_t>(v));
}

} // namespace

Bounded s_of_n(const CorrelationContext& ctx, std::uint64_t N) {
    if (N < 1) throw validation_error("s_of_n needs N >= 1");
    CompensatedSum sum;
    real_t err = 0;
    for (std::uint64_t h = 1; h < N; ++h) {
        CorrValue c = corr_exact(ctx, {h});
        real_t weight = static_cast<real_t>(N - h);
        sum.add(weight * c.v.value);
        err += weight * c.v.err;
    }
    return {sum.value(), err + sum.rounding()};
}

VarianceExact variance_exact(const CorrelationContext& ctx, std::uint64_t N) {
    Bounded S = s_of_n(ctx, N);
    Bounded rho = ctx.rho();
    real_t n = static_cast<real_t>(N);
    Bounded rho_n = rho * n;
    Bounded var = S * 2.0L + rho_n - rho_n * rho_n;
    VarianceExact out;
    out.S = S;
    out.var = var;
    // cancellation monitor: magnitude of what was summed vs what survived
    real_t magnitude = 2 * fabsl(S.value) + rho_n.value + rho_n.value * rho_n.value;
    out.low_precision = magnitude * 5e-19L + var.err > 1e-6L * fabsl(var.value);
    return out;
}

real_t variance_empirical(const BSpec& spec, std::uint64_t N, std::uint64_t X, real_t rho,
                          unsigned threads) {
    WindowMoments m = window_moments(spec, N, X, threads);
    real_t x = static_cast<real_t>(X);
    real_t rn = rho * static_cast<real_t>(N);
    return u128_to_real(m.sum_sq) / x - 2 * rn * (u128_to_real(m.sum) / x) + rn * rn;
}

std::vector<VarianceReport> convergence_table(const CorrelationContext& ctx,
                                              const AsymptoticParams& params,
                                              const std::vector<std::uint64_t>& n_list,
                                              std::uint64_t empirical_X, unsigned threads) {
    ThmConstantReport cst = theorem1_constant(ctx.spec(), params);
    std::vector<VarianceReport> out;
    for (std::uint64_t N : n_list) {
        VarianceExact ve = variance_exact(ctx, N);
        VarianceReport rep;
        rep.N = N;
        rep.var_exact = ve.var.value;
        rep.err_bound = ve.var.err;
        rep.low_precision = ve.low_precision;
        rep.c_n_alpha = cst.C * powl(static_cast<real_t>(N), params.alpha);
        rep.ratio = rep.var_exact / rep.c_n_alpha;
        if (empirical_X > 0) {
            rep.var_empirical = variance_empirical(ctx.spec(), N, empirical_X,
                                                   ctx.rho().value, threads);
            rep.X = empirical_X;
        }
        out.push_back(rep);
    }
    return out;
}

ExceptionalReport exceptional_probability(const BSpec& spec, std::uint64_t N, std::uint64_t X,
                                          const std::optional<AsymptoticParams>& params,
                                          unsigned threads) {
    WindowMoments m = window_moments(spec, N, X, threads);
    ExceptionalReport rep;
    rep.N = N;
    rep.X = X;
    rep.count = m.zeros;
    rep.p_hat = static_cast<real_t>(m.zeros) / static_cast<real_t>(X);
    if (params)
        rep.bound_ratio = rep.p_hat * powl(static_cast<real_t>(N), 2 - params->alpha);
    return rep;
}

} // namespace bfree
