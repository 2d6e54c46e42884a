#include "bfree/numberfield.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <random>
#include <stdexcept>

#include "bfree/analytic.hpp"
#include "bfree/parallel.hpp"
#include "bfree/primes.hpp"

namespace bfree {

bool gdivides(Gaussian w, Gaussian z) {
    std::int64_t n = static_cast<std::int64_t>(gnorm(w));
    if (n == 0) throw validation_error("division by zero Gaussian integer");
    Gaussian t = z * w.conj();
    return t.a % n == 0 && t.b % n == 0;
}

Gaussian gdiv(Gaussian w, Gaussian z) {
    std::int64_t n = static_cast<std::int64_t>(gnorm(w));
    Gaussian t = z * w.conj();
    return {t.a / n, t.b / n};
}

std::vector<GaussPrime> gaussian_primes_up_to_norm(std::uint64_t limit) {
    std::vector<GaussPrime> out;
    if (limit >= 2) out.push_back({{1, 1}, 2, GaussPrime::Class::Ramified});
    for (std::uint32_t p : primes_up_to(limit)) {
        if (p == 2) continue;
        if (p % 4 == 1) {
            std::int64_t c = 1, d = 0;
            for (;; ++c) {
                std::uint64_t rem = p - static_cast<std::uint64_t>(c) * c;
                d = static_cast<std::int64_t>(std::llroundl(sqrtl(static_cast<real_t>(rem))));
                if (static_cast<std::uint64_t>(d) * d == rem) break;
            }
            out.push_back({{c, d}, p, GaussPrime::Class::Split});
            out.push_back({{c, -d}, p, GaussPrime::Class::Split});
        } else if (static_cast<std::uint64_t>(p) * p <= limit) {
            out.push_back({{p, 0}, static_cast<std::uint64_t>(p) * p, GaussPrime::Class::Inert});
        }
    }
    std::sort(out.begin(), out.end(),
              [](const GaussPrime& x, const GaussPrime& y) { return x.norm < y.norm; });
    return out;
}

namespace {

Gaussian find_split_generator(std::uint64_t p) {
    for (std::int64_t c = 1;; ++c) {
        std::uint64_t rem = p - static_cast<std::uint64_t>(c) * c;
        std::int64_t d = static_cast<std::int64_t>(std::llroundl(sqrtl(static_cast<real_t>(rem))));
        if (static_cast<std::uint64_t>(d) * d == rem) return {c, d};
    }
}

unsigned valuation(Gaussian pi, Gaussian z) {
    unsigned v = 0;
    while (gdivides(pi, z)) {
        z = gdiv(pi, z);
        ++v;
    }
    return v;
}

} // namespace

bool is_kfree_gaussian(Gaussian z, unsigned k) {
    if (k < 1) throw validation_error("k must be >= 1");
    if (z.a == 0 && z.b == 0) return false;
    for (const PrimePower& pp : factorize(gnorm(z))) {
        if (pp.p == 2) {
            // N((1+i)^v) = 2^v: the ramified exponent is read off the norm
            if (pp.e >= k) return false;
        } else if (pp.p % 4 == 3) {
            if (pp.e / 2 >= k) return false;
        } else {
            if (pp.e < k) continue;
            Gaussian pi = find_split_generator(pp.p);
            unsigned v1 = valuation(pi, z);
            if (v1 >= k || pp.e - v1 >= k) return false;
        }
    }
    return true;
}

NFWindow::NFWindow(Gaussian center, std::int64_t radius, std::vector<std::uint8_t> bits)
    : center_(center), radius_(radius), width_(2 * radius + 1), bits_(std::move(bits)) {}

bool NFWindow::at(Gaussian z) const {
    std::int64_t i = z.a - (center_.a - radius_);
    std::int64_t j = z.b - (center_.b - radius_);
    if (i < 0 || i >= width_ || j < 0 || j >= width_)
        throw validation_error("point outside the sieved box");
    return bits_[static_cast<std::size_t>(i) * width_ + j] != 0;
}

NFWindow sieve_ball(Gaussian center, std::int64_t radius, unsigned k) {
    if (radius < 0) throw validation_error("ball radius must be >= 0");
    if (k < 1) throw validation_error("k must be >= 1");
    std::int64_t W = 2 * radius + 1;
    std::uint64_t cells = static_cast<std::uint64_t>(W) * W;
    if (cells > memory_budget_bytes() / 2) throw resource_error("ball sieve exceeds memory budget");
    std::vector<std::uint8_t> bits(cells, 1);

    std::int64_t alo = center.a - radius, ahi = center.a + radius;
    std::int64_t blo = center.b - radius, bhi = center.b + radius;
    auto amax = std::max(std::llabs(alo), std::llabs(ahi));
    auto bmax = std::max(std::llabs(blo), std::llabs(bhi));
    std::uint64_t maxnorm = static_cast<std::uint64_t>(amax) * amax +
                            static_cast<std::uint64_t>(bmax) * bmax;

    auto mark_lattice = [&](Gaussian q) {
        // lattice q(m + ni): m,n ranges from the box corners of z conj(q)/N(q)
        std::int64_t nq = static_cast<std::int64_t>(gnorm(q));
        std::int64_t mlo = INT64_MAX, mhi = INT64_MIN, nlo = INT64_MAX, nhi = INT64_MIN;
        for (std::int64_t a : {alo, ahi})
            for (std::int64_t b : {blo, bhi}) {
                std::int64_t re = a * q.a + b * q.b;
                std::int64_t im = b * q.a - a * q.b;
                mlo = std::min(mlo, re);
                mhi = std::max(mhi, re);
                nlo = std::min(nlo, im);
                nhi = std::max(nhi, im);
            }
        for (std::int64_t m = mlo / nq - 1; m <= mhi / nq + 1; ++m)
            for (std::int64_t n = nlo / nq - 1; n <= nhi / nq + 1; ++n) {
                std::int64_t za = q.a * m - q.b * n;
                std::int64_t zb = q.b * m + q.a * n;
                if (za < alo || za > ahi || zb < blo || zb > bhi) continue;
                bits[static_cast<std::size_t>(za - alo) * W + (zb - blo)] = 0;
            }
    };

    for (const GaussPrime& gp : gaussian_primes_up_to_norm(maxnorm)) {
        std::uint64_t nk = 1;
        bool fits = true;
        for (unsigned i = 0; i < k && fits; ++i)
            fits = mul_within(nk, gp.norm, maxnorm, nk);
        if (!fits) continue;
        Gaussian q{1, 0};
        for (unsigned i = 0; i < k; ++i) q = q * gp.gen;
        mark_lattice(q);
    }
    // the zero ideal sits inside every p^k; tiny boxes may have no prime
    // power in range, so force it rather than rely on the marking loop
    if (alo <= 0 && 0 <= ahi && blo <= 0 && 0 <= bhi)
        bits[static_cast<std::size_t>(-alo) * W + (-blo)] = 0;

    NFWindow win(center, radius, std::move(bits));

    // fixed-seed spot check against per-point factorization; failure means
    // the lattice enumeration above is wrong, not bad input
    std::mt19937 rng(0x5eedu);
    for (int t = 0; t < 1000; ++t) {
        Gaussian z{alo + static_cast<std::int64_t>(rng() % W),
                   blo + static_cast<std::int64_t>(rng() % W)};
        if (win.at(z) != is_kfree_gaussian(z, k))
            throw std::logic_error("ball sieve self-check failed");
    }
    return win;
}

std::uint64_t l1_ball_size(std::int64_t x) {
    if (x < 0) throw validation_error("ball radius must be >= 0");
    return 2 * static_cast<std::uint64_t>(x) * x + 2 * static_cast<std::uint64_t>(x) + 1;
}

std::vector<Gaussian> l1_ball(std::int64_t x) {
    std::vector<Gaussian> out;
    out.reserve(l1_ball_size(x));
    for (std::int64_t a = -x; a <= x; ++a) {
        std::int64_t r = x - std::llabs(a);
        for (std::int64_t b = -r; b <= r; ++b) out.push_back({a, b});
    }
    return out;
}

namespace {

/*
 * Ideal-indexed Euler product over Z[i]: group prime ideals by the rational
 * prime below. Direct factors for p <= 101 (ramified local at y = 1/2, split
 * squared at y = 1/p, inert at y = 1/p^2); the tail converts to class prime
 * zetas: sum_m d_m [2 P_{1(4),>101}(m) + P_{3(4),>101}(2m)], with the same
 * majorant bound as the rational engine (base 103 split, 103^2 inert).
 */
Bounded ideal_euler_product(const std::vector<EulerTerm>& local) {
    constexpr unsigned M = 30;
    for (const auto& t : local)
        if (t.e < 2) throw validation_error("ideal product diverges: exponent < 2");

    auto local_at = [&](real_t y) {
        real_t f = 1;
        for (const auto& t : local) f += t.c * powl(y, static_cast<real_t>(t.e));
        if (f <= 0) throw validation_error("ideal product local factor nonpositive");
        return f;
    };

    real_t direct = 1;
    for (std::uint32_t p : primes_up_to(101)) {
        if (p == 2)
            direct *= local_at(0.5L);
        else if (p % 4 == 1) {
            real_t f = local_at(1.0L / p);
            direct *= f * f;
        } else {
            direct *= local_at(1.0L / (static_cast<real_t>(p) * p));
        }
    }

    std::vector<real_t> d = log_expansion_coeffs(local, M);
    real_t logsum = 0, perr = 0;
    for (unsigned m = 2; m <= M; ++m) {
        if (d[m] == 0) continue;
        Bounded p1 = prime_zeta_class(static_cast<real_t>(m), 1);
        Bounded p3 = prime_zeta_class(static_cast<real_t>(2 * m), 3);
        real_t t1 = p1.value, t3 = p3.value;
        for (std::uint32_t p : primes_up_to(101)) {
            if (p % 4 == 1)
                t1 -= powl(static_cast<real_t>(p), -static_cast<real_t>(m));
            else if (p % 4 == 3)
                t3 -= powl(static_cast<real_t>(p), -static_cast<real_t>(2 * m));
        }
        logsum += d[m] * (2 * t1 + t3);
        perr += fabsl(d[m]) * (2 * p1.err + p3.err);
    }
    real_t tail = 2 * log_tail_bound(local, M, 103.0L) + log_tail_bound(local, M, 103.0L * 103.0L);
    real_t value = direct * expl(logsum);
    real_t err = fabsl(value) * ((perr + tail) * 1.01L + 1e-16L);
    return {value, err};
}

std::mutex g_nf_cache_mu;
std::vector<std::pair<unsigned, Bounded>> g_density_cache;
std::vector<std::pair<unsigned, Bounded>> g_pair_base_cache;

Bounded cached_ideal_product(std::vector<std::pair<unsigned, Bounded>>& cache, unsigned k,
                             real_t coeff) {
    std::lock_guard<std::mutex> lock(g_nf_cache_mu);
    for (const auto& [kk, v] : cache)
        if (kk == k) return v;
    Bounded v = ideal_euler_product({{coeff, k}});
    cache.emplace_back(k, v);
    return v;
}

} // namespace

Bounded nf_density(unsigned k) {
    if (k < 2) throw validation_error("k-free density needs k >= 2");
    return cached_ideal_product(g_density_cache, k, -1);
}

Bounded nf_corr2(unsigned k, Gaussian h) {
    if (k < 2) throw validation_error("pair correlation needs k >= 2");
    if (h.a == 0 && h.b == 0) return nf_density(k);
    Bounded base = cached_ideal_product(g_pair_base_cache, k, -2);

    // collapse factors: ideals with p^k | (h) switch D = 2 to D = 1
    real_t ratio = 1;
    auto collapse = [&](std::uint64_t prime_norm, unsigned mult) {
        real_t nk = powl(static_cast<real_t>(prime_norm), static_cast<real_t>(k));
        for (unsigned i = 0; i < mult; ++i) ratio *= (1 - 1 / nk) / (1 - 2 / nk);
    };
    for (const PrimePower& pp : factorize(gnorm(h))) {
        if (pp.p == 2) {
            if (pp.e >= k) collapse(2, 1);
        } else if (pp.p % 4 == 3) {
            if (pp.e / 2 >= k) collapse(pp.p * pp.p, 1);
        } else {
            if (pp.e < k) continue;
            Gaussian pi = find_split_generator(pp.p);
            unsigned v1 = valuation(pi, h);
            unsigned hits = (v1 >= k ? 1u : 0u) + (pp.e - v1 >= k ? 1u : 0u);
            if (hits) collapse(pp.p, hits);
        }
    }
    return {base.value * ratio, base.err * ratio + fabsl(base.value * ratio) * 1e-17L};
}

namespace {

// evens (parity = 0) or odds (parity = 1) in [lo, hi]
std::int64_t parity_count(std::int64_t lo, std::int64_t hi, int parity) {
    if (lo > hi) return 0;
    // shift to nonnegative to keep the rounding uniform
    std::int64_t shift = (std::llabs(lo) + 2) & ~1ll;
    lo += shift;
    hi += shift;
    auto upto = [parity](std::int64_t n) {  // count of matching values in [0, n]
        if (n < 0) return static_cast<std::int64_t>(0);
        return parity == 0 ? n / 2 + 1 : (n + 1) / 2;
    };
    return upto(hi) - upto(lo - 1);
}

// |B_N meet (B_N + h)| in rotated coordinates u = a+b, v = a-b: independent
// interval overlaps in u and v, tied by the parity u = v (mod 2).
std::uint64_t ball_pair_count(std::int64_t N, Gaussian h) {
    std::int64_t hu = h.a + h.b, hv = h.a - h.b;
    std::int64_t ulo = std::max(-N, hu - N), uhi = std::min(N, hu + N);
    std::int64_t vlo = std::max(-N, hv - N), vhi = std::min(N, hv + N);
    if (ulo > uhi || vlo > vhi) return 0;
    std::int64_t ue = parity_count(ulo, uhi, 0), uo = parity_count(ulo, uhi, 1);
    std::int64_t ve = parity_count(vlo, vhi, 0), vo = parity_count(vlo, vhi, 1);
    return static_cast<std::uint64_t>(ue * ve + uo * vo);
}

} // namespace

NFVarianceReport nf_variance(unsigned k, std::int64_t N, std::int64_t M, unsigned threads,
                             std::int64_t corr_cap) {
    if (N < 0 || M < 1 || M < N) throw validation_error("nf variance needs 0 <= N <= M");
    std::int64_t R = M + N;
    NFWindow win = sieve_ball({0, 0}, R, k);

    // rotated prefix sums: O(1) window counts for every center
    std::int64_t D = 4 * R + 1;  // u, v in [-2R, 2R]
    std::uint64_t cells = static_cast<std::uint64_t>(D + 1) * (D + 1);
    if (cells * sizeof(std::int32_t) > memory_budget_bytes() / 2)
        throw resource_error("variance sweep exceeds memory budget");
    std::vector<std::int32_t> pf(cells, 0);
    auto pf_at = [&](std::int64_t i, std::int64_t j) -> std::int32_t& {
        return pf[static_cast<std::size_t>(i) * (D + 1) + j];
    };
    for (std::int64_t u = -2 * R; u <= 2 * R; ++u)
        for (std::int64_t v = -2 * R; v <= 2 * R; ++v) {
            std::int32_t bit = 0;
            if (((u ^ v) & 1) == 0) {
                std::int64_t a = (u + v) / 2, b = (u - v) / 2;
                if (std::llabs(a) <= R && std::llabs(b) <= R) bit = win.at({a, b}) ? 1 : 0;
            }
            pf_at(u + 2 * R + 1, v + 2 * R + 1) =
                bit + pf_at(u + 2 * R, v + 2 * R + 1) + pf_at(u + 2 * R + 1, v + 2 * R) -
                pf_at(u + 2 * R, v + 2 * R);
        }
    auto rect = [&](std::int64_t u1, std::int64_t u2, std::int64_t v1, std::int64_t v2) {
        u1 += 2 * R; u2 += 2 * R; v1 += 2 * R; v2 += 2 * R;
        return static_cast<std::uint64_t>(pf_at(u2 + 1, v2 + 1) - pf_at(u1, v2 + 1) -
                                          pf_at(u2 + 1, v1) + pf_at(u1, v1));
    };

    struct RowSums {
        unsigned __int128 sum = 0, sum_sq = 0;
    };
    std::vector<RowSums> rows = parallel_map<RowSums>(
        static_cast<std::uint64_t>(2 * M + 1), threads, [&](std::uint64_t row) {
            std::int64_t ma = static_cast<std::int64_t>(row) - M;
            std::int64_t half = M - std::llabs(ma);
            RowSums rs;
            for (std::int64_t mb = -half; mb <= half; ++mb) {
                std::int64_t mu = ma + mb, mv = ma - mb;
                std::uint64_t cnt = rect(mu - N, mu + N, mv - N, mv + N);
                rs.sum += cnt;
                rs.sum_sq += static_cast<unsigned __int128>(cnt) * cnt;
            }
            return rs;
        });
    unsigned __int128 sum = 0, sum_sq = 0;
    for (const auto& rs : rows) {
        sum += rs.sum;
        sum_sq += rs.sum_sq;
    }

    real_t rho = nf_density(k).value;
    real_t centers = static_cast<real_t>(l1_ball_size(M));
    real_t ball_n = static_cast<real_t>(l1_ball_size(N));
    real_t mean_sq = static_cast<real_t>(sum_sq) / centers;
    real_t mean = static_cast<real_t>(sum) / centers;
    real_t rb = rho * ball_n;

    NFVarianceReport rep;
    rep.k = k;
    rep.N = N;
    rep.M = M;
    rep.var_sliding = mean_sq - 2 * rb * mean + rb * rb;
    std::int64_t n_eff = std::max<std::int64_t>(N, 1);
    rep.var_over_n3 = rep.var_sliding / (static_cast<real_t>(n_eff) * n_eff * n_eff);

    if (N <= corr_cap) {
        // limit second moment: sum over difference vectors of pair counts
        // times the exact pair correlation
        real_t m2 = 0;
        for (std::int64_t ha = -2 * N; ha <= 2 * N; ++ha) {
            std::int64_t hr = 2 * N - std::llabs(ha);
            for (std::int64_t hb = -hr; hb <= hr; ++hb) {
                std::uint64_t pairs = ball_pair_count(N, {ha, hb});
                if (pairs == 0) continue;
                m2 += static_cast<real_t>(pairs) * nf_corr2(k, {ha, hb}).value;
            }
        }
        rep.var_corr = m2 - rb * rb;
        rep.ratio = rep.var_sliding / *rep.var_corr;
    }
    return rep;
}

IdealRep make_ideal(Gaussian gen) {
    if (gen.a == 0 && gen.b == 0) throw validation_error("the zero ideal has no cell");
    IdealRep rep;
    rep.gen = gen;
    rep.norm = gnorm(gen);
    // Lagrange reduction of the lattice basis {gen, i gen} under L2
    Gaussian u = gen, v = {-gen.b, gen.a};
    auto len2 = [](Gaussian z) { return z.a * z.a + z.b * z.b; };
    for (;;) {
        if (len2(v) < len2(u)) std::swap(u, v);
        std::int64_t dot = u.a * v.a + u.b * v.b;
        std::int64_t t = static_cast<std::int64_t>(
            std::llroundl(static_cast<real_t>(dot) / static_cast<real_t>(len2(u))));
        if (t == 0) break;
        v = v - Gaussian{t * u.a, t * u.b};
    }
    rep.basis_u = u;
    rep.basis_v = v;
    rep.diam = static_cast<std::int64_t>(l1norm(u) + l1norm(v));
    return rep;
}

BallCountReport ideal_ball_count(const IdealRep& ideal, Gaussian shift, std::int64_t x) {
    if (x < 0) throw validation_error("ball radius must be >= 0");
    Gaussian g = ideal.gen;
    std::int64_t nq = static_cast<std::int64_t>(ideal.norm);
    // n + shift = g w: w ranges bounded by the corners of the shifted box
    std::int64_t alo = shift.a - x, ahi = shift.a + x;
    std::int64_t blo = shift.b - x, bhi = shift.b + x;
    std::int64_t mlo = INT64_MAX, mhi = INT64_MIN, nlo = INT64_MAX, nhi = INT64_MIN;
    for (std::int64_t a : {alo, ahi})
        for (std::int64_t b : {blo, bhi}) {
            std::int64_t re = a * g.a + b * g.b;
            std::int64_t im = b * g.a - a * g.b;
            mlo = std::min(mlo, re);
            mhi = std::max(mhi, re);
            nlo = std::min(nlo, im);
            nhi = std::max(nhi, im);
        }
    std::uint64_t count = 0;
    for (std::int64_t m = mlo / nq - 1; m <= mhi / nq + 1; ++m)
        for (std::int64_t n = nlo / nq - 1; n <= nhi / nq + 1; ++n) {
            Gaussian z = Gaussian{g.a * m - g.b * n, g.b * m + g.a * n} - shift;
            if (l1norm(z) <= static_cast<std::uint64_t>(x)) ++count;
        }
    BallCountReport rep;
    rep.T = count;
    rep.predicted = static_cast<real_t>(l1_ball_size(x)) / static_cast<real_t>(ideal.norm);
    rep.error = fabsl(static_cast<real_t>(count) - rep.predicted);
    rep.bound_scale = static_cast<real_t>(ideal.diam) * static_cast<real_t>(x) /
                      static_cast<real_t>(ideal.norm);
    return rep;
}

} // namespace bfree
