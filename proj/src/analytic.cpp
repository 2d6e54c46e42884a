#include "bfree/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <json.hpp>

#include "bfree/primes.hpp"

namespace bfree {

namespace {

constexpr real_t kPi = 3.14159265358979323846264338327950288L;

real_t ipow(real_t base, unsigned e) {
    real_t r = 1, b = base;
    while (e) {
        if (e & 1) r *= b;
        b *= b;
        e >>= 1;
    }
    return r;
}

/*
 * Alternating-series acceleration (Cohen / Rodriguez Villegas / Zagier,
 * "Convergence acceleration of alternating series", algorithm 1).
 * For sum (-1)^k a_k with (a_k) the moment sequence of a positive measure
 * on [0,1] -- true for a_k = (k+1)^{-s} and a_k = (2k+1)^{-s}, s > 0 --
 * the n-term result has error <= 3 / (3+sqrt(8))^n * a_0.
 * With n = 64 that is ~1e-49: rounding, not truncation, limits accuracy.
 */
template <class TermFn>
real_t cvz_alternating(TermFn a, int n) {
    real_t d = ipow(3 + 2 * sqrtl(2.0L), static_cast<unsigned>(n));
    d = (d + 1 / d) / 2;
    real_t b = -1, c = -d, s = 0;
    for (int k = 0; k < n; ++k) {
        c = b - c;
        s += c * a(k);
        b = (k + n) * (k - n) * b / ((k + 0.5L) * (k + 1));
    }
    return s / d;
}

constexpr int kCvzTerms = 64;
constexpr real_t kRoundEps = 5e-19L;  // generous long double rounding allowance

// mu(n) for the Moebius-log prime zeta formula; n small.
int moebius_small(unsigned n) {
    int mu = 1;
    for (unsigned p = 2; p * p <= n; ++p) {
        if (n % p) continue;
        n /= p;
        if (n % p == 0) return 0;
        mu = -mu;
    }
    if (n > 1) mu = -mu;
    return mu;
}

const std::vector<std::uint32_t>& small_primes() {
    static const std::vector<std::uint32_t> ps = primes_up_to(101);
    return ps;
}

constexpr std::uint64_t kDirectPrimeCap = 101;  // direct Euler factors for p <= 101

} // namespace

Bounded zeta_real(real_t s) {
    if (!(s > 1)) throw validation_error("zeta_real requires s > 1");
    if (s >= 40) {
        // direct sum; tail <= integral_{64}^inf t^-s dt = 64^{1-s}/(s-1)
        real_t v = 0;
        for (int n = 64; n >= 1; --n) v += powl(static_cast<real_t>(n), -s);
        real_t tail = powl(64.0L, 1 - s) / (s - 1);
        return {v, tail + v * kRoundEps * 8};
    }
    real_t eta = cvz_alternating([s](int k) { return powl(static_cast<real_t>(k + 1), -s); },
                                 kCvzTerms);
    real_t denom = 1 - powl(2.0L, 1 - s);
    real_t v = eta / denom;
    real_t trunc = 3.0L / ipow(3 + 2 * sqrtl(2.0L), kCvzTerms) / denom;
    return {v, trunc + v * kRoundEps};
}

Bounded dirichlet_beta(real_t s) {
    if (!(s >= 1)) throw validation_error("dirichlet_beta requires s >= 1");
    real_t v = cvz_alternating([s](int k) { return powl(static_cast<real_t>(2 * k + 1), -s); },
                               kCvzTerms);
    real_t trunc = 3.0L / ipow(3 + 2 * sqrtl(2.0L), kCvzTerms);
    return {v, trunc + v * kRoundEps};
}

/*
 * Stirling with Bernoulli correction, shifted so the argument is >= 12:
 *   ln G(y) = (y - 1/2) ln y - y + ln(2 pi)/2 + sum_{j<=11} B_2j/((2j)(2j-1) y^(2j-1))
 * The remainder of the (divergent, enveloping) series is bounded by the
 * first omitted term: |B_24|/(24*23*y^23) < 2.4e-23 relative at y = 12.
 */
Bounded gamma_real(real_t x) {
    if (!(x > 0) || !(x < 30)) throw validation_error("gamma_real requires 0 < x < 30");
    static const real_t stirling[] = {
        1.0L / 12,           -1.0L / 360,          1.0L / 1260,        -1.0L / 1680,
        1.0L / 1188,         -691.0L / 360360,     1.0L / 156,         -3617.0L / 122400,
        43867.0L / 244188,   -174611.0L / 125400,  854513.0L / 63756,
    };
    real_t shift_prod = 1;
    real_t y = x;
    while (y < 12) {
        shift_prod *= y;
        y += 1;
    }
    real_t lg = (y - 0.5L) * logl(y) - y + 0.91893853320467274178032973640562L;
    real_t y2 = y * y, yp = y;
    for (real_t coeff : stirling) {
        lg += coeff / yp;
        yp *= y2;
    }
    real_t v = expl(lg) / shift_prod;
    real_t remainder_rel = (86580.25L / 552) / powl(y, 23.0L);
    return {v, v * (remainder_rel + 40 * kRoundEps)};
}

/*
 * P_cls(s) via Moebius inversion of log of the class L-functions mod 4:
 *   P(s)     = sum_n mu(n)/n log zeta(ns)
 *   P_chi(s) = sum_n mu(n)/n log L(ns, chi4^n),  chi4^n = chi4 (n odd),
 *              principal mod 4 (n even) with L(y, chi0) = zeta(y)(1 - 2^-y)
 *   P_1 = (P - 2^-s + P_chi)/2,  P_3 = (P - 2^-s - P_chi)/2.
 * Truncation at n_max: |log zeta(y)|, |log L(y,.)| <= 2*2^-y for y >= 2, so
 * the dropped tail is below 4 * 2^(-n_max s).
 */
Bounded prime_zeta_class(real_t s, int cls) {
    if (!(s > 1)) throw validation_error("prime_zeta requires s > 1");
    if (cls != 0 && cls != 1 && cls != 3) throw validation_error("prime class must be 0, 1, or 3");
    int n_max = static_cast<int>(88 / s) + 1;
    if (n_max < 4) n_max = 4;
    if (n_max > 128) n_max = 128;

    real_t p_all = 0, p_all_err = 0;
    real_t p_chi = 0, p_chi_err = 0;
    for (int n = 1; n <= n_max; ++n) {
        int mu = moebius_small(static_cast<unsigned>(n));
        if (mu == 0) continue;
        real_t y = s * n;
        Bounded z = zeta_real(y);
        p_all += mu * logl(z.value) / n;
        p_all_err += z.err / z.value / n;
        if (cls != 0) {
            if (n % 2) {
                Bounded bt = dirichlet_beta(y);
                p_chi += mu * logl(bt.value) / n;
                p_chi_err += bt.err / bt.value / n;
            } else {
                real_t lv = logl(z.value) + logl(1 - powl(2.0L, -y));
                p_chi += mu * lv / n;
                p_chi_err += z.err / z.value / n;
            }
        }
    }
    real_t trunc = 4 * powl(2.0L, -s * n_max);
    if (cls == 0) return {p_all, p_all_err + trunc + fabsl(p_all) * kRoundEps * n_max};
    real_t p_odd = p_all - powl(2.0L, -s);
    real_t err = p_all_err + p_chi_err + 2 * trunc + 1e-18L;
    if (cls == 1) return {(p_odd + p_chi) / 2, err};
    return {(p_odd - p_chi) / 2, err};
}

/*
 * d_m of log(1 + g), g(y) = sum c_j y^{e_j}:  from L'(1+g) = g',
 *   d_m = g_m - (1/m) sum_{j=1}^{m-1} (m-j) d_{m-j} g_j.
 */
std::vector<real_t> log_expansion_coeffs(const std::vector<EulerTerm>& terms, unsigned M) {
    std::vector<real_t> g(M + 1, 0), d(M + 1, 0);
    for (const auto& t : terms)
        if (t.e <= M) g[t.e] += t.c;
    for (unsigned m = 1; m <= M; ++m) {
        real_t acc = g[m];
        for (unsigned j = 1; j < m; ++j)
            if (g[j] != 0 && d[m - j] != 0) acc -= (static_cast<real_t>(m - j) / m) * d[m - j] * g[j];
        d[m] = acc;
    }
    return d;
}

/*
 * Tail of the log expansion beyond M, summed over primes (or prime norms)
 * >= base. With ghat the absolute-coefficient majorant and y0 chosen so
 * ghat(y0) <= 1/2, Cauchy's bound on -log(1 - ghat) gives
 *   |d_m| <= f0 * y0^-m,  f0 = -log(1 - ghat(y0)) <= log 2,
 * and sum_{p >= base} p^-m <= base^-m (1 + base/(m-1)), so the dropped part
 * is below (1 + base/M) * f0 * q^(M+1)/(1-q), q = 1/(base*y0).
 */
real_t log_tail_bound(const std::vector<EulerTerm>& terms, unsigned M, real_t base) {
    auto ghat = [&](real_t y) {
        real_t s = 0;
        for (const auto& t : terms) s += fabsl(t.c) * powl(y, static_cast<real_t>(t.e));
        return s;
    };
    real_t y0 = 0.49L;
    while (y0 > 1e-13L && ghat(y0) > 0.5L) y0 /= 2;
    if (ghat(y0) > 0.5L || base * y0 <= 1)
        throw validation_error("euler product coefficients too large for tail acceleration");
    real_t f0 = -logl(1 - ghat(y0));
    real_t q = 1 / (base * y0);
    return (1 + base / M) * f0 * powl(q, static_cast<real_t>(M + 1)) / (1 - q);
}

Bounded euler_product(const EulerProductSpec& spec) {
    constexpr unsigned M = 30;
    for (const auto& t : spec.terms)
        if (t.e < 2) throw validation_error("euler product diverges: exponent < 2");

    std::vector<std::uint64_t> excl = spec.excluded_primes;
    std::sort(excl.begin(), excl.end());

    real_t direct = 1;
    for (std::uint32_t p : small_primes()) {
        if (std::binary_search(excl.begin(), excl.end(), static_cast<std::uint64_t>(p))) continue;
        real_t local = 1;
        for (const auto& t : spec.terms) local += t.c / ipow(static_cast<real_t>(p), t.e);
        if (local <= 0)
            throw validation_error("euler product local factor nonpositive at p=" + std::to_string(p));
        direct *= local;
    }

    std::vector<real_t> d = log_expansion_coeffs(spec.terms, M);
    real_t logsum = 0, perr = 0;
    for (unsigned m = 2; m <= M; ++m) {
        if (d[m] == 0) continue;
        Bounded pm = prime_zeta_class(static_cast<real_t>(m), 0);
        real_t tail_m = pm.value;
        for (std::uint32_t p : small_primes()) tail_m -= ipow(1.0L / p, m);
        for (std::uint64_t p : excl)
            if (p > kDirectPrimeCap) tail_m -= ipow(1.0L / static_cast<real_t>(p), m);
        logsum += d[m] * tail_m;
        perr += fabsl(d[m]) * pm.err;
    }
    real_t tail = log_tail_bound(spec.terms, M, 103.0L);
    real_t t_factor = expl(logsum);
    real_t value = direct * t_factor;
    real_t log_err = perr + tail + fabsl(logsum) * kRoundEps * M;
    real_t err = fabsl(value) * (log_err * 1.01L + 60 * kRoundEps);
    return {value, err};
}

Bounded zeta_b(const BSpec& spec, real_t s) {
    require_valid(spec);
    if (spec.kind == BSpec::Kind::Explicit) {
        if (!(s > 0)) throw validation_error("zeta^B diverges at s <= 0 for explicit B");
        real_t v = 1;
        for (std::uint64_t b : spec.elements) v /= 1 - powl(static_cast<real_t>(b), -s);
        return {v, v * kRoundEps * (2 + 2 * static_cast<real_t>(spec.elements.size()))};
    }
    real_t ks = s * spec.k;
    if (!(ks > 1))
        throw validation_error("zeta^B for the k-free preset diverges at s <= 1/k");
    Bounded z = zeta_real(ks);
    for (std::uint64_t p : spec.excluded_primes)
        z = z * (1 - powl(static_cast<real_t>(p), -ks));
    return z;
}

Bounded base_product(const BSpec& spec, unsigned a) {
    require_valid(spec);
    if (spec.kind == BSpec::Kind::Explicit) {
        real_t v = 1;
        for (std::uint64_t b : spec.elements)
            v *= 1 - static_cast<real_t>(a) / static_cast<real_t>(b);
        return {v, fabsl(v) * kRoundEps * (2 + 2 * static_cast<real_t>(spec.elements.size()))};
    }
    EulerProductSpec eps;
    eps.terms = {{-static_cast<real_t>(a), spec.k}};
    eps.excluded_primes = spec.excluded_primes;
    return euler_product(eps);
}

namespace {

// 1/(b-2) = sum_{i>=0} 2^i b^{-(i+1)} for b >= 4: turns the section-5 local
// factors over b = p^k into finite prime-exponent polynomials. Truncation at
// i = 70 leaves a relative error below 2^-72 (worst case p = 2, k = 2).
constexpr unsigned kGeomTerms = 71;
constexpr real_t kGeomTruncRel = 1e-21L;

void add_term(std::map<unsigned, real_t>& acc, unsigned e, real_t c) { acc[e] += c; }

std::vector<EulerTerm> collect(const std::map<unsigned, real_t>& acc) {
    std::vector<EulerTerm> out;
    for (const auto& [e, c] : acc)
        if (c != 0) out.push_back({c, e});
    return out;
}

unsigned require_small_integer(real_t s, const char* what) {
    if (!(s >= 0) || s != floorl(s) || s > 8)
        throw validation_error(std::string(what) + " needs integer s in [0, 8] for preset B");
    return static_cast<unsigned>(s);
}

} // namespace

Bounded k_b(const BSpec& spec, real_t s) {
    require_valid(spec);
    if (spec.contains_two()) throw validation_error("K^B undefined when 2 is in B");
    if (spec.kind == BSpec::Kind::Explicit) {
        real_t v = 1;
        for (std::uint64_t b : spec.elements) {
            real_t rb = static_cast<real_t>(b);
            v *= 1 + 2 / (powl(rb, s + 1) * (rb - 2)) - 1 / (powl(rb, 2 * s + 1) * (rb - 2));
        }
        return {v, fabsl(v) * kRoundEps * (2 + 3 * static_cast<real_t>(spec.elements.size()))};
    }
    unsigned si = require_small_integer(s, "K^B");
    std::map<unsigned, real_t> acc;
    for (unsigned i = 0; i < kGeomTerms; ++i) {
        add_term(acc, spec.k * (si + 2 + i), ldexpl(1.0L, static_cast<int>(i) + 1));
        add_term(acc, spec.k * (2 * si + 2 + i), -ldexpl(1.0L, static_cast<int>(i)));
    }
    EulerProductSpec eps{collect(acc), spec.excluded_primes};
    Bounded r = euler_product(eps);
    r.err += fabsl(r.value) * kGeomTruncRel;
    return r;
}

Bounded g_b(const BSpec& spec, real_t s) {
    require_valid(spec);
    if (spec.contains_two()) throw validation_error("G^B undefined when 2 is in B");
    if (spec.kind == BSpec::Kind::Explicit) {
        real_t v = 1;
        for (std::uint64_t b : spec.elements) {
            real_t rb = static_cast<real_t>(b);
            v *= 1 + 1 / (powl(rb, s) * (rb - 2));
        }
        return {v, fabsl(v) * kRoundEps * (2 + 2 * static_cast<real_t>(spec.elements.size()))};
    }
    unsigned si = require_small_integer(s, "G^B");
    std::map<unsigned, real_t> acc;
    for (unsigned i = 0; i < kGeomTerms; ++i)
        add_term(acc, spec.k * (si + 1 + i), ldexpl(1.0L, static_cast<int>(i)));
    EulerProductSpec eps{collect(acc), spec.excluded_primes};
    Bounded r = euler_product(eps);
    r.err += fabsl(r.value) * kGeomTruncRel;
    return r;
}

ThmConstantReport theorem1_constant(const BSpec& spec, const AsymptoticParams& params) {
    require_valid(spec);
    if (spec.contains_two()) throw validation_error("Theorem-1 constant undefined when 2 is in B");
    if (!(params.A > 0) || !(params.alpha > 0) || !(params.alpha < 1) || !(params.beta >= 0) ||
        !(params.beta < params.alpha))
        throw validation_error("Theorem-1 parameters need A > 0, 0 <= beta < alpha < 1");

    ThmConstantReport rep;
    real_t alpha = params.alpha;
    Bounded product;
    if (spec.kind == BSpec::Kind::KFreePreset) {
        // b = p^k: the three non-constant monomials land on integer prime
        // exponents k, k+1, 2 because alpha = 1/k
        if (fabsl(alpha - 1.0L / spec.k) > 1e-15L)
            throw validation_error("preset Theorem-1 parameters must have alpha = 1/k");
        std::map<unsigned, real_t> acc;
        add_term(acc, spec.k, -2);
        add_term(acc, spec.k + 1, 2);
        add_term(acc, 2, -1);
        EulerProductSpec eps{collect(acc), spec.excluded_primes};
        product = euler_product(eps);
    } else {
        real_t v = 1;
        for (std::uint64_t b : spec.elements) {
            real_t rb = static_cast<real_t>(b);
            v *= 1 - 2 / rb + 2 * powl(rb, -(alpha + 1)) - powl(rb, -2 * alpha);
        }
        product = {v, fabsl(v) * kRoundEps * (2 + 3 * static_cast<real_t>(spec.elements.size()))};
    }

    rep.product = product.value;
    rep.prefactor = powl(2.0L, alpha) * powl(kPi, alpha - 2) * params.A / (alpha - 1);
    rep.sin_factor = sinl(kPi * (alpha - 1) / 2);
    Bounded gam = gamma_real(2 - alpha);
    Bounded zet = zeta_real(2 - alpha);
    rep.gamma_factor = gam.value;
    rep.zeta_factor = zet.value;
    rep.C = rep.prefactor * rep.product * rep.sin_factor * rep.gamma_factor * rep.zeta_factor;
    real_t rel = product.err / fabsl(product.value) + gam.err / gam.value + zet.err / zet.value +
                 10 * kRoundEps;
    rep.error_bound = fabsl(rep.C) * rel;
    rep.sign_ok = rep.C > 0;
    return rep;
}

std::string ThmConstantReport::to_json() const {
    nlohmann::json j;
    j["C"] = static_cast<double>(C);
    j["factors"]["prefactor"] = static_cast<double>(prefactor);
    j["factors"]["product"] = static_cast<double>(product);
    j["factors"]["sin"] = static_cast<double>(sin_factor);
    j["factors"]["gamma"] = static_cast<double>(gamma_factor);
    j["factors"]["zeta"] = static_cast<double>(zeta_factor);
    j["error_bound"] = static_cast<double>(error_bound);
    j["sign_ok"] = sign_ok;
    return j.dump();
}

} // namespace bfree
