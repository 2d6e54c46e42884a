#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bfree/bset.hpp"
#include "bfree/types.hpp"

namespace bfree {

// ---- special functions (real axis, certified error bounds) ----

// zeta(s), s > 1.
Bounded zeta_real(real_t s);

// Dirichlet beta(s) = sum (-1)^n (2n+1)^{-s}, s >= 1.
Bounded dirichlet_beta(real_t s);

// Gamma(x), 0 < x < 30.
Bounded gamma_real(real_t x);

// Prime zeta restricted to a residue class mod 4:
//   cls = 0: sum over all primes p of p^{-s}
//   cls = 1: p = 1 mod 4 only;  cls = 3: p = 3 mod 4 only.
// Requires s >= 2 (all internal uses are integer exponents of Euler products).
Bounded prime_zeta_class(real_t s, int cls);

inline Bounded prime_zeta(real_t s) { return prime_zeta_class(s, 0); }

// ---- Euler product engine ----

// One monomial c * p^{-e} of a local factor 1 + sum_j c_j p^{-e_j}.
struct EulerTerm {
    real_t c;
    unsigned e;  // >= 2 for absolute convergence
};

struct EulerProductSpec {
    std::vector<EulerTerm> terms;
    std::vector<std::uint64_t> excluded_primes;  // primes whose local factor is dropped
};

// prod over primes p (not excluded) of the local factor. Small primes are
// multiplied directly; the tail is exp(sum_m d_m P_{>P1}(m)) where log(1+g)
// = sum d_m y^m, with a majorant-certified truncation bound.
Bounded euler_product(const EulerProductSpec& spec);

// Shared helpers for ideal-indexed products (used by the number field module).
// d_m of log(1 + g(y)) for the polynomial g(y) = sum c_j y^{e_j}, m <= M.
std::vector<real_t> log_expansion_coeffs(const std::vector<EulerTerm>& terms, unsigned M);

// Bound on sum_{m>M} |d_m| * (1 + base/M) * base^{-m} via the majorant
// -log(1 - ghat(y)); `base` is the smallest prime (or prime norm) in the tail.
real_t log_tail_bound(const std::vector<EulerTerm>& terms, unsigned M, real_t base);

// ---- B-set Dirichlet series (section-5 objects) ----

// zeta^B(s) = sum over the B-integer semigroup of n^{-s}.
// Explicit B: prod 1/(1 - b^{-s}), s > 0. Preset k: zeta(ks) * prod_{p excl}(1 - p^{-ks}), ks > 1.
Bounded zeta_b(const BSpec& spec, real_t s);

// Base product prod_{b in B}(1 - a/b); a = 1 gives the density, a = 2 the
// pair-correlation constant.
Bounded base_product(const BSpec& spec, unsigned a);

// K^B(s) = prod_b (1 + 2/(b^{s+1}(b-2)) - 1/(b^{2s+1}(b-2))), 2 not in B.
// Presets require integer s >= 0 (integral exponents for the engine).
Bounded k_b(const BSpec& spec, real_t s);

// G^B(s) = prod_b (1 + 1/(b^s(b-2))), 2 not in B; equals zeta^B(s+1) K^B(s).
Bounded g_b(const BSpec& spec, real_t s);

// ---- Theorem-1 constant ----

struct AsymptoticParams {
    real_t A = 1;
    real_t alpha = 0;
    real_t beta = 0;
};

struct ThmConstantReport {
    real_t C = 0;
    real_t prefactor = 0;     // 2^alpha pi^(alpha-2) A / (alpha - 1)
    real_t product = 0;       // prod_b (1 - 2/b + 2/b^(alpha+1) - 1/b^(2 alpha))
    real_t sin_factor = 0;    // sin(pi (alpha-1)/2)
    real_t gamma_factor = 0;  // Gamma(2 - alpha)
    real_t zeta_factor = 0;   // zeta(2 - alpha)
    real_t error_bound = 0;
    bool sign_ok = false;     // C > 0 as the two negative factors cancel

    std::string to_json() const;
};

// C such that the short-interval variance behaves like C * N^alpha.
ThmConstantReport theorem1_constant(const BSpec& spec, const AsymptoticParams& params);

} // namespace bfree
