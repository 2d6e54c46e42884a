#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "bfree/types.hpp"

namespace bfree {

// Fixed field instance K = Q(i), O_K = Z[i], basis (1, i), |a+bi| = |a|+|b|.
// The splitting law drives every ideal-indexed product: (2) = (1+i)^2,
// p = 1 mod 4 splits into conjugates, p = 3 mod 4 stays inert.
struct Gaussian {
    std::int64_t a = 0, b = 0;

    friend Gaussian operator+(Gaussian x, Gaussian y) { return {x.a + y.a, x.b + y.b}; }
    friend Gaussian operator-(Gaussian x, Gaussian y) { return {x.a - y.a, x.b - y.b}; }
    friend Gaussian operator*(Gaussian x, Gaussian y) {
        return {x.a * y.a - x.b * y.b, x.a * y.b + x.b * y.a};
    }
    friend bool operator==(Gaussian x, Gaussian y) { return x.a == y.a && x.b == y.b; }
    Gaussian conj() const { return {a, -b}; }
};

inline std::uint64_t gnorm(Gaussian z) {
    return static_cast<std::uint64_t>(z.a * z.a + z.b * z.b);
}
inline std::uint64_t l1norm(Gaussian z) {
    return static_cast<std::uint64_t>((z.a < 0 ? -z.a : z.a) + (z.b < 0 ? -z.b : z.b));
}

// w | z in Z[i]; exact quotient via conj(w) z / N(w).
bool gdivides(Gaussian w, Gaussian z);
Gaussian gdiv(Gaussian w, Gaussian z);  // z / w, requires divisibility

// One representative per prime ideal, grouped by the rational prime below.
struct GaussPrime {
    Gaussian gen;
    std::uint64_t norm;
    enum class Class { Ramified, Split, Inert } cls;
};

// All prime ideals with norm <= limit, ascending by norm.
std::vector<GaussPrime> gaussian_primes_up_to_norm(std::uint64_t limit);

// mu^(k)(z) != 0: no prime ideal power p^k contains (z). Factors N(z) over Z
// and lifts exponents through the splitting law (conjugate exponents for a
// split prime are separated by repeated exact division). z = 0 is not k-free.
bool is_kfree_gaussian(Gaussian z, unsigned k);

// k-free indicator over the axis-aligned bounding box of an L1-ball.
class NFWindow {
public:
    NFWindow(Gaussian center, std::int64_t radius, std::vector<std::uint8_t> bits);

    Gaussian center() const { return center_; }
    std::int64_t radius() const { return radius_; }
    bool contains(Gaussian z) const { return l1norm(z - center_) <= static_cast<std::uint64_t>(radius_); }
    bool at(Gaussian z) const;  // valid for any z in the bounding box

private:
    Gaussian center_;
    std::int64_t radius_;
    std::int64_t width_;
    std::vector<std::uint8_t> bits_;
};

// Marks multiples of every p^k with norm inside the box, then cross-checks
// 1000 fixed-seed sample points against is_kfree_gaussian.
NFWindow sieve_ball(Gaussian center, std::int64_t radius, unsigned k);

// #B_x = 2x^2 + 2x + 1.
std::uint64_t l1_ball_size(std::int64_t x);
std::vector<Gaussian> l1_ball(std::int64_t x);

// rho^(k) = 1/zeta_K(k) as the ideal Euler product, certified to ~1e-15.
Bounded nf_density(unsigned k);

// Pair correlation: prod over prime ideals of (1 - D/N(p^k)), D = 2 unless
// p^k divides (h) (D = 1); h = 0 degenerates to the density.
Bounded nf_corr2(unsigned k, Gaussian h);

struct NFVarianceReport {
    unsigned k = 0;
    std::int64_t N = 0;
    std::int64_t M = 0;
    real_t var_sliding = 0;
    std::optional<real_t> var_corr;  // absent above the pair-sum cap
    std::optional<real_t> ratio;     // var_sliding / var_corr
    real_t var_over_n3 = 0;          // var_sliding / N^3  (N^{2d-1}, d = 2)
};

// Sliding-ball estimator at finite M (exhaustive centers in B_M, one sieve
// of B_{M+N}) and, for N <= corr_cap, the correlation-sum route
// M2 - (rho #B_N)^2 with M2 = sum_h |B_N meet (B_N+h)| c2(h).
NFVarianceReport nf_variance(unsigned k, std::int64_t N, std::int64_t M, unsigned threads = 1,
                             std::int64_t corr_cap = 64);

struct IdealRep {
    Gaussian gen;
    std::uint64_t norm = 0;
    Gaussian basis_u, basis_v;  // Lagrange-reduced lattice basis of (gen)
    std::int64_t diam = 0;      // |u|_1 + |v|_1: upper bound for the cell diameter
};

IdealRep make_ideal(Gaussian gen);

struct BallCountReport {
    std::uint64_t T = 0;      // #{n : |n| <= x, n + shift = 0 mod ideal}
    real_t predicted = 0;     // #B_x / N(ideal)
    real_t error = 0;         // |T - predicted|
    real_t bound_scale = 0;   // diam * x / N(ideal)
};

BallCountReport ideal_ball_count(const IdealRep& ideal, Gaussian shift, std::int64_t x);

} // namespace bfree
