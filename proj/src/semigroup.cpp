#include "bfree/semigroup.hpp"

#include <algorithm>
#include <queue>

#include "bfree/primes.hpp"

namespace bfree {

std::vector<std::uint64_t> enumerate_b_integers(const BSpec& spec, std::uint64_t limit) {
    require_valid(spec);
    if (limit < 1) throw validation_error("limit must be >= 1");
    std::vector<std::uint64_t> gens = spec.elements_up_to(limit);
    std::uint64_t budget = memory_budget_bytes() / sizeof(std::uint64_t) / 2;

    // Pairwise coprimality gives unique factorization over the generators,
    // so restricting each element's expansions to generators at or past its
    // own largest one visits every B-integer exactly once.
    using Entry = std::pair<std::uint64_t, std::uint32_t>;  // (value, min generator index)
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
    heap.push({1, 0});
    std::vector<std::uint64_t> out;
    while (!heap.empty()) {
        auto [n, idx] = heap.top();
        heap.pop();
        out.push_back(n);
        if (out.size() > budget) throw resource_error("B-integer enumeration exceeds budget");
        for (std::uint32_t i = idx; i < gens.size(); ++i) {
            std::uint64_t v;
            // generators ascend, so the first overshoot ends the row
            if (!mul_within(n, gens[i], limit, v)) break;
            heap.push({v, i});
        }
    }
    return out;
}

std::uint64_t counting_function(const BSpec& spec, std::uint64_t N) {
    return enumerate_b_integers(spec, N).size();
}

AsymptoticParams asymptotic_params(const BSpec& spec) {
    require_valid(spec);
    if (!spec.is_preset())
        throw validation_error(
            "Theorem 1 inapplicable: an explicit finite B has logarithmic semigroup growth");
    AsymptoticParams p;
    p.alpha = 1.0L / spec.k;
    p.beta = 0;
    p.A = 1;
    for (std::uint64_t q : spec.excluded_primes) p.A *= 1 - 1.0L / static_cast<real_t>(q);
    return p;
}

std::vector<WeightedBSquarefree> enumerate_b_squarefree(const BSpec& spec, std::uint64_t limit) {
    require_valid(spec);
    if (spec.contains_two()) throw validation_error("B-squarefree weights undefined when 2 is in B");
    if (limit < 1) throw validation_error("limit must be >= 1");
    std::vector<std::uint64_t> gens = spec.elements_up_to(limit);
    std::uint64_t budget = memory_budget_bytes() / sizeof(WeightedBSquarefree) / 2;

    std::vector<WeightedBSquarefree> out;
    out.push_back({1, 1, 1, true});
    // depth-first over subsets; generators ascend so overshoot prunes the rest
    struct Frame {
        WeightedBSquarefree cur;
        std::uint32_t next;
    };
    std::vector<Frame> stack;
    stack.push_back({out[0], 0});
    while (!stack.empty()) {
        Frame f = stack.back();
        stack.pop_back();
        for (std::uint32_t i = f.next; i < gens.size(); ++i) {
            std::uint64_t m;
            if (!mul_within(f.cur.m, gens[i], limit, m)) break;
            WeightedBSquarefree w;
            w.m = m;
            w.g = f.cur.g / static_cast<real_t>(gens[i] - 2);
            std::uint64_t den;
            w.den_exact = f.cur.den_exact &&
                          mul_within(f.cur.g_den, gens[i] - 2, ~0ull, den);
            w.g_den = w.den_exact ? den : 0;
            out.push_back(w);
            if (out.size() > budget) throw resource_error("B-squarefree enumeration exceeds budget");
            stack.push_back({w, i + 1});
        }
    }
    std::sort(out.begin(), out.end(),
              [](const WeightedBSquarefree& a, const WeightedBSquarefree& b) { return a.m < b.m; });
    return out;
}

} // namespace bfree
