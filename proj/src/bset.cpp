#include "bfree/bset.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "bfree/parallel.hpp"
#include "bfree/primes.hpp"

namespace bfree {

unsigned default_thread_count() {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    return hw > 16 ? 16 : hw;
}

BSpec BSpec::make_explicit(std::vector<std::uint64_t> elems) {
    BSpec s;
    s.kind = Kind::Explicit;
    std::sort(elems.begin(), elems.end());
    elems.erase(std::unique(elems.begin(), elems.end()), elems.end());
    s.elements = std::move(elems);
    return s;
}

BSpec BSpec::kfree(unsigned k, std::vector<std::uint64_t> exclude) {
    BSpec s;
    s.kind = Kind::KFreePreset;
    s.k = k;
    std::sort(exclude.begin(), exclude.end());
    exclude.erase(std::unique(exclude.begin(), exclude.end()), exclude.end());
    s.excluded_primes = std::move(exclude);
    return s;
}

BSpec BSpec::from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw validation_error(std::string("bad BSpec JSON: ") + e.what());
    }
    if (j.contains("explicit")) {
        if (!j["explicit"].is_array()) throw validation_error("\"explicit\" must be an array");
        std::vector<std::uint64_t> elems;
        for (const auto& v : j["explicit"]) {
            if (!v.is_number_unsigned() && !v.is_number_integer())
                throw validation_error("explicit B elements must be integers");
            long long x = v.get<long long>();
            if (x <= 1) throw validation_error("explicit B elements must be > 1");
            elems.push_back(static_cast<std::uint64_t>(x));
        }
        return make_explicit(std::move(elems));
    }
    if (j.contains("kfree")) {
        const auto& kf = j["kfree"];
        if (!kf.is_object() || !kf.contains("k")) throw validation_error("\"kfree\" needs a \"k\" field");
        long long k = kf["k"].get<long long>();
        if (k < 2) throw validation_error("kfree preset needs k >= 2");
        std::vector<std::uint64_t> excl;
        if (kf.contains("exclude"))
            for (const auto& v : kf["exclude"]) {
                long long p = v.get<long long>();
                if (p < 2) throw validation_error("excluded primes must be >= 2");
                excl.push_back(static_cast<std::uint64_t>(p));
            }
        return kfree(static_cast<unsigned>(k), std::move(excl));
    }
    throw validation_error("BSpec JSON needs \"explicit\" or \"kfree\"");
}

std::string BSpec::to_json() const {
    nlohmann::json j;
    if (kind == Kind::Explicit) {
        j["explicit"] = elements;
    } else {
        j["kfree"]["k"] = k;
        if (!excluded_primes.empty()) j["kfree"]["exclude"] = excluded_primes;
    }
    return j.dump();
}

bool BSpec::contains_two() const {
    if (kind == Kind::KFreePreset) return false;  // p^k >= 4 for k >= 2
    return std::binary_search(elements.begin(), elements.end(), 2ull);
}

std::vector<std::uint64_t> BSpec::elements_up_to(std::uint64_t limit) const {
    std::vector<std::uint64_t> out;
    if (kind == Kind::Explicit) {
        for (std::uint64_t b : elements)
            if (b <= limit) out.push_back(b);
        return out;
    }
    std::uint64_t pmax = iroot(limit, k);
    for (std::uint32_t p : primes_up_to(pmax)) {
        if (std::binary_search(excluded_primes.begin(), excluded_primes.end(),
                               static_cast<std::uint64_t>(p)))
            continue;
        std::uint64_t b = 1;
        for (unsigned i = 0; i < k; ++i) b *= p;
        out.push_back(b);
    }
    return out;
}

std::string BSpec::describe() const {
    std::ostringstream os;
    if (kind == Kind::Explicit) {
        os << "Explicit{";
        for (size_t i = 0; i < elements.size(); ++i) os << (i ? "," : "") << elements[i];
        os << "}";
    } else {
        os << "KFreePreset(k=" << k;
        if (!excluded_primes.empty()) {
            os << ", exclude={";
            for (size_t i = 0; i < excluded_primes.size(); ++i)
                os << (i ? "," : "") << excluded_primes[i];
            os << "}";
        }
        os << ")";
    }
    return os.str();
}

ValidationReport validate_bspec(const BSpec& spec) {
    ValidationReport rep;
    rep.contains_two = spec.contains_two();
    if (spec.kind == BSpec::Kind::Explicit) {
        for (size_t i = 0; i < spec.elements.size(); ++i) {
            if (spec.elements[i] <= 1) {
                rep.valid = false;
                rep.violations.push_back("element " + std::to_string(spec.elements[i]) + " <= 1");
            }
            for (size_t j = i + 1; j < spec.elements.size(); ++j) {
                std::uint64_t g = std::gcd(spec.elements[i], spec.elements[j]);
                if (g != 1) {
                    rep.valid = false;
                    rep.violations.push_back("(" + std::to_string(spec.elements[i]) + "," +
                                             std::to_string(spec.elements[j]) +
                                             ",gcd=" + std::to_string(g) + ")");
                }
            }
        }
    } else {
        if (spec.k < 2) {
            rep.valid = false;
            rep.violations.push_back("preset k must be >= 2");
        }
        for (std::uint64_t p : spec.excluded_primes)
            if (!is_prime_u64(p)) {
                rep.valid = false;
                rep.violations.push_back("excluded value " + std::to_string(p) + " is not prime");
            }
    }
    return rep;
}

void require_valid(const BSpec& spec) {
    ValidationReport rep = validate_bspec(spec);
    if (rep.valid) return;
    std::string msg = "invalid B-set:";
    for (const auto& v : rep.violations) msg += " " + v;
    throw validation_error(msg);
}

SieveWindow sieve_window(const BSpec& spec, std::uint64_t start, std::uint64_t length) {
    if (start < 1) throw validation_error("sieve window must start at n >= 1");
    if (length < 1) throw validation_error("sieve window must have length >= 1");
    if (length > memory_budget_bytes())
        throw resource_error("sieve window exceeds memory budget; iterate blocks");
    SieveWindow w;
    w.start = start;
    w.bits.assign(length, 1);
    std::uint64_t end = start + length - 1;
    for (std::uint64_t b : spec.elements_up_to(end)) {
        std::uint64_t m = ((start + b - 1) / b) * b;
        for (; m <= end; m += b) w.bits[m - start] = 0;
    }
    return w;
}

bool is_bfree_direct(const BSpec& spec, std::uint64_t n) {
    if (n == 0) return false;
    if (spec.kind == BSpec::Kind::Explicit) {
        for (std::uint64_t b : spec.elements)
            if (b <= n && n % b == 0) return false;
        return true;
    }
    for (const PrimePower& pp : factorize(n)) {
        if (pp.e < spec.k) continue;
        if (!std::binary_search(spec.excluded_primes.begin(), spec.excluded_primes.end(), pp.p))
            return false;
    }
    return true;
}

namespace {

std::vector<std::uint64_t> canonical_pattern(std::vector<std::uint64_t> offsets) {
    offsets.push_back(0);
    std::sort(offsets.begin(), offsets.end());
    offsets.erase(std::unique(offsets.begin(), offsets.end()), offsets.end());
    return offsets;
}

} // namespace

std::uint64_t count_pattern(const SieveWindow& window, std::vector<std::uint64_t> offsets) {
    std::vector<std::uint64_t> hs = canonical_pattern(std::move(offsets));
    std::uint64_t maxh = hs.back();
    if (maxh >= window.length()) throw validation_error("pattern offset exceeds window length");
    std::uint64_t count = 0;
    std::uint64_t n_range = window.length() - maxh;
    for (std::uint64_t j = 0; j < n_range; ++j) {
        bool all = true;
        for (std::uint64_t h : hs)
            if (!window.bits[j + h]) { all = false; break; }
        count += all;
    }
    return count;
}

void for_each_sieve_block(const BSpec& spec, std::uint64_t lo, std::uint64_t hi,
                          std::uint64_t block_len,
                          const std::function<void(const SieveWindow&)>& visit) {
    if (lo < 1 || hi < lo) throw validation_error("bad sieve range");
    if (block_len < 1) throw validation_error("block length must be >= 1");
    for (std::uint64_t a = lo; a <= hi; a += block_len) {
        std::uint64_t len = std::min(block_len, hi - a + 1);
        visit(sieve_window(spec, a, len));
    }
}

std::uint64_t pattern_count(const BSpec& spec, std::uint64_t X,
                            const std::vector<std::uint64_t>& offsets, unsigned threads) {
    if (X < 1) throw validation_error("X must be >= 1");
    require_valid(spec);
    std::vector<std::uint64_t> hs = canonical_pattern(offsets);
    std::uint64_t maxh = hs.back();
    // fixed chunking keeps per-chunk counts (and their sum) independent of
    // the worker count
    std::uint64_t chunk = kDefaultBlockLen;
    std::uint64_t n_chunks = (X + chunk - 1) / chunk;
    std::vector<std::uint64_t> parts = parallel_map<std::uint64_t>(
        n_chunks, threads, [&](std::uint64_t i) -> std::uint64_t {
            std::uint64_t a = 1 + i * chunk;
            std::uint64_t b = std::min(X, a + chunk - 1);
            SieveWindow w = sieve_window(spec, a, b - a + 1 + maxh);
            std::uint64_t c = 0;
            for (std::uint64_t n = a; n <= b; ++n) {
                bool all = true;
                for (std::uint64_t h : hs)
                    if (!w.bits[n - a + h]) { all = false; break; }
                c += all;
            }
            return c;
        });
    std::uint64_t total = 0;
    for (std::uint64_t c : parts) total += c;
    return total;
}

real_t empirical_correlation(const BSpec& spec, std::uint64_t X,
                             const std::vector<std::uint64_t>& offsets, unsigned threads) {
    return static_cast<real_t>(pattern_count(spec, X, offsets, threads)) / static_cast<real_t>(X);
}

} // namespace bfree
