#include "bfree/cliapp.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bfree/analytic.hpp"
#include "bfree/bset.hpp"
#include "bfree/correlations.hpp"
#include "bfree/numberfield.hpp"
#include "bfree/parallel.hpp"
#include "bfree/semigroup.hpp"
#include "bfree/variance.hpp"

namespace bfree {
namespace {

std::string fmt(real_t v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.15Lg", v);
    return buf;
}

std::string fmt(std::uint64_t v) { return std::to_string(v); }

// Collects all output, then writes in one shot so files are byte-stable.
struct Sink {
    std::string path;
    std::string buffer;

    void line(const std::string& s) {
        buffer += s;
        buffer += '\n';
    }
    void flush() const {
        if (path.empty()) {
            std::cout << buffer;
            return;
        }
        std::ofstream f(path, std::ios::binary);
        if (!f) throw validation_error("cannot open output file: " + path);
        f << buffer;
    }
};

std::vector<std::uint64_t> parse_u64_list(const std::string& text, const char* what) {
    std::vector<std::uint64_t> out;
    if (text.empty()) return out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t a = item.find_first_not_of(" \t");
        std::size_t b = item.find_last_not_of(" \t");
        if (a == std::string::npos) throw validation_error(std::string("empty entry in ") + what);
        item = item.substr(a, b - a + 1);
        try {
            std::size_t pos = 0;
            unsigned long long v = std::stoull(item, &pos);
            if (pos != item.size()) throw std::invalid_argument(item);
            out.push_back(v);
        } catch (const std::exception&) {
            throw validation_error(std::string("bad integer '") + item + "' in " + what);
        }
    }
    return out;
}

struct CommonOpts {
    std::string bspec_json;
    std::string out_path;
    std::string format = "csv";
    unsigned threads = 0;  // 0: use default_thread_count()
    std::string config_path;
};

void add_common(CLI::App* sub, CommonOpts& c, bool with_bspec) {
    if (with_bspec)
        sub->add_option("--bspec", c.bspec_json,
                        "B-set JSON, e.g. '{\"kfree\":{\"k\":2}}' or '{\"explicit\":[3,5,7]}'")
            ->required();
    sub->add_option("--out", c.out_path, "output file (default: stdout)");
    sub->add_option("--format", c.format, "output format")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--threads", c.threads, "worker threads")->check(CLI::Range(1u, 256u));
    sub->add_option("--config", c.config_path, "JSON config file merged under explicit flags");
}

unsigned effective_threads(const CommonOpts& c) {
    return c.threads == 0 ? default_thread_count() : c.threads;
}

BSpec spec_of(const CommonOpts& c) {
    BSpec spec = BSpec::from_json(c.bspec_json);
    require_valid(spec);
    return spec;
}

// --config: flat JSON object merged under the explicit command line. Tokens
// are injected only for keys not already present, so flags win.
std::vector<std::string> merge_config(std::vector<std::string> args) {
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size())
            path = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0)
            path = args[i].substr(9);
    }
    if (path.empty()) return args;

    std::ifstream f(path);
    if (!f) throw validation_error("cannot open config file: " + path);
    nlohmann::json j;
    try {
        f >> j;
    } catch (const nlohmann::json::exception& e) {
        throw validation_error(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw validation_error("config must be a JSON object of flag: value");

    for (const auto& [key, val] : j.items()) {
        std::string flag = "--" + key;
        bool present = false;
        for (const std::string& a : args)
            if (a == flag || a.rfind(flag + "=", 0) == 0) present = true;
        if (present) continue;
        if (val.is_boolean()) {
            if (val.get<bool>()) args.push_back(flag);
        } else if (val.is_string()) {
            args.push_back(flag + "=" + val.get<std::string>());
        } else if (val.is_array()) {
            std::string joined;
            for (const auto& item : val) {
                if (!joined.empty()) joined += ",";
                joined += item.is_string() ? item.get<std::string>() : item.dump();
            }
            args.push_back(flag + "=" + joined);
        } else {
            args.push_back(flag + "=" + val.dump());
        }
    }
    return args;
}

// ---- subcommand bodies ----

void run_sieve(const CommonOpts& c, std::uint64_t start, std::uint64_t length, Sink& sink) {
    BSpec spec = spec_of(c);
    if (length == 0) throw validation_error("--length must be >= 1");
    if (length * 8 > memory_budget_bytes())
        throw resource_error("requested sieve output exceeds memory budget");
    SieveWindow win = sieve_window(spec, start, length);
    if (c.format == "json") {
        nlohmann::json j;
        j["bspec"] = nlohmann::json::parse(spec.to_json());
        j["start"] = win.start;
        j["length"] = win.length();
        j["mu"] = nlohmann::json::array();
        for (std::uint8_t b : win.bits) j["mu"].push_back(static_cast<int>(b));
        sink.line(j.dump());
    } else {
        sink.line("n,mu");
        for (std::uint64_t i = 0; i < win.length(); ++i)
            sink.line(fmt(win.start + i) + "," + std::to_string(static_cast<int>(win.bits[i])));
    }
}

void run_corr(const CommonOpts& c, const std::string& offsets_text, std::uint64_t empirical_x,
              Sink& sink) {
    BSpec spec = spec_of(c);
    std::vector<std::uint64_t> offsets = parse_u64_list(offsets_text, "--offsets");
    CorrelationContext ctx(spec);
    CorrValue cv = corr_exact(ctx, offsets);
    std::string emp, empx;
    real_t emp_val = 0;
    if (empirical_x > 0) {
        emp_val = empirical_correlation(spec, empirical_x, offsets, effective_threads(c));
        emp = fmt(emp_val);
        empx = fmt(empirical_x);
    }
    if (c.format == "json") {
        nlohmann::json j;
        j["bspec"] = nlohmann::json::parse(spec.to_json());
        j["offsets"] = offsets;
        j["exact"] = static_cast<double>(cv.v.value);
        j["err_bound"] = static_cast<double>(cv.v.err);
        j["degenerate"] = cv.degenerate;
        if (empirical_x > 0) {
            j["empirical"] = static_cast<double>(emp_val);
            j["X"] = empirical_x;
        }
        sink.line(j.dump());
    } else {
        sink.line("offsets,exact,err_bound,degenerate,empirical,X");
        std::string off_field;
        for (std::uint64_t h : offsets) {
            if (!off_field.empty()) off_field += ";";
            off_field += std::to_string(h);
        }
        sink.line(off_field + "," + fmt(cv.v.value) + "," + fmt(cv.v.err) + "," +
                  (cv.degenerate ? "1" : "0") + "," + emp + "," + empx);
    }
}

void run_density(const CommonOpts& c, std::uint64_t empirical_x, Sink& sink) {
    BSpec spec = spec_of(c);
    CorrelationContext ctx(spec);
    Bounded rho = density(ctx);
    std::string emp, empx;
    real_t emp_val = 0;
    if (empirical_x > 0) {
        emp_val = empirical_correlation(spec, empirical_x, {}, effective_threads(c));
        emp = fmt(emp_val);
        empx = fmt(empirical_x);
    }
    if (c.format == "json") {
        nlohmann::json j;
        j["bspec"] = nlohmann::json::parse(spec.to_json());
        j["rho_exact"] = static_cast<double>(rho.value);
        j["err_bound"] = static_cast<double>(rho.err);
        if (empirical_x > 0) {
            j["rho_empirical"] = static_cast<double>(emp_val);
            j["X"] = empirical_x;
        }
        sink.line(j.dump());
    } else {
        sink.line("rho_exact,err_bound,rho_empirical,X");
        sink.line(fmt(rho.value) + "," + fmt(rho.err) + "," + emp + "," + empx);
    }
}

void run_semigroup(const CommonOpts& c, std::uint64_t limit, bool weighted, bool params_only,
                   bool count_only, Sink& sink) {
    BSpec spec = spec_of(c);
    if (params_only) {
        AsymptoticParams p = asymptotic_params(spec);
        if (c.format == "json") {
            nlohmann::json j{{"alpha", static_cast<double>(p.alpha)},
                             {"beta", static_cast<double>(p.beta)},
                             {"A", static_cast<double>(p.A)}};
            sink.line(j.dump());
        } else {
            sink.line("alpha,beta,A");
            sink.line(fmt(p.alpha) + "," + fmt(p.beta) + "," + fmt(p.A));
        }
        return;
    }
    if (limit == 0) throw validation_error("--limit must be >= 1");
    if (count_only) {
        std::uint64_t n = counting_function(spec, limit);
        if (c.format == "json") {
            nlohmann::json j{{"limit", limit}, {"count", n}};
            sink.line(j.dump());
        } else {
            sink.line("limit,count");
            sink.line(fmt(limit) + "," + fmt(n));
        }
        return;
    }
    if (weighted) {
        auto rows = enumerate_b_squarefree(spec, limit);
        if (c.format == "json") {
            nlohmann::json j = nlohmann::json::array();
            for (const auto& r : rows)
                j.push_back({{"m", r.m},
                             {"g", static_cast<double>(r.g)},
                             {"g_den", r.g_den},
                             {"den_exact", r.den_exact}});
            sink.line(j.dump());
        } else {
            sink.line("m,g,g_den,den_exact");
            for (const auto& r : rows)
                sink.line(fmt(r.m) + "," + fmt(r.g) + "," + fmt(r.g_den) + "," +
                          (r.den_exact ? "1" : "0"));
        }
        return;
    }
    auto elems = enumerate_b_integers(spec, limit);
    if (c.format == "json") {
        nlohmann::json j = elems;
        sink.line(j.dump());
    } else {
        sink.line("m");
        for (std::uint64_t m : elems) sink.line(fmt(m));
    }
}

void run_constant(const CommonOpts& c, real_t alpha, real_t beta, real_t big_a, Sink& sink) {
    BSpec spec = spec_of(c);
    AsymptoticParams p;
    if (alpha > 0) {
        p.alpha = alpha;
        p.beta = beta;
        p.A = big_a;
    } else {
        p = asymptotic_params(spec);
    }
    ThmConstantReport rep = theorem1_constant(spec, p);
    sink.line(rep.to_json());
}

void run_variance(const CommonOpts& c, const std::string& n_text, std::uint64_t empirical_x,
                  Sink& sink) {
    BSpec spec = spec_of(c);
    std::vector<std::uint64_t> n_list = parse_u64_list(n_text, "--n");
    if (n_list.empty()) throw validation_error("--n needs at least one window length");
    for (std::uint64_t n : n_list)
        if (n == 0) throw validation_error("window length must be >= 1");
    CorrelationContext ctx(spec);
    unsigned threads = effective_threads(c);

    bool theorem1 = spec.is_preset() && !spec.contains_two();
    std::vector<VarianceReport> rows;
    if (theorem1) {
        rows = convergence_table(ctx, asymptotic_params(spec), n_list, empirical_x, threads);
    } else {
        for (std::uint64_t n : n_list) {
            VarianceReport r;
            r.N = n;
            VarianceExact ve = variance_exact(ctx, n);
            r.var_exact = ve.var.value;
            r.err_bound = ve.var.err;
            r.low_precision = ve.low_precision;
            if (empirical_x > 0) {
                r.var_empirical = variance_empirical(spec, n, empirical_x, ctx.rho().value, threads);
                r.X = empirical_x;
            }
            rows.push_back(r);
        }
    }

    if (c.format == "json") {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& r : rows) {
            nlohmann::json j{{"N", r.N},
                             {"var_exact", static_cast<double>(r.var_exact)},
                             {"err_bound", static_cast<double>(r.err_bound)},
                             {"low_precision", r.low_precision}};
            if (r.var_empirical) {
                j["var_empirical"] = static_cast<double>(*r.var_empirical);
                j["X"] = r.X;
            }
            if (theorem1) {
                j["c_n_alpha"] = static_cast<double>(r.c_n_alpha);
                j["ratio"] = static_cast<double>(r.ratio);
            }
            arr.push_back(j);
        }
        sink.line(arr.dump());
    } else {
        sink.line("N,var_exact,err_bound,var_empirical,X,c_n_alpha,ratio");
        for (const auto& r : rows) {
            std::string emp = r.var_empirical ? fmt(*r.var_empirical) : "";
            std::string empx = r.var_empirical ? fmt(r.X) : "";
            std::string cn = theorem1 ? fmt(r.c_n_alpha) : "";
            std::string ratio = theorem1 ? fmt(r.ratio) : "";
            sink.line(fmt(r.N) + "," + fmt(r.var_exact) + "," + fmt(r.err_bound) + "," + emp +
                      "," + empx + "," + cn + "," + ratio);
        }
    }
}

void run_exceptional(const CommonOpts& c, const std::string& n_text, std::uint64_t X, Sink& sink) {
    BSpec spec = spec_of(c);
    std::vector<std::uint64_t> n_list = parse_u64_list(n_text, "--n");
    if (n_list.empty()) throw validation_error("--n needs at least one window length");
    if (X == 0) throw validation_error("--x must be >= 1");
    std::optional<AsymptoticParams> params;
    if (spec.is_preset()) params = asymptotic_params(spec);
    unsigned threads = effective_threads(c);

    if (c.format == "json") {
        nlohmann::json arr = nlohmann::json::array();
        for (std::uint64_t n : n_list) {
            ExceptionalReport r = exceptional_probability(spec, n, X, params, threads);
            nlohmann::json j{{"N", r.N},
                             {"X", r.X},
                             {"count", r.count},
                             {"p_hat", static_cast<double>(r.p_hat)}};
            if (r.bound_ratio) j["bound_ratio"] = static_cast<double>(*r.bound_ratio);
            arr.push_back(j);
        }
        sink.line(arr.dump());
    } else {
        sink.line("N,X,count,p_hat,bound_ratio");
        for (std::uint64_t n : n_list) {
            ExceptionalReport r = exceptional_probability(spec, n, X, params, threads);
            std::string br = r.bound_ratio ? fmt(*r.bound_ratio) : "";
            sink.line(fmt(r.N) + "," + fmt(r.X) + "," + fmt(r.count) + "," + fmt(r.p_hat) + "," +
                      br);
        }
    }
}

void run_nf_variance(const CommonOpts& c, unsigned k, const std::string& n_text, std::int64_t M,
                     std::int64_t corr_cap, Sink& sink) {
    std::vector<std::uint64_t> n_list = parse_u64_list(n_text, "--n");
    if (n_list.empty()) throw validation_error("--n needs at least one ball radius");
    unsigned threads = effective_threads(c);

    if (c.format == "json") {
        nlohmann::json arr = nlohmann::json::array();
        for (std::uint64_t n : n_list) {
            NFVarianceReport r =
                nf_variance(k, static_cast<std::int64_t>(n), M, threads, corr_cap);
            nlohmann::json j{{"k", r.k},
                             {"N", r.N},
                             {"M", r.M},
                             {"var_sliding", static_cast<double>(r.var_sliding)},
                             {"var_over_N3", static_cast<double>(r.var_over_n3)}};
            if (r.var_corr) j["var_corr"] = static_cast<double>(*r.var_corr);
            if (r.ratio) j["ratio"] = static_cast<double>(*r.ratio);
            arr.push_back(j);
        }
        sink.line(arr.dump());
    } else {
        sink.line("k,N,M,var_sliding,var_corr,ratio,var_over_N3");
        for (std::uint64_t n : n_list) {
            NFVarianceReport r =
                nf_variance(k, static_cast<std::int64_t>(n), M, threads, corr_cap);
            std::string vc = r.var_corr ? fmt(*r.var_corr) : "";
            std::string ratio = r.ratio ? fmt(*r.ratio) : "";
            sink.line(fmt(static_cast<std::uint64_t>(r.k)) + "," + std::to_string(r.N) + "," +
                      std::to_string(r.M) + "," + fmt(r.var_sliding) + "," + vc + "," + ratio +
                      "," + fmt(r.var_over_n3));
        }
    }
}

// Quick randomized cross-module checks; the only RNG in the tool.
int run_selftest(std::uint64_t seed, Sink& sink) {
    std::mt19937_64 rng(seed);
    int failures = 0;
    auto report = [&](bool ok, const std::string& what) {
        sink.line(std::string(ok ? "[OK]   " : "[FAIL] ") + what);
        if (!ok) ++failures;
    };

    {
        BSpec spec = BSpec::kfree(2);
        std::uint64_t start = 1 + rng() % 1000000;
        SieveWindow win = sieve_window(spec, start, 5000);
        bool ok = true;
        for (int t = 0; t < 200 && ok; ++t) {
            std::uint64_t n = start + rng() % win.length();
            ok = win.bits[n - start] == (is_bfree_direct(spec, n) ? 1 : 0);
        }
        report(ok, "sieve window matches per-point factorization (squarefree)");
    }
    {
        BSpec spec = BSpec::kfree(2);
        CorrelationContext ctx(spec);
        bool ok = true;
        for (int t = 0; t < 5 && ok; ++t) {
            std::vector<std::uint64_t> offsets;
            unsigned r = 1 + rng() % 2;
            for (unsigned i = 0; i < r; ++i) offsets.push_back(1 + rng() % 20);
            real_t exact = corr_exact(ctx, offsets).v.value;
            real_t emp = empirical_correlation(spec, 200000, offsets, default_thread_count());
            ok = fabsl(exact - emp) <= 1.5e-2L;
        }
        report(ok, "pattern correlations track sieve frequencies at X = 2e5");
    }
    {
        BSpec spec = BSpec::kfree(2);
        CorrelationContext ctx(spec);
        std::uint64_t N = 5 + rng() % 15;
        real_t exact = variance_exact(ctx, N).var.value;
        real_t emp = variance_empirical(spec, N, 200000, ctx.rho().value, default_thread_count());
        report(fabsl(emp - exact) <= 0.10L * fabsl(exact),
               "window variance identity vs sliding windows at X = 2e5");
    }
    {
        BSpec spec = BSpec::make_explicit({3, 5, 7});
        real_t s = static_cast<real_t>(rng() % 1500) / 1000;
        real_t lhs = (zeta_b(spec, s + 1) * k_b(spec, s)).value;
        real_t rhs = g_b(spec, s).value;
        report(fabsl(lhs - rhs) <= 1e-12L, "zeta_B(s+1) K_B(s) = G_B(s) at a random s");
    }
    {
        BSpec spec = BSpec::kfree(2);
        real_t lhs = (base_product(spec, 2) * zeta_b(spec, 2) * k_b(spec, 1)).value;
        CorrelationContext ctx(spec);
        real_t rho = ctx.rho().value;
        report(fabsl(lhs - rho * rho) <= 1e-10L, "residue identity at s = 1 (squarefree)");
    }
    {
        BSpec spec = BSpec::make_explicit({3, 5, 7});
        std::uint64_t limit = 100 + rng() % 2900;
        auto fast = enumerate_b_integers(spec, limit);
        std::vector<std::uint64_t> brute;
        for (std::uint64_t n = 1; n <= limit; ++n) {
            std::uint64_t m = n;
            for (std::uint64_t b : {3ull, 5ull, 7ull})
                while (m % b == 0) m /= b;
            if (m == 1) brute.push_back(n);
        }
        report(fast == brute, "semigroup enumeration vs divisibility brute force");
    }
    {
        bool ok = true;
        std::string what = "Gaussian ball sieve self-check and density at radius 40";
        try {
            NFWindow win = sieve_ball({0, 0}, 40, 2);
            std::uint64_t kfree = 0;
            for (Gaussian z : l1_ball(40))
                if (win.at(z)) ++kfree;
            real_t frac = static_cast<real_t>(kfree) / static_cast<real_t>(l1_ball_size(40));
            ok = fabsl(frac - nf_density(2).value) <= 5e-2L;
        } catch (const std::exception&) {
            ok = false;
        }
        report(ok, what);
    }
    {
        Gaussian h{static_cast<std::int64_t>(rng() % 30) - 15,
                   static_cast<std::int64_t>(rng() % 30) - 15};
        real_t a = nf_corr2(2, h).value;
        real_t b = nf_corr2(2, Gaussian{-h.a, -h.b}).value;
        real_t c = nf_corr2(2, Gaussian{-h.b, h.a}).value;
        report(fabsl(a - b) <= 1e-15L && fabsl(a - c) <= 1e-15L,
               "pair correlation invariant under units");
    }

    sink.line(failures == 0 ? "selftest: all checks passed"
                            : "selftest: " + std::to_string(failures) + " check(s) failed");
    return failures == 0 ? 0 : 1;
}

int run_parsed(CLI::App& app, int argc, char** argv) {
    std::vector<std::string> raw(argv + 1, argv + argc);
    std::vector<std::string> merged = merge_config(std::move(raw));

    CommonOpts copts;
    struct {
        std::uint64_t start = 1, length = 0;
    } sieve_o;
    struct {
        std::string offsets;
        std::uint64_t empirical_x = 0;
    } corr_o;
    struct {
        std::uint64_t empirical_x = 0;
    } density_o;
    struct {
        std::uint64_t limit = 0;
        bool weighted = false, params = false, count_only = false;
    } semi_o;
    struct {
        double alpha = 0, beta = 0, big_a = 1;
    } const_o;
    struct {
        std::string n;
        std::uint64_t empirical_x = 0;
    } var_o;
    struct {
        std::string n;
        std::uint64_t x = 0;
    } exc_o;
    struct {
        unsigned k = 2;
        std::string n;
        std::int64_t m = 0, corr_cap = 64;
    } nf_o;
    std::uint64_t seed = 12345;

    app.description("numerical laboratory for B-free integers");
    app.require_subcommand(1);

    CLI::App* s_sieve = app.add_subcommand("sieve", "emit the B-free indicator over a window");
    add_common(s_sieve, copts, true);
    s_sieve->add_option("--start", sieve_o.start, "first integer of the window");
    s_sieve->add_option("--length", sieve_o.length, "window length")->required();

    CLI::App* s_corr = app.add_subcommand("corr", "exact pattern correlation, optional sieve check");
    add_common(s_corr, copts, true);
    s_corr->add_option("--offsets", corr_o.offsets, "comma list of offsets (0 implicit)");
    s_corr->add_option("--empirical-x", corr_o.empirical_x, "also sieve [1, X] for comparison");

    CLI::App* s_density = app.add_subcommand("density", "exact B-free density, optional sieve check");
    add_common(s_density, copts, true);
    s_density->add_option("--empirical-x", density_o.empirical_x, "also sieve [1, X]");

    CLI::App* s_semi = app.add_subcommand("semigroup", "enumerate B-integers / B-squarefree");
    add_common(s_semi, copts, true);
    s_semi->add_option("--limit", semi_o.limit, "enumerate up to this bound");
    s_semi->add_flag("--weighted", semi_o.weighted, "B-squarefree with weights 1/(b-2)");
    s_semi->add_flag("--params", semi_o.params, "print growth parameters (A, alpha, beta)");
    s_semi->add_flag("--count-only", semi_o.count_only, "print only the counting function");

    CLI::App* s_const = app.add_subcommand("constant", "variance growth constant, JSON report");
    add_common(s_const, copts, true);
    s_const->add_option("--alpha", const_o.alpha, "override growth exponent");
    s_const->add_option("--beta", const_o.beta, "override error exponent");
    s_const->add_option("--big-a", const_o.big_a, "override leading coefficient");

    CLI::App* s_var = app.add_subcommand("variance", "window variance: identity, asymptotic, sieve");
    add_common(s_var, copts, true);
    s_var->add_option("--n", var_o.n, "comma list of window lengths")->required();
    s_var->add_option("--empirical-x", var_o.empirical_x, "also sweep X sliding windows");

    CLI::App* s_exc = app.add_subcommand("exceptional", "windows with no B-free number");
    add_common(s_exc, copts, true);
    s_exc->add_option("--n", exc_o.n, "comma list of window lengths")->required();
    s_exc->add_option("--x", exc_o.x, "number of window starts")->required();

    CLI::App* s_nf = app.add_subcommand("nf-variance", "k-free variance on Gaussian-integer balls");
    add_common(s_nf, copts, false);
    s_nf->add_option("--k", nf_o.k, "freeness exponent")->check(CLI::Range(2u, 8u));
    s_nf->add_option("--n", nf_o.n, "comma list of ball radii")->required();
    s_nf->add_option("--m", nf_o.m, "center-ball radius")->required();
    s_nf->add_option("--corr-cap", nf_o.corr_cap, "largest N for the correlation-sum route");

    CLI::App* s_self = app.add_subcommand("selftest", "randomized cross-module spot checks");
    add_common(s_self, copts, false);
    s_self->add_option("--seed", seed, "RNG seed for the spot checks");

    std::reverse(merged.begin(), merged.end());  // CLI11 vector parse order
    app.parse(merged);

    Sink sink;
    sink.path = copts.out_path;
    int code = 0;
    if (s_sieve->parsed())
        run_sieve(copts, sieve_o.start, sieve_o.length, sink);
    else if (s_corr->parsed())
        run_corr(copts, corr_o.offsets, corr_o.empirical_x, sink);
    else if (s_density->parsed())
        run_density(copts, density_o.empirical_x, sink);
    else if (s_semi->parsed())
        run_semigroup(copts, semi_o.limit, semi_o.weighted, semi_o.params, semi_o.count_only, sink);
    else if (s_const->parsed())
        run_constant(copts, static_cast<real_t>(const_o.alpha), static_cast<real_t>(const_o.beta),
                     static_cast<real_t>(const_o.big_a), sink);
    else if (s_var->parsed())
        run_variance(copts, var_o.n, var_o.empirical_x, sink);
    else if (s_exc->parsed())
        run_exceptional(copts, exc_o.n, exc_o.x, sink);
    else if (s_nf->parsed())
        run_nf_variance(copts, nf_o.k, nf_o.n, nf_o.m, nf_o.corr_cap, sink);
    else if (s_self->parsed())
        code = run_selftest(seed, sink);
    sink.flush();
    return code;
}

} // namespace

int run_cli(int argc, char** argv) {
    CLI::App app;
    try {
        return run_parsed(app, argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const validation_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const resource_error& e) {
        std::cerr << "resource error: " << e.what() << "\n";
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: invalid JSON: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace bfree
