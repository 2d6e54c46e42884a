#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#ifndef BFREE_CLI_PATH
#error "BFREE_CLI_PATH must point at the built binary"
#endif

namespace {

int run(const std::string& args) {
    std::string cmd = std::string(BFREE_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    REQUIRE(rc != -1);
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -2;
}

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    REQUIRE(f.good());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(item);
    return out;
}

const std::string kKfree2 = "'{\"kfree\":{\"k\":2}}'";

}  // namespace

TEST_CASE("density: CSV schema and the squarefree value") {
    REQUIRE(run("density --bspec " + kKfree2 +
                " --empirical-x 200000 --threads 2 --out cli_density.csv") == 0);
    auto lines = split(slurp("cli_density.csv"), '\n');
    REQUIRE(lines.size() >= 2);
    CHECK(lines[0] == "rho_exact,err_bound,rho_empirical,X");
    auto fields = split(lines[1], ',');
    REQUIRE(fields.size() == 4);
    long double rho = std::stold(fields[0]);
    CHECK(fabsl(rho - 0.607927101854027L) <= 1e-12L);
    CHECK(fabsl(std::stold(fields[2]) - rho) <= 3e-3L);
    CHECK(fields[3] == "200000");
}

TEST_CASE("density: JSON output parses and matches") {
    REQUIRE(run("density --bspec " + kKfree2 + " --format json --out cli_density.json") == 0);
    nlohmann::json j = nlohmann::json::parse(slurp("cli_density.json"));
    CHECK(std::fabs(j["rho_exact"].get<double>() - 0.6079271018540267) <= 1e-12);
    CHECK(j["err_bound"].get<double>() < 1e-12);
    CHECK(j["bspec"]["kfree"]["k"] == 2);
    CHECK(!j.contains("rho_empirical"));
}

TEST_CASE("sieve: explicit {2} window") {
    REQUIRE(run("sieve --bspec '{\"explicit\":[2]}' --start 5 --length 4 --out cli_sieve.csv") == 0);
    CHECK(slurp("cli_sieve.csv") == "n,mu\n5,1\n6,0\n7,1\n8,0\n");
}

TEST_CASE("corr: exact column agrees with the frozen pair value") {
    REQUIRE(run("corr --bspec " + kKfree2 + " --offsets 1 --out cli_corr.csv") == 0);
    auto lines = split(slurp("cli_corr.csv"), '\n');
    REQUIRE(lines.size() >= 2);
    CHECK(lines[0] == "offsets,exact,err_bound,degenerate,empirical,X");
    auto fields = split(lines[1], ',');
    REQUIRE(fields.size() >= 4);
    CHECK(fields[0] == "1");
    CHECK(fabsl(std::stold(fields[1]) - 0.322634098939245L) <= 1e-12L);
    CHECK(fields[3] == "0");
}

TEST_CASE("variance: preset emits the growth-law columns") {
    REQUIRE(run("variance --bspec " + kKfree2 +
                " --n 10,100 --empirical-x 100000 --threads 2 --out cli_var.csv") == 0);
    auto lines = split(slurp("cli_var.csv"), '\n');
    REQUIRE(lines.size() >= 3);
    CHECK(lines[0] == "N,var_exact,err_bound,var_empirical,X,c_n_alpha,ratio");
    auto r10 = split(lines[1], ',');
    REQUIRE(r10.size() == 7);
    CHECK(r10[0] == "10");
    CHECK(fabsl(std::stold(r10[1]) - 0.832057768848136L) <= 1e-10L);
    CHECK(fabsl(std::stold(r10[3]) - std::stold(r10[1])) <= 0.05L * std::stold(r10[1]));
    CHECK(!r10[5].empty());
    CHECK(!r10[6].empty());
}

TEST_CASE("variance: explicit set leaves the growth-law columns blank") {
    REQUIRE(run("variance --bspec '{\"explicit\":[3,5,7]}' --n 10 --format json "
                "--out cli_var_exp.json") == 0);
    nlohmann::json rows = nlohmann::json::parse(slurp("cli_var_exp.json"));
    REQUIRE(rows.is_array());
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].contains("var_exact"));
    CHECK(!rows[0].contains("ratio"));
}

TEST_CASE("constant: JSON report with factor breakdown") {
    REQUIRE(run("constant --bspec " + kKfree2 + " --out cli_const.json") == 0);
    nlohmann::json j = nlohmann::json::parse(slurp("cli_const.json"));
    CHECK(std::fabs(j["C"].get<double>() - 0.23844336167683170) <= 1e-10);
    CHECK(j["sign_ok"].get<bool>());
    double assembled = j["factors"]["prefactor"].get<double>() *
                       j["factors"]["product"].get<double>() * j["factors"]["sin"].get<double>() *
                       j["factors"]["gamma"].get<double>() * j["factors"]["zeta"].get<double>();
    CHECK(std::fabs(assembled - j["C"].get<double>()) <= 1e-12);
    CHECK(j["error_bound"].get<double>() < 1e-9);
}

TEST_CASE("semigroup: counting function equals the integer k-th root") {
    REQUIRE(run("semigroup --bspec " + kKfree2 +
                " --limit 1000000 --count-only --out cli_semi.csv") == 0);
    CHECK(slurp("cli_semi.csv") == "limit,count\n1000000,1000\n");
}

TEST_CASE("exceptional: CSV row shape") {
    REQUIRE(run("exceptional --bspec " + kKfree2 +
                " --n 3 --x 100000 --threads 2 --out cli_exc.csv") == 0);
    auto lines = split(slurp("cli_exc.csv"), '\n');
    REQUIRE(lines.size() >= 2);
    CHECK(lines[0] == "N,X,count,p_hat,bound_ratio");
    auto fields = split(lines[1], ',');
    REQUIRE(fields.size() == 5);
    CHECK(fields[0] == "3");
    CHECK(std::stoull(fields[2]) > 0);
    CHECK(!fields[4].empty());
}

TEST_CASE("nf-variance: both routes present under the cap") {
    REQUIRE(run("nf-variance --k 2 --n 5 --m 60 --threads 2 --out cli_nf.csv") == 0);
    auto lines = split(slurp("cli_nf.csv"), '\n');
    REQUIRE(lines.size() >= 2);
    CHECK(lines[0] == "k,N,M,var_sliding,var_corr,ratio,var_over_N3");
    auto fields = split(lines[1], ',');
    REQUIRE(fields.size() == 7);
    CHECK(fields[0] == "2");
    CHECK(!fields[4].empty());
    CHECK(fabsl(std::stold(fields[5]) - 1) <= 0.25L);
}

TEST_CASE("output bytes do not depend on the thread count") {
    for (const std::string t : {"1", "7"}) {
        REQUIRE(run("corr --bspec " + kKfree2 + " --offsets 1,3 --empirical-x 300000 --threads " +
                    t + " --out cli_det_" + t + ".csv") == 0);
        REQUIRE(run("variance --bspec " + kKfree2 + " --n 7 --empirical-x 200000 --threads " + t +
                    " --out cli_detv_" + t + ".csv") == 0);
    }
    CHECK(slurp("cli_det_1.csv") == slurp("cli_det_7.csv"));
    CHECK(slurp("cli_detv_1.csv") == slurp("cli_detv_7.csv"));
}

TEST_CASE("config file fills gaps but never overrides flags") {
    {
        std::ofstream f("cli_cfg.json");
        f << "{\"empirical-x\": 100000, \"threads\": 2}";
    }
    REQUIRE(run("density --bspec " + kKfree2 + " --config cli_cfg.json --out cli_cfg_a.csv") == 0);
    auto a = split(split(slurp("cli_cfg_a.csv"), '\n')[1], ',');
    CHECK(a[3] == "100000");
    REQUIRE(run("density --bspec " + kKfree2 +
                " --config cli_cfg.json --empirical-x 50000 --out cli_cfg_b.csv") == 0);
    auto b = split(split(slurp("cli_cfg_b.csv"), '\n')[1], ',');
    CHECK(b[3] == "50000");
}

TEST_CASE("exit codes: usage 1, validation 1, resource 2, help 0") {
    CHECK(run("density --bspec '{\"bogus\":1}'") == 1);
    CHECK(run("density --bspec '{\"explicit\":[4,6]}'") == 1);  // shared factor
    CHECK(run("density --bspec " + kKfree2 + " --no-such-flag") == 1);
    CHECK(run("density") == 1);  // --bspec is required
    CHECK(run("sieve --bspec " + kKfree2 + " --length 1000000000000") == 2);
    CHECK(run("--help") == 0);
    CHECK(run("variance --bspec " + kKfree2 + " --n 0") == 1);
}

TEST_CASE("selftest passes and says so") {
    REQUIRE(run("selftest --seed 12345 --out cli_self.txt") == 0);
    std::string out = slurp("cli_self.txt");
    CHECK(out.find("[FAIL]") == std::string::npos);
    CHECK(out.find("selftest: all checks passed") != std::string::npos);
}
