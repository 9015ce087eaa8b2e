#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bulkq/cli.hpp"
#include "doctest.h"

namespace {

struct CliRun {
    int code = -1;
    std::string out;
    std::string err;
};

CliRun run_cli(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    CliRun r;
    r.code = bulkq::cli::run(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

// Drop the one legitimately nondeterministic line so the rest of the report
// can be compared byte for byte.
std::string strip_wall_time(std::string text) {
    const std::size_t key = text.find("\"wall_time_ms\"");
    if (key == std::string::npos) return text;
    const std::size_t begin = text.rfind('\n', key);
    const std::size_t end = text.find('\n', key);
    text.erase(begin == std::string::npos ? 0 : begin,
               (end == std::string::npos ? text.size() : end) -
                   (begin == std::string::npos ? 0 : begin));
    return text;
}

} // namespace

TEST_CASE("cli: dj reports a decision and exits zero") {
    const CliRun r =
        run_cli({"dj", "--oracle", "ip:101", "--n", "3", "--model", "bqcp"});
    CHECK(r.code == 0);
    CHECK(r.err.empty());
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j.at("schema") == "bulkq-report/1");
    CHECK(j.at("command") == "dj");
    CHECK(j.at("results").at("decision").at("verdict") == "balanced");
    CHECK(j.at("results").at("signal").at("e_site").size() == 3);
}

TEST_CASE("cli: identical requests produce byte-identical reports") {
    const std::vector<std::string> args = {"parity", "--y",      "0110", "--model",
                                           "bqc",    "--thermal", "0.8",  "--seed", "9"};
    const CliRun a = run_cli(args);
    const CliRun b = run_cli(args);
    REQUIRE(a.code == 0);
    REQUIRE(b.code == 0);
    CHECK(strip_wall_time(a.out) == strip_wall_time(b.out));
    CHECK(strip_wall_time(a.out).find("wall_time") == std::string::npos);
    CHECK_NOTHROW(nlohmann::json::parse(a.out));
}

TEST_CASE("cli: epsilon carries the frozen worst case") {
    const CliRun r = run_cli({"epsilon", "--n", "3"});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j.at("results").at("epsilon").at("epsilon") == 1.0);
    CHECK(j.at("results").at("epsilon").at("argmin_table") == "00010111");
}

TEST_CASE("cli: certify on the standard circuit passes with c = 2q - 1") {
    const CliRun r = run_cli({"certify", "--oracle", "random-balanced:4", "--n", "2",
                              "--thermal", "0.8,0.6"});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    const auto& obs = j.at("results").at("proportionality").at("observables");
    REQUIRE(obs.size() == 2);
    CHECK(obs[0].at("c").at("re").get<double>() == doctest::Approx(0.6).epsilon(1e-9));
    CHECK(obs[1].at("c").at("re").get<double>() == doctest::Approx(0.2).epsilon(1e-9));
    CHECK(j.at("results").at("proportionality").at("all_pass") == true);
}

TEST_CASE("cli: exit codes follow the documented contract") {
    // usage errors -> 1
    CHECK(run_cli({"dj"}).code == 1);
    CHECK(run_cli({"epsilon"}).code == 1);
    CHECK(run_cli({"unknown-subcommand"}).code == 1);

    // domain/guard violations -> 2
    CHECK(run_cli({"dj", "--oracle", "ip:11", "--n", "2", "--model", "bqc"}).code == 2);
    CHECK(run_cli({"epsilon", "--n", "9"}).code == 2);
    CHECK(run_cli({"dj", "--oracle", "ip:11", "--n", "2", "--model", "bqcp", "--thermal",
                   "0.8"}).code == 2);

    // malformed inputs -> 3
    CHECK(run_cli({"dj", "--oracle", "file:/no/such/file", "--n", "2"}).code == 3);
    CHECK(run_cli({"parity", "--y", "012"}).code == 3);
    CHECK(run_cli({"dj", "--oracle", "ip:11", "--n", "2", "--model", "bqc", "--thermal",
                   "zero"}).code == 3);

    // error text lands on the error stream, stdout stays empty
    const CliRun r = run_cli({"epsilon", "--n", "9"});
    CHECK(r.out.empty());
    CHECK(!r.err.empty());
}

TEST_CASE("cli: noisy runs are reproducible through the seed") {
    const std::vector<std::string> args = {
        "parity", "--y", "1011", "--model", "bqcp", "--sigma-read", "0.3",
        "--reps", "16",  "--noise-seed", "5"};
    const CliRun a = run_cli(args);
    const CliRun b = run_cli(args);
    REQUIRE(a.code == 0);
    CHECK(strip_wall_time(a.out) == strip_wall_time(b.out));

    const auto j = nlohmann::json::parse(a.out);
    CHECK(j.at("results").at("parity").at("y_hat") == nlohmann::json::array({1, 0, 1, 1}));
}
