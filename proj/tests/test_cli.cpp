#include <doctest.h>

#include "tdpi/cli.hpp"
#include "tdpi/digest.hpp"
#include "tdpi/errors.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

using namespace tdpi;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

} // namespace

TEST_CASE("sha256 known vectors") {
    CHECK(sha256_hex("") ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("config parsing") {
    using cli::parse_config;
    const cli::RunConfig c = parse_config({"pole", "--alpha0", "0.05", "--omega", "2"});
    CHECK(c.subcommand == "pole");
    CHECK(c.alpha0 == 0.05);
    CHECK(c.omega == 2.0);
    CHECK(c.step == 0.005);       // documented defaults
    CHECK(c.truncation == 256);
    CHECK(c.format == "csv");

    CHECK_THROWS(parse_config({"pole", "--omega", "0"}));
    CHECK_THROWS(parse_config({"warp", "--omega", "1"}));
    CHECK_THROWS(parse_config({"charge", "--format", "yaml"}));
    CHECK_THROWS(parse_config({"charge", "--omega", "two"}));
    CHECK_THROWS(parse_config({"charge", "--omegahertz", "2"}));

    // resonant frequency rejected for spectral subcommands with the divisor named
    const double E = std::exp(2.0 * (std::log(2.0) - euler_gamma));
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", E / 3.0);
    CHECK_THROWS_AS(parse_config({"pole", "--omega", buf}), ResonanceError);
    try {
        parse_config({"pole", "--omega", buf});
    } catch (const ResonanceError& e) {
        CHECK(e.divisor == 3);
        CHECK(std::string(e.what()).find("N = 3") != std::string::npos);
    }
    // same frequency is fine for time-domain subcommands
    CHECK_NOTHROW(parse_config({"charge", "--omega", buf, "--tmax", "1"}));

    // config file with command-line override
    {
        std::ofstream f("/tmp/tdpi_test_cfg.ini");
        f << "# benchmark configuration\n"
          << "alpha0=0.3\n"
          << "omega=2.5\n"
          << "step=0.01\n";
    }
    const cli::RunConfig fc = parse_config(
        {"charge", "--config", "/tmp/tdpi_test_cfg.ini", "--omega", "3.0"});
    CHECK(fc.alpha0 == 0.3);     // from the file
    CHECK(fc.step == 0.01);      // from the file
    CHECK(fc.omega == 3.0);      // flag wins
}

TEST_CASE("table writer") {
    cli::Table t;
    t.columns = {"t", "value"};
    t.data = {{0.0, 0.1, 0.2}, {1.0, 0.5, 0.25}};

    const std::string d1 = cli::write_output(t, "csv", "/tmp/tdpi_test_out.csv");
    const std::string d2 = cli::write_output(t, "csv", "/tmp/tdpi_test_out2.csv");
    CHECK(d1 == d2);                       // deterministic bytes
    CHECK(d1 == sha256_hex(slurp("/tmp/tdpi_test_out.csv")));

    const std::string csv = slurp("/tmp/tdpi_test_out.csv");
    CHECK(csv.substr(0, 8) == "t,value\n");
    CHECK(csv.find('\r') == std::string::npos);

    // JSON mirrors the columns; values round-trip exactly
    cli::write_output(t, "json", "/tmp/tdpi_test_out.json");
    const nlohmann::json j = nlohmann::json::parse(slurp("/tmp/tdpi_test_out.json"));
    CHECK(j["columns"].size() == 2);
    for (std::size_t r = 0; r < 3; ++r)
        CHECK(double(j["data"]["value"][r]) == t.data[1][r]);

    // header-only CSV for an empty series
    cli::Table empty;
    empty.columns = {"t", "value"};
    empty.data = {{}, {}};
    cli::write_output(empty, "csv", "/tmp/tdpi_test_empty.csv");
    CHECK(slurp("/tmp/tdpi_test_empty.csv") == "t,value\n");

    // non-finite values abort
    cli::Table bad = t;
    bad.data[1][1] = std::nan("");
    CHECK_THROWS_AS(cli::write_output(bad, "csv", "/tmp/tdpi_test_bad.csv"), Error);
}

TEST_CASE("charge subcommand end to end") {
    cli::RunConfig cfg = cli::parse_config(
        {"charge", "--alpha0", "0.1", "--omega", "2", "--tmax", "0.5", "--step", "0.005",
         "--stride", "10", "--output", "/tmp/tdpi_test_charge"});
    const cli::RunManifest man = cli::run(cfg);
    const std::string body = slurp("/tmp/tdpi_test_charge.csv");
    CHECK(body.substr(0, 18) == "t,re_q,im_q,abs_q\n");

    CHECK(man.output_digests.at("/tmp/tdpi_test_charge.csv") == sha256_hex(body));
    const nlohmann::json j =
        nlohmann::json::parse(slurp("/tmp/tdpi_test_charge.manifest.json"));
    CHECK(j["config"]["alpha0"] == "0.10000000000000001");
    CHECK(j["version"] == cli::kVersion);

    // determinism: identical config gives identical digests
    const cli::RunManifest man2 = cli::run(cfg);
    CHECK(man2.output_digests == man.output_digests);
}

TEST_CASE("scan subcommand ordering") {
    cli::RunConfig cfg = cli::parse_config(
        {"scan", "--alpha0s", "0.05,0.02", "--omegas", "2",
         "--truncation", "64", "--output", "/tmp/tdpi_test_scan"});
    cli::run(cfg);
    const std::string body = slurp("/tmp/tdpi_test_scan.csv");
    // rows sorted by (alpha0, omega): 0.02 before 0.05
    const std::size_t p1 = body.find("\n0.02");
    const std::size_t p2 = body.find("\n0.05");
    CHECK(p1 != std::string::npos);
    CHECK(p2 != std::string::npos);
    CHECK(p1 < p2);
}
