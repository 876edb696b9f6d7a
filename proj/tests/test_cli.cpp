#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "wavelab/config.hpp"

using namespace wavelab;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::string kCli = WAVELAB_CLI_PATH;

int run(const std::string& args) {
    std::string cmd = kCli + " " + args + " >/dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    return rc == -1 ? -1 : WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    REQUIRE(bool(f));
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) : path(fs::temp_directory_path() / tag) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string str() const { return path.string(); }
};

void write_config(const fs::path& p, const std::string& body) {
    std::ofstream f(p);
    f << body;
}

}  // namespace

TEST_CASE("config parser: sections, quoting, comments, errors") {
    auto c = Config::parse(
        "# comment line\n"
        "coeff = { family = \"oscillating\", mu = 0.25, alpha = 5 }  # trailing\n"
        "zones = { N = \"auto\", k = 2 }\n"
        "n = 3\n");
    CHECK(c.get_string("coeff.family") == "oscillating");
    CHECK(c.get_number("coeff.mu", 0.0) == doctest::Approx(0.25));
    CHECK(c.get_int("zones.k", 1) == 2);
    CHECK(c.get_string("zones.N") == "auto");
    CHECK(c.get_int("n", 0) == 3);
    CHECK(c.has("coeff.alpha"));
    CHECK_FALSE(c.has("missing"));
    CHECK(c.get_number("missing", 7.5) == 7.5);
    CHECK_THROWS(Config::parse("key value\n"));
    CHECK_THROWS(Config::parse("coeff = { family = \"zero\"\n"));
    CHECK_THROWS(Config::load("/nonexistent/config"));

    auto m = c.make_model();
    CHECK(m.family() == CoeffFamily::oscillating);
    CHECK(m.params().alpha == doctest::Approx(5.0));
}

TEST_CASE("volterra-test subcommand: exit code and JSON artifact") {
    TempDir dir("wavelab_cli_volt");
    fs::path cfg = dir.path / "cfg.conf";
    write_config(cfg, "coeff = { family = \"scale_invariant\", mu = 0.5, ell = 5 }\n");
    CHECK(run("--config " + cfg.string() + " --out " + dir.str() + " volterra-test") == 0);

    json j = json::parse(slurp(dir.path / "volterra_test.json"));
    CHECK(j.at("exp_test_pass").get<bool>());
    CHECK(j.at("diss_zone_pass").get<bool>());
    CHECK(j.at("exp_test_error").get<double>() <= 1e-8);
    CHECK(j.at("lemma_bound_constant").get<double>() > 0.0);
}

TEST_CASE("global flags work after the subcommand too") {
    TempDir dir("wavelab_cli_fall");
    fs::path cfg = dir.path / "cfg.conf";
    write_config(cfg, "coeff = { family = \"zero\" }\n");
    CHECK(run("diag-verify --config " + cfg.string() + " --out " + dir.str()) == 0);
    CHECK(fs::exists(dir.path / "diag_verify.json"));
    CHECK(fs::exists(dir.path / "diag_residual.csv"));
}

TEST_CASE("assumptions subcommand verdicts") {
    TempDir dir("wavelab_cli_assump");
    fs::path cfg = dir.path / "cfg.conf";
    write_config(cfg, "coeff = { family = \"iterated_log\", mu = 2, n = 1, ell = 3 }\n");
    CHECK(run("--config " + cfg.string() + " --out " + dir.str() + " assumptions") == 0);
    json j = json::parse(slurp(dir.path / "assumptions.json"));
    CHECK(j.at("a1").get<bool>());
    CHECK(j.at("a2").get<bool>());
    CHECK(j.at("a3").get<bool>());
    CHECK(j.at("family").get<std::string>() == "iterated_log");
    CHECK(fs::exists(dir.path / "assumptions_rho.csv"));
    CHECK(fs::exists(dir.path / "assumptions_constants.csv"));
}

TEST_CASE("error handling: bad config and missing subcommand") {
    TempDir dir("wavelab_cli_err");
    fs::path bad = dir.path / "bad.conf";
    write_config(bad, "coeff = { family = \"nonsense\" }\n");
    CHECK(run("--config " + bad.string() + " --out " + dir.str() + " assumptions") == 2);
    CHECK(run("") != 0);                  // subcommand required
    CHECK(run("frobnicate") != 0);        // unknown subcommand
    CHECK(run("--config /nope/cfg assumptions") == 2);
}

TEST_CASE("outputs are byte-identical across reruns and thread counts") {
    TempDir a("wavelab_cli_detA"), b("wavelab_cli_detB");
    fs::path cfg = a.path / "cfg.conf";
    write_config(cfg,
                 "coeff = { family = \"scale_invariant\", mu = 0.5, ell = 5 }\n"
                 "zones = { k = 2 }\n"
                 "propagate = { t_max = 200 }\n");
    CHECK(run("--config " + cfg.string() + " --out " + a.str() + " --threads 1 propagate") == 0);
    CHECK(run("--config " + cfg.string() + " --out " + b.str() + " --threads 3 propagate") == 0);
    CHECK(slurp(a.path / "propagate.csv") == slurp(b.path / "propagate.csv"));
    CHECK(slurp(a.path / "propagate.json") == slurp(b.path / "propagate.json"));

    // rerun into the same directory: identical again
    std::string before = slurp(a.path / "propagate.csv");
    CHECK(run("--config " + cfg.string() + " --out " + a.str() + " --threads 2 propagate") == 0);
    CHECK(slurp(a.path / "propagate.csv") == before);

    json j = json::parse(slurp(a.path / "propagate.json"));
    CHECK(j.at("oracle_equivalence_pass").get<bool>());
    CHECK(j.at("liouville_pass").get<bool>());
}

TEST_CASE("propagate CSV shape: header and 12-digit floats") {
    TempDir dir("wavelab_cli_csv");
    fs::path cfg = dir.path / "cfg.conf";
    write_config(cfg, "coeff = { family = \"zero\" }\npropagate = { t_max = 50 }\n");
    CHECK(run("--config " + cfg.string() + " --out " + dir.str() + " propagate") == 0);
    std::istringstream csv(slurp(dir.path / "propagate.csv"));
    std::string header;
    std::getline(csv, header);
    CHECK(header ==
          "t,s,xi,re11,im11,re12,im12,re21,im21,re22,im22,norm,det_defect,rel_err");
    size_t rows = 0;
    std::string line;
    while (std::getline(csv, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 144);  // 12 t-values x 12 frequencies
}
