#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "normext/config.hpp"
#include "normext/spectral.hpp"

using namespace normext;
using Catch::Matchers::WithinAbs;

namespace {

int run_cli(const std::string& args) {
    const std::string cmd = std::string(NORMEXT_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string write_temp(const std::string& name, const std::string& content) {
    const std::string path = name;
    std::ofstream out(path);
    out << content;
    return path;
}

const char* kGoodConfig = R"({
  "schema": "normext/1",
  "dim": 2,
  "weight": {"kind": "power", "gamma": 2.0},
  "C": {"diag": [0.5, 1.5]},
  "a_i": {"kind": "polynomial", "entries": [[[0.1, [0.0, 0.0], 2.0], [0.0]], [[0.0], [0.2]]]},
  "W": {"diag_phases": [0.4, -0.9]},
  "numerics": {"grid_n": 256, "k_min": -2, "k_max": 2, "evolution_step": 0.002},
  "seed": 7
})";

} // namespace

TEST_CASE("problem configs parse into usable extensions") {
    const auto cfg = parse_problem_config(json::parse(kGoodConfig));
    CHECK(cfg.dim == 2);
    CHECK(cfg.weight.kind() == WeightKind::Power);
    CHECK(cfg.numerics.grid_n == 256);
    CHECK(cfg.numerics.evolution_step == 0.002);
    CHECK(cfg.seed == 7);

    // polynomial a_i entry (0,0) is 0.1 + 0 t + 2 t^2
    const MatrixXcd ai = cfg.a_i(0.5);
    CHECK_THAT(std::abs(ai(0, 0) - complexd(0.1 + 2.0 * 0.25, 0.0)), WithinAbs(0.0, 1e-14));
    CHECK_THAT(std::abs(ai(1, 1) - complexd(0.2, 0.0)), WithinAbs(0.0, 1e-14));

    const auto ext = make_extension(cfg);
    CHECK(validate(ext).valid);

    const auto path = make_coefficient_path(cfg);
    CHECK(path.dim() == 2);
}

TEST_CASE("config errors carry field paths") {
    auto expect_error = [](const char* text, const char* needle) {
        try {
            parse_problem_config(json::parse(text));
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find(needle) != std::string::npos);
        }
    };
    expect_error(R"({"schema": "other"})", "schema");
    expect_error(R"({"schema": "normext/1", "dim": 0})", "dim");
    expect_error(R"({"schema": "normext/1", "dim": 1, "weight": {"kind": "bogus"}})", "weight.kind");
    expect_error(
        R"({"schema": "normext/1", "dim": 1, "weight": {"kind": "constant"}, "C": {"diag": [1.0, 2.0]}})",
        "C.diag");
    expect_error(
        R"({"schema": "normext/1", "dim": 1, "weight": {"kind": "constant"}, "C": {"diag": [1.0]}, "W": {}})",
        "W");
}

TEST_CASE("dense matrices parse complex pairs") {
    const auto cfg = parse_problem_config(json::parse(R"({
      "schema": "normext/1", "dim": 2,
      "weight": {"kind": "constant"},
      "C": {"dense": [[1.0, [0.0, 0.3]], [[0.0, -0.3], 2.0]]},
      "W": {"dense": [[[0.0, 1.0], 0.0], [0.0, [0.0, 1.0]]]}
    })"));
    CHECK_THAT(std::abs(cfg.c_matrix(0, 1) - complexd(0.0, 0.3)), WithinAbs(0.0, 1e-15));
    CHECK_THAT(std::abs(cfg.w_matrix(0, 0) - complexd(0.0, 1.0)), WithinAbs(0.0, 1e-15));
    CHECK(validate(make_extension(cfg)).valid);
}

TEST_CASE("cli exit codes follow the contract") {
    const auto good = write_temp("cli_good.json", kGoodConfig);
    CHECK(run_cli("validate " + good) == 0);
    CHECK(run_cli("spectrum " + good + " --no-oracle") == 0);

    // missing file -> io error
    CHECK(run_cli("validate definitely_missing.json") == 4);

    // malformed schema -> validation failure
    const auto bad = write_temp("cli_bad.json", R"({"schema": "nope"})");
    CHECK(run_cli("validate " + bad) == 2);

    // invalid extension (non-commuting W) -> validation failure
    const auto invalid = write_temp("cli_invalid.json", R"({
      "schema": "normext/1", "dim": 2,
      "weight": {"kind": "constant"},
      "C": {"diag": [1.0, 2.0]},
      "W": {"dense": [[0.0, 1.0], [1.0, 0.0]]}
    })");
    CHECK(run_cli("validate " + invalid) == 2);
    CHECK(run_cli("spectrum " + invalid + " --no-oracle") == 2);

    // perturbed family -> assertion failure "not formally normal"
    const auto pert = write_temp("cli_pert.json", R"({
      "schema": "normext/1", "dim": 1,
      "weight": {"kind": "power", "gamma": 2.0},
      "C": {"diag": [1.0]},
      "W": {"diag_phases": [0.0]},
      "perturb_eps": 0.1
    })");
    CHECK(run_cli("check-normality " + pert) == 3);

    CHECK(run_cli("examples") == 0);
    CHECK(run_cli("examples --broken") == 3);
    CHECK(run_cli("verify --jobs 2") == 0);
}

TEST_CASE("cli outputs are deterministic and atomic") {
    const auto good = write_temp("cli_det.json", kGoodConfig);
    REQUIRE(run_cli("spectrum " + good + " --out cli_det_a.json --csv cli_det_a.csv") == 0);
    REQUIRE(run_cli("spectrum " + good + " --out cli_det_b.json --csv cli_det_b.csv") == 0);
    auto slurp = [](const std::string& p) {
        std::ifstream in(p);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    CHECK(slurp("cli_det_a.json") == slurp("cli_det_b.json"));
    CHECK(slurp("cli_det_a.csv") == slurp("cli_det_b.csv"));
    CHECK(slurp("cli_det_a.csv").rfind("re,im,branch,k\n", 0) == 0);

    // no stray temp files after atomic writes
    CHECK(!std::ifstream("cli_det_a.json.tmp").good());
}

TEST_CASE("tabulated weights load through the config csv hook") {
    {
        std::ofstream csv("cli_weight_table.csv");
        csv << "t,alpha\n";
        for (int i = 0; i <= 16; ++i) csv << i / 16.0 << "," << 1.0 + i / 16.0 << "\n";
    }
    const auto cfg = parse_problem_config(json::parse(R"({
      "schema": "normext/1", "dim": 1,
      "weight": {"kind": "tabulated", "csv": "cli_weight_table.csv"},
      "C": {"diag": [1.0]},
      "W": {"diag_phases": [0.0]}
    })"));
    CHECK(cfg.weight.kind() == WeightKind::Tabulated);
    CHECK_THAT(cfg.weight(0.5), WithinAbs(1.5, 1e-9));
}

TEST_CASE("snumbers subcommand emits fit and audit") {
    const auto good = write_temp("cli_sn.json", kGoodConfig);
    REQUIRE(run_cli("snumbers " + good + " --count 2000 --out cli_sn_out.json --csv cli_sn.csv") == 0);
    std::ifstream in("cli_sn_out.json");
    json rep;
    in >> rep;
    CHECK(rep.contains("fit"));
    CHECK(rep.contains("schatten"));
    CHECK(rep["constant_audit"].contains("lattice_counting_prediction"));
    std::ifstream csv("cli_sn.csv");
    std::string header;
    std::getline(csv, header);
    CHECK(header == "n,s_n");
}
