#include "qha/config.hpp"
#include "qha/io.hpp"
#include "qha/report.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <random>

using namespace qha;

namespace {

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("config parser: sections, comments, dotted paths") {
    ConfigMap cfg = parse_config_text(
        "# leading comment\n"
        "seed = 99   # trailing comment\n"
        "grid.extent = 8\n"
        "ccr-check {\n"
        "    pairs = 7\n"
        "    radius = 2.5\n"
        "}\n"
        "convention = full-phase\n",
        "inline.cfg");
    CHECK(cfg.raw("seed") == "99");
    CHECK(cfg.raw("grid.extent") == "8");
    CHECK(cfg.raw("ccr-check.pairs") == "7");
    CHECK(cfg.raw("ccr-check.radius") == "2.5");
    CHECK(cfg.raw("convention") == "full-phase");
    CHECK(cfg.lines.at("ccr-check.pairs") == 5);
    CHECK(cfg.source == "inline.cfg");
}

TEST_CASE("config parser: malformed input is rejected with the line") {
    CHECK_THROWS_WITH(parse_config_text("seed = 1\nseed = 2\n", "dup.cfg"),
                      Catch::Matchers::ContainsSubstring("dup.cfg:2") &&
                          Catch::Matchers::ContainsSubstring("line 1"));
    CHECK_THROWS_WITH(parse_config_text("ccr-check {\n  pairs = 3\n", "open.cfg"),
                      Catch::Matchers::ContainsSubstring("unclosed section"));
    CHECK_THROWS_WITH(parse_config_text("just some words\n", "bad.cfg"),
                      Catch::Matchers::ContainsSubstring("bad.cfg:1"));
    CHECK_THROWS_WITH(parse_config_text("a b = 3\n", "bad2.cfg"),
                      Catch::Matchers::ContainsSubstring("bad2.cfg:1"));
    CHECK_THROWS_WITH(parse_config_text("}\n", "stray.cfg"),
                      Catch::Matchers::ContainsSubstring("stray.cfg:1"));
}

TEST_CASE("config validation: defaults fill every schema key") {
    ConfigMap cfg;
    validate_config(cfg);
    for (const FieldSpec& f : config_schema()) {
        CHECK(cfg.has(f.path));
        CHECK(cfg.raw(f.path) == f.fallback);
    }
    CHECK(cfg.get_int("spec.dim") == 48);
    CHECK(cfg.get_real("grid.extent") == 10.0);
    CHECK(cfg.get_text("convention") == "half-phase");
    CHECK(cfg.get_u64("seed") == 20260819ull);
    CHECK(cfg.get_int_list("families.winding_powers") ==
          std::vector<long>{1, 2, 3});
    CHECK(cfg.get_real_list("delta-parity.widths") ==
          std::vector<double>{0.2, 0.1, 0.05});
}

TEST_CASE("config validation: every problem is reported at once") {
    ConfigMap cfg = parse_config_text(
        "seed = frog\n"
        "grid.points = 100\n"
        "spec.dim = 9999\n"
        "convention = sideways\n"
        "families.even_indices = 1,2\n"
        "no_such_key = 5\n",
        "probe.cfg");
    try {
        validate_config(cfg);
        FAIL("expected a ConfigError");
    } catch (const ConfigError& e) {
        std::string msg = e.what();
        CHECK(msg.find("seed (probe.cfg:1)") != std::string::npos);
        CHECK(msg.find("not a power of two") != std::string::npos);
        CHECK(msg.find("out of range [2, 512]") != std::string::npos);
        CHECK(msg.find("not one of: half-phase, full-phase") != std::string::npos);
        CHECK(msg.find("entry 1 must be even") != std::string::npos);
        CHECK(msg.find("no_such_key (probe.cfg:6): unknown key") != std::string::npos);
    }
}

TEST_CASE("config getters: full-consume numeric parsing") {
    ConfigMap cfg = parse_config_text("a-number = 12x\n", "t.cfg");
    cfg.values["plain"] = "34";
    cfg.values["listy"] = "1, 2,3";
    CHECK_THROWS_AS(cfg.get_int("a-number"), ConfigError);
    CHECK(cfg.get_int("plain") == 34);
    CHECK(cfg.get_int_list("listy") == std::vector<long>{1, 2, 3});
    CHECK_THROWS_AS(cfg.get_real("a-number"), ConfigError);
    CHECK_THROWS_AS(cfg.get_int("missing"), ConfigError);
}

TEST_CASE("matrix files round-trip exactly") {
    std::mt19937_64 rng(31);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Mat a(5, 3);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 3; ++j) a(i, j) = cplx(gauss(rng), gauss(rng));
    a(2, 1) = cplx(1e-300, -3.0);

    const std::string path = temp_path("qha_test_matrix.dat");
    write_matrix(path, a);
    Mat b = read_matrix(path);
    REQUIRE(b.rows() == 5);
    REQUIRE(b.cols() == 3);
    CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
    std::remove(path.c_str());
}

TEST_CASE("grid symbol files round-trip exactly") {
    Grid grid{4.0, 16};
    GridSymbol f = sample_symbol(
        [](cplx z) { return std::exp(-std::norm(z)) * (1.0 + z); }, grid,
        "test symbol");
    const std::string path = temp_path("qha_test_symbol.dat");
    write_grid_symbol(path, f);
    GridSymbol g = read_grid_symbol(path);
    CHECK(g.grid.extent == 4.0);
    CHECK(g.grid.points == 16);
    CHECK(g.provenance == "test_symbol");  // whitespace flattened
    CHECK((f.samples - g.samples).cwiseAbs().maxCoeff() == 0.0);
    std::remove(path.c_str());
}

TEST_CASE("csv writer quotes awkward cells") {
    const std::string path = temp_path("qha_test.csv");
    write_csv(path, {"name", "value"},
              {{"plain", "1"}, {"with,comma", "2"}, {"with\"quote", "3"}});
    std::ifstream in(path);
    std::string all((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
    CHECK(all.find("name,value\n") == 0);
    CHECK(all.find("\"with,comma\",2") != std::string::npos);
    CHECK(all.find("\"with\"\"quote\",3") != std::string::npos);
    std::remove(path.c_str());
}

TEST_CASE("report json carries verdicts and excludes wall time from the fingerprint") {
    ExperimentReport r;
    r.experiment = "probe";
    r.config_echo.emplace_back("seed", "1");
    r.scalar("answer", 42.0);
    r.series("trace", {1.0, 0.5});
    r.check_below("small enough", 0.5, 1.0);
    r.check_above("big enough", 2.0, 1.0, "note here");
    r.check_equal("counts", 3, 3);
    r.check_true("flag", true);
    r.convention_ledger = "ledger text";
    r.wall_seconds = 1.25;

    CHECK(r.all_pass());
    CHECK(r.fail_count() == 0);
    nlohmann::json j = report_json(r);
    CHECK(j["experiment"] == "probe");
    CHECK(j["config"]["seed"] == "1");
    CHECK(j["results"]["scalars"]["answer"] == 42.0);
    CHECK(j["results"]["arrays"]["trace"].size() == 2);
    CHECK(j["verdicts"].size() == 4);
    CHECK(j["verdicts"][0]["name"] == "small enough");
    CHECK(j["verdicts"][0]["pass"] == true);
    CHECK(j["all_pass"] == true);
    CHECK(j["timing"]["wall_seconds"] == 1.25);

    std::string fp = report_fingerprint(r);
    r.wall_seconds = 99.0;
    CHECK(report_fingerprint(r) == fp);
    r.scalar("extra", 1.0);
    CHECK(report_fingerprint(r) != fp);
}

TEST_CASE("failed verdicts flip the report") {
    ExperimentReport r;
    r.experiment = "probe";
    r.check_below("too big", 2.0, 1.0);
    r.check_equal("mismatch", 3, 4);
    CHECK_FALSE(r.all_pass());
    CHECK(r.fail_count() == 2);
    nlohmann::json j = report_json(r);
    CHECK(j["all_pass"] == false);
    CHECK(j["verdicts"][1]["pass"] == false);
}

TEST_CASE("report files land under the requested directory") {
    ExperimentReport r;
    r.experiment = "probe-files";
    r.scalar("answer", 42.0);
    r.series("trace", {1.0, 2.0, 3.0});
    r.check_true("flag", true);
    const std::string dir = temp_path("qha_test_reports");
    write_report_files(dir, r);
    CHECK(std::filesystem::exists(dir + "/probe-files.json"));
    CHECK(std::filesystem::exists(dir + "/probe-files.csv"));
    std::filesystem::remove_all(dir);
}
