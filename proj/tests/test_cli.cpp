#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "bergman/config.hpp"
#include "bergman/report.hpp"
#include "bergman/runner.hpp"

using namespace bergman;
namespace fs = std::filesystem;
using Catch::Approx;

namespace {

fs::path fresh_dir(const std::string& tag) {
    const fs::path dir = fs::temp_directory_path() / ("bergman_test_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

fs::path write_file(const fs::path& dir, const std::string& name, const std::string& body) {
    const fs::path p = dir / name;
    std::ofstream out(p);
    out << body;
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_CASE("config parsing") {
    const auto dir = fresh_dir("cfg");
    const auto path = write_file(dir, "good.cfg",
                                 "# comment\n"
                                 "name = demo\n"
                                 "weight.omega = standard:alpha=1\n"
                                 "p = 2\n"
                                 "q = 2\n"
                                 "symbol.phi = scaling:0.5\n"
                                 "symbol.u = taylor:1,0.5\n"
                                 "symbol.n = 1\n"
                                 "delta = 3\n"
                                 "quad.rings = 32\n");
    const auto cfg = load_config(path);
    CHECK(cfg.name == "demo");
    CHECK(cfg.omega().alpha() == 1.0);
    CHECK(cfg.symbol().n == 1);
    CHECK(cfg.quad.radial_rings == 32);

    const auto bad_key = write_file(dir, "bad_key.cfg", "nme = demo\n");
    CHECK_THROWS_WITH(load_config(bad_key), Catch::Matchers::ContainsSubstring(":1"));
    const auto bad_num = write_file(dir, "bad_num.cfg", "p = two\n");
    CHECK_THROWS_WITH(load_config(bad_num), Catch::Matchers::ContainsSubstring("p"));
    const auto bad_r = write_file(dir, "bad_r.cfg", "carleson.r = 1.5\n");
    CHECK_THROWS_AS(load_config(bad_r), ConfigError);
    CHECK_THROWS_AS(load_config(dir / "missing.cfg"), ConfigError);
}

TEST_CASE("symbol grammar") {
    CHECK(parse_map_spec("identity")(Complex(0.3, 0.1)) == Complex(0.3, 0.1));
    CHECK(parse_map_spec("constant:0.3")(Complex(0.5, 0)) == Complex(0.3, 0));
    CHECK(parse_map_spec("power:2")(Complex(0.0, 0.5)) == Complex(-0.25, 0));
    CHECK(std::abs(parse_map_spec("blaschke:0.5")(Complex(0.5, 0))) == Approx(0.0));
    const auto t = parse_map_spec("taylor:1,0,0.5");
    CHECK(t(Complex(0.2, 0)).real() == Approx(1.02));
    CHECK_THROWS_AS(parse_map_spec("phi:1"), ConfigError);
    CHECK_THROWS_AS(parse_weight_spec("gaussian:1"), ConfigError);
}

TEST_CASE("weight CSV loading") {
    const auto dir = fresh_dir("csv");
    const auto good = write_file(dir, "w.csv", "r,w\n0.0,1.0\n0.5,0.75\n0.9,0.19\n");
    const auto w = load_weight_csv(good);
    CHECK(w(0.25) == Approx(0.875));

    const auto neg = write_file(dir, "neg.csv", "0.0,1.0\n0.5,-0.1\n");
    CHECK_THROWS_WITH(load_weight_csv(neg), Catch::Matchers::ContainsSubstring("row 2"));
    const auto unsorted = write_file(dir, "uns.csv", "0.5,1.0\n0.25,1.0\n");
    CHECK_THROWS_WITH(load_weight_csv(unsorted),
                      Catch::Matchers::ContainsSubstring("strictly increasing"));
    const auto range = write_file(dir, "rng.csv", "0.0,1.0\n1.0,1.0\n");
    CHECK_THROWS_WITH(load_weight_csv(range), Catch::Matchers::ContainsSubstring("row 2"));
}

TEST_CASE("weight-report runner") {
    const auto dir = fresh_dir("wr");
    ExperimentConfig cfg;
    cfg.name = "alpha0";
    cfg.weight_omega = "standard:alpha=0";
    cfg.weight_grid_dyadic = 20;
    CHECK(run_weight_report(cfg, dir) == 0);

    const auto j = nlohmann::json::parse(slurp(dir / "alpha0_weight.json"));
    CHECK(j["upper_constant"].get<double>() == Approx(2.0).epsilon(1e-10));
    CHECK(j["in_D"].get<bool>());
    CHECK(j["config"]["weight.omega"] == "standard:alpha=0");

    const auto csv = slurp(dir / "alpha0_weight.csv");
    CHECK(csv.rfind("r,omega_hat,omega_tilde,box_mass,doubling_ratio", 0) == 0);
    CHECK(fs::exists(dir / "schema.txt"));
}

TEST_CASE("criteria runner: identity instance and regime gate") {
    const auto dir = fresh_dir("crit");
    ExperimentConfig cfg;
    cfg.name = "id";
    cfg.phi = "identity";
    cfg.u = "constant:1";
    cfg.n = 0;
    cfg.delta = "3";
    cfg.grid_a_dyadic = 6;
    cfg.grid_a_angles = 2;
    cfg.grid_z_dyadic = 4;
    cfg.grid_z_angles = 4;
    cfg.criteria = {"order_bounded", "bounded"};
    CHECK(run_criteria(cfg, dir) == 0);

    const auto j = nlohmann::json::parse(slurp(dir / "id_criteria.json"));
    REQUIRE(j["records"].size() == 2);
    CHECK(j["records"][0]["kind"] == "order_bounded");
    CHECK(j["records"][0]["verdict"] == "fails");
    CHECK(j["records"][0]["value"] == "inf");
    CHECK(j["records"][1]["kind"] == "bounded");
    CHECK(j["records"][1]["verdict"] == "holds");
    CHECK(fs::exists(dir / "id_bounded.csv"));

    // p > q: the record carries the error, the batch and exit code survive
    ExperimentConfig bad = cfg;
    bad.name = "regime";
    bad.p = 3.0;
    bad.q = 2.0;
    bad.criteria = {"bounded", "order_bounded"};
    CHECK(run_criteria(bad, dir) == 0);
    const auto jb = nlohmann::json::parse(slurp(dir / "regime_criteria.json"));
    CHECK(jb["records"][0].contains("error"));
    CHECK(jb["records"][1]["kind"] == "order_bounded");  // still ran
}

TEST_CASE("essnorm runner") {
    const auto dir = fresh_dir("ess");
    ExperimentConfig cfg;
    cfg.name = "half";
    cfg.phi = "scaling:0.5";
    cfg.delta = "heuristic";
    cfg.weight_grid_dyadic = 20;
    cfg.grid_a_dyadic = 6;
    cfg.grid_a_angles = 2;
    cfg.grid_tail_dyadic = 10;
    cfg.grid_tail_angles = 1;
    CHECK(run_essnorm(cfg, dir) == 0);

    const auto j = nlohmann::json::parse(slurp(dir / "half_essnorm.json"));
    CHECK(j["compact"].get<bool>());
    CHECK(j["delta_basis"] == "heuristic");
    CHECK(j["delta"].get<double>() == Approx(2.0).epsilon(0.05));
    CHECK(j["essential_norm"]["decay_exponent"].get<double>() == Approx(2.0).epsilon(0.15));
    const auto csv = slurp(dir / "half_essnorm.csv");
    CHECK(csv.rfind("r_j,E_j,probe_norm,testfn_norm", 0) == 0);

    // unbounded operator: refusal with pointer to the boundedness record
    ExperimentConfig cfg2 = cfg;
    cfg2.name = "noway";
    cfg2.phi = "identity";
    cfg2.u = "taylor:0,0,-4";  // u notin A^q_nu is impossible here; break boundedness instead
    cfg2.p = 1.0;
    cfg2.q = 1.0;
    cfg2.delta = "0.9";
    const int rc = run_essnorm(cfg2, dir);
    const auto jr = nlohmann::json::parse(slurp(dir / "noway_essnorm.json"));
    if (rc == 1) {
        CHECK(jr.contains("refusal"));
        CHECK(jr.contains("boundedness"));
    } else {
        CHECK(jr.contains("essential_norm"));
    }
}

TEST_CASE("oracle runner") {
    const auto dir = fresh_dir("oracle");
    ExperimentConfig cfg;
    cfg.name = "o";
    cfg.phi = "scaling:0.5";
    CHECK(run_oracle(cfg, dir) == 0);
    const auto j = nlohmann::json::parse(slurp(dir / "o_oracle.json"));
    CHECK(j["all_pass"].get<bool>());
    for (const auto& c : j["checks"]) CHECK(c["pass"].get<bool>());
    CHECK(fs::exists(dir / "o_oracle.csv"));
}

TEST_CASE("reruns are byte-identical") {
    ExperimentConfig cfg;
    cfg.name = "rep";
    cfg.phi = "scaling:0.5";
    cfg.delta = "3";
    cfg.grid_a_dyadic = 5;
    cfg.grid_a_angles = 2;
    cfg.grid_z_dyadic = 3;
    cfg.grid_z_angles = 4;
    cfg.grid_tail_dyadic = 6;
    cfg.grid_tail_angles = 1;

    const auto d1 = fresh_dir("rep1");
    const auto d2 = fresh_dir("rep2");
    set_worker_budget(2);
    CHECK(run_criteria(cfg, d1) == run_criteria(cfg, d2));
    set_worker_budget(1);  // determinism must not depend on the worker count
    const auto d3 = fresh_dir("rep3");
    CHECK(run_criteria(cfg, d3) == 0);
    for (const auto* name : {"rep_criteria.json", "rep_bounded.csv", "rep_carleson.csv"}) {
        CHECK(slurp(d1 / name) == slurp(d2 / name));
        CHECK(slurp(d1 / name) == slurp(d3 / name));
    }
    set_worker_budget(2);

    CHECK(run_essnorm(cfg, d1) == run_essnorm(cfg, d2));
    CHECK(slurp(d1 / "rep_essnorm.json") == slurp(d2 / "rep_essnorm.json"));
    CHECK(slurp(d1 / "rep_essnorm.csv") == slurp(d2 / "rep_essnorm.csv"));
}

TEST_CASE("atomic writes replace files in place") {
    const auto dir = fresh_dir("atomic");
    atomic_write_file(dir / "x.txt", "one");
    atomic_write_file(dir / "x.txt", "two");
    CHECK(slurp(dir / "x.txt") == "two");
    CHECK_FALSE(fs::exists(dir / "x.txt.tmp"));
}
