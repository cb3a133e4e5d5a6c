#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "switchsim/errors.hpp"
#include "switchsim/experiments.hpp"
#include "switchsim/verify.hpp"

using namespace switchsim;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string strip_timestamp(std::string text) {
    const auto pos = text.find("\"generated_at\"");
    if (pos == std::string::npos) return text;
    const auto end = text.find('\n', pos);
    return text.erase(pos, end - pos);
}

const char* kTinyConfig = R"json({
  "model": {
    "type": "switch",
    "channel": {
      "states": [
        {"name": "on",  "psi": 0.8, "service_set": [[0], [1]]},
        {"name": "off", "psi": 0.2, "service_set": [[0]]}
      ]
    },
    "arrival_family": {"kind": "bernoulli"}
  },
  "nu": [0.8],
  "eps_grid": [0.2, 0.1, 0.05],
  "run": {"burn_in": 2000, "horizon": 40000, "batches": 20},
  "seed": 424242,
  "workers": 1,
  "out_dir": "OUTDIR"
})json";

ExperimentConfig tiny_config(const std::string& out_dir) {
    std::string text = kTinyConfig;
    text.replace(text.find("OUTDIR"), 6, out_dir);
    return ExperimentConfig::from_json_text(text);
}

}  // namespace

TEST_SUITE("experiments") {

TEST_CASE("config parsing and validation") {
    const ExperimentConfig cfg = tiny_config("/tmp/sw_cfg_test");
    CHECK(cfg.type == ExperimentConfig::ModelType::Switch);
    CHECK(cfg.psi == std::vector<double>{0.8, 0.2});
    CHECK(cfg.nu.size() == 1);
    CHECK(cfg.eps_grid.size() == 3);
    CHECK(cfg.seed == 424242);

    CHECK_THROWS_AS(ExperimentConfig::from_json_text("{"), ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::from_json_text(R"({"model": {"type": "nope"}})"),
                    ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::from_json_text(
                        R"({"model": {"type": "jsq", "arrival_family": {"kind": "bernoulli"},
                            "service": [{"kind": "bernoulli", "mean": 0.5}]},
                            "eps_grid": [0.1, 0.2]})"),
                    ConfigError);  // grid must decrease
    CHECK_THROWS_AS(ExperimentConfig::load_file("/nonexistent/path.json"), ConfigError);
}

TEST_CASE("default run lengths scale with eps and are capped") {
    CHECK(default_burn_in(0.1) == 1000000);
    CHECK(default_horizon(0.1) == 100000000);  // 1e6 / eps^2 hits the 1e8 cap
    CHECK(default_horizon(0.2) == 25000000);
    CHECK(default_horizon(0.001) == 100000000);
}

TEST_CASE("geometry command writes the facet csv") {
    const std::string out = "/tmp/sw_geo_test";
    std::filesystem::remove_all(out);
    const GeometryReport rep = cmd_geometry(tiny_config(out));
    CHECK(rep.validation_ok);
    CHECK(rep.facets.size() == 1);
    CHECK(rep.delta == doctest::Approx(1.0));
    CHECK(rep.sigma_B(0, 0) == doctest::Approx(0.16).epsilon(1e-12));
    CHECK(slurp(out + "/facets.csv") == "facet_id,c_1,b\n0,1,0.8\n");
}

TEST_CASE("geometry command on the 2x2 input-queued switch") {
    ExperimentConfig cfg = verify::iq_switch_2x2_config();
    cfg.out_dir = "/tmp/sw_geo_iq";
    std::filesystem::remove_all(cfg.out_dir);
    const GeometryReport rep = cmd_geometry(cfg);
    CHECK(rep.validation_ok);
    CHECK(rep.facets.size() == 4);
    CHECK(rep.P.size() == 4);
    CHECK(rep.P_tilde.size() == 3);
    CHECK(rep.delta == doctest::Approx(1.0));
    CHECK(rep.sigma_B.cwiseAbs().maxCoeff() == doctest::Approx(0.0));
}

TEST_CASE("geometry command rejects an interior nu") {
    ExperimentConfig cfg = tiny_config("/tmp/sw_geo_bad");
    cfg.nu[0] = 0.5;
    CHECK_THROWS_AS(cmd_geometry(cfg), GeometryError);
}

TEST_CASE("sweep output is deterministic and worker-count independent") {
    const std::string out1 = "/tmp/sw_sweep_a", out2 = "/tmp/sw_sweep_b", out3 = "/tmp/sw_sweep_c";
    for (const auto& d : {out1, out2, out3}) std::filesystem::remove_all(d);

    ExperimentConfig cfg = tiny_config(out1);
    const SweepResult r1 = cmd_sweep(cfg);
    cfg.out_dir = out2;
    const SweepResult r2 = cmd_sweep(cfg);
    cfg.out_dir = out3;
    cfg.workers = 3;
    const SweepResult r3 = cmd_sweep(cfg);

    CHECK(r1.rows.size() == 3);
    CHECK(slurp(out1 + "/sweep.csv") == slurp(out2 + "/sweep.csv"));
    CHECK(slurp(out1 + "/sweep.csv") == slurp(out3 + "/sweep.csv"));
    CHECK(strip_timestamp(slurp(out1 + "/summary.json")) ==
          strip_timestamp(slurp(out3 + "/summary.json")));

    for (const auto& row : r1.rows) {
        CHECK(row.residual >= 0.0);
        CHECK(row.theory.ht_limit > 0.0);
        CHECK(row.theory.ulb.has_value());  // single tight facet: CRP
        for (std::size_t j = 1; j < row.theory.R_r.size(); ++j)
            CHECK(row.theory.R_r[j].second > row.theory.R_r[j - 1].second);
    }
    CHECK(r1.theory.beta_fit.has_value());

    // Heavier traffic leaves fewer unsaturated service slots: the saturation
    // frequency grows as eps shrinks along the grid (up to estimator noise).
    CHECK(r1.rows[0].rec.pi_hat(0, 0) < r1.rows[1].rec.pi_hat(0, 0));
    CHECK(r1.rows[1].rec.pi_hat(0, 0) < r1.rows[2].rec.pi_hat(0, 0));
}

TEST_CASE("sweep csv has the documented column order") {
    const std::string header = sweep_csv_header();
    CHECK(header ==
          "eps,mean_qw,ci,ht_limit,residual,t1,t2,t3,t4,pi_min,"
          "perp_m1,perp_m2,perp_m3,perp_m4,flags\n");
}

TEST_CASE("doubling the horizon shrinks the CI roughly like 1/sqrt(2)") {
    ExperimentConfig cfg = tiny_config("/tmp/sw_ci_a");
    cfg.eps_grid = {0.2};
    cfg.run.burn_in = 20000;
    cfg.run.horizon = 1000000;
    cfg.run.batches = 200;
    const SweepResult small = cmd_sweep(cfg);
    cfg.out_dir = "/tmp/sw_ci_b";
    cfg.run.horizon = 2000000;
    const SweepResult big = cmd_sweep(cfg);
    const double ratio =
        big.rows[0].rec.mean_qw.ci_half_width / small.rows[0].rec.mean_qw.ci_half_width;
    CHECK(ratio > 0.55);
    CHECK(ratio < 0.87);
}

TEST_CASE("jsq sweep produces rows with the jsq limit") {
    ExperimentConfig cfg = ExperimentConfig::from_json_text(R"json({
      "model": {
        "type": "jsq",
        "arrival_family": {"kind": "bernoulli"},
        "service": [{"kind": "bernoulli", "mean": 0.5}, {"kind": "bernoulli", "mean": 0.5}]
      },
      "eps_grid": [0.2, 0.1],
      "run": {"burn_in": 2000, "horizon": 40000, "batches": 20},
      "seed": 7,
      "workers": 1,
      "out_dir": "/tmp/sw_jsq_sweep"
    })json");
    std::filesystem::remove_all(cfg.out_dir);
    const SweepResult r = cmd_jsq_sweep(cfg);
    CHECK(r.rows.size() == 2);
    for (const auto& row : r.rows) {
        CHECK(row.theory.jsq_limit.has_value());
        CHECK(*row.theory.jsq_limit > 0.0);
        CHECK_FALSE(row.theory.R_r.empty());
    }
}

TEST_CASE("joint arrival tables work for geometry but cannot be swept") {
    ExperimentConfig cfg = ExperimentConfig::from_json_text(R"json({
      "model": {
        "type": "switch",
        "channel": {"states": [
          {"psi": 1.0, "service_set": [[0, 0], [1, 0], [0, 1]]}
        ]},
        "arrival_family": {"kind": "bernoulli"},
        "joint_arrivals": [
          {"a": [0, 0], "p": 0.6},
          {"a": [1, 1], "p": 0.4}
        ]
      },
      "nu": [0.5, 0.5],
      "eps_grid": [0.1],
      "run": {"burn_in": 1000, "horizon": 20000, "batches": 20},
      "seed": 3,
      "workers": 1,
      "out_dir": "/tmp/sw_joint"
    })json");
    std::filesystem::remove_all(cfg.out_dir);
    const GeometryReport rep = cmd_geometry(cfg);
    CHECK(rep.validation_ok);
    // Re-targeting the mean needs a parametric family; the joint table has none.
    CHECK_THROWS_AS(cmd_sweep(cfg), InvalidTargetError);
}

TEST_CASE("unknown verify suite is rejected") {
    verify::VerifyOptions opts;
    CHECK_THROWS_AS(verify::run_suite("nope", opts), ConfigError);
}

TEST_CASE("supplied facets are validated before use") {
    // Valid region for the on/off model, supplied instead of brute-forced.
    ExperimentConfig cfg = tiny_config("/tmp/sw_supplied");
    Facet f;
    f.c = Eigen::VectorXd::Constant(1, 1.0);
    f.b = 0.8;
    cfg.supplied_facets = std::vector<Facet>{f};
    CHECK_NOTHROW(build_switch_setup(cfg));
    (*cfg.supplied_facets)[0].b = 0.7;  // containment now fails
    CHECK_THROWS_AS(build_switch_setup(cfg), GeometryError);
}

}  // TEST_SUITE
