#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "switchsim/geometry.hpp"
#include "switchsim/model.hpp"
#include "switchsim/simulator.hpp"
#include "switchsim/theory.hpp"

namespace switchsim {

/// Per-run knobs; zeros mean "derive from eps" (burn_in = 1e5/eps,
/// horizon = 1e6/eps^2 capped at 1e8).
struct RunOverrides {
    std::uint64_t burn_in = 0;
    std::uint64_t horizon = 0;
    int batches = 20;
    std::vector<int> moment_orders = {1, 2, 3, 4};
};

std::uint64_t default_burn_in(double eps);
std::uint64_t default_horizon(double eps);

/// Parsed experiment description; together with a seed it fully determines
/// every output byte (timestamps excepted, and those only in report headers).
struct ExperimentConfig {
    enum class ModelType { Switch, IqSwitch, Jsq };

    ModelType type = ModelType::Switch;
    int iq_ports = 0;  // N, iq-switch only

    // switch channel
    std::vector<std::string> state_names;
    std::vector<double> psi;
    std::vector<std::vector<std::vector<int>>> service_sets;

    ArrivalFamily arrival_family;
    std::optional<JointArrivalPmf> joint_arrivals;

    // jsq per-queue service laws
    std::vector<DiscretePmf> jsq_service;
    int jsq_queues = 0;

    Eigen::VectorXd nu;  // empty: iq-switch defaults to uniform, jsq to [mu_sigma]
    std::vector<double> eps_grid;
    std::optional<std::vector<Facet>> supplied_facets;

    RunOverrides run;
    std::uint64_t seed = 1;
    int workers = 0;  // 0: hardware concurrency
    std::string out_dir = "out";

    static ExperimentConfig load_file(const std::string& path);
    static ExperimentConfig from_json_text(const std::string& text);
};

/// Base switch model (arrival mean at nu) plus the cone geometry at nu.
struct SwitchSetup {
    SwitchModel model;
    ConeGeometry geometry;
};

SwitchSetup build_switch_setup(const ExperimentConfig& cfg);
LoadBalanceModel build_jsq_model(const ExperimentConfig& cfg);

struct GeometryReport {
    int n = 0;
    std::vector<Facet> facets;
    std::vector<int> P, P_tilde;
    Eigen::MatrixXd H, gram_inv, sigma_B;
    double delta = 0.0, eps_threshold = 0.0, b_max = 0.0;
    bool delta_degenerate = false;
    bool validation_ok = true;
    std::vector<std::string> violations;
    std::string text;  // printable report
};

/// Builds and validates the region, reports the tight-facet geometry, and
/// writes <out_dir>/facets.csv.
GeometryReport cmd_geometry(const ExperimentConfig& cfg);

struct SweepRow {
    double eps = 0.0;
    SimRecord rec;
    TheoryPoint theory;
    double residual = 0.0;
    std::vector<std::string> flags;
};

struct SweepResult {
    std::vector<SweepRow> rows;  // grid order
    TheoryReport theory;
    std::string sweep_csv;
    std::string summary_json;
};

/// Heavy-traffic sweep over the eps grid (grid points run concurrently with
/// seeds seed + index); writes <out_dir>/sweep.csv and <out_dir>/summary.json.
SweepResult cmd_sweep(const ExperimentConfig& cfg);
SweepResult cmd_jsq_sweep(const ExperimentConfig& cfg);

/// Resolved per-eps run configuration (defaults filled, w set).
RunConfig resolve_run_config(const ExperimentConfig& cfg, double eps, std::size_t grid_index,
                             const Eigen::VectorXd& w);

/// Flat CSV row serialization of one sweep row (documented column order, see
/// sweep_csv_header).
std::string sweep_csv_header(int n_unused = 0);
std::string sweep_csv_row(const SweepRow& row);

}  // namespace switchsim
