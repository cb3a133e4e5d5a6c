#include <cstdint>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "switchsim/errors.hpp"
#include "switchsim/experiments.hpp"
#include "switchsim/verify.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string out_dir;
    int workers = -1;
};

switchsim::ExperimentConfig load_config(const CommonArgs& args) {
    switchsim::ExperimentConfig cfg = switchsim::ExperimentConfig::load_file(args.config_path);
    if (args.seed_set) cfg.seed = args.seed;
    if (!args.out_dir.empty()) cfg.out_dir = args.out_dir;
    if (args.workers >= 0) cfg.workers = args.workers;
    return cfg;
}

void add_common(CLI::App* cmd, CommonArgs& args, bool config_required) {
    auto* opt = cmd->add_option("--config", args.config_path, "experiment config file (JSON)");
    if (config_required) opt->required();
    cmd->add_option("--seed", args.seed, "seed override")->each([&](const std::string&) {
        args.seed_set = true;
    });
    cmd->add_option("--out", args.out_dir, "output directory override");
    cmd->add_option("--workers", args.workers, "worker pool size (0 = hardware)");
}

void print_sweep(const switchsim::SweepResult& result, const std::string& out_dir) {
    for (const auto& row : result.rows) {
        std::cout << "eps=" << row.eps << "  mean_qw=" << row.rec.mean_qw.mean << " +- "
                  << row.rec.mean_qw.ci_half_width << "  limit=" << row.theory.ht_limit
                  << "  residual=" << row.residual;
        if (!row.flags.empty()) {
            std::cout << "  [";
            for (std::size_t i = 0; i < row.flags.size(); ++i)
                std::cout << (i ? ";" : "") << row.flags[i];
            std::cout << "]";
        }
        std::cout << "\n";
    }
    if (result.theory.beta_fit) {
        const auto& f = *result.theory.beta_fit;
        std::cout << "residual fit: a + b*log(1/eps) with a=" << f.intercept << ", b=" << f.slope
                  << " (sse " << f.log_model_sse << "); competing c/eps sse " << f.inv_model_sse
                  << "; max ratio " << f.max_ratio << "\n";
    }
    std::cout << "wrote " << out_dir << "/sweep.csv and " << out_dir << "/summary.json\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Heavy-traffic simulator and analysis toolkit for MaxWeight switches and JSQ"};
    app.require_subcommand(1);

    CommonArgs geometry_args, sweep_args, jsq_args, verify_args;
    std::string suite;

    CLI::App* geometry = app.add_subcommand("geometry", "build/validate the capacity geometry");
    add_common(geometry, geometry_args, true);

    CLI::App* sweep = app.add_subcommand("sweep", "heavy-traffic sweep of a switch model");
    add_common(sweep, sweep_args, true);

    CLI::App* jsq_sweep = app.add_subcommand("jsq-sweep", "heavy-traffic sweep of a JSQ model");
    add_common(jsq_sweep, jsq_args, true);

    CLI::App* verify = app.add_subcommand("verify", "run a verification suite");
    add_common(verify, verify_args, false);
    verify->add_option("--suite", suite, "geometry | drift | ssc | crp | jsq")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (geometry->parsed()) {
            const auto cfg = load_config(geometry_args);
            const switchsim::GeometryReport rep = switchsim::cmd_geometry(cfg);
            std::cout << rep.text;
            std::cout << "wrote " << cfg.out_dir << "/facets.csv\n";
            return rep.validation_ok ? 0 : 1;
        }
        if (sweep->parsed()) {
            const auto cfg = load_config(sweep_args);
            const switchsim::SweepResult result = switchsim::cmd_sweep(cfg);
            print_sweep(result, cfg.out_dir);
            return 0;
        }
        if (jsq_sweep->parsed()) {
            const auto cfg = load_config(jsq_args);
            const switchsim::SweepResult result = switchsim::cmd_jsq_sweep(cfg);
            print_sweep(result, cfg.out_dir);
            return 0;
        }
        if (verify->parsed()) {
            switchsim::verify::VerifyOptions opts;
            if (!verify_args.config_path.empty()) {
                const auto cfg = load_config(verify_args);
                opts.seed = cfg.seed;
                opts.run = cfg.run;
                opts.workers = cfg.workers;
            }
            if (verify_args.seed_set) opts.seed = verify_args.seed;
            if (verify_args.workers >= 0) opts.workers = verify_args.workers;
            const auto results = switchsim::verify::run_suite(suite, opts);
            bool all_pass = true;
            for (const auto& r : results) {
                std::cout << (r.pass ? "PASS" : "FAIL") << " criterion " << r.id << ": " << r.name
                          << " -- " << r.detail << "\n";
                all_pass = all_pass && r.pass;
            }
            return all_pass ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
