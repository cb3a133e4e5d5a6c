#include "switchsim/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "switchsim/errors.hpp"

namespace switchsim {

namespace {

using nlohmann::json;

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

ArrivalFamily parse_family(const json& j) {
    ArrivalFamily fam;
    const std::string kind = j.value("kind", "bernoulli");
    if (kind == "bernoulli") {
        fam.kind = ArrivalFamily::Kind::Bernoulli;
    } else if (kind == "binomial") {
        fam.kind = ArrivalFamily::Kind::Binomial;
        fam.trials = j.value("trials", 1);
        if (fam.trials < 1) throw ConfigError("arrival_family: binomial trials must be >= 1");
    } else if (kind == "two-point") {
        fam.kind = ArrivalFamily::Kind::TwoPoint;
        fam.point = j.value("point", 1);
        if (fam.point < 1) throw ConfigError("arrival_family: two-point value must be >= 1");
    } else {
        throw ConfigError("arrival_family: unknown kind '" + kind + "'");
    }
    return fam;
}

DiscretePmf parse_pmf(const json& j) {
    if (j.contains("support")) {
        return DiscretePmf(j.at("support").get<std::vector<int>>(),
                           j.at("pmf").get<std::vector<double>>());
    }
    const std::string kind = j.value("kind", "bernoulli");
    const double mean = j.at("mean").get<double>();
    if (kind == "bernoulli") return DiscretePmf::bernoulli(mean);
    if (kind == "binomial") return DiscretePmf::binomial(j.value("trials", 1), mean / j.value("trials", 1));
    if (kind == "two-point") return DiscretePmf::two_point(j.value("point", 1), mean);
    throw ConfigError("pmf: unknown kind '" + kind + "'");
}

}  // namespace

std::uint64_t default_burn_in(double eps) {
    const double v = 1e5 / eps;
    return static_cast<std::uint64_t>(std::llround(std::min(v, 1e8)));
}

std::uint64_t default_horizon(double eps) {
    const double v = 1e6 / (eps * eps);
    return static_cast<std::uint64_t>(std::llround(std::min(v, 1e8)));
}

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    try {
        ExperimentConfig cfg;
        const json& model = j.at("model");
        const std::string type = model.at("type").get<std::string>();
        if (type == "switch") {
            cfg.type = ModelType::Switch;
            const json& channel = model.at("channel");
            for (const json& st : channel.at("states")) {
                cfg.state_names.push_back(st.value("name", "m" + std::to_string(cfg.psi.size())));
                cfg.psi.push_back(st.at("psi").get<double>());
                cfg.service_sets.push_back(st.at("service_set").get<std::vector<std::vector<int>>>());
            }
            cfg.arrival_family = parse_family(model.at("arrival_family"));
            if (model.contains("joint_arrivals") && !model.at("joint_arrivals").is_null()) {
                JointArrivalPmf joint;
                for (const json& atom : model.at("joint_arrivals")) {
                    joint.atoms.push_back(atom.at("a").get<std::vector<int>>());
                    joint.probs.push_back(atom.at("p").get<double>());
                }
                cfg.joint_arrivals = std::move(joint);
            }
        } else if (type == "iq-switch") {
            cfg.type = ModelType::IqSwitch;
            cfg.iq_ports = model.at("N").get<int>();
            cfg.arrival_family = parse_family(model.at("arrival_family"));
        } else if (type == "jsq") {
            cfg.type = ModelType::Jsq;
            cfg.arrival_family = parse_family(model.at("arrival_family"));
            for (const json& s : model.at("service")) cfg.jsq_service.push_back(parse_pmf(s));
            cfg.jsq_queues = static_cast<int>(cfg.jsq_service.size());
        } else {
            throw ConfigError("config: unknown model type '" + type + "'");
        }

        if (j.contains("nu")) {
            const auto v = j.at("nu").get<std::vector<double>>();
            cfg.nu = Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
        }
        cfg.eps_grid = j.value("eps_grid", std::vector<double>{});
        for (std::size_t i = 0; i < cfg.eps_grid.size(); ++i) {
            if (cfg.eps_grid[i] <= 0.0) throw ConfigError("config: eps grid values must be positive");
            if (i > 0 && cfg.eps_grid[i] >= cfg.eps_grid[i - 1])
                throw ConfigError("config: eps grid must be strictly decreasing");
        }
        if (cfg.type != ModelType::Jsq)
            for (double e : cfg.eps_grid)
                if (e >= 1.0) throw ConfigError("config: eps grid values must be in (0,1)");

        if (j.contains("facets") && !j.at("facets").is_null()) {
            std::vector<Facet> facets;
            for (const json& f : j.at("facets")) {
                const auto c = f.at("c").get<std::vector<double>>();
                Facet facet;
                facet.c = Eigen::Map<const Eigen::VectorXd>(c.data(), static_cast<Eigen::Index>(c.size()));
                facet.b = f.at("b").get<double>();
                facets.push_back(std::move(facet));
            }
            cfg.supplied_facets = std::move(facets);
        }

        if (j.contains("run")) {
            const json& r = j.at("run");
            cfg.run.burn_in = r.value("burn_in", std::uint64_t{0});
            cfg.run.horizon = r.value("horizon", std::uint64_t{0});
            cfg.run.batches = r.value("batches", 20);
            if (r.contains("moment_orders"))
                cfg.run.moment_orders = r.at("moment_orders").get<std::vector<int>>();
        }
        cfg.seed = j.value("seed", std::uint64_t{1});
        cfg.workers = j.value("workers", 0);
        cfg.out_dir = j.value("out_dir", "out");
        return cfg;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

ExperimentConfig ExperimentConfig::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

SwitchSetup build_switch_setup(const ExperimentConfig& cfg) {
    if (cfg.type == ExperimentConfig::ModelType::Jsq)
        throw ConfigError("setup: jsq config cannot build a switch");

    if (cfg.type == ExperimentConfig::ModelType::IqSwitch) {
        SwitchModel model = make_iq_switch(cfg.iq_ports, cfg.arrival_family);
        Eigen::VectorXd nu = cfg.nu;
        if (nu.size() == 0)
            nu = Eigen::VectorXd::Constant(model.n, 1.0 / cfg.iq_ports);
        CapacityRegion region = make_iq_switch_region(cfg.iq_ports);
        const RegionValidation val = validate_capacity_region(region, model.channel);
        if (!val.ok)
            throw GeometryError("setup: iq-switch region failed validation: " + val.violations.front());
        ConeGeometry geom(std::move(region), model.channel, nu);
        // Rebase arrivals at nu so heavy-traffic scaling starts from the boundary point.
        std::vector<DiscretePmf> pmfs;
        for (int i = 0; i < model.n; ++i) pmfs.push_back(cfg.arrival_family.pmf_for_mean(nu[i]));
        SwitchModel rebased(ArrivalModel::per_queue(std::move(pmfs), cfg.arrival_family),
                            model.channel);
        return {std::move(rebased), std::move(geom)};
    }

    ChannelModel channel(cfg.state_names, cfg.psi, cfg.service_sets);
    if (cfg.nu.size() == 0) throw ConfigError("setup: switch config requires nu");
    const Eigen::VectorXd& nu = cfg.nu;

    CapacityRegion region = [&] {
        if (cfg.supplied_facets) {
            CapacityRegion r(channel.n(), *cfg.supplied_facets);
            const RegionValidation val = validate_capacity_region(r, channel);
            if (!val.ok)
                throw GeometryError("setup: supplied facets failed validation: " +
                                    val.violations.front());
            return r;
        }
        return build_capacity_region(channel);
    }();

    ConeGeometry geom(std::move(region), channel, nu);

    ArrivalModel arrival = [&]() -> ArrivalModel {
        if (cfg.joint_arrivals) return ArrivalModel::joint(*cfg.joint_arrivals);
        std::vector<DiscretePmf> pmfs;
        for (int i = 0; i < channel.n(); ++i)
            pmfs.push_back(cfg.arrival_family.pmf_for_mean(nu[i]));
        return ArrivalModel::per_queue(std::move(pmfs), cfg.arrival_family);
    }();
    SwitchModel model(std::move(arrival), std::move(channel));
    return {std::move(model), std::move(geom)};
}

LoadBalanceModel build_jsq_model(const ExperimentConfig& cfg) {
    if (cfg.type != ExperimentConfig::ModelType::Jsq)
        throw ConfigError("setup: config is not a jsq model");
    double mu_sigma = 0.0;
    for (const auto& s : cfg.jsq_service) mu_sigma += s.mean();
    ArrivalModel arrival =
        ArrivalModel::single_stream(cfg.arrival_family.pmf_for_mean(
                                        std::min(mu_sigma, static_cast<double>(cfg.arrival_family.a_max()))),
                                    cfg.arrival_family);
    return LoadBalanceModel(cfg.jsq_queues, std::move(arrival), cfg.jsq_service);
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << content;
}

std::string timestamp_utc() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

json estimate_json(const Estimate& e) {
    return json{{"mean", e.mean}, {"ci", e.ci_half_width}};
}

}  // namespace

GeometryReport cmd_geometry(const ExperimentConfig& cfg) {
    SwitchSetup setup = build_switch_setup(cfg);
    const ConeGeometry& g = setup.geometry;

    GeometryReport rep;
    rep.n = g.region().dimension();
    rep.facets = g.region().facets();
    rep.P = g.P();
    rep.P_tilde = g.P_tilde();
    rep.H = g.H();
    rep.gram_inv = g.gram_inv();
    rep.sigma_B = g.spectrum().sigma_B;
    rep.delta = g.delta();
    rep.eps_threshold = g.gap().eps_threshold;
    rep.delta_degenerate = g.gap().degenerate;
    rep.b_max = g.spectrum().b_max;

    const RegionValidation val = validate_capacity_region(g.region(), setup.model.channel);
    rep.validation_ok = val.ok;
    rep.violations = val.violations;

    std::ostringstream os;
    os << "capacity region: n=" << rep.n << ", " << rep.facets.size() << " facets\n";
    for (std::size_t l = 0; l < rep.facets.size(); ++l) {
        os << "  facet " << l << ": c = [";
        for (Eigen::Index i = 0; i < rep.facets[l].c.size(); ++i)
            os << (i ? ", " : "") << fmt_double(rep.facets[l].c[i]);
        os << "], b = " << fmt_double(rep.facets[l].b) << "\n";
    }
    os << "tight set P = {";
    for (std::size_t i = 0; i < rep.P.size(); ++i) os << (i ? "," : "") << rep.P[i];
    os << "}, independent subset = {";
    for (std::size_t i = 0; i < rep.P_tilde.size(); ++i) os << (i ? "," : "") << rep.P_tilde[i];
    os << "}\n";
    os << "delta = " << fmt_double(rep.delta)
       << " (admissible eps < " << fmt_double(rep.eps_threshold) << ")"
       << (rep.delta_degenerate ? " [degenerate]" : "") << "\n";
    os << "b_max = " << fmt_double(rep.b_max) << "\n";
    os << "H =\n" << rep.H << "\nsigma_B =\n" << rep.sigma_B << "\n";
    os << "validation: " << (rep.validation_ok ? "ok" : "FAILED") << "\n";
    for (const auto& v : rep.violations) os << "  " << v << "\n";
    rep.text = os.str();

    write_file(std::filesystem::path(cfg.out_dir) / "facets.csv", facets_to_csv(g.region()));
    return rep;
}

RunConfig resolve_run_config(const ExperimentConfig& cfg, double eps, std::size_t grid_index,
                             const Eigen::VectorXd& w) {
    RunConfig rc;
    rc.burn_in = cfg.run.burn_in > 0 ? cfg.run.burn_in : default_burn_in(eps);
    rc.horizon = cfg.run.horizon > 0 ? cfg.run.horizon : default_horizon(eps);
    rc.batches = cfg.run.batches;
    rc.moment_orders = cfg.run.moment_orders;
    for (int r = 1; r <= 4; ++r)
        if (std::find(rc.moment_orders.begin(), rc.moment_orders.end(), r) ==
            rc.moment_orders.end())
            rc.moment_orders.push_back(r);
    std::sort(rc.moment_orders.begin(), rc.moment_orders.end());
    rc.seed = cfg.seed + grid_index;
    rc.w = w;
    return rc;
}

namespace {

const Estimate* moment_of(const SimRecord& rec, int order, bool k_side) {
    for (const auto& m : rec.perp_moments)
        if (m.order == order) return k_side ? &m.perp_K : &m.perp_H;
    return nullptr;
}

std::string flags_field(const std::vector<std::string>& flags) {
    if (flags.empty()) return "-";
    std::string s;
    for (std::size_t i = 0; i < flags.size(); ++i) s += (i ? ";" : "") + flags[i];
    return s;
}

SweepResult finalize_sweep(const ExperimentConfig& cfg, std::vector<SweepRow> rows,
                           double b_max, const std::string& kind) {
    SweepResult result;
    result.theory.b_max = b_max;

    std::vector<double> eps, residuals;
    for (const auto& row : rows) {
        eps.push_back(row.eps);
        residuals.push_back(row.residual);
        result.theory.points.push_back(row.theory);
    }
    if (rows.size() >= 3) result.theory.beta_fit = fit_log_error(eps, residuals);

    std::string csv = sweep_csv_header();
    for (const auto& row : rows) csv += sweep_csv_row(row);
    result.sweep_csv = csv;

    json summary;
    summary["header"] = {{"generated_at", timestamp_utc()}, {"kind", kind}};
    summary["seed"] = cfg.seed;
    summary["b_max"] = b_max;
    if (result.theory.beta_fit) {
        const LogFit& f = *result.theory.beta_fit;
        summary["fit"] = {{"intercept", f.intercept},       {"slope", f.slope},
                          {"max_ratio", f.max_ratio},       {"log_model_sse", f.log_model_sse},
                          {"inv_model_coef", f.inv_model_coef}, {"inv_model_sse", f.inv_model_sse}};
    }
    json jrows = json::array();
    for (const auto& row : rows) {
        json r;
        r["eps"] = row.eps;
        r["mean_qw"] = estimate_json(row.rec.mean_qw);
        r["ht_limit"] = row.theory.ht_limit;
        if (row.theory.ulb) r["ulb"] = *row.theory.ulb;
        if (row.theory.jsq_limit) r["jsq_limit"] = *row.theory.jsq_limit;
        r["residual"] = row.residual;
        r["drift"] = {{"t1", estimate_json(row.rec.drift.t1)},
                      {"t2", estimate_json(row.rec.drift.t2)},
                      {"t3", estimate_json(row.rec.drift.t3)},
                      {"t4", estimate_json(row.rec.drift.t4)},
                      {"balance", estimate_json(row.rec.drift.balance)}};
        json moments = json::array();
        for (const auto& m : row.rec.perp_moments)
            moments.push_back({{"order", m.order},
                               {"perp_K", estimate_json(m.perp_K)},
                               {"perp_H", estimate_json(m.perp_H)}});
        r["perp_moments"] = moments;
        json rr = json::array();
        for (const auto& [order, bound] : row.theory.R_r)
            rr.push_back({{"order", order}, {"bound", bound}});
        r["R_r"] = rr;
        if (row.rec.pi_hat.size() > 0) {
            json pi = json::array();
            for (Eigen::Index m = 0; m < row.rec.pi_hat.rows(); ++m) {
                json per_state = json::array();
                for (Eigen::Index l = 0; l < row.rec.pi_hat.cols(); ++l)
                    per_state.push_back(row.rec.pi_hat(m, l));
                pi.push_back(per_state);
            }
            r["pi_hat"] = pi;
        }
        json flow = json::array();
        for (const auto& fb : row.rec.flow_balance) flow.push_back(estimate_json(fb));
        r["flow_balance"] = flow;
        r["slots_used"] = row.rec.slots_used;
        r["burn_in"] = row.rec.burn_in;
        r["seed"] = row.rec.seed;
        r["flags"] = row.flags;
        jrows.push_back(r);
    }
    summary["rows"] = jrows;
    result.summary_json = summary.dump(2) + "\n";

    result.rows = std::move(rows);
    write_file(std::filesystem::path(cfg.out_dir) / "sweep.csv", result.sweep_csv);
    write_file(std::filesystem::path(cfg.out_dir) / "summary.json", result.summary_json);
    return result;
}

template <typename PointFn>
std::vector<SweepRow> run_grid(const ExperimentConfig& cfg, PointFn&& point) {
    const std::size_t count = cfg.eps_grid.size();
    std::vector<SweepRow> rows(count);
    int workers = cfg.workers > 0 ? cfg.workers
                                  : static_cast<int>(std::thread::hardware_concurrency());
    if (workers < 1) workers = 1;
    workers = std::min<int>(workers, static_cast<int>(count));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) rows[i] = point(i);
        return rows;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t)
        pool.emplace_back([&, t] {
            try {
                for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1))
                    rows[i] = point(i);
            } catch (...) {
                errors[static_cast<std::size_t>(t)] = std::current_exception();
            }
        });
    for (auto& th : pool) th.join();
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    return rows;
}

}  // namespace

SweepResult cmd_sweep(const ExperimentConfig& cfg) {
    if (cfg.eps_grid.empty()) throw ConfigError("sweep: empty eps grid");
    const SwitchSetup setup = build_switch_setup(cfg);
    const ConeGeometry& geom = setup.geometry;
    const Eigen::VectorXd w = geom.nu();
    const bool crp = geom.P().size() == 1;
    const double alpha = std::max(setup.model.arrival.a_max(), setup.model.channel.s_max());

    auto point = [&](std::size_t i) {
        const double eps = cfg.eps_grid[i];
        const RunConfig rc = resolve_run_config(cfg, eps, i, w);
        SwitchModel scaled(scale_to_heavy_traffic(setup.model.arrival, geom.nu(), eps),
                           setup.model.channel);
        SweepRow row;
        row.eps = eps;
        row.rec = run_switch(scaled, geom, rc);

        row.theory.eps = eps;
        row.theory.ht_limit = ht_limit(geom.H(), scaled.arrival.covariance(), geom.gram_inv(),
                                       geom.spectrum().sigma_B, eps);
        if (crp) {
            const Facet& f = geom.region().facet(geom.P()[0]);
            row.theory.ulb = ulb(f.c, f.b, scaled.arrival.covariance(),
                                 geom.spectrum().sigma_B(0, 0), geom.spectrum().b_max, eps);
        }
        for (int r : rc.moment_orders) {
            const SscBound bound = ssc_bound_Rr(setup.model.n, alpha, geom.delta(), r);
            row.theory.R_r.emplace_back(r, bound.value);
        }
        for (std::size_t j = 1; j < row.theory.R_r.size(); ++j)
            if (row.theory.R_r[j].second <= row.theory.R_r[j - 1].second)
                throw NumericalError("sweep: moment bound table not increasing in r");
        row.residual = std::abs(row.rec.mean_qw.mean - row.theory.ht_limit);
        if (row.rec.diverging) row.flags.push_back("diverging");
        if (geom.gap().degenerate) row.flags.push_back("delta-degenerate");
        if (eps >= geom.gap().eps_threshold) row.flags.push_back("eps-above-ssc-threshold");
        return row;
    };

    return finalize_sweep(cfg, run_grid(cfg, point), geom.spectrum().b_max, "switch-sweep");
}

SweepResult cmd_jsq_sweep(const ExperimentConfig& cfg) {
    if (cfg.eps_grid.empty()) throw ConfigError("sweep: empty eps grid");
    const LoadBalanceModel base = build_jsq_model(cfg);
    const double mu_sigma = base.mu_sigma();
    const double mu_min = base.mu().minCoeff();
    const double alpha = std::max(base.arrival.a_max(), base.s_max());
    Eigen::VectorXd capacity(1);
    capacity[0] = mu_sigma;
    const Eigen::VectorXd w = Eigen::VectorXd::Ones(base.n);

    auto point = [&](std::size_t i) {
        const double eps = cfg.eps_grid[i];
        if (eps >= mu_sigma) throw ConfigError("jsq sweep: eps must be below mu_sigma");
        const RunConfig rc = resolve_run_config(cfg, eps, i, w);
        LoadBalanceModel scaled(base.n, scale_to_heavy_traffic(base.arrival, capacity, eps),
                                base.service);
        SweepRow row;
        row.eps = eps;
        row.rec = run_jsq(scaled, rc);

        row.theory.eps = eps;
        const double limit =
            jsq_limit(scaled.arrival.covariance()(0, 0), base.sigma_s2(), eps);
        row.theory.jsq_limit = limit;
        row.theory.ht_limit = limit;  // same role in the residual
        const double delta = 0.5 * mu_min;
        if (eps < (mu_min - delta) * base.n) {
            for (int r : rc.moment_orders) {
                const SscBound bound = ssc_bound_jsq(base.n, alpha, delta, r);
                row.theory.R_r.emplace_back(r, bound.value);
            }
        }
        row.residual = std::abs(row.rec.mean_qw.mean - limit);
        if (row.rec.diverging) row.flags.push_back("diverging");
        return row;
    };

    return finalize_sweep(cfg, run_grid(cfg, point), 0.0, "jsq-sweep");
}

std::string sweep_csv_header(int) {
    return "eps,mean_qw,ci,ht_limit,residual,t1,t2,t3,t4,pi_min,"
           "perp_m1,perp_m2,perp_m3,perp_m4,flags\n";
}

std::string sweep_csv_row(const SweepRow& row) {
    double pi_min = std::numeric_limits<double>::quiet_NaN();
    if (row.rec.pi_hat.size() > 0) pi_min = row.rec.pi_hat.minCoeff();
    std::string s;
    s += fmt_double(row.eps);
    s += "," + fmt_double(row.rec.mean_qw.mean);
    s += "," + fmt_double(row.rec.mean_qw.ci_half_width);
    s += "," + fmt_double(row.theory.ht_limit);
    s += "," + fmt_double(row.residual);
    s += "," + fmt_double(row.rec.drift.t1.mean);
    s += "," + fmt_double(row.rec.drift.t2.mean);
    s += "," + fmt_double(row.rec.drift.t3.mean);
    s += "," + fmt_double(row.rec.drift.t4.mean);
    s += "," + fmt_double(pi_min);
    for (int r = 1; r <= 4; ++r) {
        const Estimate* e = moment_of(row.rec, r, /*k_side=*/true);
        s += ",";
        s += e ? fmt_double(e->mean) : "nan";
    }
    s += "," + flags_field(row.flags) + "\n";
    return s;
}

}  // namespace switchsim
