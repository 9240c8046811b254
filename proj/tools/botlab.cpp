// botlab: command-line front end for the bearings-only tracking lab.

#include "botlab/config.hpp"
#include "botlab/dependence.hpp"
#include "botlab/errors.hpp"
#include "botlab/estimate.hpp"
#include "botlab/harness.hpp"
#include "botlab/inference.hpp"
#include "botlab/csv.hpp"
#include "botlab/sim.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace fs = std::filesystem;
using namespace botlab;

namespace {

struct Common {
    std::string scenario;
    std::string out = ".";
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> reps;
    std::string estimator = "lse";
    std::optional<double> level;
    std::optional<std::size_t> workers;
    std::string data;
};

std::ofstream open_file(const fs::path& p) {
    std::error_code ec;
    if (p.has_parent_path()) fs::create_directories(p.parent_path(), ec);
    std::ofstream out(p, std::ios::binary);
    if (!out) throw IoError("cannot open " + p.string() + " for writing");
    return out;
}

ScenarioConfig load(const Common& c) {
    if (c.scenario.empty()) throw ConfigError("--scenario is required");
    return load_scenario(c.scenario);
}

std::uint64_t seed_of(const Common& c, const ScenarioConfig& cfg) { return c.seed.value_or(cfg.run.seed); }
double level_of(const Common& c, const ScenarioConfig& cfg) { return c.level.value_or(cfg.run.level); }

Dataset dataset_of(const Common& c, const ScenarioConfig& cfg) {
    if (!c.data.empty()) return read_dataset_csv(c.data);
    return simulate(cfg.scenario, seed_of(c, cfg));
}

// Same optimizer settings as the Monte Carlo campaigns, so a seed taken from
// seeds.csv reproduces that replication exactly.
struct Fit {
    EstimateResult lse;
    std::optional<EstimateResult> mle;
};

Fit fit(const Scenario& s, const Dataset& data, bool with_mle) {
    const CampaignSettings defaults;
    const BearingProblem problem(data, s.model, s.path);
    Fit f{lse(problem, defaults.lse_cfg), std::nullopt};
    if (with_mle) f.mle = mle(problem, s.trajectory_noise, s.observation_noise, f.lse.theta, defaults.mle_cfg);
    return f;
}

void stat_row(std::ostream& out, const std::string& key, double v) { out << key << ',' << csv::format(v) << '\n'; }

int cmd_simulate(const Common& c, bool latent) {
    const auto cfg = load(c);
    const Dataset d = simulate(cfg.scenario, seed_of(c, cfg), latent);
    const fs::path p = fs::path(c.out) / "dataset.csv";
    auto out = open_file(p);
    write_dataset_csv(out, d);
    std::cout << "wrote " << p.string() << " (" << d.size() << " bearings, seed " << d.seed << ")\n";
    return 0;
}

int cmd_estimate(const Common& c) {
    const auto cfg = load(c);
    const Estimator which = parse_estimator(c.estimator);
    const Dataset d = dataset_of(c, cfg);
    const Fit f = fit(cfg.scenario, d, which == Estimator::mle);
    const EstimateResult& r = which == Estimator::mle ? *f.mle : f.lse;
    const fs::path p = fs::path(c.out) / "estimate.csv";
    auto out = open_file(p);
    write_estimate_csv(out, r, coordinate_names(cfg.scenario.model));
    write_estimate_csv(std::cout, r, coordinate_names(cfg.scenario.model));
    return r.converged ? 0 : 3;
}

int cmd_fisher(const Common& c) {
    const auto cfg = load(c);
    const Scenario& s = cfg.scenario;
    const InfoMatrices info = reference_information(s, true);
    const fs::path dir(c.out);
    auto write = [&](const std::string& name, const Eigen::MatrixXd& m) {
        auto out = open_file(dir / name);
        write_matrix_csv(out, m);
    };
    write("i_r.csv", info.i_r);
    write("i_psi.csv", info.i_psi);
    write("i_m_inv.csv", info.i_m_inv);
    write("fisher.csv", info.fisher);
    write("fisher_inv.csv", info.fisher_inv);
    auto out = open_file(dir / "info.csv");
    out << "stat,value\n";
    stat_row(out, "cond_i_r", info.cond_i_r);
    stat_row(out, "cond_fisher", info.cond_fisher);
    stat_row(out, "trace_i_psi_over_sigma2_i_r",
             info.i_psi.trace() / (s.observation_noise.sigma * s.observation_noise.sigma * info.i_r.trace()));
    std::cout << "I_M^-1 at theta*:\n" << info.i_m_inv << "\nI^-1 at theta*:\n" << info.fisher_inv << '\n';
    return 0;
}

int cmd_intervals(const Common& c) {
    const auto cfg = load(c);
    const Scenario& s = cfg.scenario;
    const double level = level_of(c, cfg);
    const Dataset d = dataset_of(c, cfg);
    const Fit f = fit(s, d, true);
    const QuadratureRule rule = gauss_hermite(12);
    const double sigma = s.observation_noise.sigma;
    const Eigen::MatrixXd i_r = info_IR(s.model, f.lse.theta, s.path, s.n);
    const Eigen::MatrixXd i_psi = info_IPsi(s.model, f.lse.theta, s.path, s.trajectory_noise, rule, s.n);
    const Eigen::MatrixXd i_m_inv = lse_asymptotic_cov(i_r, i_psi, sigma);
    const double a2 = conservative_A2(s.r_min, second_moment(s.trajectory_noise));
    FisherSettings fs_settings;
    fs_settings.grid = s.n;
    const FisherInfo fi = parametric_fisher(s.model, f.mle->theta, s.path, s.trajectory_noise, s.observation_noise,
                                            rule, fs_settings);
    const Eigen::MatrixXd i_r_inv = i_r.llt().solve(Eigen::MatrixXd::Identity(i_r.rows(), i_r.cols()));

    const auto names = coordinate_names(s.model);
    const auto final_names = reporting_names(s.model);
    const fs::path dir(c.out);
    auto emit = [&](const std::string& tag, const Theta& est, const Eigen::MatrixXd& cov) {
        auto raw = open_file(dir / ("intervals_" + tag + ".csv"));
        write_intervals_csv(raw, confidence_intervals(est, cov, s.n, level), names);
        auto fin = open_file(dir / ("intervals_" + tag + "_final.csv"));
        const ConfidenceReport rep = map_report(s.model, est, cov, s.n, level);
        write_intervals_csv(fin, rep, final_names);
        std::cout << tag << " (final-time parameterization)\n";
        write_intervals_csv(std::cout, rep, final_names);
    };
    emit("ic1", f.lse.theta, i_m_inv);
    emit("ic2", f.lse.theta, (a2 + sigma * sigma) * i_r_inv);
    emit("ic3", f.mle->theta, fi.inverse);
    auto est = open_file(dir / "estimates.csv");
    write_estimate_csv(est, f.lse, names);
    return 0;
}

int cmd_montecarlo(const Common& c, bool intervals) {
    const auto cfg = load(c);
    CampaignSettings st;
    st.reps = c.reps.value_or(cfg.run.reps);
    st.base_seed = seed_of(c, cfg);
    st.level = level_of(c, cfg);
    st.workers = c.workers.value_or(cfg.run.workers);
    st.run_mle = parse_estimator(c.estimator) == Estimator::mle;
    st.intervals = intervals;
    const CampaignResult res = run_campaign(cfg.scenario, st);
    write_campaign(c.out, cfg.scenario, res);
    std::cerr << "campaign " << res.scenario << ": " << st.reps << " reps in " << res.wall_seconds << " s\n";
    auto report = [](const EstimatorSummary& e) {
        std::cout << to_string(e.estimator) << ": used " << e.used << "/" << e.reps << ", Frobenius rel. error "
                  << e.frobenius_rel_error << ", max KS " << e.summary.ks.maxCoeff()
                  << (e.valid ? "" : "  [INVALID: more than 5% of replications lost]") << '\n';
    };
    if (res.lse) report(*res.lse);
    if (res.mle) report(*res.mle);
    for (const auto& cov : res.coverage) {
        std::cout << to_string(cov.kind) << " coverage: " << cov.rate.transpose() << '\n';
    }
    const bool valid = (!res.lse || res.lse->valid) && (!res.mle || res.mle->valid);
    return valid ? 0 : 4;
}

int cmd_cltcheck(const Common& c, std::size_t n) {
    const auto cfg = load(c);
    const TrajectoryNoiseSpec& noise = cfg.scenario.trajectory_noise;
    double gamma2 = marginal_covariance(noise)(0, 0);
    if (const auto* ar = std::get_if<Ar1Noise>(&noise)) {
        LongRunSettings ls;
        ls.max_lag = 2000;
        const auto lr = long_run_variance([](double) { return Vec2(1.0, 0.0); }, *ar, ls);
        if (!lr.converged) throw EstimationError("long-run variance did not converge");
        gamma2 = lr.gamma2;
    }
    const NoiseFunctional first = [](const Vec2& e, double) { return e.x(); };
    const CltResult r = clt_experiment(first, noise, n, c.reps.value_or(cfg.run.reps), seed_of(c, cfg), gamma2,
                                       c.workers.value_or(cfg.run.workers));
    auto out = open_file(fs::path(c.out) / "summary.csv");
    write_clt_csv(out, r);
    write_clt_csv(std::cout, r);
    return 0;
}

int cmd_report(const Common& c) {
    const auto cfg = load(c);
    const Scenario& s = cfg.scenario;
    const ValidityReport v = validate_scenario(s);
    const QuadratureRule rule = gauss_hermite(12);
    auto out = open_file(fs::path(c.out) / "report.csv");
    auto both = [&](const std::string& k, double x) {
        stat_row(out, k, x);
        stat_row(std::cout, k, x);
    };
    out << "stat,value\n";
    std::cout << "stat,value\n";
    both("min_range_km", v.min_range);
    both("max_range_km", v.max_range);
    both("bearing_span_rad", v.bearing_span);
    both("gram_condition", v.gram_condition);
    both("range_ok", v.range_ok ? 1 : 0);
    both("span_ok", v.span_ok ? 1 : 0);
    both("observability_risk", v.observability_risk ? 1 : 0);
    both("second_moment_km2", second_moment(s.trajectory_noise));
    both("conservative_A2", conservative_A2(s.r_min, second_moment(s.trajectory_noise)));
    both("max_expected_sq_deviation",
         max_expected_sq_deviation(s.model, s.theta_true, s.path, s.trajectory_noise, rule, s.n));
    both("mean_preservation_error",
         check_mean_preservation(s.model, s.theta_true, s.path, s.trajectory_noise, rule, s.n));
    const Eigen::VectorXd fin = reporting_map(s.model, s.theta_true);
    const auto names = reporting_names(s.model);
    for (std::size_t i = 0; i < names.size(); ++i) both("truth_" + names[i], fin[static_cast<Eigen::Index>(i)]);
    return v.passed() ? 0 : 5;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"botlab: bearings-only tracking estimation lab"};
    app.require_subcommand(1);
    Common c;
    bool latent = false;
    bool intervals = false;
    std::size_t clt_n = 10000;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--scenario", c.scenario, "scenario file (INI)")->required();
        sub->add_option("--out", c.out, "output directory");
        sub->add_option("--seed", c.seed, "base seed (default: [run] seed)");
        sub->add_option("--workers", c.workers, "worker threads (0: all cores)");
    };
    auto* simulate_cmd = app.add_subcommand("simulate", "simulate one dataset");
    common(simulate_cmd);
    simulate_cmd->add_flag("--latent", latent, "also write the latent target positions");

    auto* estimate_cmd = app.add_subcommand("estimate", "fit the LSE or the MLE");
    common(estimate_cmd);
    estimate_cmd->add_option("--estimator", c.estimator, "lse or mle")->check(CLI::IsMember({"lse", "mle"}));
    estimate_cmd->add_option("--data", c.data, "dataset CSV (default: simulate from --seed)");

    auto* fisher_cmd = app.add_subcommand("fisher", "information matrices at the true parameter");
    common(fisher_cmd);

    auto* intervals_cmd = app.add_subcommand("intervals", "IC1, IC2 and IC3 for one dataset");
    common(intervals_cmd);
    intervals_cmd->add_option("--level", c.level, "confidence level");
    intervals_cmd->add_option("--data", c.data, "dataset CSV (default: simulate from --seed)");

    auto* mc_cmd = app.add_subcommand("montecarlo", "Monte Carlo campaign");
    common(mc_cmd);
    mc_cmd->add_option("--reps", c.reps, "replications");
    mc_cmd->add_option("--estimator", c.estimator, "lse or mle")->check(CLI::IsMember({"lse", "mle"}));
    mc_cmd->add_option("--level", c.level, "confidence level");
    mc_cmd->add_flag("--intervals", intervals, "also run the coverage study");

    auto* clt_cmd = app.add_subcommand("cltcheck", "normalized-sum CLT check on the first noise coordinate");
    common(clt_cmd);
    clt_cmd->add_option("--reps", c.reps, "replications");
    clt_cmd->add_option("--n", clt_n, "terms per sum");

    auto* report_cmd = app.add_subcommand("report", "geometry validity and noise-bound report");
    common(report_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error,usage," << e.what() << '\n';
        return 2;
    }

    try {
        if (*simulate_cmd) return cmd_simulate(c, latent);
        if (*estimate_cmd) return cmd_estimate(c);
        if (*fisher_cmd) return cmd_fisher(c);
        if (*intervals_cmd) return cmd_intervals(c);
        if (*mc_cmd) return cmd_montecarlo(c, intervals);
        if (*clt_cmd) return cmd_cltcheck(c, clt_n);
        if (*report_cmd) return cmd_report(c);
    } catch (const Error& e) {
        std::cerr << "error," << e.kind() << ',' << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error,internal," << e.what() << '\n';
        return 1;
    }
    return 0;
}
