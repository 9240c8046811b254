#include "botlab/harness.hpp"

#include "botlab/csv.hpp"
#include "botlab/errors.hpp"
#include "botlab/parallel.hpp"
#include "botlab/rng.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>

namespace botlab {

Estimator parse_estimator(const std::string& name) {
    if (name == "lse") return Estimator::lse;
    if (name == "mle") return Estimator::mle;
    throw ConfigError("unknown estimator '" + name + "' (expected lse or mle)");
}

std::string to_string(Estimator e) { return e == Estimator::lse ? "lse" : "mle"; }

std::string to_string(IntervalKind k) {
    switch (k) {
        case IntervalKind::ic1: return "ic1";
        case IntervalKind::ic2: return "ic2";
        case IntervalKind::ic3: return "ic3";
    }
    return "?";
}

IntervalKind parse_interval_kind(const std::string& name) {
    if (name == "ic1") return IntervalKind::ic1;
    if (name == "ic2") return IntervalKind::ic2;
    if (name == "ic3") return IntervalKind::ic3;
    throw ConfigError("unknown interval kind '" + name + "'");
}

std::uint64_t replication_seed(std::uint64_t base_seed, std::size_t r) {
    return stream_seed(base_seed, r, StreamRole::replication);
}

InfoMatrices reference_information(const Scenario& s, bool with_fisher, std::size_t quadrature_order) {
    return information(s.model, s.theta_true, s.path, s.trajectory_noise, s.observation_noise, s.n, with_fisher,
                       quadrature_order);
}

namespace {

IntervalOutcome make_interval(const Scenario& s, const Theta& estimate, const Eigen::MatrixXd& sigma, double level) {
    const ConfidenceReport raw = confidence_intervals(estimate, sigma, s.n, level);
    const ConfidenceReport fin = map_report(s.model, estimate, sigma, s.n, level);
    IntervalOutcome o;
    o.lo = raw.lo;
    o.hi = raw.hi;
    o.lo_final = fin.lo;
    o.hi_final = fin.hi;
    o.ellipsoid = raw.ellipsoid.contains(s.theta_true);
    return o;
}

void check_settings(const CampaignSettings& cfg) {
    if (cfg.reps == 0) throw ConfigError("campaign needs reps >= 1");
    if (!(cfg.level > 0.0 && cfg.level < 1.0)) throw ConfigError("confidence level must lie in (0, 1)");
}

std::vector<ReplicationRecord> run_records(const Scenario& s, const CampaignSettings& cfg) {
    check_settings(cfg);
    std::vector<ReplicationRecord> records(cfg.reps);
    parallel_for(cfg.reps, cfg.workers, [&](std::size_t r) { records[r] = run_replication(s, cfg, r); });
    return records;
}

const std::optional<EstimateResult>& pick(const ReplicationRecord& rec, Estimator which) {
    return which == Estimator::lse ? rec.lse : rec.mle;
}

const std::optional<IntervalOutcome>& pick(const ReplicationRecord& rec, IntervalKind kind) {
    switch (kind) {
        case IntervalKind::ic1: return rec.ic1;
        case IntervalKind::ic2: return rec.ic2;
        default: return rec.ic3;
    }
}

}  // namespace

ReplicationRecord run_replication(const Scenario& s, const CampaignSettings& cfg, std::size_t r) {
    ReplicationRecord rec;
    rec.index = r;
    rec.seed = replication_seed(cfg.base_seed, r);
    try {
        const Dataset data = simulate(s, rec.seed);
        const BearingProblem problem(data, s.model, s.path);
        rec.lse = lse(problem, cfg.lse_cfg);
        if (cfg.run_mle) {
            rec.mle = mle(problem, s.trajectory_noise, s.observation_noise, rec.lse->theta, cfg.mle_cfg,
                          cfg.likelihood);
        }
        if (cfg.intervals) {
            const std::size_t grid = cfg.info_grid == 0 ? s.n : cfg.info_grid;
            const QuadratureRule rule = gauss_hermite(cfg.quadrature_order);
            const double sigma = s.observation_noise.sigma;
            const Theta& bar = rec.lse->theta;
            const Eigen::MatrixXd i_r = info_IR(s.model, bar, s.path, grid);
            const Eigen::MatrixXd i_psi = info_IPsi(s.model, bar, s.path, s.trajectory_noise, rule, grid);
            rec.ic1 = make_interval(s, bar, lse_asymptotic_cov(i_r, i_psi, sigma), cfg.level);
            const double a2 = conservative_A2(s.r_min, second_moment(s.trajectory_noise));
            const Eigen::MatrixXd inv_r = i_r.llt().solve(Eigen::MatrixXd::Identity(i_r.rows(), i_r.cols()));
            rec.ic2 = make_interval(s, bar, (a2 + sigma * sigma) * 0.5 * (inv_r + inv_r.transpose()), cfg.level);
            if (rec.mle) {
                FisherSettings fs;
                fs.grid = grid;
                fs.legendre_panels = cfg.fisher_panels;
                fs.legendre_order = cfg.fisher_order;
                const FisherInfo fi = parametric_fisher(s.model, rec.mle->theta, s.path, s.trajectory_noise,
                                                        s.observation_noise, rule, fs);
                rec.ic3 = make_interval(s, rec.mle->theta, fi.inverse, cfg.level);
            }
        }
    } catch (const Error& e) {
        rec.error = e.kind() + ": " + e.what();
    }
    return rec;
}

SampleSummary summarize(const Eigen::MatrixXd& samples, const Eigen::MatrixXd& reference, std::size_t bins) {
    if (samples.rows() == 0) throw ConfigError("cannot summarize an empty sample set");
    if (reference.rows() != samples.cols()) throw ConfigError("reference size does not match the samples");
    SampleSummary out;
    const auto m = samples.cols();
    out.ks.resize(m);
    out.ks_empirical.resize(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        std::vector<double> col(samples.col(i).data(), samples.col(i).data() + samples.rows());
        out.histograms.push_back(stats::histogram(col, bins));
        out.ecdfs.push_back(stats::ecdf(col));
        out.ks[i] = stats::ks_distance_normal(col, 0.0, std::sqrt(std::max(reference(i, i), 0.0)));
        const double var = col.size() > 1 ? stats::variance(col) : 0.0;
        out.ks_empirical[i] = stats::ks_distance_normal(col, 0.0, std::sqrt(var));
    }
    return out;
}

EstimatorSummary summarize_estimator(const Scenario& s, const std::vector<ReplicationRecord>& records,
                                     Estimator which, const Eigen::MatrixXd& reference, std::size_t bins) {
    EstimatorSummary out;
    out.estimator = which;
    out.reps = records.size();
    out.reference = reference;
    const double root_n = std::sqrt(static_cast<double>(s.n));
    std::vector<Eigen::VectorXd> rows;
    for (const auto& rec : records) {
        const auto& est = pick(rec, which);
        if (!rec.error.empty() || !est) {
            ++out.failed;
        } else if (!est->converged) {
            ++out.nonconverged;
        } else {
            rows.push_back(root_n * (est->theta - s.theta_true));
            out.indices.push_back(rec.index);
        }
    }
    out.used = rows.size();
    out.valid = static_cast<double>(out.failed + out.nonconverged) <= 0.05 * static_cast<double>(out.reps);
    if (rows.empty()) throw EstimationError("no replication converged for " + to_string(which));
    const auto m = rows.front().size();
    out.samples.resize(static_cast<Eigen::Index>(rows.size()), m);
    for (std::size_t i = 0; i < rows.size(); ++i) out.samples.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
    out.mean = out.samples.colwise().mean().transpose();
    if (rows.size() > 1) {
        const Eigen::MatrixXd centered = out.samples.rowwise() - out.mean.transpose();
        out.cov = centered.transpose() * centered / static_cast<double>(rows.size() - 1);
    } else {
        out.cov = Eigen::MatrixXd::Zero(m, m);
    }
    out.frobenius_rel_error = (out.cov - reference).norm() / reference.norm();
    out.summary = summarize(out.samples, reference, bins);
    return out;
}

CoverageSummary summarize_coverage(const Scenario& s, const std::vector<ReplicationRecord>& records,
                                   IntervalKind kind) {
    const Estimator which = kind == IntervalKind::ic3 ? Estimator::mle : Estimator::lse;
    const auto m = static_cast<Eigen::Index>(s.model.dimension());
    const Eigen::VectorXd truth_final = reporting_map(s.model, s.theta_true);
    CoverageSummary out;
    out.kind = kind;
    out.rate = Eigen::VectorXd::Zero(m);
    out.rate_final = Eigen::VectorXd::Zero(m);
    out.mean_width = Eigen::VectorXd::Zero(m);
    double ell = 0.0;
    for (const auto& rec : records) {
        const auto& est = pick(rec, which);
        const auto& iv = pick(rec, kind);
        if (!rec.error.empty() || !est || !est->converged || !iv) continue;
        ++out.count;
        for (Eigen::Index i = 0; i < m; ++i) {
            if (iv->lo[i] <= s.theta_true[i] && s.theta_true[i] <= iv->hi[i]) out.rate[i] += 1.0;
            if (iv->lo_final[i] <= truth_final[i] && truth_final[i] <= iv->hi_final[i]) out.rate_final[i] += 1.0;
            out.mean_width[i] += iv->hi[i] - iv->lo[i];
        }
        if (iv->ellipsoid) ell += 1.0;
    }
    if (out.count == 0) throw EstimationError("no replication produced " + to_string(kind) + " intervals");
    const double c = static_cast<double>(out.count);
    out.rate /= c;
    out.rate_final /= c;
    out.mean_width /= c;
    out.ellipsoid_rate = ell / c;
    return out;
}

CampaignResult run_campaign(const Scenario& s, const CampaignSettings& cfg) {
    check_settings(cfg);
    const auto start = std::chrono::steady_clock::now();
    CampaignResult out;
    out.scenario = s.name;
    out.settings = cfg;
    out.reference = reference_information(s, cfg.run_mle, cfg.quadrature_order);
    out.records = run_records(s, cfg);
    if (cfg.run_lse) {
        out.lse = summarize_estimator(s, out.records, Estimator::lse, out.reference.i_m_inv, cfg.histogram_bins);
    }
    if (cfg.run_mle) {
        out.mle = summarize_estimator(s, out.records, Estimator::mle, out.reference.fisher_inv, cfg.histogram_bins);
    }
    if (cfg.intervals) {
        out.coverage.push_back(summarize_coverage(s, out.records, IntervalKind::ic1));
        out.coverage.push_back(summarize_coverage(s, out.records, IntervalKind::ic2));
        if (cfg.run_mle) out.coverage.push_back(summarize_coverage(s, out.records, IntervalKind::ic3));
    }
    out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

EstimatorSummary run_montecarlo(const Scenario& s, Estimator estimator, std::size_t reps, std::uint64_t base_seed,
                                const InfoMatrices& reference, std::size_t workers) {
    if (estimator == Estimator::mle && !reference.has_fisher) {
        throw ConfigError("MLE campaign needs a reference with the Fisher information");
    }
    CampaignSettings cfg;
    cfg.reps = reps;
    cfg.base_seed = base_seed;
    cfg.workers = workers;
    cfg.run_mle = estimator == Estimator::mle;
    const auto records = run_records(s, cfg);
    return summarize_estimator(s, records, estimator,
                               estimator == Estimator::lse ? reference.i_m_inv : reference.fisher_inv,
                               cfg.histogram_bins);
}

CoverageSummary coverage_study(const Scenario& s, std::size_t reps, double level, IntervalKind kind,
                               std::uint64_t base_seed, std::size_t workers) {
    CampaignSettings cfg;
    cfg.reps = reps;
    cfg.level = level;
    cfg.base_seed = base_seed;
    cfg.workers = workers;
    cfg.intervals = true;
    cfg.run_mle = kind == IntervalKind::ic3;
    return summarize_coverage(s, run_records(s, cfg), kind);
}

namespace {

std::ofstream open_out(const std::filesystem::path& p) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw IoError("cannot open " + p.string() + " for writing");
    return out;
}

void stat(std::ostream& out, const std::string& key, double v) { out << key << ',' << csv::format(v) << '\n'; }
void stat(std::ostream& out, const std::string& key, std::size_t v) { out << key << ',' << v << '\n'; }

void write_estimator(const std::filesystem::path& dir, std::ostream& summary, const EstimatorSummary& e,
                     const std::vector<std::string>& names) {
    const std::string tag = to_string(e.estimator);
    stat(summary, tag + "_used", e.used);
    stat(summary, tag + "_nonconverged", e.nonconverged);
    stat(summary, tag + "_failed", e.failed);
    stat(summary, tag + "_valid", static_cast<std::size_t>(e.valid ? 1 : 0));
    stat(summary, tag + "_frobenius_rel_error", e.frobenius_rel_error);
    for (std::size_t i = 0; i < names.size(); ++i) {
        const auto k = static_cast<Eigen::Index>(i);
        stat(summary, tag + "_mean_" + names[i], e.mean[k]);
        stat(summary, tag + "_var_" + names[i], e.cov(k, k));
        stat(summary, tag + "_ref_var_" + names[i], e.reference(k, k));
        stat(summary, tag + "_ks_" + names[i], e.summary.ks[k]);
        stat(summary, tag + "_ks_empirical_" + names[i], e.summary.ks_empirical[k]);
    }

    auto samples = open_out(dir / ("samples_" + tag + ".csv"));
    samples << "rep";
    for (const auto& n : names) samples << ',' << n;
    samples << '\n';
    for (Eigen::Index r = 0; r < e.samples.rows(); ++r) {
        samples << e.indices[static_cast<std::size_t>(r)];
        for (Eigen::Index c = 0; c < e.samples.cols(); ++c) samples << ',' << csv::format(e.samples(r, c));
        samples << '\n';
    }

    auto cov = open_out(dir / ("cov_" + tag + ".csv"));
    write_matrix_csv(cov, e.cov);
    auto ref = open_out(dir / ("reference_" + tag + ".csv"));
    write_matrix_csv(ref, e.reference);

    auto hist = open_out(dir / ("histogram_" + tag + ".csv"));
    hist << "coord,bin,lo,hi,count,density\n";
    for (std::size_t i = 0; i < names.size(); ++i) {
        const auto& h = e.summary.histograms[i];
        for (std::size_t b = 0; b < h.counts.size(); ++b) {
            hist << names[i] << ',' << b << ',' << csv::format(h.edges[b]) << ',' << csv::format(h.edges[b + 1]) << ','
                 << h.counts[b] << ',' << csv::format(h.density(b, e.used)) << '\n';
        }
    }

    auto ecdf = open_out(dir / ("ecdf_" + tag + ".csv"));
    ecdf << "coord,x,F\n";
    for (std::size_t i = 0; i < names.size(); ++i) {
        for (const auto& pt : e.summary.ecdfs[i]) ecdf << names[i] << ',' << csv::format(pt.x) << ',' << csv::format(pt.f) << '\n';
    }
}

}  // namespace

void write_campaign(const std::string& dir_name, const Scenario& s, const CampaignResult& res) {
    const std::filesystem::path dir(dir_name);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir_name + ": " + ec.message());
    const auto names = coordinate_names(s.model);
    const auto final_names = reporting_names(s.model);

    auto seeds = open_out(dir / "seeds.csv");
    seeds << "rep,seed\n";
    for (const auto& r : res.records) seeds << r.index << ',' << r.seed << '\n';

    auto est = open_out(dir / "estimates.csv");
    est << "rep,seed,estimator,status,evals,value";
    for (const auto& n : names) est << ',' << n;
    est << '\n';
    for (const auto& r : res.records) {
        if (!r.error.empty()) {
            est << r.index << ',' << r.seed << ",none,failed,0,nan";
            for (std::size_t i = 0; i < names.size(); ++i) est << ",nan";
            est << '\n';
            continue;
        }
        for (Estimator which : {Estimator::lse, Estimator::mle}) {
            const auto& e = pick(r, which);
            if (!e) continue;
            est << r.index << ',' << r.seed << ',' << to_string(which) << ','
                << (e->converged ? "converged" : "nonconverged") << ',' << e->evaluations << ','
                << csv::format(e->value);
            for (Eigen::Index i = 0; i < e->theta.size(); ++i) est << ',' << csv::format(e->theta[i]);
            est << '\n';
        }
    }

    auto summary = open_out(dir / "summary.csv");
    summary << "stat,value\n";
    summary << "scenario," << res.scenario << '\n';
    stat(summary, "reps", res.settings.reps);
    summary << "base_seed," << res.settings.base_seed << '\n';
    stat(summary, "n", s.n);
    stat(summary, "level", res.settings.level);
    stat(summary, "cond_i_r", res.reference.cond_i_r);
    if (res.lse) write_estimator(dir, summary, *res.lse, names);
    if (res.mle) write_estimator(dir, summary, *res.mle, names);
    for (const auto& c : res.coverage) {
        const std::string tag = to_string(c.kind);
        stat(summary, tag + "_count", c.count);
        for (std::size_t i = 0; i < names.size(); ++i) {
            const auto k = static_cast<Eigen::Index>(i);
            stat(summary, tag + "_rate_" + names[i], c.rate[k]);
            stat(summary, tag + "_mean_width_" + names[i], c.mean_width[k]);
        }
        for (std::size_t i = 0; i < final_names.size(); ++i) {
            stat(summary, tag + "_rate_final_" + final_names[i], c.rate_final[static_cast<Eigen::Index>(i)]);
        }
        stat(summary, tag + "_rate_ellipsoid", c.ellipsoid_rate);
    }
}

}  // namespace botlab
