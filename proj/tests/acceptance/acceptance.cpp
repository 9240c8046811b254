// Acceptance run: one PASS/FAIL line per criterion, campaign CSVs under --out.
// Exit status is the number of failed criteria (capped at 1 for ctest).

#include "botlab/config.hpp"
#include "botlab/dependence.hpp"
#include "botlab/errors.hpp"
#include "botlab/estimate.hpp"
#include "botlab/harness.hpp"
#include "botlab/inference.hpp"
#include "botlab/stats.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace botlab;
namespace fs = std::filesystem;

namespace {

struct Check {
    bool ok = true;
    std::ostringstream detail;

    void require(bool cond, const std::string& what) {
        ok = ok && cond;
        if (detail.tellp() > 0) detail << "; ";
        detail << what << (cond ? "" : " [violated]");
    }
};

std::string num(double v, int prec = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    return buf;
}

std::string vec(const Eigen::VectorXd& v, int prec = 4) {
    std::string s = "(";
    for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? ", " : "") + num(v[i], prec);
    return s + ")";
}

int failures = 0;

void report(int id, const std::string& title, const Check& c) {
    if (!c.ok) ++failures;
    std::cout << (c.ok ? "PASS" : "FAIL") << " criterion " << id << " " << title << ": " << c.detail.str()
              << std::endl;
}

ScenarioConfig scenario(const std::string& name) {
    return load_scenario(std::string(BOTLAB_SCENARIO_DIR) + "/" + name + ".ini");
}

double rel_fro(const Eigen::MatrixXd& a, const Eigen::MatrixXd& ref) { return (a - ref).norm() / ref.norm(); }

std::vector<ReplicationRecord> head(const std::vector<ReplicationRecord>& r, std::size_t count) {
    return {r.begin(), r.begin() + static_cast<std::ptrdiff_t>(std::min(count, r.size()))};
}

Eigen::VectorXd diag_var(const EstimatorSummary& s) { return s.cov.diagonal(); }

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
    fs::path out = "acceptance_out";
    std::size_t workers = 0;
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--out" && i + 1 < argc) {
            out = argv[++i];
        } else if (a == "--workers" && i + 1 < argc) {
            workers = std::stoul(argv[++i]);
        } else {
            std::cerr << "usage: botlab_acceptance [--out DIR] [--workers N]\n";
            return 2;
        }
    }
    fs::create_directories(out);
    const auto t_start = std::chrono::steady_clock::now();

    try {
        const ScenarioConfig iso = scenario("isotropic");
        const ScenarioConfig aniso = scenario("anisotropic");
        const ScenarioConfig ar1 = scenario("ar1");
        const ScenarioConfig quiet = scenario("noiseless");
        const ScenarioConfig straight = scenario("straight_observer");

        // Main isotropic campaign: LSE, MLE and all three interval kinds.
        CampaignSettings cfg;
        cfg.reps = 1000;
        cfg.base_seed = iso.run.seed;
        cfg.workers = workers;
        cfg.run_mle = true;
        cfg.intervals = true;
        const CampaignResult main = run_campaign(iso.scenario, cfg);
        write_campaign((out / "isotropic").string(), iso.scenario, main);
        std::cerr << "isotropic campaign: " << num(main.wall_seconds, 3) << " s\n";

        // 1. LSE Gaussian adequacy
        {
            Check c;
            const EstimatorSummary& s = *main.lse;
            c.require(s.valid, "replications used " + std::to_string(s.used) + "/" + std::to_string(s.reps));
            c.require(s.frobenius_rel_error < 0.20,
                      "Frobenius rel. error vs I_M^-1(theta*) " + num(s.frobenius_rel_error) + " < 0.20");
            const double ks = s.summary.ks.maxCoeff();
            c.require(ks < 0.05, "max per-coordinate KS " + num(ks) + " < 0.05 " + vec(s.summary.ks, 3));
            report(1, "LSE asymptotic normality (1000 reps)", c);
        }

        // 2. MLE adequacy and efficiency
        {
            Check c;
            const auto first = head(main.records, 200);
            const EstimatorSummary m = summarize_estimator(iso.scenario, first, Estimator::mle, main.reference.fisher_inv);
            const EstimatorSummary l = summarize_estimator(iso.scenario, first, Estimator::lse, main.reference.i_m_inv);
            c.require(m.valid, "MLE replications used " + std::to_string(m.used) + "/200");
            c.require(m.frobenius_rel_error < 0.25,
                      "MLE Frobenius rel. error vs I^-1(theta*) " + num(m.frobenius_rel_error) + " < 0.25");
            const Eigen::VectorXd ratio_iso = diag_var(m).cwiseQuotient(diag_var(l));
            c.require((ratio_iso.array() <= 1.15).all(), "isotropic var(MLE)/var(LSE) " + vec(ratio_iso, 3) + " <= 1.15");

            CampaignSettings ac;
            ac.reps = 200;
            ac.base_seed = aniso.run.seed;
            ac.workers = workers;
            ac.run_mle = true;
            const CampaignResult an = run_campaign(aniso.scenario, ac);
            write_campaign((out / "anisotropic").string(), aniso.scenario, an);
            const Eigen::VectorXd ratio_an = diag_var(*an.mle).cwiseQuotient(diag_var(*an.lse));
            c.require(an.mle->valid && an.lse->valid, "anisotropic replications valid");
            c.require((ratio_an.array() <= 1.15).all(), "anisotropic var(MLE)/var(LSE) " + vec(ratio_an, 3) + " <= 1.15");
            c.require(ratio_an.mean() < ratio_iso.mean(), "gap widens: mean ratio " + num(ratio_an.mean(), 3) + " < " +
                                                              num(ratio_iso.mean(), 3));
            report(2, "MLE adequacy and efficiency (200 reps)", c);
        }

        // 3. Coverage
        std::vector<CoverageSummary> cov = main.coverage;
        {
            Check c;
            for (const auto& k : cov) {
                const std::string tag = to_string(k.kind);
                if (k.kind == IntervalKind::ic2) {
                    c.require(k.rate.minCoeff() >= 0.94, tag + " rate " + vec(k.rate, 3) + " >= 0.94");
                } else {
                    c.require(k.rate.minCoeff() >= 0.93 && k.rate.maxCoeff() <= 0.97,
                              tag + " rate " + vec(k.rate, 3) + " in [0.93, 0.97]");
                }
                c.require(k.count >= 950, tag + " intervals built " + std::to_string(k.count) + "/1000");
            }
            report(3, "95% interval coverage (1000 reps)", c);
        }

        // 4. Conservative bound
        {
            Check c;
            const auto rule = gauss_hermite(12);
            for (const ScenarioConfig* sc : {&iso, &aniso, &ar1, &quiet, &straight}) {
                const Scenario& s = sc->scenario;
                if (!validate_scenario(s).passed()) continue;
                const double dev = max_expected_sq_deviation(s.model, s.theta_true, s.path, s.trajectory_noise, rule, s.n);
                const double a2 = conservative_A2(s.r_min, second_moment(s.trajectory_noise));
                c.require(dev <= a2, s.name + " max E{dPsi}^2 " + num(dev) + " <= A^2 " + num(a2));
            }
            const double k = conservative_constant();
            c.require(std::abs(k - 31.12) <= 0.01, "constant " + num(k, 8) + " within 31.12 +- 0.01");
            // width ratio IC_2 / IC_1 in the reporting parameterization, averaged over replications
            Eigen::VectorXd w1 = Eigen::VectorXd::Zero(4), w2 = Eigen::VectorXd::Zero(4);
            std::size_t count = 0;
            for (const auto& r : main.records) {
                if (!r.ic1 || !r.ic2) continue;
                w1 += r.ic1->hi_final - r.ic1->lo_final;
                w2 += r.ic2->hi_final - r.ic2->lo_final;
                ++count;
            }
            const Eigen::VectorXd ratio = w2.cwiseQuotient(w1);
            c.require(count > 0 && ratio.minCoeff() >= 10.5 * 0.65 && ratio.maxCoeff() <= 10.5 * 1.35,
                      "IC_2/IC_1 width ratio (x_final, y_final, vx, vy) " + vec(ratio, 3) + " in [6.825, 14.175]");
            report(4, "conservative bound", c);
        }

        // 5. Mean preservation on random isotropic scenarios
        {
            Check c;
            std::mt19937_64 rng(20240605);
            std::uniform_real_distribution<double> u(-1.0, 1.0);
            const auto rule = gauss_hermite(12);
            double worst = 0.0;
            int tested = 0, redraws = 0;
            while (tested < 20) {
                Scenario s = iso.scenario;
                s.theta_true[0] += u(rng);
                s.theta_true[2] += u(rng);
                s.theta_true[1] += 0.05 * u(rng);
                s.theta_true[3] += 0.05 * u(rng);
                ObserverSpec o = s.path.spec();
                o.initial_position += Vec2(u(rng), u(rng));
                o.initial_heading += 0.2 * u(rng);
                s.path = build_observer_path(o);
                s.trajectory_noise = IsotropicGaussian{0.005 + 0.025 * (u(rng) + 1.0)};
                if (!validate_scenario(s).passed()) {
                    ++redraws;
                    continue;
                }
                ++tested;
                worst = std::max(worst, check_mean_preservation(s.model, s.theta_true, s.path, s.trajectory_noise,
                                                                rule, s.n));
            }
            c.require(worst < 1e-8, "max_t |E Psi(S+eps) - Psi(S)| over 20 pairs " + num(worst) + " < 1e-8 rad (" +
                                        std::to_string(redraws) + " invalid draws skipped)");
            report(5, "mean preservation under isotropic noise", c);
        }

        // 6. Degenerations without trajectory noise
        {
            Check c;
            const Scenario& s = quiet.scenario;
            const double sig2 = s.observation_noise.sigma * s.observation_noise.sigma;
            const InfoMatrices info = reference_information(s, true);
            const Eigen::MatrixXd ir_inv = info.i_r.inverse();
            const double e1 = rel_fro(info.i_m_inv, sig2 * ir_inv);
            c.require(e1 < 1e-8, "I_M^-1 vs sigma^2 I_R^-1 rel. " + num(e1) + " < 1e-8");
            const double e3 = rel_fro(info.fisher, info.i_r / sig2);
            c.require(e3 < 1e-8, "I vs I_R/sigma^2 rel. " + num(e3) + " < 1e-8");
            double worst = 0.0;
            for (std::size_t r = 0; r < quiet.run.reps; ++r) {
                const BearingProblem p(simulate(s, replication_seed(quiet.run.seed, r)), s.model, s.path);
                const auto a = lse(p);
                const auto b = mle(p, s.trajectory_noise, s.observation_noise, a.theta);
                worst = std::max(worst, (a.theta - b.theta).cwiseAbs().maxCoeff());
            }
            c.require(worst < 1e-6, "max |MLE - LSE| over " + std::to_string(quiet.run.reps) + " seeds " + num(worst) +
                                        " < 1e-6");
            report(6, "degenerations with no trajectory noise", c);
        }

        // 7. Observability dichotomy
        {
            Check c;
            const auto& s1 = straight.scenario;
            const auto& s2 = iso.scenario;
            const double c1 = condition_number(info_IR(s1.model, s1.theta_true, s1.path, s1.n));
            const double c2 = condition_number(info_IR(s2.model, s2.theta_true, s2.path, s2.n));
            c.require(c1 > 1e8, "straight observer cond(I_R) " + num(c1) + " > 1e8");
            c.require(c2 < 1e8, "maneuvering observer cond(I_R) " + num(c2) + " < 1e8");
            report(7, "observability dichotomy", c);
        }

        // 8. Derivatives against central differences
        {
            Check c;
            const auto& s = iso.scenario;
            std::mt19937_64 rng(808);
            std::uniform_real_distribution<double> u(-1.0, 1.0), ut(0.0, 1.0);
            double worst_g = 0.0, worst_h = 0.0, worst_r = 0.0;
            for (int i = 0; i < 100; ++i) {
                Theta th = s.theta_true;
                th[0] += u(rng);
                th[2] += u(rng);
                th[1] += 0.05 * u(rng);
                th[3] += 0.05 * u(rng);
                const double t = ut(rng);
                const Vec2 o = s.path.position(t);
                const auto psi = [&](const Theta& x) { return bearing(s.model.position(x, t), o).value(); };
                const Eigen::VectorXd g = grad_theta_bearing(s.model, th, t, s.path);
                const Eigen::MatrixXd h = hess_theta_bearing(s.model, th, t, s.path);
                Eigen::VectorXd gf(4);
                Eigen::MatrixXd hf(4, 4);
                for (int a = 0; a < 4; ++a) {
                    const double step = a % 2 ? 1e-5 : 1e-4;
                    Theta up = th, dn = th;
                    up[a] += step;
                    dn[a] -= step;
                    gf[a] = bearing_residual(psi(up), psi(dn)) / (2 * step);
                    hf.col(a) = (grad_theta_bearing(s.model, up, t, s.path) - grad_theta_bearing(s.model, dn, t, s.path)) /
                                (2 * step);
                }
                worst_g = std::max(worst_g, (g - gf).norm() / g.norm());
                worst_h = std::max(worst_h, (h - hf).norm() / h.norm());
                const Vec2 x = s.model.position(th, t);
                worst_r = std::max(worst_r, std::abs(grad_x_bearing(x, o).norm() * (x - o).norm() - 1.0));
            }
            c.require(worst_g < 1e-6, "gradient rel. error " + num(worst_g) + " < 1e-6");
            c.require(worst_h < 1e-6, "Hessian rel. error " + num(worst_h) + " < 1e-6");
            c.require(worst_r < 1e-12, "| ||grad_x Psi|| r - 1 | " + num(worst_r) + " < 1e-12");
            report(8, "derivative correctness (100 points)", c);
        }

        // 9. Dependent noise
        {
            Check c;
            const Ar1Noise noise = std::get<Ar1Noise>(ar1.scenario.trajectory_noise);
            const NoiseFunctional first = [](const Vec2& e, double) { return e.x(); };
            const LongRunVariance lr = long_run_variance(first, noise);
            c.require(std::abs(lr.gamma2 - 4e-4) < 1e-3 * 4e-4, "gamma^2 " + num(lr.gamma2, 6) + " (closed form 4e-4)");
            const CltResult clt = clt_experiment(first, noise, 10000, 2000, ar1.run.seed, lr.gamma2, workers);
            {
                std::ofstream f(out / "clt.csv", std::ios::binary);
                write_clt_csv(f, clt);
            }
            const double rel = std::abs(clt.emp_var - lr.gamma2) / lr.gamma2;
            c.require(rel < 0.10, "empirical variance " + num(clt.emp_var) + " within " + num(rel, 3) + " < 10%");
            c.require(clt.ks < 0.04, "KS vs N(0, gamma^2) " + num(clt.ks) + " < 0.04");

            CampaignSettings rc;
            rc.reps = 1000;
            rc.base_seed = ar1.run.seed;
            rc.workers = workers;
            const CampaignResult res = run_campaign(ar1.scenario, rc);
            write_campaign((out / "ar1").string(), ar1.scenario, res);
            const Eigen::VectorXd ks = res.lse->summary.ks_empirical;
            c.require(res.lse->valid, "AR1 LSE replications used " + std::to_string(res.lse->used) + "/1000");
            c.require(ks.maxCoeff() < 0.05, "AR1 LSE KS vs Gaussian with empirical covariance " + vec(ks, 3) + " < 0.05");
            report(9, "dependent noise", c);
        }

        // 10. Determinism across worker counts
        {
            Check c;
            CampaignSettings dc;
            dc.reps = 16;
            dc.base_seed = iso.run.seed + 1;
            dc.run_mle = true;
            dc.intervals = true;
            std::vector<fs::path> dirs;
            for (std::size_t w : {1, 2, 4}) {
                dc.workers = w;
                dirs.push_back(out / ("determinism_w" + std::to_string(w)));
                fs::remove_all(dirs.back());
                write_campaign(dirs.back().string(), iso.scenario, run_campaign(iso.scenario, dc));
            }
            std::size_t files = 0, mismatched = 0;
            for (const auto& e : fs::directory_iterator(dirs[0])) {
                ++files;
                const std::string ref = slurp(e.path());
                for (std::size_t i = 1; i < dirs.size(); ++i) {
                    if (slurp(dirs[i] / e.path().filename()) != ref) ++mismatched;
                }
            }
            c.require(files > 0 && mismatched == 0, std::to_string(files) + " CSVs compared for 1, 2, 4 workers, " +
                                                        std::to_string(mismatched) + " differ");
            const CltResult a = clt_experiment([](const Vec2& e, double) { return e.x(); }, ar1.scenario.trajectory_noise,
                                               1000, 200, 5, 4e-4, 1);
            const CltResult b = clt_experiment([](const Vec2& e, double) { return e.x(); }, ar1.scenario.trajectory_noise,
                                               1000, 200, 5, 4e-4, 3);
            c.require(a.sums == b.sums, "CLT sums identical for 1 and 3 workers");
            report(10, "determinism", c);
        }
    } catch (const Error& e) {
        std::cout << "FAIL acceptance aborted: " << e.kind() << ": " << e.what() << std::endl;
        return 1;
    }
    std::cerr << "total " << num(seconds_since(t_start), 4) << " s\n";
    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
    return failures == 0 ? 0 : 1;
}
