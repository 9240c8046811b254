#include "botlab/dependence.hpp"

#include "botlab/csv.hpp"
#include "botlab/errors.hpp"
#include "botlab/parallel.hpp"
#include "botlab/quadrature.hpp"
#include "botlab/rng.hpp"
#include "botlab/stats.hpp"

#include <cmath>
#include <ostream>
#include <random>

namespace botlab {

namespace {

void check(const Ar1Noise& noise, const LongRunSettings& s) {
    validate(TrajectoryNoiseSpec{noise});
    if (s.max_lag < 1) throw ConfigError("long-run variance needs a lag cap K >= 1");
    if (s.t_grid < 1) throw ConfigError("long-run variance needs t_grid >= 1");
}

double grid_t(std::size_t g, std::size_t grid) { return static_cast<double>(g) / static_cast<double>(grid); }

// Accumulates lag terms and decides when the series has converged.
template <class LagTerm>
LongRunVariance sum_lags(double var_term, const LongRunSettings& s, LagTerm&& lag_term) {
    LongRunVariance out;
    out.terms.push_back(var_term);
    out.gamma2 = var_term;
    for (std::size_t k = 1; k <= s.max_lag; ++k) {
        const double c = lag_term(k);
        out.terms.push_back(c);
        out.gamma2 += 2.0 * c;
        out.lag = k;
        out.tail = std::abs(2.0 * c);
        const double scale = std::max(std::abs(out.gamma2), 1e-14 * std::abs(var_term));
        out.converged = out.tail <= s.tail_tolerance * scale;
        if (out.converged && s.stop_early) break;
    }
    return out;
}

}  // namespace

LongRunVariance long_run_variance(const LinearCoefficient& c, const Ar1Noise& noise, const LongRunSettings& s) {
    check(noise, s);
    const double gamma0 = ar1_autocovariance(noise.phi, noise.sigma_eta, 0);
    double c2 = 0.0;
    for (std::size_t g = 1; g <= s.t_grid; ++g) c2 += c(grid_t(g, s.t_grid)).squaredNorm();
    c2 /= static_cast<double>(s.t_grid);
    // Coordinates are independent with autocovariance phi^k gamma0 each.
    return sum_lags(c2 * gamma0, s, [&](std::size_t k) {
        return c2 * ar1_autocovariance(noise.phi, noise.sigma_eta, k);
    });
}

LongRunVariance long_run_variance(const NoiseFunctional& f, const Ar1Noise& noise, const LongRunSettings& s) {
    check(noise, s);
    const double sd = std::sqrt(ar1_autocovariance(noise.phi, noise.sigma_eta, 0));
    const double nt = static_cast<double>(s.t_grid);

    // Standard 2-D points a (for eps_0) and b (innovation to eps_k).
    std::vector<Vec2> pts;
    std::vector<double> wts;
    if (s.method == CovarianceMethod::quadrature) {
        const GaussianCubature2D cub = gaussian_cubature(Mat2::Identity(), gauss_hermite(s.quadrature_order));
        pts = cub.nodes;
        wts = cub.weights;
    } else {
        if (s.mc_pairs < 2) throw ConfigError("Monte Carlo covariance needs at least two pairs");
        Rng rng = make_stream(s.seed, 0, StreamRole::dependence);
        std::normal_distribution<double> normal;
        pts.resize(2 * s.mc_pairs);
        for (auto& p : pts) {
            const double x = normal(rng);
            const double y = normal(rng);
            p = {x, y};
        }
        wts.assign(s.mc_pairs, 1.0 / static_cast<double>(s.mc_pairs));
    }
    const bool quad = s.method == CovarianceMethod::quadrature;
    const std::size_t na = wts.size();

    // F(eps_0, t) at every point and grid time.
    std::vector<std::vector<double>> f0(s.t_grid, std::vector<double>(na));
    std::vector<double> mean(s.t_grid, 0.0);
    double var_term = 0.0;
    for (std::size_t g = 0; g < s.t_grid; ++g) {
        const double t = grid_t(g + 1, s.t_grid);
        double m2 = 0.0;
        for (std::size_t i = 0; i < na; ++i) {
            f0[g][i] = f(sd * pts[i], t);
            mean[g] += wts[i] * f0[g][i];
            m2 += wts[i] * f0[g][i] * f0[g][i];
        }
        var_term += (m2 - mean[g] * mean[g]) / nt;
    }

    return sum_lags(var_term, s, [&](std::size_t k) {
        const double rho = std::pow(noise.phi, static_cast<double>(k));
        const double tau = std::sqrt(std::max(0.0, 1.0 - rho * rho));
        double cov = 0.0;
        for (std::size_t g = 0; g < s.t_grid; ++g) {
            const double t = grid_t(g + 1, s.t_grid);
            double cross = 0.0;
            if (quad) {
                for (std::size_t i = 0; i < na; ++i) {
                    double inner = 0.0;
                    for (std::size_t j = 0; j < na; ++j) inner += wts[j] * f(sd * (rho * pts[i] + tau * pts[j]), t);
                    cross += wts[i] * f0[g][i] * inner;
                }
                cov += (cross - mean[g] * mean[g]) / nt;
            } else {
                double mk = 0.0;
                for (std::size_t i = 0; i < na; ++i) {
                    const double fk = f(sd * (rho * pts[i] + tau * pts[na + i]), t);
                    cross += wts[i] * f0[g][i] * fk;
                    mk += wts[i] * fk;
                }
                cov += (cross - mean[g] * mk) / nt;
            }
        }
        return cov;
    });
}

CltResult clt_experiment(const NoiseFunctional& f, const TrajectoryNoiseSpec& noise, std::size_t n,
                         std::size_t reps, std::uint64_t seed, double gamma2, std::size_t workers) {
    validate(noise);
    if (n == 0) throw ConfigError("CLT experiment needs n >= 1");
    if (reps < 2) throw ConfigError("CLT experiment needs at least two replications");
    if (!(gamma2 >= 0.0)) throw ConfigError("reference variance must be non-negative");
    CltResult out;
    out.gamma2 = gamma2;
    out.reps = reps;
    out.n = n;
    out.sums.assign(reps, 0.0);
    std::vector<double> lln(reps, 0.0);
    const double nn = static_cast<double>(n);
    parallel_for(reps, workers, [&](std::size_t r) {
        Rng rng = make_stream(seed, r, StreamRole::dependence);
        const auto eps = sample_trajectory_noise(noise, n, rng);
        double sum = 0.0;
        for (std::size_t k = 0; k < n; ++k) sum += f(eps[k], static_cast<double>(k + 1) / nn);
        out.sums[r] = sum / std::sqrt(nn);
        lln[r] = sum / nn;
    });
    out.emp_mean = stats::mean(out.sums);
    out.emp_var = stats::variance(out.sums);
    double abs_sum = 0.0;
    for (double v : lln) abs_sum += std::abs(v);
    out.lln_mean_abs = abs_sum / static_cast<double>(reps);
    if (gamma2 > 0.0) {
        out.ks = stats::ks_distance_normal(out.sums, 0.0, std::sqrt(gamma2));
    } else {
        // point mass at zero
        bool all_zero = true;
        for (double v : out.sums) all_zero = all_zero && v == 0.0;
        out.ks = all_zero ? 0.0 : 1.0;
    }
    return out;
}

void write_clt_csv(std::ostream& out, const CltResult& r) {
    out << "stat,value\n";
    out << "gamma2," << csv::format(r.gamma2) << '\n';
    out << "emp_var," << csv::format(r.emp_var) << '\n';
    out << "emp_mean," << csv::format(r.emp_mean) << '\n';
    out << "lln_mean_abs," << csv::format(r.lln_mean_abs) << '\n';
    out << "ks," << csv::format(r.ks) << '\n';
    out << "reps," << r.reps << '\n';
    out << "n," << r.n << '\n';
}

}  // namespace botlab
