#pragma once

#include "botlab/geometry.hpp"
#include "botlab/noise.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

namespace botlab {

// F(eps, t): a scalar functional of one trajectory-noise draw.
using NoiseFunctional = std::function<double(const Vec2& eps, double t)>;
// F(eps, t) = c(t) . eps
using LinearCoefficient = std::function<Vec2(double t)>;

enum class CovarianceMethod { quadrature, monte_carlo };

struct LongRunSettings {
    std::size_t max_lag = 200;
    std::size_t t_grid = 1;        // Riemann points in t
    double tail_tolerance = 1e-3;  // relative size of the last lag term
    bool stop_early = true;        // stop at the first lag meeting the tolerance
    CovarianceMethod method = CovarianceMethod::quadrature;
    std::size_t quadrature_order = 12;
    std::size_t mc_pairs = 1000000;
    std::uint64_t seed = 0;
};

struct LongRunVariance {
    double gamma2 = 0.0;
    std::size_t lag = 0;            // last lag included
    std::vector<double> terms;      // terms[0] = int Var F, terms[k] = int Cov(F_0, F_k)
    double tail = 0.0;              // |2 terms[lag]|
    bool converged = false;
};

/// gamma^2 = int Var F dt + 2 sum_k int Cov(F(eps_0, t), F(eps_k, t)) dt for
/// stationary AR1 noise; exact per-lag covariances for linear F.
LongRunVariance long_run_variance(const LinearCoefficient& c, const Ar1Noise& noise,
                                  const LongRunSettings& settings = {});
/// General F: per-lag covariances by joint Gaussian quadrature over
/// (eps_0, eps_k), or paired Monte Carlo with common random numbers.
LongRunVariance long_run_variance(const NoiseFunctional& f, const Ar1Noise& noise,
                                  const LongRunSettings& settings = {});

struct CltResult {
    double gamma2 = 0.0;
    double emp_var = 0.0;    // of n^{-1/2} sum F(eps_k, t_k)
    double emp_mean = 0.0;
    double lln_mean_abs = 0.0;  // mean over reps of |n^{-1} sum F|
    double ks = 0.0;         // against N(0, gamma2)
    std::size_t reps = 0;
    std::size_t n = 0;
    std::vector<double> sums;
};

/// Seeded replication study of the normalized sum; replication r draws its
/// noise from the (seed, r, dependence) stream.
CltResult clt_experiment(const NoiseFunctional& f, const TrajectoryNoiseSpec& noise, std::size_t n,
                         std::size_t reps, std::uint64_t seed, double gamma2, std::size_t workers = 0);

/// `stat,value` rows: gamma2, emp_var, emp_mean, lln_mean_abs, ks, reps, n.
void write_clt_csv(std::ostream& out, const CltResult& result);

}  // namespace botlab
