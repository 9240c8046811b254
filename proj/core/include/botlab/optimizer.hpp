#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace botlab {

struct OptimizerConfig {
    std::size_t max_fun_evals = 2000;
    std::size_t max_iter = 2000;
    double x_tolerance = 1e-10;  // simplex diameter, in the optimizer's coordinates
    double f_tolerance = 1e-12;  // spread of objective values over the simplex
    double initial_step = 1.0;   // simplex edge, in the optimizer's coordinates
    std::size_t multistart = 1;
    std::size_t restarts = 1;    // fresh-simplex polishes from the best point
};

enum class StopReason { x_tolerance, f_tolerance, max_fun_evals, max_iter };

std::string to_string(StopReason reason);

struct MinimizeResult {
    Eigen::VectorXd x;
    double value = 0.0;
    std::size_t evaluations = 0;
    std::size_t iterations = 0;
    bool converged = false;
    StopReason reason = StopReason::max_fun_evals;
    std::vector<double> best_history;  // best value after each iteration
};

using Objective = std::function<double(const Eigen::VectorXd&)>;

/// Nelder-Mead simplex minimizer (reflection 1, expansion 2, contraction 0.5,
/// shrink 0.5). Stops when the simplex diameter (max-norm distance to the best
/// vertex) or the spread of objective values drops below tolerance, or when a
/// budget runs out; only the budget stops leave converged = false. +inf values
/// are allowed and act as a barrier.
MinimizeResult nelder_mead(const Objective& objective, const Eigen::VectorXd& x0, const OptimizerConfig& cfg,
                           const Eigen::VectorXd& steps);

MinimizeResult nelder_mead(const Objective& objective, const Eigen::VectorXd& x0, const OptimizerConfig& cfg);

}  // namespace botlab
