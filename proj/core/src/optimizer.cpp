#include "botlab/optimizer.hpp"

#include "botlab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace botlab {

std::string to_string(StopReason reason) {
    switch (reason) {
        case StopReason::x_tolerance: return "x_tolerance";
        case StopReason::f_tolerance: return "f_tolerance";
        case StopReason::max_fun_evals: return "max_fun_evals";
        case StopReason::max_iter: return "max_iter";
    }
    return "unknown";
}

MinimizeResult nelder_mead(const Objective& objective, const Eigen::VectorXd& x0, const OptimizerConfig& cfg,
                           const Eigen::VectorXd& steps) {
    const auto dim = x0.size();
    if (dim == 0) throw EstimationError("cannot minimize over an empty parameter");
    if (steps.size() != dim) throw EstimationError("simplex steps do not match the parameter length");
    if (cfg.max_fun_evals == 0 || cfg.max_iter == 0) throw ConfigError("optimizer budgets must be positive");
    if (!(cfg.x_tolerance > 0.0) || !(cfg.f_tolerance > 0.0)) {
        throw ConfigError("optimizer tolerances must be positive");
    }

    MinimizeResult result;
    auto eval = [&](const Eigen::VectorXd& x) {
        ++result.evaluations;
        const double f = objective(x);
        return std::isnan(f) ? std::numeric_limits<double>::infinity() : f;
    };

    const double f0 = eval(x0);
    if (!std::isfinite(f0)) throw EstimationError("objective is not finite at the starting point");

    const auto nv = static_cast<std::size_t>(dim) + 1;
    std::vector<Eigen::VectorXd> simplex(nv, x0);
    std::vector<double> f(nv, f0);
    for (Eigen::Index i = 0; i < dim; ++i) {
        auto& v = simplex[static_cast<std::size_t>(i) + 1];
        v[i] += steps[i] != 0.0 ? steps[i] : 0.00025;
        f[static_cast<std::size_t>(i) + 1] = eval(v);
    }

    std::vector<std::size_t> order(nv);
    auto sort_simplex = [&] {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return f[a] < f[b]; });
        std::vector<Eigen::VectorXd> s2(nv);
        std::vector<double> f2(nv);
        for (std::size_t i = 0; i < nv; ++i) {
            s2[i] = std::move(simplex[order[i]]);
            f2[i] = f[order[i]];
        }
        simplex = std::move(s2);
        f = std::move(f2);
    };

    const double rho = 1.0, chi = 2.0, gamma = 0.5, sigma = 0.5;
    sort_simplex();
    while (true) {
        double diameter = 0.0;
        for (std::size_t i = 1; i < nv; ++i) {
            diameter = std::max(diameter, (simplex[i] - simplex[0]).lpNorm<Eigen::Infinity>());
        }
        const double spread = f[nv - 1] - f[0];
        if (diameter <= cfg.x_tolerance) {
            result.converged = true;
            result.reason = StopReason::x_tolerance;
            break;
        }
        if (std::isfinite(spread) && spread <= cfg.f_tolerance) {
            result.converged = true;
            result.reason = StopReason::f_tolerance;
            break;
        }
        if (result.evaluations >= cfg.max_fun_evals) {
            result.reason = StopReason::max_fun_evals;
            break;
        }
        if (result.iterations >= cfg.max_iter) {
            result.reason = StopReason::max_iter;
            break;
        }
        ++result.iterations;

        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(dim);
        for (std::size_t i = 0; i + 1 < nv; ++i) centroid += simplex[i];
        centroid /= static_cast<double>(nv - 1);
        const Eigen::VectorXd& worst = simplex[nv - 1];

        const Eigen::VectorXd xr = centroid + rho * (centroid - worst);
        const double fr = eval(xr);
        bool shrink = false;
        if (fr < f[0]) {
            const Eigen::VectorXd xe = centroid + rho * chi * (centroid - worst);
            const double fe = eval(xe);
            if (fe < fr) {
                simplex[nv - 1] = xe;
                f[nv - 1] = fe;
            } else {
                simplex[nv - 1] = xr;
                f[nv - 1] = fr;
            }
        } else if (fr < f[nv - 2]) {
            simplex[nv - 1] = xr;
            f[nv - 1] = fr;
        } else if (fr < f[nv - 1]) {
            const Eigen::VectorXd xc = centroid + gamma * (xr - centroid);
            const double fc = eval(xc);
            if (fc <= fr) {
                simplex[nv - 1] = xc;
                f[nv - 1] = fc;
            } else {
                shrink = true;
            }
        } else {
            const Eigen::VectorXd xcc = centroid + gamma * (worst - centroid);
            const double fcc = eval(xcc);
            if (fcc < f[nv - 1]) {
                simplex[nv - 1] = xcc;
                f[nv - 1] = fcc;
            } else {
                shrink = true;
            }
        }
        if (shrink) {
            for (std::size_t i = 1; i < nv; ++i) {
                simplex[i] = simplex[0] + sigma * (simplex[i] - simplex[0]);
                f[i] = eval(simplex[i]);
            }
        }
        sort_simplex();
        result.best_history.push_back(f[0]);
    }
    result.x = simplex[0];
    result.value = f[0];
    return result;
}

MinimizeResult nelder_mead(const Objective& objective, const Eigen::VectorXd& x0, const OptimizerConfig& cfg) {
    return nelder_mead(objective, x0, cfg, Eigen::VectorXd::Constant(x0.size(), cfg.initial_step));
}

}  // namespace botlab
