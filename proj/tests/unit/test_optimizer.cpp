#include "botlab/optimizer.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace botlab;

TEST_SUITE("optimizer") {

TEST_CASE("quadratic bowl") {
    const Eigen::Vector3d c(1.0, -2.0, 0.5);
    const Objective f = [&](const Eigen::VectorXd& x) { return (x - c).squaredNorm() + 3.0; };
    for (const Eigen::Vector3d start : {Eigen::Vector3d(0, 0, 0), Eigen::Vector3d(10, 10, -10)}) {
        const auto r = nelder_mead(f, start, OptimizerConfig{});
        CHECK(r.converged);
        CHECK(r.value - 3.0 < 1e-8);
        CHECK((r.x - c).norm() < 1e-5);
    }
    // the argmin itself, once the value spread can resolve it
    const Objective g = [&](const Eigen::VectorXd& x) { return (x - c).squaredNorm(); };
    OptimizerConfig tight;
    tight.f_tolerance = 1e-24;
    tight.x_tolerance = 1e-11;
    tight.max_fun_evals = 5000;
    tight.max_iter = 5000;
    const auto r = nelder_mead(g, Eigen::Vector3d(10, 10, -10), tight);
    CHECK(r.converged);
    CHECK((r.x - c).norm() < 1e-8);
}

TEST_CASE("Rosenbrock from (-1.2, 1)") {
    const Objective f = [](const Eigen::VectorXd& x) {
        return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2);
    };
    OptimizerConfig cfg;
    cfg.restarts = 0;
    const auto r = nelder_mead(f, Eigen::Vector2d(-1.2, 1.0), cfg);
    CHECK(r.evaluations <= 2000);
    CHECK(r.value < 1e-6);
}

TEST_CASE("infinite values act as a barrier") {
    const Objective f = [](const Eigen::VectorXd& x) {
        if ((x.array().abs() > 1.0).any()) return std::numeric_limits<double>::infinity();
        return (x - Eigen::Vector2d(3.0, 0.0)).squaredNorm();
    };
    const auto r = nelder_mead(f, Eigen::Vector2d(0.0, 0.0), OptimizerConfig{});
    CHECK((r.x.array().abs() <= 1.0).all());
    CHECK(std::isfinite(r.value));
    CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("best value never increases") {
    const Objective f = [](const Eigen::VectorXd& x) {
        return std::pow(x[0] - 1, 4) + std::pow(x[1] + x[0], 2) + std::sin(3 * x[1]) * 0.1;
    };
    const auto r = nelder_mead(f, Eigen::Vector2d(2.0, 2.0), OptimizerConfig{});
    REQUIRE(r.best_history.size() > 2);
    for (std::size_t i = 1; i < r.best_history.size(); ++i) CHECK(r.best_history[i] <= r.best_history[i - 1]);
}

TEST_CASE("budget exhaustion is reported as non-convergence") {
    const Objective f = [](const Eigen::VectorXd& x) { return x.squaredNorm(); };
    OptimizerConfig cfg;
    cfg.max_fun_evals = 20;
    const auto r = nelder_mead(f, Eigen::VectorXd::Constant(6, 5.0), cfg);
    CHECK_FALSE(r.converged);
    CHECK(r.reason == StopReason::max_fun_evals);
    CHECK(r.evaluations <= 20 + 7);
    CHECK(to_string(StopReason::x_tolerance) == "x_tolerance");
}

}
