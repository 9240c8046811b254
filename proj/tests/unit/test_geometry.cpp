#include "support.hpp"

#include "botlab/errors.hpp"
#include "botlab/geometry.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace botlab;
using botlab::test::maneuvering_spec;
using botlab::test::theta_star;

TEST_SUITE("geometry") {

TEST_CASE("trajectory positions") {
    const auto model = TrajectoryModel::uniform_linear(20.0);
    const Theta th = theta_star();
    const Vec2 end = model.position(th, 1.0);
    CHECK(end.x() == doctest::Approx(7.3).epsilon(1e-14));
    CHECK(end.y() == doctest::Approx(0.8).epsilon(1e-14));
    const Vec2 mid = model.position(th, 0.5);
    CHECK(mid.x() == doctest::Approx(5.05).epsilon(1e-14));
    CHECK(mid.y() == doctest::Approx(2.3).epsilon(1e-14));
    const Theta zero = Theta::Zero(4);
    for (double t : {0.0, 0.3, 1.0}) CHECK(model.position(zero, t).norm() == 0.0);
    CHECK_THROWS_AS(model.check_dimension(Theta::Zero(3)), ConfigError);
}

TEST_CASE("polynomial basis is finite and continuous") {
    const auto model = TrajectoryModel::polynomial(3, 20.0);
    CHECK(model.dimension() == 6);
    double prev = model.basis(0.0)[2];
    for (int k = 1; k <= 10000; ++k) {
        const auto e = model.basis(k / 10000.0);
        CHECK(std::isfinite(e.sum()));
        CHECK(std::abs(e[2] - prev) < 0.1);
        prev = e[2];
    }
    CHECK(model.basis(1.0)[2] == doctest::Approx(400.0));
}

TEST_CASE("straight observer") {
    const ObserverPath p(straight_observer(Vec2::Zero(), 0.0, 0.25, 20.0));
    CHECK((p.position(1.0) - Vec2(5.0, 0.0)).norm() < 1e-12);
    CHECK(p.position(0.0).norm() == 0.0);
}

TEST_CASE("maneuvering observer keeps constant speed and covers 5 km") {
    const ObserverPath p = build_observer_path(maneuvering_spec());
    const double T = p.duration();
    const double h = 1e-5;
    double worst = 0.0;
    for (int k = 1; k < 2000; ++k) {
        const double t = k / 2000.0;
        const double v = (p.position(t + h) - p.position(t - h)).norm() / (2 * h * T);
        worst = std::max(worst, std::abs(v - 0.25) / 0.25);
    }
    CHECK(worst < 1e-6);

    double length = 0.0;
    const int steps = 200000;
    for (int k = 0; k < steps; ++k) length += (p.position((k + 1.0) / steps) - p.position(double(k) / steps)).norm();
    CHECK(length == doctest::Approx(5.0).epsilon(1e-8));

    // the blended turn rate passes through the leg values
    CHECK(p.turn_rate(3.0) == doctest::Approx(0.2).epsilon(1e-9));
    CHECK(p.turn_rate(8.5) == doctest::Approx(0.0));
    CHECK(p.turn_rate(12.5) == doctest::Approx(-0.22).epsilon(1e-9));
}

TEST_CASE("segment table must tile the horizon") {
    ObserverSpec s = maneuvering_spec();
    s.segments[1].start_s = 7.0;  // gap
    CHECK_THROWS_AS(build_observer_path(s), ConfigError);
    s = maneuvering_spec();
    s.segments.back().end_s = 19.0;
    CHECK_THROWS_AS(build_observer_path(s), ConfigError);
}

TEST_CASE("bearings") {
    CHECK(bearing(Vec2(1, 1), Vec2::Zero()).value() == doctest::Approx(std::numbers::pi / 4));
    CHECK(bearing(Vec2(-1, 0), Vec2::Zero()).value() == doctest::Approx(std::numbers::pi));
    CHECK(bearing(Vec2(1 + std::sqrt(3.0), 3), Vec2(1, 2)).value() == doctest::Approx(std::numbers::pi / 6));
    CHECK_THROWS_AS(bearing(Vec2(1, 2), Vec2(1, 2)), SingularGeometryError);
}

TEST_CASE("wrapped residuals") {
    CHECK(bearing_residual(0.1, -0.1) == doctest::Approx(0.2));
    CHECK(bearing_residual(std::numbers::pi - 0.01, -std::numbers::pi + 0.01) == doctest::Approx(-0.02));
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    for (int i = 0; i < 1000; ++i) {
        const double a = u(rng), b = u(rng);
        CHECK(bearing_residual(a, a) == 0.0);
        const double r = bearing_residual(a, b);
        CHECK(std::abs(r) <= std::numbers::pi);
        if (std::abs(std::abs(r) - std::numbers::pi) > 1e-9) CHECK(bearing_residual(b, a) == doctest::Approx(-r));
    }
}

TEST_CASE("x-gradient of the bearing") {
    const Vec2 o(0.3, -1.0);
    CHECK(grad_x_bearing(o + Vec2(2, 0), o).norm() == doctest::Approx(0.5).epsilon(1e-15));
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-20.0, 20.0);
    for (int i = 0; i < 1000; ++i) {
        const Vec2 x(u(rng), u(rng));
        const Vec2 obs(u(rng), u(rng));
        CHECK(std::abs(grad_x_bearing(x, obs).norm() * (x - obs).norm() - 1.0) < 1e-12);
    }
}

TEST_CASE("theta-gradient structure") {
    const auto model = TrajectoryModel::uniform_linear(20.0);
    const ObserverPath p = build_observer_path(maneuvering_spec());
    const Theta th = theta_star();
    for (double t : {0.1, 0.5, 0.9}) {
        const Vec2 d = model.position(th, t) - p.position(t);
        const double r = d.norm();
        const double beta = std::atan2(d.y(), d.x());
        const auto g = grad_theta_bearing(model, th, t, p);
        CHECK(g[0] == doctest::Approx(-std::sin(beta) / r).epsilon(1e-12));
        CHECK(g[2] == doctest::Approx(std::cos(beta) / r).epsilon(1e-12));
        CHECK(g[1] == doctest::Approx(g[0] * 20.0 * t).epsilon(1e-12));
        CHECK(g[3] == doctest::Approx(g[2] * 20.0 * t).epsilon(1e-12));
    }
}

TEST_CASE("analytic derivatives match central differences") {
    const auto model = TrajectoryModel::uniform_linear(20.0);
    const ObserverPath p = build_observer_path(maneuvering_spec());
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> jitter(-0.5, 0.5), ut(0.0, 1.0);
    double worst_g = 0.0, worst_h = 0.0;
    for (int i = 0; i < 100; ++i) {
        Theta th = theta_star();
        th[0] += jitter(rng);
        th[2] += jitter(rng);
        th[1] += 0.02 * jitter(rng);
        th[3] += 0.02 * jitter(rng);
        const double t = ut(rng);
        const auto psi = [&](const Theta& x) { return bearing(model.position(x, t), p.position(t)).value(); };
        const auto g = grad_theta_bearing(model, th, t, p);
        const auto H = hess_theta_bearing(model, th, t, p);
        Eigen::VectorXd gf(4);
        Eigen::MatrixXd hf(4, 4);
        for (int a = 0; a < 4; ++a) {
            const double h = a % 2 ? 1e-5 : 1e-4;
            Theta up = th, dn = th;
            up[a] += h;
            dn[a] -= h;
            gf[a] = bearing_residual(psi(up), psi(dn)) / (2 * h);
            hf.col(a) = (grad_theta_bearing(model, up, t, p) - grad_theta_bearing(model, dn, t, p)) / (2 * h);
        }
        worst_g = std::max(worst_g, (g - gf).norm() / g.norm());
        worst_h = std::max(worst_h, (H - hf).norm() / H.norm());
        CHECK((H - H.transpose()).norm() < 1e-12 * H.norm());
    }
    CHECK(worst_g < 1e-6);
    CHECK(worst_h < 1e-6);
}

TEST_CASE("geometry validity") {
    const auto model = TrajectoryModel::uniform_linear(20.0);
    const Theta th = theta_star();
    const auto ok = validate_geometry(model, th, build_observer_path(maneuvering_spec()), 6.0);
    CHECK(ok.passed());
    CHECK(ok.min_range >= 6.0);
    CHECK(ok.bearing_span < std::numbers::pi);
    CHECK_FALSE(ok.observability_risk);

    const auto on_target = validate_geometry(model, th, ObserverPath(straight_observer(Vec2(2.8, 3.8), 0.0, 0.25, 20.0)), 6.0);
    CHECK_FALSE(on_target.passed());
    CHECK(on_target.min_range == 0.0);

    ObserverSpec straight = maneuvering_spec();
    straight.segments = {{0.0, 20.0, 0.0}};
    const auto risky = validate_geometry(model, th, build_observer_path(straight), 6.0);
    CHECK(risky.passed());
    CHECK(risky.observability_risk);
    CHECK(risky.gram_condition > 1e8);
}

}
