#include "support.hpp"

#include "botlab/errors.hpp"
#include "botlab/estimate.hpp"
#include "botlab/harness.hpp"
#include "botlab/inference.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

using namespace botlab;
using botlab::test::base_scenario;
using botlab::test::exact_dataset;
using botlab::test::theta_star;

namespace {

double gauss(double z, double sd) { return std::exp(-0.5 * z * z / (sd * sd)) / (sd * std::sqrt(2 * std::numbers::pi)); }

}  // namespace

TEST_SUITE("estimate") {

TEST_CASE("criterion vanishes only at the truth for exact data") {
    const Scenario s = base_scenario(NoTrajectoryNoise{});
    const BearingProblem p(exact_dataset(s), s.model, s.path);
    CHECK(criterion_Mn(theta_star(), p).value < 1e-28);
    Theta off = theta_star();
    off[0] += 0.01;
    CHECK(criterion_Mn(off, p).value > 1e-8);
    CHECK(criterion_Mn(theta_star(), exact_dataset(s), s.model, s.path) < 1e-28);
}

TEST_CASE("criterion is +inf when the trajectory hits the observer") {
    const Scenario s = base_scenario(NoTrajectoryNoise{});
    const BearingProblem p(exact_dataset(s), s.model, s.path);
    Theta th(4);
    const Vec2 o = s.path.position(1.0);
    th << o.x(), 0.0, o.y(), 0.0;  // parked on the observer's final position
    const auto v = criterion_Mn(th, p);
    CHECK(std::isinf(v.value));
    CHECK(v.singular >= 1);
}

TEST_CASE("criterion at the truth averages sigma^2 plus the noise term") {
    const Scenario s = base_scenario();
    const auto cub = trajectory_noise_cubature(s.trajectory_noise, gauss_hermite(12));
    double expected = 0.0;
    for (std::size_t k = 1; k <= s.n; ++k) {
        const double t = double(k) / s.n;
        const Vec2 x = s.model.position(s.theta_true, t);
        const double b0 = bearing(x, t, s.path).value();
        for (std::size_t j = 0; j < cub.size(); ++j) {
            const double d = bearing_residual(bearing(x + cub.nodes[j], t, s.path).value(), b0);
            expected += cub.weights[j] * d * d;
        }
    }
    expected = expected / s.n + 1e-6;
    double mean_mn = 0.0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        mean_mn += criterion_Mn(theta_star(), simulate(s, seed), s.model, s.path) / 100.0;
    }
    CHECK(mean_mn == doctest::Approx(expected).epsilon(0.1));
}

TEST_CASE("LSE recovers the truth from exact data") {
    const Scenario s = base_scenario(NoTrajectoryNoise{});
    const BearingProblem p(exact_dataset(s), s.model, s.path);
    const Theta start = theta_star() + Theta::Constant(4, 0.01);
    const auto r = lse(p, OptimizerConfig{}, start);
    CHECK(r.converged);
    CHECK((r.theta - theta_star()).cwiseAbs().maxCoeff() < 1e-6);
    // and from the pseudolinear start
    const auto r2 = lse(p);
    CHECK((r2.theta - theta_star()).cwiseAbs().maxCoeff() < 1e-6);
    CHECK_FALSE(r2.starts.empty());
}

TEST_CASE("LSE on one noisy draw lands within three asymptotic sd") {
    const Scenario s = base_scenario();
    const auto info = information(s.model, s.theta_true, s.path, s.trajectory_noise, s.observation_noise, s.n, false);
    const BearingProblem p(simulate(s, 20240601), s.model, s.path);
    const auto r = lse(p);
    CHECK(r.converged);
    for (int i = 0; i < 4; ++i) {
        const double sd = std::sqrt(info.i_m_inv(i, i) / s.n);
        CHECK(std::abs(r.theta[i] - theta_star()[i]) < 3.0 * sd);
    }
}

TEST_CASE("fewer observations than parameters is an error") {
    Scenario s = base_scenario(NoTrajectoryNoise{});
    s.n = 3;
    const BearingProblem p(exact_dataset(s), s.model, s.path);
    CHECK_THROWS_AS(lse(p), EstimationError);
    CHECK_THROWS_AS(mle(p, NoTrajectoryNoise{}, s.observation_noise, theta_star()), EstimationError);
}

TEST_CASE("marginal density") {
    const Scenario s = base_scenario();
    const auto rule = gauss_hermite(12);
    const double t = 0.4;
    const double psi = bearing(s.model.position(s.theta_true, t), t, s.path).value();
    for (double dz : {-3e-3, 0.0, 1e-3}) {
        const double p = marginal_density(psi + dz, t, s.theta_true, s.model, s.path, NoTrajectoryNoise{},
                                          s.observation_noise, rule);
        CHECK(p == doctest::Approx(gauss(dz, 1e-3)).epsilon(1e-12));
    }
    // normalization on a wide grid
    double mass = 0.0;
    const double h = 2e-6;
    for (double z = psi - 0.05; z <= psi + 0.05; z += h) {
        mass += h * marginal_density(z, t, s.theta_true, s.model, s.path, s.trajectory_noise, s.observation_noise, rule);
    }
    CHECK(std::abs(mass - 1.0) < 1e-6);
    // small trajectory noise approaches the noise-free density
    const double tiny = marginal_density(psi + 1e-3, t, s.theta_true, s.model, s.path, IsotropicGaussian{1e-7},
                                         s.observation_noise, rule);
    CHECK(tiny == doctest::Approx(gauss(1e-3, 1e-3)).epsilon(1e-6));
}

TEST_CASE("without trajectory noise J_n is the Gaussian log-likelihood of M_n") {
    const Scenario s = base_scenario(NoTrajectoryNoise{});
    const BearingProblem p(simulate(s, 9), s.model, s.path);
    for (double shift : {0.0, 0.02, -0.05}) {
        Theta th = theta_star();
        th[2] += shift;
        const double mn = criterion_Mn(th, p).value;
        const double expected = -mn / (2e-6) - std::log(1e-3 * std::sqrt(2 * std::numbers::pi));
        CHECK(loglik_Jn(th, p, NoTrajectoryNoise{}, s.observation_noise).value ==
              doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("J_n peaks at the truth on average") {
    const Scenario s = base_scenario();
    Theta off = theta_star();
    off[0] += 0.1;
    off[3] -= 0.002;
    double gap = 0.0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const BearingProblem p(simulate(s, seed), s.model, s.path);
        gap += loglik_Jn(theta_star(), p, s.trajectory_noise, s.observation_noise).value -
               loglik_Jn(off, p, s.trajectory_noise, s.observation_noise).value;
    }
    CHECK(gap > 0.0);
}

TEST_CASE("J_n is invariant under reflection of the whole scene") {
    ObserverSpec o = botlab::test::maneuvering_spec();
    ObserverSpec m = o;
    m.initial_position.y() = -o.initial_position.y();
    m.initial_heading = -o.initial_heading;
    for (auto& seg : m.segments) seg.turn_rate = -seg.turn_rate;
    const auto model = TrajectoryModel::uniform_linear(20.0);
    Dataset d;
    d.t = {0.6};
    d.y = {0.9};
    Dataset dm = d;
    dm.y = {-0.9};
    Theta th = theta_star();
    Theta thm = th;
    thm[2] = -th[2];
    thm[3] = -th[3];
    const BearingProblem p(d, model, build_observer_path(o));
    const BearingProblem pm(dm, model, build_observer_path(m));
    const ObservationNoiseSpec g{0.05};
    const double a = loglik_Jn(th, p, IsotropicGaussian{0.05}, g).value;
    const double b = loglik_Jn(thm, pm, IsotropicGaussian{0.05}, g).value;
    CHECK(a == doctest::Approx(b).epsilon(1e-12));
}

TEST_CASE("MLE coincides with LSE without trajectory noise") {
    const Scenario s = base_scenario(NoTrajectoryNoise{});
    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const BearingProblem p(simulate(s, seed), s.model, s.path);
        const auto a = lse(p);
        const auto b = mle(p, NoTrajectoryNoise{}, s.observation_noise, a.theta);
        worst = std::max(worst, (a.theta - b.theta).cwiseAbs().maxCoeff());
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("LSE is equivariant under a rigid translation") {
    const Scenario s = base_scenario();
    Scenario moved = s;
    const Vec2 shift(3.0, -1.5);
    ObserverSpec o = moved.path.spec();
    o.initial_position += shift;
    moved.path = build_observer_path(o);
    moved.theta_true[0] += shift.x();
    moved.theta_true[2] += shift.y();
    const auto info = information(s.model, s.theta_true, s.path, s.trajectory_noise, s.observation_noise, s.n, false);
    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto a = lse(BearingProblem(simulate(s, seed), s.model, s.path));
        const auto b = lse(BearingProblem(simulate(moved, seed), moved.model, moved.path));
        const Theta da = a.theta - s.theta_true;
        const Theta db = b.theta - moved.theta_true;
        for (int i = 0; i < 4; ++i) worst = std::max(worst, std::abs(da[i] - db[i]) / std::sqrt(info.i_m_inv(i, i) / s.n));
    }
    // same noise draws, so the errors agree up to optimizer tolerance
    CHECK(worst < 1e-3);
}

TEST_CASE("estimate CSV") {
    EstimateResult r;
    r.theta = theta_star();
    r.converged = true;
    r.evaluations = 12;
    std::ostringstream os;
    write_estimate_csv(os, r, coordinate_names(TrajectoryModel::uniform_linear(20.0)));
    CHECK(os.str() == "coord,estimate,converged,evals\nx0,2.7999999999999998,1,12\nvx,0.22500000000000001,1,12\n"
                      "y0,3.7999999999999998,1,12\nvy,-0.14999999999999999,1,12\n");
    CHECK(coordinate_names(TrajectoryModel::polynomial(2, 20.0)) == std::vector<std::string>{"a1", "a2", "b1", "b2"});
}

}
