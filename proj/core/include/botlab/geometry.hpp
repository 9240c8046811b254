#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace botlab {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

// Parameter point. Ordering follows the linear-in-basis trajectory model:
// (a_1..a_p, b_1..b_p), so a uniform linear motion is (x0, vx, y0, vy).
using Theta = Eigen::VectorXd;

/// Target trajectory that is linear in its parameters:
///   S_theta(t) = (sum_i a_i e_i(t), sum_i b_i e_i(t)),   t in [0, 1].
/// Positions are in km; the basis may carry the physical duration, e.g.
/// e_2(t) = T * t turns b_2 into a velocity in km/s.
class TrajectoryModel {
public:
    using BasisFunction = std::function<double(double)>;

    TrajectoryModel(std::vector<BasisFunction> basis, double duration_s, std::string name);

    /// e_1 = 1, e_2 = T t.
    static TrajectoryModel uniform_linear(double duration_s);
    /// e_i = (T t)^(i-1), i = 1..order.
    static TrajectoryModel polynomial(std::size_t order, double duration_s);

    [[nodiscard]] std::size_t basis_size() const noexcept { return basis_.size(); }
    [[nodiscard]] std::size_t dimension() const noexcept { return 2 * basis_.size(); }
    [[nodiscard]] double duration() const noexcept { return duration_; }
    [[nodiscard]] const std::string& name() const noexcept { return name_; }

    [[nodiscard]] Eigen::VectorXd basis(double t) const;
    [[nodiscard]] Vec2 position(const Theta& theta, double t) const;
    [[nodiscard]] Vec2 position(const Theta& theta, const Eigen::VectorXd& basis_at_t) const;

    // Throws ConfigError on a length mismatch.
    void check_dimension(const Theta& theta) const;

private:
    std::vector<BasisFunction> basis_;
    double duration_;
    std::string name_;
};

Vec2 eval_trajectory(const TrajectoryModel& model, const Theta& theta, double t);

struct TurnSegment {
    double start_s = 0.0;
    double end_s = 0.0;
    double turn_rate = 0.0;  // rad/s, positive is anticlockwise
};

struct ObserverSpec {
    Vec2 initial_position = Vec2::Zero();  // km
    double initial_heading = 0.0;          // rad
    double speed = 0.25;                   // km/s
    std::vector<TurnSegment> segments;     // must tile [0, duration]
    double transition_half_width = 0.5;    // s
    double duration = 20.0;                // s
    int integration_steps = 4000;
};

/// Constant-speed observer whose turn rate is a C-infinity blend of piecewise
/// constant rates. The kinematics are integrated once with RK4 on a fixed
/// grid; positions between grid nodes take one partial RK4 step.
class ObserverPath {
public:
    explicit ObserverPath(ObserverSpec spec);

    [[nodiscard]] Vec2 position(double t) const;
    [[nodiscard]] Vec2 velocity(double t) const;  // km/s
    [[nodiscard]] double heading(double t) const;
    [[nodiscard]] double turn_rate(double seconds) const;
    [[nodiscard]] double duration() const noexcept { return spec_.duration; }
    [[nodiscard]] const ObserverSpec& spec() const noexcept { return spec_; }

private:
    struct State {
        double heading;
        double x;
        double y;
    };

    [[nodiscard]] State derivative(double seconds, const State& s) const;
    [[nodiscard]] State rk4_step(double seconds, const State& s, double dt) const;
    [[nodiscard]] State state_at(double t) const;

    ObserverSpec spec_;
    double step_ = 0.0;
    std::vector<State> nodes_;
};

// Validates the segment table and integrates the path.
ObserverPath build_observer_path(const ObserverSpec& spec);

/// Straight-line observer: a single zero-rate segment.
ObserverSpec straight_observer(const Vec2& start, double heading, double speed, double duration);

/// Wraps an angle into (-pi, pi].
double wrap_angle(double angle) noexcept;

class Bearing {
public:
    constexpr Bearing() = default;
    explicit Bearing(double radians) noexcept : value_(wrap_angle(radians)) {}

    [[nodiscard]] double value() const noexcept { return value_; }

private:
    double value_ = 0.0;
};

/// Full-plane angle of x - observer. Throws SingularGeometryError if they coincide.
Bearing bearing(const Vec2& x, const Vec2& observer);
Bearing bearing(const Vec2& x, double t, const ObserverPath& path);

/// (a - b) wrapped into (-pi, pi].
double bearing_residual(Bearing a, Bearing b) noexcept;
double bearing_residual(double a, double b) noexcept;

Vec2 grad_x_bearing(const Vec2& x, const Vec2& observer);
Mat2 hess_x_bearing(const Vec2& x, const Vec2& observer);

Eigen::VectorXd grad_theta_bearing(const TrajectoryModel& model, const Theta& theta, double t,
                                   const ObserverPath& path);
Eigen::MatrixXd hess_theta_bearing(const TrajectoryModel& model, const Theta& theta, double t,
                                   const ObserverPath& path);

// Lifts an x-gradient to theta through the basis: [g_x e; g_y e].
Eigen::VectorXd lift_gradient(const Vec2& grad_x, const Eigen::VectorXd& basis_at_t);

/// Riemann average over t_k = k / grid of grad_theta grad_theta^T.
Eigen::MatrixXd bearing_gradient_gram(const TrajectoryModel& model, const Theta& theta,
                                      const ObserverPath& path, std::size_t grid);

struct ValidityReport {
    double min_range = 0.0;      // km
    double max_range = 0.0;      // km
    double bearing_span = 0.0;   // rad, span of the unwrapped bearing track
    double gram_condition = 0.0; // condition number of the gradient Gram matrix
    bool range_ok = false;
    bool span_ok = false;
    bool observability_risk = false;

    [[nodiscard]] bool passed() const noexcept { return range_ok && span_ok; }
};

ValidityReport validate_geometry(const TrajectoryModel& model, const Theta& theta,
                                 const ObserverPath& path, double r_min,
                                 std::size_t grid = 10000, double condition_limit = 1e8);

}  // namespace botlab
