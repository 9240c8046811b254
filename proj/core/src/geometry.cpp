#include "botlab/geometry.hpp"

#include "botlab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <utility>

namespace botlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// C-infinity step: 0 for x <= -1, 1 for x >= 1.
double smooth_step(double x) {
    if (x <= -1.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double y = 0.5 * (x + 1.0);
    const double a = std::exp(-1.0 / y);
    const double b = std::exp(-1.0 / (1.0 - y));
    return a / (a + b);
}

double condition_number(const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();
    const double lo = ev.minCoeff();
    const double hi = ev.maxCoeff();
    if (lo <= 0.0) return std::numeric_limits<double>::infinity();
    return hi / lo;
}

}  // namespace

TrajectoryModel::TrajectoryModel(std::vector<BasisFunction> basis, double duration_s, std::string name)
    : basis_(std::move(basis)), duration_(duration_s), name_(std::move(name)) {
    if (basis_.empty()) throw ConfigError("trajectory model needs at least one basis function");
    if (!(duration_ > 0.0) || !std::isfinite(duration_)) {
        throw ConfigError("trajectory model duration must be positive");
    }
    constexpr int kSamples = 10000;
    for (std::size_t i = 0; i < basis_.size(); ++i) {
        for (int k = 0; k <= kSamples; ++k) {
            const double t = static_cast<double>(k) / kSamples;
            if (!std::isfinite(basis_[i](t))) {
                std::ostringstream os;
                os << "basis function " << i + 1 << " is not finite at t=" << t;
                throw ConfigError(os.str());
            }
        }
    }
}

TrajectoryModel TrajectoryModel::uniform_linear(double duration_s) {
    return TrajectoryModel({[](double) { return 1.0; }, [duration_s](double t) { return duration_s * t; }},
                           duration_s, "uniform_linear");
}

TrajectoryModel TrajectoryModel::polynomial(std::size_t order, double duration_s) {
    if (order == 0) throw ConfigError("polynomial model needs order >= 1");
    std::vector<BasisFunction> basis;
    basis.reserve(order);
    for (std::size_t i = 0; i < order; ++i) {
        basis.emplace_back([i, duration_s](double t) { return std::pow(duration_s * t, static_cast<double>(i)); });
    }
    return TrajectoryModel(std::move(basis), duration_s, "polynomial");
}

Eigen::VectorXd TrajectoryModel::basis(double t) const {
    Eigen::VectorXd e(basis_.size());
    for (std::size_t i = 0; i < basis_.size(); ++i) e[static_cast<Eigen::Index>(i)] = basis_[i](t);
    return e;
}

void TrajectoryModel::check_dimension(const Theta& theta) const {
    if (static_cast<std::size_t>(theta.size()) != dimension()) {
        std::ostringstream os;
        os << "parameter has length " << theta.size() << " but the trajectory model needs " << dimension();
        throw ConfigError(os.str());
    }
}

Vec2 TrajectoryModel::position(const Theta& theta, const Eigen::VectorXd& e) const {
    const auto p = static_cast<Eigen::Index>(basis_.size());
    return {theta.head(p).dot(e), theta.tail(p).dot(e)};
}

Vec2 TrajectoryModel::position(const Theta& theta, double t) const {
    check_dimension(theta);
    return position(theta, basis(t));
}

Vec2 eval_trajectory(const TrajectoryModel& model, const Theta& theta, double t) {
    return model.position(theta, t);
}

ObserverPath::ObserverPath(ObserverSpec spec) : spec_(std::move(spec)) {
    if (!(spec_.duration > 0.0)) throw ConfigError("observer duration must be positive");
    if (!(spec_.speed >= 0.0)) throw ConfigError("observer speed must be non-negative");
    if (spec_.integration_steps < 1) throw ConfigError("observer integration_steps must be >= 1");
    if (spec_.segments.empty()) throw ConfigError("observer needs at least one segment");
    if (!(spec_.transition_half_width >= 0.0)) throw ConfigError("transition half-width must be >= 0");

    constexpr double kTol = 1e-9;
    double cursor = 0.0;
    for (std::size_t i = 0; i < spec_.segments.size(); ++i) {
        const auto& seg = spec_.segments[i];
        std::ostringstream os;
        if (seg.start_s < cursor - kTol) {
            os << "observer segment " << i + 1 << " overlaps the previous one";
            throw ConfigError(os.str());
        }
        if (seg.start_s > cursor + kTol) {
            os << "observer segments leave a gap at " << cursor << " s";
            throw ConfigError(os.str());
        }
        if (!(seg.end_s > seg.start_s)) {
            os << "observer segment " << i + 1 << " has non-positive length";
            throw ConfigError(os.str());
        }
        const double len = seg.end_s - seg.start_s;
        // Each interior boundary blends over +-half_width; keep blends disjoint.
        const bool has_left = i > 0;
        const bool has_right = i + 1 < spec_.segments.size();
        const double needed = spec_.transition_half_width * ((has_left ? 1.0 : 0.0) + (has_right ? 1.0 : 0.0));
        if (needed > len + kTol) {
            os << "observer segment " << i + 1 << " is shorter than its transitions";
            throw ConfigError(os.str());
        }
        cursor = seg.end_s;
    }
    if (std::abs(cursor - spec_.duration) > kTol) {
        throw ConfigError("observer segments do not end at the scenario duration");
    }

    step_ = spec_.duration / spec_.integration_steps;
    nodes_.reserve(static_cast<std::size_t>(spec_.integration_steps) + 1);
    State s{spec_.initial_heading, spec_.initial_position.x(), spec_.initial_position.y()};
    nodes_.push_back(s);
    for (int i = 0; i < spec_.integration_steps; ++i) {
        s = rk4_step(i * step_, s, step_);
        nodes_.push_back(s);
    }
}

double ObserverPath::turn_rate(double seconds) const {
    const auto& segs = spec_.segments;
    double rate = segs.front().turn_rate;
    const double h = spec_.transition_half_width;
    for (std::size_t i = 1; i < segs.size(); ++i) {
        const double boundary = segs[i].start_s;
        const double jump = segs[i].turn_rate - segs[i - 1].turn_rate;
        if (jump == 0.0) continue;
        if (h > 0.0) {
            rate += jump * smooth_step((seconds - boundary) / h);
        } else if (seconds >= boundary) {
            rate += jump;
        }
    }
    return rate;
}

ObserverPath::State ObserverPath::derivative(double seconds, const State& s) const {
    return {turn_rate(seconds), spec_.speed * std::cos(s.heading), spec_.speed * std::sin(s.heading)};
}

ObserverPath::State ObserverPath::rk4_step(double seconds, const State& s, double dt) const {
    auto axpy = [](const State& a, double c, const State& d) {
        return State{a.heading + c * d.heading, a.x + c * d.x, a.y + c * d.y};
    };
    const State k1 = derivative(seconds, s);
    const State k2 = derivative(seconds + 0.5 * dt, axpy(s, 0.5 * dt, k1));
    const State k3 = derivative(seconds + 0.5 * dt, axpy(s, 0.5 * dt, k2));
    const State k4 = derivative(seconds + dt, axpy(s, dt, k3));
    const double c = dt / 6.0;
    return {s.heading + c * (k1.heading + 2.0 * k2.heading + 2.0 * k3.heading + k4.heading),
            s.x + c * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x),
            s.y + c * (k1.y + 2.0 * k2.y + 2.0 * k3.y + k4.y)};
}

ObserverPath::State ObserverPath::state_at(double t) const {
    const double seconds = std::clamp(t, 0.0, 1.0) * spec_.duration;
    const double pos = seconds / step_;
    const double nearest = std::round(pos);
    // Observation times k/n usually land on grid nodes.
    if (std::abs(pos - nearest) < 1e-9) {
        return nodes_[static_cast<std::size_t>(nearest)];
    }
    const auto idx = std::min(static_cast<std::size_t>(pos), nodes_.size() - 2);
    const double base = static_cast<double>(idx) * step_;
    return rk4_step(base, nodes_[idx], seconds - base);
}

Vec2 ObserverPath::position(double t) const {
    const State s = state_at(t);
    return {s.x, s.y};
}

double ObserverPath::heading(double t) const { return state_at(t).heading; }

Vec2 ObserverPath::velocity(double t) const {
    const double h = heading(t);
    return {spec_.speed * std::cos(h), spec_.speed * std::sin(h)};
}

ObserverPath build_observer_path(const ObserverSpec& spec) { return ObserverPath(spec); }

ObserverSpec straight_observer(const Vec2& start, double heading, double speed, double duration) {
    ObserverSpec spec;
    spec.initial_position = start;
    spec.initial_heading = heading;
    spec.speed = speed;
    spec.duration = duration;
    spec.segments = {TurnSegment{0.0, duration, 0.0}};
    return spec;
}

double wrap_angle(double angle) noexcept {
    double r = std::remainder(angle, kTwoPi);
    if (r <= -std::numbers::pi) r += kTwoPi;
    return r;
}

Bearing bearing(const Vec2& x, const Vec2& observer) {
    const double dx = x.x() - observer.x();
    const double dy = x.y() - observer.y();
    if (dx == 0.0 && dy == 0.0) {
        throw SingularGeometryError("target position coincides with the observer");
    }
    return Bearing(std::atan2(dy, dx));
}

Bearing bearing(const Vec2& x, double t, const ObserverPath& path) { return bearing(x, path.position(t)); }

double bearing_residual(double a, double b) noexcept { return wrap_angle(a - b); }

double bearing_residual(Bearing a, Bearing b) noexcept { return bearing_residual(a.value(), b.value()); }

Vec2 grad_x_bearing(const Vec2& x, const Vec2& observer) {
    const Vec2 d = x - observer;
    const double r2 = d.squaredNorm();
    if (r2 == 0.0) throw SingularGeometryError("bearing gradient undefined at the observer");
    return {-d.y() / r2, d.x() / r2};
}

Mat2 hess_x_bearing(const Vec2& x, const Vec2& observer) {
    const Vec2 d = x - observer;
    const double r2 = d.squaredNorm();
    if (r2 == 0.0) throw SingularGeometryError("bearing hessian undefined at the observer");
    const double r4 = r2 * r2;
    Mat2 h;
    h(0, 0) = 2.0 * d.x() * d.y() / r4;
    h(1, 1) = -h(0, 0);
    h(0, 1) = h(1, 0) = (d.y() * d.y() - d.x() * d.x()) / r4;
    return h;
}

Eigen::VectorXd lift_gradient(const Vec2& g, const Eigen::VectorXd& e) {
    const auto p = e.size();
    Eigen::VectorXd out(2 * p);
    out.head(p) = g.x() * e;
    out.tail(p) = g.y() * e;
    return out;
}

Eigen::VectorXd grad_theta_bearing(const TrajectoryModel& model, const Theta& theta, double t,
                                   const ObserverPath& path) {
    model.check_dimension(theta);
    const Eigen::VectorXd e = model.basis(t);
    return lift_gradient(grad_x_bearing(model.position(theta, e), path.position(t)), e);
}

Eigen::MatrixXd hess_theta_bearing(const TrajectoryModel& model, const Theta& theta, double t,
                                   const ObserverPath& path) {
    model.check_dimension(theta);
    const Eigen::VectorXd e = model.basis(t);
    const Mat2 h = hess_x_bearing(model.position(theta, e), path.position(t));
    const auto p = e.size();
    const Eigen::MatrixXd eet = e * e.transpose();
    Eigen::MatrixXd out(2 * p, 2 * p);
    out.topLeftCorner(p, p) = h(0, 0) * eet;
    out.topRightCorner(p, p) = h(0, 1) * eet;
    out.bottomLeftCorner(p, p) = h(1, 0) * eet;
    out.bottomRightCorner(p, p) = h(1, 1) * eet;
    return out;
}

Eigen::MatrixXd bearing_gradient_gram(const TrajectoryModel& model, const Theta& theta,
                                      const ObserverPath& path, std::size_t grid) {
    model.check_dimension(theta);
    if (grid == 0) throw ConfigError("integration grid must be positive");
    const auto m = static_cast<Eigen::Index>(model.dimension());
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(m, m);
    for (std::size_t k = 1; k <= grid; ++k) {
        const double t = static_cast<double>(k) / static_cast<double>(grid);
        const Eigen::VectorXd e = model.basis(t);
        const Eigen::VectorXd g = lift_gradient(grad_x_bearing(model.position(theta, e), path.position(t)), e);
        gram.selfadjointView<Eigen::Lower>().rankUpdate(g);
    }
    gram.triangularView<Eigen::StrictlyUpper>() = gram.transpose();
    return gram / static_cast<double>(grid);
}

ValidityReport validate_geometry(const TrajectoryModel& model, const Theta& theta, const ObserverPath& path,
                                 double r_min, std::size_t grid, double condition_limit) {
    model.check_dimension(theta);
    if (grid < 2) throw ConfigError("validity grid must have at least two points");
    ValidityReport report;
    report.min_range = std::numeric_limits<double>::infinity();
    report.max_range = 0.0;
    double unwrapped = 0.0;
    double previous = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    bool singular = false;
    for (std::size_t k = 0; k <= grid; ++k) {
        const double t = static_cast<double>(k) / static_cast<double>(grid);
        const Vec2 d = model.position(theta, t) - path.position(t);
        const double r = d.norm();
        report.min_range = std::min(report.min_range, r);
        report.max_range = std::max(report.max_range, r);
        if (r == 0.0) {
            singular = true;
            continue;
        }
        const double b = std::atan2(d.y(), d.x());
        if (k == 0) {
            unwrapped = b;
            lo = hi = b;
        } else {
            unwrapped += bearing_residual(b, previous);
            lo = std::min(lo, unwrapped);
            hi = std::max(hi, unwrapped);
        }
        previous = b;
    }
    report.bearing_span = hi - lo;
    report.range_ok = !singular && report.min_range >= r_min;
    report.span_ok = !singular && report.bearing_span < std::numbers::pi;
    if (singular) {
        report.gram_condition = std::numeric_limits<double>::infinity();
    } else {
        report.gram_condition = condition_number(bearing_gradient_gram(model, theta, path, std::min<std::size_t>(grid, 4000)));
    }
    report.observability_risk = !(report.gram_condition < condition_limit);
    return report;
}

}  // namespace botlab
