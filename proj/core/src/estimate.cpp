#include "botlab/estimate.hpp"

#include "botlab/csv.hpp"
#include "botlab/errors.hpp"
#include "small_angle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

namespace botlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kLogSqrtTwoPi = 0.5 * std::log(2.0 * std::numbers::pi);

// Affine map theta = origin + transform * phi in which the criterion is
// roughly isotropic with unit curvature per asymptotic standard deviation.
struct Whitening {
    Theta origin;
    Eigen::MatrixXd transform;

    [[nodiscard]] Theta to_theta(const Eigen::VectorXd& phi) const { return origin + transform * phi; }
};

Whitening make_whitening(const BearingProblem& problem, const Theta& origin, double residual_variance) {
    const double n = static_cast<double>(problem.size());
    const double scale = std::sqrt(std::max(residual_variance, 1e-30) / n);
    const Eigen::MatrixXd gram = problem.gradient_gram(origin);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
    const auto& ev = es.eigenvalues();
    Whitening w{origin, Eigen::MatrixXd()};
    if (es.info() == Eigen::Success && ev.minCoeff() > 0.0 && ev.maxCoeff() / ev.minCoeff() < 1e12) {
        Eigen::LLT<Eigen::MatrixXd> llt(gram);
        // L^{-T}: columns map unit steps to one standard deviation each.
        const Eigen::MatrixXd inv_lt =
            llt.matrixU().solve(Eigen::MatrixXd::Identity(gram.rows(), gram.cols()));
        w.transform = scale * inv_lt;
    } else {
        Eigen::VectorXd d = gram.diagonal().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
        w.transform = scale * d.asDiagonal();
    }
    return w;
}

struct SearchOutcome {
    Eigen::VectorXd phi;
    double value = kInf;
    std::size_t evaluations = 0;
    bool converged = false;
    StopReason reason = StopReason::max_fun_evals;
};

// Multistart + restart driver shared by both estimators.
SearchOutcome whitened_search(const Objective& objective, std::size_t dim, const OptimizerConfig& cfg,
                              std::vector<StartTrace>& trace, const Whitening& w) {
    std::vector<Eigen::VectorXd> starts{Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim))};
    // Coarse grid around the initial guess: +-3 standard deviations per axis.
    for (std::size_t s = 1; s < std::max<std::size_t>(cfg.multistart, 1); ++s) {
        Eigen::VectorXd phi = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim));
        const auto axis = static_cast<Eigen::Index>(((s - 1) / 2) % dim);
        phi[axis] = (s % 2 == 1 ? 3.0 : -3.0) * (1.0 + static_cast<double>((s - 1) / (2 * dim)));
        starts.push_back(phi);
    }

    SearchOutcome best;
    for (const auto& start : starts) {
        if (!std::isfinite(objective(start))) continue;
        MinimizeResult r = nelder_mead(objective, start, cfg);
        std::size_t evals = r.evaluations;
        for (std::size_t k = 0; k < cfg.restarts; ++k) {
            OptimizerConfig polish = cfg;
            polish.initial_step = 0.1 * cfg.initial_step;
            MinimizeResult again = nelder_mead(objective, r.x, polish);
            evals += again.evaluations;
            if (again.value <= r.value) {
                r.x = again.x;
                r.value = again.value;
                r.converged = again.converged;
                r.reason = again.reason;
            }
        }
        trace.push_back({w.to_theta(start), w.to_theta(r.x), r.value, evals, r.converged, r.reason});
        best.evaluations += evals;
        if (r.value < best.value) {
            best.phi = r.x;
            best.value = r.value;
            best.converged = r.converged;
            best.reason = r.reason;
        }
    }
    if (!std::isfinite(best.value)) throw EstimationError("objective is not finite at any start");
    return best;
}

}  // namespace

BearingProblem::BearingProblem(const Dataset& data, TrajectoryModel model, const ObserverPath& path)
    : model_(std::move(model)) {
    const auto n = static_cast<Eigen::Index>(data.size());
    if (n == 0) throw ConfigError("dataset is empty");
    if (data.t.size() != data.y.size()) throw ConfigError("dataset times and bearings differ in length");
    t_.resize(n);
    y_.resize(n);
    basis_.resize(static_cast<Eigen::Index>(model_.basis_size()), n);
    observer_.resize(2, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const double t = data.t[static_cast<std::size_t>(k)];
        t_[k] = t;
        y_[k] = data.y[static_cast<std::size_t>(k)];
        basis_.col(k) = model_.basis(t);
        observer_.col(k) = path.position(t);
    }
}

Eigen::Matrix2Xd BearingProblem::offsets(const Theta& theta) const {
    model_.check_dimension(theta);
    const auto p = static_cast<Eigen::Index>(model_.basis_size());
    Eigen::Matrix2Xd d(2, y_.size());
    d.row(0).noalias() = theta.head(p).transpose() * basis_;
    d.row(1).noalias() = theta.tail(p).transpose() * basis_;
    d -= observer_;
    return d;
}

Eigen::MatrixXd BearingProblem::gradient_gram(const Theta& theta) const {
    const Eigen::Matrix2Xd d = offsets(theta);
    const auto m = static_cast<Eigen::Index>(dimension());
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(m, m);
    for (Eigen::Index k = 0; k < d.cols(); ++k) {
        const double r2 = d.col(k).squaredNorm();
        if (r2 == 0.0) continue;
        const Vec2 g(-d(1, k) / r2, d(0, k) / r2);
        gram.selfadjointView<Eigen::Lower>().rankUpdate(lift_gradient(g, basis_.col(k)));
    }
    gram.triangularView<Eigen::StrictlyUpper>() = gram.transpose();
    return gram / static_cast<double>(d.cols());
}

CriterionValue criterion_Mn(const Theta& theta, const BearingProblem& problem) {
    if (!theta.allFinite()) return {kInf, 0};
    const Eigen::Matrix2Xd d = problem.offsets(theta);
    CriterionValue out;
    double sum = 0.0;
    for (Eigen::Index k = 0; k < d.cols(); ++k) {
        if (d(0, k) == 0.0 && d(1, k) == 0.0) {
            ++out.singular;
            continue;
        }
        const double r = bearing_residual(problem.y(static_cast<std::size_t>(k)), std::atan2(d(1, k), d(0, k)));
        sum += r * r;
    }
    out.value = out.singular > 0 ? kInf : sum / static_cast<double>(d.cols());
    return out;
}

double criterion_Mn(const Theta& theta, const Dataset& data, const TrajectoryModel& model,
                    const ObserverPath& path) {
    return criterion_Mn(theta, BearingProblem(data, model, path)).value;
}

double marginal_density(double z, double t, const Theta& theta, const TrajectoryModel& model,
                        const ObserverPath& path, const TrajectoryNoiseSpec& f, const ObservationNoiseSpec& g,
                        const QuadratureRule& rule) {
    validate(g);
    const GaussianCubature2D cub = trajectory_noise_cubature(f, rule);
    const Vec2 s = model.position(theta, t);
    const Vec2 o = path.position(t);
    double p = 0.0;
    for (std::size_t j = 0; j < cub.size(); ++j) {
        const double v = bearing_residual(z, bearing(s + cub.nodes[j], o).value()) / g.sigma;
        p += cub.weights[j] * std::exp(-0.5 * v * v);
    }
    return p / (g.sigma * std::sqrt(2.0 * std::numbers::pi));
}

LoglikValue loglik_Jn(const Theta& theta, const BearingProblem& problem, const GaussianCubature2D& cub,
                      const ObservationNoiseSpec& g, double log_floor) {
    LoglikValue out;
    if (!theta.allFinite()) {
        out.value = -kInf;
        return out;
    }
    const Eigen::Matrix2Xd d = problem.offsets(theta);
    const std::size_t q = cub.size();
    std::vector<double> ux(q), uy(q), logw(q), expo(q);
    for (std::size_t j = 0; j < q; ++j) {
        ux[j] = cub.nodes[j].x();
        uy[j] = cub.nodes[j].y();
        logw[j] = std::log(cub.weights[j]);
    }
    const double inv_sigma = 1.0 / g.sigma;
    const double log_norm = std::log(g.sigma) + kLogSqrtTwoPi;

    double sum = 0.0;
    for (Eigen::Index k = 0; k < d.cols(); ++k) {
        const double dx = d(0, k);
        const double dy = d(1, k);
        const double r = std::hypot(dx, dy);
        if (r == 0.0) {
            ++out.singular;
            continue;
        }
        const double c = dx / r;
        const double s = dy / r;
        const double e = bearing_residual(problem.y(static_cast<std::size_t>(k)), std::atan2(dy, dx));
        double top = -kInf;
        for (std::size_t j = 0; j < q; ++j) {
            // Psi[S + u] - Psi[S]: angle between d and d + u.
            const double delta = detail::small_angle(c * uy[j] - s * ux[j], r + c * ux[j] + s * uy[j]);
            const double z = (e - delta) * inv_sigma;
            expo[j] = logw[j] - 0.5 * z * z;
            top = std::max(top, expo[j]);
        }
        double acc = 0.0;
        for (std::size_t j = 0; j < q; ++j) acc += std::exp(expo[j] - top);
        double logp = top + std::log(acc) - log_norm;
        if (logp < log_floor) {
            logp = log_floor;
            ++out.floored;
        }
        sum += logp;
    }
    out.value = out.singular > 0 ? -kInf : sum / static_cast<double>(d.cols());
    return out;
}

LoglikValue loglik_Jn(const Theta& theta, const BearingProblem& problem, const TrajectoryNoiseSpec& f,
                      const ObservationNoiseSpec& g, const LikelihoodSettings& settings) {
    validate(g);
    const GaussianCubature2D cub = trajectory_noise_cubature(f, gauss_hermite(settings.quadrature_order));
    return loglik_Jn(theta, problem, cub, g, settings.log_floor);
}

Theta pseudolinear_initial_guess(const BearingProblem& problem) {
    const auto n = static_cast<Eigen::Index>(problem.size());
    const auto p = static_cast<Eigen::Index>(problem.model().basis_size());
    Eigen::MatrixXd h(n, 2 * p);
    Eigen::VectorXd rhs(n);
    // Each bearing puts the target on a line through the observer:
    // (x - O1) sin(beta) - (y - O2) cos(beta) = 0, which is linear in theta.
    for (Eigen::Index k = 0; k < n; ++k) {
        const double b = problem.y(static_cast<std::size_t>(k));
        const double sb = std::sin(b);
        const double cb = std::cos(b);
        const Eigen::VectorXd e = problem.basis(static_cast<std::size_t>(k));
        const Vec2 o = problem.observer(static_cast<std::size_t>(k));
        h.row(k).head(p) = sb * e.transpose();
        h.row(k).tail(p) = -cb * e.transpose();
        rhs[k] = o.x() * sb - o.y() * cb;
    }
    Theta theta = h.colPivHouseholderQr().solve(rhs);
    if (!theta.allFinite()) theta.setZero();
    return theta;
}

EstimateResult lse(const BearingProblem& problem, const OptimizerConfig& cfg, const std::optional<Theta>& theta_init) {
    const std::size_t m = problem.dimension();
    if (m > problem.size()) throw EstimationError("more parameters than observations");
    const Theta start = theta_init ? *theta_init : pseudolinear_initial_guess(problem);
    problem.model().check_dimension(start);
    if (!start.allFinite()) throw EstimationError("initial parameter is not finite");

    const double m0 = criterion_Mn(start, problem).value;
    if (!std::isfinite(m0)) throw EstimationError("least-squares criterion is not finite at the start");
    const Whitening w = make_whitening(problem, start, m0);
    const double n = static_cast<double>(problem.size());
    const double scale = n / std::max(m0, 1e-30);
    const Objective objective = [&](const Eigen::VectorXd& phi) {
        return scale * criterion_Mn(w.to_theta(phi), problem).value;
    };

    EstimateResult result;
    const SearchOutcome best = whitened_search(objective, m, cfg, result.starts, w);
    result.theta = w.to_theta(best.phi);
    result.value = criterion_Mn(result.theta, problem).value;
    result.evaluations = best.evaluations;
    result.converged = best.converged;
    return result;
}

EstimateResult mle(const BearingProblem& problem, const TrajectoryNoiseSpec& f, const ObservationNoiseSpec& g,
                   const Theta& theta_init, const OptimizerConfig& cfg, const LikelihoodSettings& settings) {
    const std::size_t m = problem.dimension();
    if (m > problem.size()) throw EstimationError("more parameters than observations");
    problem.model().check_dimension(theta_init);
    validate(g);
    const GaussianCubature2D cub = trajectory_noise_cubature(f, gauss_hermite(settings.quadrature_order));

    const double m0 = criterion_Mn(theta_init, problem).value;
    if (!std::isfinite(m0)) throw EstimationError("initial parameter has singular geometry");
    const Whitening w = make_whitening(problem, theta_init, m0);
    const double n = static_cast<double>(problem.size());
    const double j0 = loglik_Jn(theta_init, problem, cub, g, settings.log_floor).value;
    if (!std::isfinite(j0)) throw EstimationError("log-likelihood is not finite at the start");
    const Objective objective = [&](const Eigen::VectorXd& phi) {
        const double j = loglik_Jn(w.to_theta(phi), problem, cub, g, settings.log_floor).value;
        return -n * (j - j0);
    };

    EstimateResult result;
    const SearchOutcome best = whitened_search(objective, m, cfg, result.starts, w);
    result.theta = w.to_theta(best.phi);
    result.value = loglik_Jn(result.theta, problem, cub, g, settings.log_floor).value;
    result.evaluations = best.evaluations;
    result.converged = best.converged;
    return result;
}

std::vector<std::string> coordinate_names(const TrajectoryModel& model) {
    std::vector<std::string> names;
    const std::size_t p = model.basis_size();
    if (model.name() == "uniform_linear") return {"x0", "vx", "y0", "vy"};
    for (std::size_t i = 1; i <= p; ++i) names.push_back("a" + std::to_string(i));
    for (std::size_t i = 1; i <= p; ++i) names.push_back("b" + std::to_string(i));
    return names;
}

void write_estimate_csv(std::ostream& out, const EstimateResult& result, const std::vector<std::string>& names) {
    out << "coord,estimate,converged,evals\n";
    for (Eigen::Index i = 0; i < result.theta.size(); ++i) {
        const auto idx = static_cast<std::size_t>(i);
        const std::string name = idx < names.size() ? names[idx] : "theta_" + std::to_string(idx + 1);
        out << name << ',' << csv::format(result.theta[i]) << ',' << (result.converged ? 1 : 0) << ','
            << result.evaluations << '\n';
    }
}

}  // namespace botlab
