#include "botlab/inference.hpp"

#include "botlab/csv.hpp"
#include "botlab/errors.hpp"
#include "botlab/stats.hpp"
#include "small_angle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

namespace botlab {

namespace {

// Offset d = S_theta(t) - O(t) and basis e at grid point k of `grid`.
struct GridPoint {
    Eigen::VectorXd e;
    Vec2 d;
    double r = 0.0;
};

GridPoint point_at(const TrajectoryModel& model, const Theta& theta, const ObserverPath& path, double t) {
    GridPoint gp;
    gp.e = model.basis(t);
    gp.d = model.position(theta, gp.e) - path.position(t);
    gp.r = gp.d.norm();
    if (gp.r == 0.0) throw SingularGeometryError("target coincides with the observer on the integration grid");
    return gp;
}

GridPoint grid_point(const TrajectoryModel& model, const Theta& theta, const ObserverPath& path, std::size_t k,
                     std::size_t grid) {
    return point_at(model, theta, path, static_cast<double>(k) / static_cast<double>(grid));
}

// Bearing increments Psi[S + u_j] - Psi[S] for every cubature node.
void increments(const GridPoint& gp, const GaussianCubature2D& cub, std::vector<double>& delta) {
    const double c = gp.d.x() / gp.r;
    const double s = gp.d.y() / gp.r;
    delta.resize(cub.size());
    for (std::size_t j = 0; j < cub.size(); ++j) {
        const Vec2& u = cub.nodes[j];
        delta[j] = detail::small_angle(c * u.y() - s * u.x(), gp.r + c * u.x() + s * u.y());
    }
}

void check_grid(std::size_t grid) {
    if (grid == 0) throw ConfigError("integration grid needs at least one point");
}

void add_kron(Eigen::MatrixXd& out, const Mat2& h, const Eigen::VectorXd& e) {
    const auto p = e.size();
    const Eigen::MatrixXd ee = e * e.transpose();
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) out.block(a * p, b * p, p, p) += h(a, b) * ee;
    }
}

Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& m) { return 0.5 * (m + m.transpose()); }

}  // namespace

Eigen::MatrixXd info_IR(const TrajectoryModel& model, const Theta& theta, const ObserverPath& path,
                        std::size_t grid) {
    check_grid(grid);
    model.check_dimension(theta);
    return bearing_gradient_gram(model, theta, path, grid);
}

Eigen::MatrixXd info_IPsi(const TrajectoryModel& model, const Theta& theta, const ObserverPath& path,
                          const TrajectoryNoiseSpec& noise, const QuadratureRule& rule, std::size_t grid) {
    check_grid(grid);
    model.check_dimension(theta);
    const GaussianCubature2D cub = trajectory_noise_cubature(noise, rule);
    const auto m = static_cast<Eigen::Index>(model.dimension());
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m, m);
    std::vector<double> delta;
    for (std::size_t k = 1; k <= grid; ++k) {
        const GridPoint gp = grid_point(model, theta, path, k, grid);
        increments(gp, cub, delta);
        double m2 = 0.0;
        for (std::size_t j = 0; j < cub.size(); ++j) m2 += cub.weights[j] * delta[j] * delta[j];
        const Vec2 g(-gp.d.y() / (gp.r * gp.r), gp.d.x() / (gp.r * gp.r));
        add_kron(out, m2 * g * g.transpose(), gp.e);
    }
    return out / static_cast<double>(grid);
}

double condition_number(const Eigen::MatrixXd& symmetric) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetric, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().cwiseAbs().maxCoeff();
    if (!(lo > 0.0)) return std::numeric_limits<double>::infinity();
    return hi / lo;
}

Eigen::MatrixXd lse_asymptotic_cov(const Eigen::MatrixXd& i_r, const Eigen::MatrixXd& i_psi, double sigma,
                                   double condition_limit) {
    if (i_r.rows() != i_r.cols() || i_psi.rows() != i_r.rows() || i_psi.cols() != i_r.cols()) {
        throw ConfigError("information matrices must be square and of equal size");
    }
    const double cond = condition_number(i_r);
    if (!(cond <= condition_limit)) {
        throw ObservabilityError("I_R is numerically singular; the trajectory is not observable", cond);
    }
    const Eigen::MatrixXd inv = i_r.llt().solve(Eigen::MatrixXd::Identity(i_r.rows(), i_r.cols()));
    return symmetrize(inv * (i_psi + sigma * sigma * i_r) * inv);
}

FisherInfo parametric_fisher(const TrajectoryModel& model, const Theta& theta, const ObserverPath& path,
                             const TrajectoryNoiseSpec& f, const ObservationNoiseSpec& g,
                             const QuadratureRule& rule, const FisherSettings& settings) {
    const TimeRule times = settings.legendre_panels > 0
                               ? composite_legendre_rule(settings.legendre_panels, settings.legendre_order)
                               : riemann_rule(settings.grid);
    model.check_dimension(theta);
    validate(g);
    const GaussianCubature2D cub = trajectory_noise_cubature(f, rule);
    const QuadratureRule vrule = gauss_hermite(settings.observation_order);
    const std::size_t q = cub.size();
    const double sigma = g.sigma;
    const double inv_s2 = 1.0 / (sigma * sigma);

    std::vector<double> logw(q);
    for (std::size_t j = 0; j < q; ++j) logw[j] = std::log(cub.weights[j]);

    const auto m = static_cast<Eigen::Index>(model.dimension());
    FisherInfo out;
    out.info = Eigen::MatrixXd::Zero(m, m);
    out.mean_score = Eigen::VectorXd::Zero(m);
    std::vector<double> delta;
    std::vector<double> gx(q), gy(q), expo(q);

    for (std::size_t k = 0; k < times.size(); ++k) {
        const GridPoint gp = point_at(model, theta, path, times.t[k]);
        increments(gp, cub, delta);
        for (std::size_t j = 0; j < q; ++j) {
            const Vec2 w = gp.d + cub.nodes[j];
            const double r2 = w.squaredNorm();
            if (r2 == 0.0) throw SingularGeometryError("noise node lands on the observer");
            gx[j] = -w.y() / r2;
            gy[j] = w.x() / r2;
        }
        Mat2 h2 = Mat2::Zero();
        Vec2 h1 = Vec2::Zero();
        for (std::size_t a = 0; a < q; ++a) {
            for (std::size_t b = 0; b < vrule.order(); ++b) {
                const double y = delta[a] + sigma * vrule.nodes[b];
                double top = -std::numeric_limits<double>::infinity();
                for (std::size_t j = 0; j < q; ++j) {
                    const double z = (y - delta[j]) / sigma;
                    expo[j] = logw[j] - 0.5 * z * z;
                    top = std::max(top, expo[j]);
                }
                double den = 0.0;
                double sx = 0.0;
                double sy = 0.0;
                for (std::size_t j = 0; j < q; ++j) {
                    const double wq = std::exp(expo[j] - top);
                    const double res = (y - delta[j]) * wq;
                    den += wq;
                    sx += res * gx[j];
                    sy += res * gy[j];
                }
                const Vec2 h(sx * inv_s2 / den, sy * inv_s2 / den);
                const double weight = cub.weights[a] * vrule.weights[b];
                h2 += weight * h * h.transpose();
                h1 += weight * h;
            }
        }
        add_kron(out.info, times.w[k] * h2, gp.e);
        out.mean_score += times.w[k] * lift_gradient(h1, gp.e);
    }
    out.info = symmetrize(out.info);
    out.condition = condition_number(out.info);
    out.inverse = symmetrize(out.info.llt().solve(Eigen::MatrixXd::Identity(m, m)));
    return out;
}

double conservative_constant() {
    const double pi = std::numbers::pi;
    return pi * pi * std::pow(1.0 + std::pow(pi, -2.0 / 3.0), 3.0);
}

double conservative_A2(double r_min, double second_moment) {
    if (!(r_min > 0.0)) throw ConfigError("R_min must be positive");
    if (!(second_moment >= 0.0)) throw ConfigError("second moment must be non-negative");
    return conservative_constant() * second_moment / (r_min * r_min);
}

double max_expected_sq_deviation(const TrajectoryModel& model, const Theta& theta, const ObserverPath& path,
                                 const TrajectoryNoiseSpec& noise, const QuadratureRule& rule, std::size_t grid) {
    check_grid(grid);
    const GaussianCubature2D cub = trajectory_noise_cubature(noise, rule);
    std::vector<double> delta;
    double worst = 0.0;
    for (std::size_t k = 1; k <= grid; ++k) {
        increments(grid_point(model, theta, path, k, grid), cub, delta);
        double m2 = 0.0;
        for (std::size_t j = 0; j < cub.size(); ++j) m2 += cub.weights[j] * delta[j] * delta[j];
        worst = std::max(worst, m2);
    }
    return worst;
}

double check_mean_preservation(const TrajectoryModel& model, const Theta& theta, const ObserverPath& path,
                               const TrajectoryNoiseSpec& noise, const QuadratureRule& rule, std::size_t grid) {
    check_grid(grid);
    const GaussianCubature2D cub = trajectory_noise_cubature(noise, rule);
    std::vector<double> delta;
    double worst = 0.0;
    for (std::size_t k = 1; k <= grid; ++k) {
        increments(grid_point(model, theta, path, k, grid), cub, delta);
        double m1 = 0.0;
        for (std::size_t j = 0; j < cub.size(); ++j) m1 += cub.weights[j] * delta[j];
        worst = std::max(worst, std::abs(m1));
    }
    return worst;
}

InfoMatrices information(const TrajectoryModel& model, const Theta& theta, const ObserverPath& path,
                         const TrajectoryNoiseSpec& f, const ObservationNoiseSpec& g, std::size_t grid,
                         bool with_fisher, std::size_t quadrature_order, std::size_t fisher_grid) {
    validate(g);
    const QuadratureRule rule = gauss_hermite(quadrature_order);
    InfoMatrices out;
    out.grid = grid;
    out.i_r = info_IR(model, theta, path, grid);
    out.i_psi = info_IPsi(model, theta, path, f, rule, grid);
    out.cond_i_r = condition_number(out.i_r);
    out.i_m_inv = lse_asymptotic_cov(out.i_r, out.i_psi, g.sigma);
    if (with_fisher) {
        FisherSettings fs;
        fs.grid = fisher_grid == 0 ? grid : fisher_grid;
        FisherInfo fi = parametric_fisher(model, theta, path, f, g, rule, fs);
        out.fisher = std::move(fi.info);
        out.fisher_inv = std::move(fi.inverse);
        out.cond_fisher = fi.condition;
        out.has_fisher = true;
    }
    return out;
}

bool Ellipsoid::contains(const Eigen::VectorXd& x) const {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(shape);
    const Eigen::VectorXd proj = es.eigenvectors().transpose() * (x - center);
    const double top = std::max(es.eigenvalues().maxCoeff(), 0.0);
    double q = 0.0;
    for (Eigen::Index i = 0; i < proj.size(); ++i) {
        const double lambda = es.eigenvalues()[i];
        if (lambda <= 1e-14 * top || lambda <= 0.0) {
            if (proj[i] != 0.0) return false;
            continue;
        }
        q += proj[i] * proj[i] / lambda;
    }
    return q <= radius2;
}

ConfidenceReport confidence_intervals(const Theta& estimate, const Eigen::MatrixXd& sigma, std::size_t n,
                                      double level) {
    const double z = stats::two_sided_z(level);
    if (n == 0) throw ConfigError("interval needs n >= 1");
    if (sigma.rows() != estimate.size() || sigma.cols() != estimate.size()) {
        throw ConfigError("covariance size does not match the estimate");
    }
    if (sigma.size() > 0) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetrize(sigma), Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < -1e-10 * std::max(sigma.trace(), 0.0)) {
            throw ConfigError("covariance is not positive semi-definite");
        }
    }
    const double nn = static_cast<double>(n);
    ConfidenceReport rep;
    rep.level = level;
    rep.center = estimate;
    rep.lo.resize(estimate.size());
    rep.hi.resize(estimate.size());
    for (Eigen::Index i = 0; i < estimate.size(); ++i) {
        const double half = z * std::sqrt(std::max(sigma(i, i), 0.0) / nn);
        rep.lo[i] = estimate[i] - half;
        rep.hi[i] = estimate[i] + half;
    }
    rep.ellipsoid.center = estimate;
    rep.ellipsoid.shape = symmetrize(sigma) / nn;
    rep.ellipsoid.radius2 = stats::chi_squared_quantile(level, static_cast<double>(estimate.size()));
    return rep;
}

ConfidenceReport conservative_intervals(const Theta& estimate, const Eigen::MatrixXd& i_r, double a2,
                                        double sigma, std::size_t n, double level) {
    const double cond = condition_number(i_r);
    if (!(cond <= 1e12)) throw ObservabilityError("I_R is numerically singular", cond);
    const Eigen::MatrixXd inv = i_r.llt().solve(Eigen::MatrixXd::Identity(i_r.rows(), i_r.cols()));
    return confidence_intervals(estimate, (a2 + sigma * sigma) * symmetrize(inv), n, level);
}

Eigen::MatrixXd reporting_jacobian(const TrajectoryModel& model) {
    const auto p = static_cast<Eigen::Index>(model.basis_size());
    const Eigen::VectorXd e1 = model.basis(1.0);
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(2 * p, 2 * p);
    j.block(0, 0, 1, p) = e1.transpose();
    j.block(1, p, 1, p) = e1.transpose();
    for (Eigen::Index i = 1; i < p; ++i) {
        j(1 + i, i) = 1.0;
        j(p + i, p + i) = 1.0;
    }
    return j;
}

Eigen::VectorXd reporting_map(const TrajectoryModel& model, const Theta& theta) {
    model.check_dimension(theta);
    return reporting_jacobian(model) * theta;
}

std::vector<std::string> reporting_names(const TrajectoryModel& model) {
    if (model.name() == "uniform_linear") return {"x_final", "y_final", "vx", "vy"};
    std::vector<std::string> names{"x_final", "y_final"};
    for (std::size_t i = 2; i <= model.basis_size(); ++i) names.push_back("a" + std::to_string(i));
    for (std::size_t i = 2; i <= model.basis_size(); ++i) names.push_back("b" + std::to_string(i));
    return names;
}

ConfidenceReport map_report(const TrajectoryModel& model, const Theta& estimate, const Eigen::MatrixXd& sigma,
                            std::size_t n, double level) {
    const Eigen::MatrixXd j = reporting_jacobian(model);
    return confidence_intervals(reporting_map(model, estimate), j * sigma * j.transpose(), n, level);
}

void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& m) {
    out << "i,j,value\n";
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) out << i + 1 << ',' << j + 1 << ',' << csv::format(m(i, j)) << '\n';
    }
}

void write_intervals_csv(std::ostream& out, const ConfidenceReport& report, const std::vector<std::string>& names) {
    out << "coord,lo,hi,width\n";
    for (Eigen::Index i = 0; i < report.center.size(); ++i) {
        const auto idx = static_cast<std::size_t>(i);
        out << (idx < names.size() ? names[idx] : "theta_" + std::to_string(idx + 1)) << ','
            << csv::format(report.lo[i]) << ',' << csv::format(report.hi[i]) << ',' << csv::format(report.width(i))
            << '\n';
    }
}

}  // namespace botlab
