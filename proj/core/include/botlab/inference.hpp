#pragma once

#include "botlab/geometry.hpp"
#include "botlab/noise.hpp"
#include "botlab/quadrature.hpp"

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace botlab {

// All t-integrals below are Riemann averages over t_k = k / grid, k = 1..grid,
// the same weighting the criteria give the observation times.

/// int grad Psi grad Psi^T dt.
Eigen::MatrixXd info_IR(const TrajectoryModel& model, const Theta& theta, const ObserverPath& path,
                        std::size_t grid);

/// int E{Psi[S_theta + eps] - Psi[S_theta]}^2 grad Psi grad Psi^T dt, the
/// inner expectation by tensor Gauss-Hermite over the marginal noise law.
Eigen::MatrixXd info_IPsi(const TrajectoryModel& model, const Theta& theta, const ObserverPath& path,
                          const TrajectoryNoiseSpec& noise, const QuadratureRule& rule, std::size_t grid);

/// I_R^{-1} (I_Psi + sigma^2 I_R) I_R^{-1}. Throws ObservabilityError when
/// cond(I_R) exceeds the limit.
Eigen::MatrixXd lse_asymptotic_cov(const Eigen::MatrixXd& i_r, const Eigen::MatrixXd& i_psi, double sigma,
                                   double condition_limit = 1e12);

double condition_number(const Eigen::MatrixXd& symmetric);

struct FisherInfo {
    Eigen::MatrixXd info;
    Eigen::MatrixXd inverse;
    Eigen::VectorXd mean_score;  // quadrature value of E[grad log p], averaged over t
    double condition = 0.0;
};

struct FisherSettings {
    std::size_t observation_order = 12;  // Gauss-Hermite nodes for V
    std::size_t grid = 2000;
    // When nonzero, integrate over t with composite Gauss-Legendre instead of
    // the Riemann grid; far fewer nodes for the same accuracy.
    std::size_t legendre_panels = 0;
    std::size_t legendre_order = 4;
};

/// Fisher information of the marginal observation density p_(theta, f).
/// The score is differentiated under the integral; the expectation over
/// Y = Psi[S + eps] + V uses the eps cubature times a 1-D rule for V.
FisherInfo parametric_fisher(const TrajectoryModel& model, const Theta& theta, const ObserverPath& path,
                             const TrajectoryNoiseSpec& f, const ObservationNoiseSpec& g,
                             const QuadratureRule& rule, const FisherSettings& settings = {});

/// pi^2 (1 + pi^(-2/3))^3.
double conservative_constant();
/// A^2 = conservative_constant() * E||eps||^2 / R_min^2, rad^2.
double conservative_A2(double r_min, double second_moment);

/// max_t E{Psi[S_theta + eps] - Psi[S_theta]}^2 on the grid.
double max_expected_sq_deviation(const TrajectoryModel& model, const Theta& theta, const ObserverPath& path,
                                 const TrajectoryNoiseSpec& noise, const QuadratureRule& rule, std::size_t grid);

/// max_t |E Psi[S_theta + eps] - Psi[S_theta]| on the grid.
double check_mean_preservation(const TrajectoryModel& model, const Theta& theta, const ObserverPath& path,
                               const TrajectoryNoiseSpec& noise, const QuadratureRule& rule, std::size_t grid);

struct InfoMatrices {
    Eigen::MatrixXd i_r;
    Eigen::MatrixXd i_psi;
    Eigen::MatrixXd i_m_inv;
    Eigen::MatrixXd fisher;
    Eigen::MatrixXd fisher_inv;
    double cond_i_r = 0.0;
    double cond_fisher = 0.0;
    std::size_t grid = 0;
    bool has_fisher = false;
};

InfoMatrices information(const TrajectoryModel& model, const Theta& theta, const ObserverPath& path,
                         const TrajectoryNoiseSpec& f, const ObservationNoiseSpec& g, std::size_t grid,
                         bool with_fisher, std::size_t quadrature_order = 12, std::size_t fisher_grid = 0);

struct Ellipsoid {
    Eigen::VectorXd center;
    Eigen::MatrixXd shape;  // covariance of the estimator, Sigma / n
    double radius2 = 0.0;   // chi-squared quantile

    [[nodiscard]] bool contains(const Eigen::VectorXd& x) const;
};

struct ConfidenceReport {
    double level = 0.95;
    Eigen::VectorXd center;
    Eigen::VectorXd lo;
    Eigen::VectorXd hi;
    Ellipsoid ellipsoid;

    [[nodiscard]] double width(Eigen::Index i) const { return hi[i] - lo[i]; }
    [[nodiscard]] bool covers(Eigen::Index i, double value) const { return lo[i] <= value && value <= hi[i]; }
};

/// theta_i +- z sqrt(Sigma_ii / n) and the chi^2_m ellipsoid.
ConfidenceReport confidence_intervals(const Theta& estimate, const Eigen::MatrixXd& sigma, std::size_t n,
                                      double level);
/// Same with Sigma = (A^2 + sigma^2) I_R^{-1}.
ConfidenceReport conservative_intervals(const Theta& estimate, const Eigen::MatrixXd& i_r, double a2,
                                        double sigma, std::size_t n, double level);

// Reporting parameterization: the final-time position replaces the initial
// coefficients, rho(theta) = (S_theta(1)_x, S_theta(1)_y, a_2.., b_2..).
Eigen::MatrixXd reporting_jacobian(const TrajectoryModel& model);
Eigen::VectorXd reporting_map(const TrajectoryModel& model, const Theta& theta);
std::vector<std::string> reporting_names(const TrajectoryModel& model);
/// Intervals for rho(theta) by the (exact, linear) delta method.
ConfidenceReport map_report(const TrajectoryModel& model, const Theta& estimate, const Eigen::MatrixXd& sigma,
                            std::size_t n, double level);

void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& m);
void write_intervals_csv(std::ostream& out, const ConfidenceReport& report, const std::vector<std::string>& names);

}  // namespace botlab
