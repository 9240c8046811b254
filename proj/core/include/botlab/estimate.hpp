#pragma once

#include "botlab/geometry.hpp"
#include "botlab/noise.hpp"
#include "botlab/optimizer.hpp"
#include "botlab/quadrature.hpp"
#include "botlab/sim.hpp"

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace botlab {

/// A dataset bound to its trajectory model and observer path, with the
/// observer positions and basis values cached on the observation times.
class BearingProblem {
public:
    BearingProblem(const Dataset& data, TrajectoryModel model, const ObserverPath& path);

    [[nodiscard]] std::size_t size() const noexcept { return static_cast<std::size_t>(y_.size()); }
    [[nodiscard]] std::size_t dimension() const noexcept { return model_.dimension(); }
    [[nodiscard]] const TrajectoryModel& model() const noexcept { return model_; }
    [[nodiscard]] double t(std::size_t k) const { return t_[static_cast<Eigen::Index>(k)]; }
    [[nodiscard]] double y(std::size_t k) const { return y_[static_cast<Eigen::Index>(k)]; }
    [[nodiscard]] Vec2 observer(std::size_t k) const { return observer_.col(static_cast<Eigen::Index>(k)); }
    [[nodiscard]] Eigen::VectorXd basis(std::size_t k) const { return basis_.col(static_cast<Eigen::Index>(k)); }

    /// Target-minus-observer offsets S_theta(t_k) - O(t_k), as a 2 x n matrix.
    [[nodiscard]] Eigen::Matrix2Xd offsets(const Theta& theta) const;

    /// Average of grad grad^T over the observation times.
    [[nodiscard]] Eigen::MatrixXd gradient_gram(const Theta& theta) const;

private:
    TrajectoryModel model_;
    Eigen::VectorXd t_;
    Eigen::VectorXd y_;
    Eigen::MatrixXd basis_;     // p x n
    Eigen::Matrix2Xd observer_;  // 2 x n
};

struct CriterionValue {
    double value = 0.0;
    std::size_t singular = 0;  // observation times where the target sat on the observer
};

/// Mean squared wrapped bearing residual; +inf when the geometry is singular.
CriterionValue criterion_Mn(const Theta& theta, const BearingProblem& problem);
double criterion_Mn(const Theta& theta, const Dataset& data, const TrajectoryModel& model, const ObserverPath& path);

struct LikelihoodSettings {
    std::size_t quadrature_order = 12;
    double log_floor = -700.0;  // per-observation log density clamp
};

/// p_(theta,f)(z, t) = E g(z - Psi[S_theta(t) + U, t]), U ~ f, by tensor Gauss-Hermite.
double marginal_density(double z, double t, const Theta& theta, const TrajectoryModel& model,
                        const ObserverPath& path, const TrajectoryNoiseSpec& f, const ObservationNoiseSpec& g,
                        const QuadratureRule& rule);

struct LoglikValue {
    double value = 0.0;
    std::size_t floored = 0;   // observations whose log density hit the floor
    std::size_t singular = 0;
};

/// Normalized marginal log-likelihood (1/n) sum_k log p(Y_k, t_k).
LoglikValue loglik_Jn(const Theta& theta, const BearingProblem& problem, const GaussianCubature2D& cubature,
                      const ObservationNoiseSpec& g, double log_floor = -700.0);
LoglikValue loglik_Jn(const Theta& theta, const BearingProblem& problem, const TrajectoryNoiseSpec& f,
                      const ObservationNoiseSpec& g, const LikelihoodSettings& settings = {});

struct StartTrace {
    Theta start;
    Theta end;
    double value = 0.0;
    std::size_t evaluations = 0;
    bool converged = false;
    StopReason reason = StopReason::max_fun_evals;
};

struct EstimateResult {
    Theta theta;
    double value = 0.0;  // M_n for the LSE, J_n for the MLE
    std::size_t evaluations = 0;
    bool converged = false;
    std::vector<StartTrace> starts;
};

/// Closed-form pseudolinear fit of the bearing lines; a crude start for the LSE.
Theta pseudolinear_initial_guess(const BearingProblem& problem);

/// Least-squares estimator: Nelder-Mead on M_n in coordinates whitened by the
/// gradient Gram matrix at the start. Starts from the pseudolinear fit unless
/// theta_init is given.
EstimateResult lse(const BearingProblem& problem, const OptimizerConfig& cfg = {},
                   const std::optional<Theta>& theta_init = std::nullopt);

/// Parametric maximum-likelihood estimator: Nelder-Mead on -J_n from theta_init
/// (typically the LSE).
EstimateResult mle(const BearingProblem& problem, const TrajectoryNoiseSpec& f, const ObservationNoiseSpec& g,
                   const Theta& theta_init, const OptimizerConfig& cfg = {}, const LikelihoodSettings& settings = {});

/// `coord,estimate,converged,evals` rows; coordinate names default to theta_i.
void write_estimate_csv(std::ostream& out, const EstimateResult& result,
                        const std::vector<std::string>& names = {});

/// Coordinate names in the model's internal order, e.g. x0,vx,y0,vy.
std::vector<std::string> coordinate_names(const TrajectoryModel& model);

}  // namespace botlab
