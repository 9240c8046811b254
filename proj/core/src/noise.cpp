#include "botlab/noise.hpp"

#include "botlab/errors.hpp"

#include <cmath>
#include <sstream>

namespace botlab {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

void validate(const TrajectoryNoiseSpec& spec) {
    std::visit(overloaded{
                   [](const NoTrajectoryNoise&) {},
                   [](const IsotropicGaussian& s) {
                       if (!(s.sigma >= 0.0) || !std::isfinite(s.sigma)) {
                           throw ConfigError("isotropic trajectory noise needs sigma >= 0");
                       }
                   },
                   [](const AnisotropicGaussian& s) {
                       const Mat2& c = s.covariance;
                       if (!c.allFinite() || std::abs(c(0, 1) - c(1, 0)) > 1e-15 * c.norm()) {
                           throw ConfigError("anisotropic trajectory noise covariance must be symmetric");
                       }
                       if (!(c(0, 0) > 0.0) || !(c.determinant() > 0.0)) {
                           throw ConfigError("anisotropic trajectory noise covariance must be positive definite");
                       }
                   },
                   [](const Ar1Noise& s) {
                       if (!(std::abs(s.phi) < 1.0)) throw ConfigError("AR1 trajectory noise needs |phi| < 1");
                       if (!(s.sigma_eta >= 0.0) || !std::isfinite(s.sigma_eta)) {
                           throw ConfigError("AR1 trajectory noise needs sigma_eta >= 0");
                       }
                   },
               },
               spec);
}

void validate(const ObservationNoiseSpec& spec) {
    if (!(spec.sigma > 0.0) || !std::isfinite(spec.sigma)) {
        throw ConfigError("observation noise needs sigma > 0");
    }
}

std::string describe(const TrajectoryNoiseSpec& spec) {
    std::ostringstream os;
    os.precision(17);
    std::visit(overloaded{
                   [&](const NoTrajectoryNoise&) { os << "none"; },
                   [&](const IsotropicGaussian& s) { os << "isotropic(sigma=" << s.sigma << ")"; },
                   [&](const AnisotropicGaussian& s) {
                       os << "anisotropic(" << s.covariance(0, 0) << "," << s.covariance(0, 1) << ","
                          << s.covariance(1, 1) << ")";
                   },
                   [&](const Ar1Noise& s) { os << "ar1(phi=" << s.phi << ",sigma_eta=" << s.sigma_eta << ")"; },
               },
               spec);
    return os.str();
}

bool is_none(const TrajectoryNoiseSpec& spec) {
    return std::holds_alternative<NoTrajectoryNoise>(spec) || marginal_covariance(spec).isZero(0.0);
}

bool is_isotropic(const TrajectoryNoiseSpec& spec) {
    const Mat2 c = marginal_covariance(spec);
    return c(0, 1) == 0.0 && c(1, 0) == 0.0 && c(0, 0) == c(1, 1);
}

Mat2 marginal_covariance(const TrajectoryNoiseSpec& spec) {
    return std::visit(overloaded{
                          [](const NoTrajectoryNoise&) -> Mat2 { return Mat2::Zero(); },
                          [](const IsotropicGaussian& s) -> Mat2 { return s.sigma * s.sigma * Mat2::Identity(); },
                          [](const AnisotropicGaussian& s) -> Mat2 { return s.covariance; },
                          [](const Ar1Noise& s) -> Mat2 {
                              return ar1_autocovariance(s.phi, s.sigma_eta, 0) * Mat2::Identity();
                          },
                      },
                      spec);
}

double second_moment(const TrajectoryNoiseSpec& spec) { return marginal_covariance(spec).trace(); }

double ar1_autocovariance(double phi, double sigma_eta, std::size_t lag) {
    if (!(std::abs(phi) < 1.0)) throw ConfigError("AR1 autocovariance needs |phi| < 1");
    return std::pow(phi, static_cast<double>(lag)) * sigma_eta * sigma_eta / (1.0 - phi * phi);
}

std::vector<Vec2> sample_trajectory_noise(const TrajectoryNoiseSpec& spec, std::size_t n, Rng& rng) {
    validate(spec);
    std::vector<Vec2> out(n, Vec2::Zero());
    std::normal_distribution<double> normal(0.0, 1.0);
    std::visit(overloaded{
                   [](const NoTrajectoryNoise&) {},
                   [&](const IsotropicGaussian& s) {
                       for (auto& e : out) {
                           const double a = normal(rng);
                           const double b = normal(rng);
                           e = {s.sigma * a, s.sigma * b};
                       }
                   },
                   [&](const AnisotropicGaussian& s) {
                       const Mat2 l = s.covariance.llt().matrixL();
                       for (auto& e : out) {
                           const double a = normal(rng);
                           const double b = normal(rng);
                           e = l * Vec2(a, b);
                       }
                   },
                   [&](const Ar1Noise& s) {
                       if (n == 0) return;
                       const double stationary = s.sigma_eta / std::sqrt(1.0 - s.phi * s.phi);
                       const double a = normal(rng);
                       const double b = normal(rng);
                       out[0] = {stationary * a, stationary * b};
                       for (std::size_t k = 1; k < n; ++k) {
                           const double ea = normal(rng);
                           const double eb = normal(rng);
                           out[k] = s.phi * out[k - 1] + s.sigma_eta * Vec2(ea, eb);
                       }
                   },
               },
               spec);
    return out;
}

std::vector<Vec2> sample_trajectory_noise(const TrajectoryNoiseSpec& spec, std::size_t n, std::uint64_t seed) {
    Rng rng = make_stream(seed, 0, StreamRole::trajectory_noise);
    return sample_trajectory_noise(spec, n, rng);
}

std::vector<double> sample_observation_noise(const ObservationNoiseSpec& spec, std::size_t n, Rng& rng) {
    validate(spec);
    std::normal_distribution<double> normal(0.0, spec.sigma);
    std::vector<double> out(n);
    for (auto& v : out) v = normal(rng);
    return out;
}

}  // namespace botlab
