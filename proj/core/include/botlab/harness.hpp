#pragma once

#include "botlab/estimate.hpp"
#include "botlab/inference.hpp"
#include "botlab/sim.hpp"
#include "botlab/stats.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace botlab {

enum class Estimator { lse, mle };
Estimator parse_estimator(const std::string& name);
std::string to_string(Estimator e);

enum class IntervalKind { ic1, ic2, ic3 };
std::string to_string(IntervalKind k);
IntervalKind parse_interval_kind(const std::string& name);

struct CampaignSettings {
    std::size_t reps = 1000;
    std::uint64_t base_seed = 1;
    std::size_t workers = 0;  // 0: one per hardware thread
    bool run_lse = true;
    bool run_mle = false;
    bool intervals = false;   // IC_1 and IC_2 from the LSE, IC_3 from the MLE
    double level = 0.95;
    OptimizerConfig lse_cfg{};
    OptimizerConfig mle_cfg = [] {
        OptimizerConfig c;
        c.x_tolerance = 1e-6;
        c.f_tolerance = 1e-8;
        c.restarts = 0;
        return c;
    }();
    LikelihoodSettings likelihood{};
    std::size_t quadrature_order = 12;
    std::size_t info_grid = 0;        // 0: the scenario's n
    std::size_t fisher_panels = 10;   // composite Gauss-Legendre in t for the plug-in I
    std::size_t fisher_order = 4;
    std::size_t histogram_bins = 30;
};

struct IntervalOutcome {
    Eigen::VectorXd lo, hi;                // raw theta
    Eigen::VectorXd lo_final, hi_final;    // reporting parameterization
    bool ellipsoid = false;
};

struct ReplicationRecord {
    std::size_t index = 0;
    std::uint64_t seed = 0;
    std::optional<EstimateResult> lse;
    std::optional<EstimateResult> mle;
    std::optional<IntervalOutcome> ic1, ic2, ic3;
    std::string error;  // kind:message when the replication threw
};

/// The seed handed to simulate() for replication r.
std::uint64_t replication_seed(std::uint64_t base_seed, std::size_t r);

/// Reference matrices at theta*: I_R, I_Psi and I_M^{-1} on the scenario grid,
/// plus I and I^{-1} when requested.
InfoMatrices reference_information(const Scenario& s, bool with_fisher, std::size_t quadrature_order = 12);

/// One replication: simulate, estimate, optionally build intervals.
ReplicationRecord run_replication(const Scenario& s, const CampaignSettings& cfg, std::size_t r);

struct SampleSummary {
    std::vector<stats::Histogram> histograms;
    std::vector<std::vector<stats::EcdfPoint>> ecdfs;
    Eigen::VectorXd ks;            // vs N(0, reference_ii)
    Eigen::VectorXd ks_empirical;  // vs N(0, empirical variance)
};

/// Per-coordinate histograms, ECDFs and KS distances of the rows of samples.
SampleSummary summarize(const Eigen::MatrixXd& samples, const Eigen::MatrixXd& reference, std::size_t bins = 30);

struct EstimatorSummary {
    Estimator estimator = Estimator::lse;
    std::size_t reps = 0;
    std::size_t used = 0;
    std::size_t nonconverged = 0;
    std::size_t failed = 0;
    bool valid = true;  // at most 5% of replications lost
    std::vector<std::size_t> indices;   // replications contributing a row
    Eigen::MatrixXd samples;            // sqrt(n)(theta_hat - theta*), one row per used replication
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;
    Eigen::MatrixXd reference;
    double frobenius_rel_error = 0.0;
    SampleSummary summary;
};

EstimatorSummary summarize_estimator(const Scenario& s, const std::vector<ReplicationRecord>& records,
                                     Estimator which, const Eigen::MatrixXd& reference, std::size_t bins = 30);

struct CoverageSummary {
    IntervalKind kind = IntervalKind::ic1;
    std::size_t count = 0;
    Eigen::VectorXd rate;         // per raw coordinate
    Eigen::VectorXd rate_final;   // per reporting coordinate
    double ellipsoid_rate = 0.0;
    Eigen::VectorXd mean_width;
};

CoverageSummary summarize_coverage(const Scenario& s, const std::vector<ReplicationRecord>& records,
                                   IntervalKind kind);

struct CampaignResult {
    std::string scenario;
    CampaignSettings settings;
    InfoMatrices reference;
    std::vector<ReplicationRecord> records;  // in replication order
    std::optional<EstimatorSummary> lse;
    std::optional<EstimatorSummary> mle;
    std::vector<CoverageSummary> coverage;
    double wall_seconds = 0.0;  // diagnostics only, never written to CSV
};

CampaignResult run_campaign(const Scenario& s, const CampaignSettings& cfg);

/// Single-estimator campaign against a supplied reference.
EstimatorSummary run_montecarlo(const Scenario& s, Estimator estimator, std::size_t reps, std::uint64_t base_seed,
                                const InfoMatrices& reference, std::size_t workers = 0);

/// Fraction of replications whose interval contains theta*, per coordinate.
CoverageSummary coverage_study(const Scenario& s, std::size_t reps, double level, IntervalKind kind,
                               std::uint64_t base_seed = 1, std::size_t workers = 0);

/// Writes summary.csv, seeds.csv, estimates.csv and per-estimator samples,
/// histograms and ECDFs into dir.
void write_campaign(const std::string& dir, const Scenario& scenario, const CampaignResult& result);

}  // namespace botlab
