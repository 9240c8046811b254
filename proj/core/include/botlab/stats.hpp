#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace botlab::stats {

double normal_cdf(double x, double mean = 0.0, double sd = 1.0);
double normal_quantile(double p);
double chi_squared_quantile(double p, double dof);

// Two-sided quantile z_{1 - alpha/2} for a confidence level 1 - alpha.
double two_sided_z(double level);

double mean(const std::vector<double>& x);
double variance(const std::vector<double>& x);  // unbiased, n - 1

/// sup_x |F_n(x) - F(x)|, with both one-sided gaps at every jump.
double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf);
double ks_distance_normal(const std::vector<double>& samples, double mean, double sd);

struct EcdfPoint {
    double x;
    double f;  // F_n(x), right-continuous
};
std::vector<EcdfPoint> ecdf(std::vector<double> samples);

struct Histogram {
    std::vector<double> edges;   // bins + 1 entries
    std::vector<std::size_t> counts;
    [[nodiscard]] double density(std::size_t bin, std::size_t total) const;
};
Histogram histogram(const std::vector<double>& samples, std::size_t bins);

}  // namespace botlab::stats
