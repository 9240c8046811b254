#include "botlab/stats.hpp"

#include "botlab/errors.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace botlab::stats {

double normal_cdf(double x, double mean, double sd) {
    if (sd == 0.0) return x < mean ? 0.0 : 1.0;
    return 0.5 * std::erfc(-(x - mean) / (sd * std::sqrt(2.0)));
}

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw ConfigError("normal quantile needs p in (0, 1)");
    return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

double chi_squared_quantile(double p, double dof) {
    if (!(p > 0.0 && p < 1.0)) throw ConfigError("chi-squared quantile needs p in (0, 1)");
    return boost::math::quantile(boost::math::chi_squared_distribution<double>(dof), p);
}

double two_sided_z(double level) {
    if (!(level > 0.0 && level < 1.0)) throw ConfigError("confidence level must lie in (0, 1)");
    return normal_quantile(0.5 + 0.5 * level);
}

double mean(const std::vector<double>& x) {
    if (x.empty()) throw ConfigError("mean of an empty sample");
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double variance(const std::vector<double>& x) {
    if (x.size() < 2) throw ConfigError("variance needs at least two samples");
    const double m = mean(x);
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return s / static_cast<double>(x.size() - 1);
}

double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf) {
    if (samples.empty()) throw ConfigError("KS distance of an empty sample");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
    }
    return d;
}

double ks_distance_normal(const std::vector<double>& samples, double mean, double sd) {
    return ks_distance(samples, [=](double x) { return normal_cdf(x, mean, sd); });
}

std::vector<EcdfPoint> ecdf(std::vector<double> samples) {
    if (samples.empty()) throw ConfigError("ECDF of an empty sample");
    std::sort(samples.begin(), samples.end());
    std::vector<EcdfPoint> out;
    const double n = static_cast<double>(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        // ties collapse onto the last index so F_n is right-continuous
        if (i + 1 < samples.size() && samples[i + 1] == samples[i]) continue;
        out.push_back({samples[i], static_cast<double>(i + 1) / n});
    }
    return out;
}

double Histogram::density(std::size_t bin, std::size_t total) const {
    const double w = edges[bin + 1] - edges[bin];
    return w > 0.0 ? static_cast<double>(counts[bin]) / (static_cast<double>(total) * w) : 0.0;
}

Histogram histogram(const std::vector<double>& samples, std::size_t bins) {
    if (samples.empty()) throw ConfigError("histogram of an empty sample");
    if (bins == 0) throw ConfigError("histogram needs at least one bin");
    const auto [lo_it, hi_it] = std::minmax_element(samples.begin(), samples.end());
    double lo = *lo_it;
    double hi = *hi_it;
    if (hi == lo) {
        lo -= 0.5;
        hi += 0.5;
    }
    Histogram h;
    h.edges.resize(bins + 1);
    for (std::size_t i = 0; i <= bins; ++i) h.edges[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(bins);
    h.counts.assign(bins, 0);
    for (double v : samples) {
        auto b = static_cast<std::size_t>((v - lo) / (hi - lo) * static_cast<double>(bins));
        ++h.counts[std::min(b, bins - 1)];
    }
    return h;
}

}  // namespace botlab::stats
