#include "botlab/errors.hpp"
#include "botlab/stats.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace botlab;
using namespace botlab::stats;

TEST_SUITE("stats") {

TEST_CASE("normal and chi-squared quantiles") {
    CHECK(normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(normal_cdf(1.9599639845400542355) == doctest::Approx(0.975).epsilon(1e-14));
    CHECK(normal_quantile(0.975) == doctest::Approx(1.9599639845400542355).epsilon(1e-14));
    CHECK(two_sided_z(0.90) == doctest::Approx(1.6448536269514722).epsilon(1e-14));
    CHECK(chi_squared_quantile(0.95, 4) == doctest::Approx(9.4877290367811540).epsilon(1e-12));
    CHECK(normal_cdf(-1.0, 0.0, 0.0) == 0.0);
    CHECK(normal_cdf(1.0, 0.0, 0.0) == 1.0);
    CHECK_THROWS_AS(two_sided_z(1.0), ConfigError);
}

TEST_CASE("moments") {
    CHECK(mean({1.0, 2.0, 6.0}) == 3.0);
    CHECK(variance({1.0, 2.0, 6.0}) == doctest::Approx(7.0));
    CHECK_THROWS_AS(mean({}), ConfigError);
}

TEST_CASE("KS distance") {
    // one sample at 0 against N(0,1): both one-sided gaps are 1/2
    CHECK(ks_distance_normal({0.0}, 0.0, 1.0) == doctest::Approx(0.5));
    CHECK(ks_distance({0.2, 0.6}, [](double x) { return std::clamp(x, 0.0, 1.0); }) == doctest::Approx(0.4));
    std::mt19937_64 rng(1);
    std::normal_distribution<double> n(0.0, 2.0);
    std::vector<double> x(20000);
    for (auto& v : x) v = n(rng);
    CHECK(ks_distance_normal(x, 0.0, 2.0) < 0.015);
    CHECK(ks_distance_normal(x, 0.0, 1.0) > 0.1);
}

TEST_CASE("ECDF and histogram") {
    const auto e = ecdf({3.0, 1.0, 1.0, 2.0});
    REQUIRE(e.size() == 3);
    CHECK(e[0].x == 1.0);
    CHECK(e[0].f == 0.5);
    CHECK(e[2].f == 1.0);
    const auto h = histogram({0.0, 0.1, 0.5, 1.0}, 2);
    REQUIRE(h.counts.size() == 2);
    CHECK(h.counts[0] + h.counts[1] == 4);
    CHECK(h.edges.front() == 0.0);
    CHECK(h.edges.back() == 1.0);
    double area = 0.0;
    for (std::size_t b = 0; b < 2; ++b) area += h.density(b, 4) * (h.edges[b + 1] - h.edges[b]);
    CHECK(area == doctest::Approx(1.0));
    CHECK_THROWS_AS(histogram({}, 3), ConfigError);
}

}
