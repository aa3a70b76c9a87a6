#include <cmath>
#include <stdexcept>
#include <vector>

#include "detfuse/errors.hpp"
#include "detfuse/rng.hpp"
#include "detfuse/sensing.hpp"
#include "detfuse/specfun.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace detfuse;
using detfuse::specfun::q_function;

namespace {

SourceModel two_sensor_model() {
    SourceModel m;
    m.sigma_nu2 = 0.25;
    m.sigma_z2 = 0.75;
    m.means = {{-1.0, 1.0}, {-2.0, 0.0, 2.0, 4.0}};
    return m;
}

} // namespace

TEST_CASE("observe adds scaled source and measurement noise to the mean") {
    SourceModel m = two_sensor_model();
    double x = observe(m, 1, 2, 1.5, -0.5);
    CHECK(x == doctest::Approx(1.0 + 0.5 * 1.5 -
                               std::sqrt(0.75) * 0.5).epsilon(1e-14));
    CHECK(observe(m, 2, 3, 0.0, 0.0) == doctest::Approx(2.0));
    CHECK_THROWS_AS(observe(m, 3, 1, 0.0, 0.0), std::out_of_range);
    CHECK_THROWS_AS(observe(m, 1, 3, 0.0, 0.0), std::out_of_range);
}

TEST_CASE("local_decide picks the nearest mean, ties to the lower index") {
    std::vector<double> means = {-3.0, -1.0, 1.0, 3.0};
    CHECK(local_decide(means, -10.0) == 1);
    CHECK(local_decide(means, -1.2) == 2);
    CHECK(local_decide(means, 0.9) == 3);
    CHECK(local_decide(means, 100.0) == 4);
    CHECK(local_decide(means, 0.0) == 2);  // midpoint tie
    CHECK(local_decide(means, -2.0) == 1); // midpoint tie
}

TEST_CASE("binary confusion matches the closed Q expression") {
    std::vector<double> means = {-1.0, 1.0};
    double s2n = 0.3, s2z = 0.7;
    ConfusionMatrix c = confusion_matrix(means, s2n, s2z);
    double sigma = std::sqrt(s2n + s2z);
    double q = q_function((means[0] + means[1] - 2.0 * means[0]) /
                          (2.0 * sigma));
    CHECK(c.order() == 2);
    CHECK(c(1, 1) == doctest::Approx(1.0 - q).epsilon(1e-12));
    CHECK(c(2, 1) == doctest::Approx(q).epsilon(1e-12));
    CHECK(c(1, 2) == doctest::Approx(q).epsilon(1e-12));
    CHECK(c(2, 2) == doctest::Approx(1.0 - q).epsilon(1e-12));
}

TEST_CASE("quaternary confusion columns are simplex points") {
    std::vector<double> means = {-2.0, -0.5, 0.5, 2.0};
    ConfusionMatrix c = confusion_matrix(means, 0.5, 0.5);
    for (int truth = 1; truth <= 4; ++truth) {
        double col = 0.0;
        for (int dec = 1; dec <= 4; ++dec) {
            CHECK(c(dec, truth) >= 0.0);
            CHECK(c(dec, truth) <= 1.0);
            col += c(dec, truth);
        }
        CHECK(col == doctest::Approx(1.0).epsilon(1e-12));
    }
    // Interior rows are differences of the two neighbouring tail masses.
    double sigma = 1.0;
    double lo = (means[0] + means[1] - 2.0 * means[0]) / (2.0 * sigma);
    double hi = (means[1] + means[2] - 2.0 * means[0]) / (2.0 * sigma);
    CHECK(c(2, 1) ==
          doctest::Approx(q_function(lo) - q_function(hi)).epsilon(1e-12));
}

TEST_CASE("confusion probabilities match simulated decision frequencies") {
    std::vector<double> means = {-1.2, 0.0, 1.2};
    double s2n = 0.4, s2z = 0.6;
    ConfusionMatrix c = confusion_matrix(means, s2n, s2z);
    SourceModel m;
    m.sigma_nu2 = s2n;
    m.sigma_z2 = s2z;
    m.means = {means};

    RngStream g(8);
    long n = 200000;
    for (int truth = 1; truth <= 3; ++truth) {
        std::vector<long> hits(3, 0);
        for (long i = 0; i < n; ++i) {
            double x = observe(m, 1, truth, g.normal(), g.normal());
            ++hits[static_cast<std::size_t>(local_decide(means, x) - 1)];
        }
        for (int dec = 1; dec <= 3; ++dec) {
            double p = c(dec, truth);
            double f = static_cast<double>(
                           hits[static_cast<std::size_t>(dec - 1)]) /
                       static_cast<double>(n);
            CHECK(std::fabs(f - p) <
                  4.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(n)) +
                      1e-9);
        }
    }
}

TEST_CASE("sensor_error_prob averages the off diagonal mass") {
    std::vector<double> means = {-1.0, 1.0};
    ConfusionMatrix c = confusion_matrix(means, 0.5, 0.5);
    std::vector<double> priors = {0.25, 0.75};
    double expect = 0.25 * (1.0 - c(1, 1)) + 0.75 * (1.0 - c(2, 2));
    CHECK(sensor_error_prob(c, priors) ==
          doctest::Approx(expect).epsilon(1e-13));
}

TEST_CASE("calibrate_means hits the requested uniform error exactly") {
    for (int m : {2, 4}) {
        double cap = (m - 1.0) / m;
        for (double target : {0.05, 0.2, 0.35, cap - 0.05}) {
            auto means = calibrate_means(target, m, 1.0);
            REQUIRE(static_cast<int>(means.size()) == m);
            ConfusionMatrix c = confusion_matrix(means, 0.5, 0.5);
            std::vector<double> uni(static_cast<std::size_t>(m), 1.0 / m);
            CHECK(sensor_error_prob(c, uni) ==
                  doctest::Approx(target).epsilon(1e-8));
        }
    }
}

TEST_CASE("calibrated means are symmetric and equally spaced") {
    auto means = calibrate_means(0.3, 4, 2.0);
    double d = means[1] - means[0];
    CHECK(means[2] - means[1] == doctest::Approx(d).epsilon(1e-12));
    CHECK(means[3] - means[2] == doctest::Approx(d).epsilon(1e-12));
    CHECK(means[0] + means[3] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(means[1] + means[2] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(d > 0.0);

    // Closed form: uniform error = 2 (M-1)/M Q(d / (2 sigma)).
    double err = 2.0 * 3.0 / 4.0 * q_function(d / (2.0 * 2.0));
    CHECK(err == doctest::Approx(0.3).epsilon(1e-8));
}

TEST_CASE("calibration boundary collapses the constellation") {
    for (int m : {2, 4}) {
        double cap = (m - 1.0) / m;
        auto means = calibrate_means(cap, m, 1.0);
        CHECK(means[static_cast<std::size_t>(m - 1)] - means[0] <
              1e-6); // spacing pinned near zero
        CHECK_THROWS_AS(calibrate_means(cap + 1e-6, m, 1.0), config_error);
        CHECK_THROWS_AS(calibrate_means(0.0, m, 1.0), config_error);
        CHECK_THROWS_AS(calibrate_means(-0.1, m, 1.0), config_error);
    }
}
