#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "detfuse/divergence.hpp"
#include "detfuse/rng.hpp"
#include "detfuse/scenario.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace detfuse;

namespace {

ConfusionMatrix symmetric_binary(double correct) {
    ConfusionMatrix c(2);
    c(1, 1) = correct;
    c(2, 1) = 1.0 - correct;
    c(1, 2) = 1.0 - correct;
    c(2, 2) = correct;
    return c;
}

long double log_cn_density(std::complex<double> y, std::complex<double> mu,
                           double v) {
    return -static_cast<long double>(std::norm(y - mu)) / v -
           logl(static_cast<long double>(M_PI) * v);
}

NetworkScenario tiny_scenario(double p_total) {
    NetworkScenario s;
    s.n_sensors = 2;
    s.m_hypotheses = 2;
    s.priors = {0.5, 0.5};
    s.distances = {2.0, 3.0};
    s.channel_variances = {1e-3, 4e-4};
    s.noise_variance = 1e-3;
    s.p_total = p_total;
    return s;
}

PowerPlan split_plan(const std::vector<double>& totals, double r) {
    PowerPlan p;
    for (double t : totals) {
        p.data_powers.push_back(r * t);
        p.training_powers.push_back((1.0 - r) * t);
    }
    return p;
}

} // namespace

TEST_CASE("gaussian_j closed form matches a sampling estimate") {
    HypothesisMoments a, b;
    a.mean = {{0.3, -0.2}, {1.0, 0.5}};
    a.variance = {0.8, 1.4};
    b.mean = {{-0.1, 0.4}, {0.6, -0.3}};
    b.variance = {1.1, 0.6};

    RngStream g(5);
    oracle::Accum acc;
    for (int t = 0; t < 200000; ++t) {
        long double la = 0.0L, lb = 0.0L;
        bool from_a = (t & 1) == 0;
        const HypothesisMoments& src = from_a ? a : b;
        for (std::size_t d = 0; d < 2; ++d) {
            std::complex<double> y =
                src.mean[d] + g.complex_normal(src.variance[d]);
            la += log_cn_density(y, a.mean[d], a.variance[d]);
            lb += log_cn_density(y, b.mean[d], b.variance[d]);
        }
        acc.add(static_cast<double>(from_a ? la - lb : lb - la));
    }
    // gaussian_j uses the halved convention, so it equals the plain
    // average of the signed log ratio over both source parities.
    double j = gaussian_j(a, b);
    CHECK(std::fabs(acc.mean() - j) < 8.0 * acc.stderr_mean());
    CHECK(gaussian_j(b, a) == doctest::Approx(j).epsilon(1e-12));
    CHECK(gaussian_j(a, a) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("gaussian_j reduces to the mean-shift formula at equal variance") {
    HypothesisMoments a, b;
    a.mean = {{1.0, 2.0}};
    b.mean = {{-0.5, 1.0}};
    a.variance = {0.7};
    b.variance = {0.7};
    double shift = std::norm(std::complex<double>(1.5, 1.0));
    CHECK(gaussian_j(a, b) == doctest::Approx(shift / 0.7).epsilon(1e-12));
}

TEST_CASE("psk moments match direct mixture statistics") {
    auto means = calibrate_means(0.2, 4, 1.0);
    std::vector<ConfusionMatrix> conf = {confusion_matrix(means, 0.5, 0.5)};
    std::vector<double> g_hat = {1.3};
    std::vector<double> pd = {2.1};
    std::vector<double> w2 = {0.37};

    for (int hyp = 1; hyp <= 4; ++hyp) {
        HypothesisMoments mom = psk_moments(conf, hyp, g_hat, pd, w2);
        REQUIRE(mom.mean.size() == 1);

        std::complex<double> beta{0.0, 0.0};
        for (int l = 1; l <= 4; ++l)
            beta += modulate_psk(l, 4) * conf[0](l, hyp);
        std::complex<double> mean_ref =
            std::sqrt(g_hat[0] * pd[0]) * beta;
        double var_ref =
            w2[0] + g_hat[0] * pd[0] * (1.0 - std::norm(beta));
        CHECK(std::abs(mom.mean[0] - mean_ref) < 1e-12);
        CHECK(mom.variance[0] == doctest::Approx(var_ref).epsilon(1e-12));

        // Monte Carlo over the sent symbol and the filtered noise.
        RngStream g(static_cast<std::uint64_t>(hyp) * 31 + 7);
        std::vector<double> col(4);
        for (int l = 1; l <= 4; ++l)
            col[static_cast<std::size_t>(l - 1)] = conf[0](l, hyp);
        oracle::Accum re, im, spread;
        for (int t = 0; t < 100000; ++t) {
            int l = g.categorical(col);
            std::complex<double> y =
                std::sqrt(g_hat[0] * pd[0]) * modulate_psk(l, 4) +
                g.complex_normal(w2[0]);
            re.add(y.real());
            im.add(y.imag());
            spread.add(std::norm(y - mean_ref));
        }
        CHECK(std::fabs(re.mean() - mean_ref.real()) <
              4.0 * re.stderr_mean());
        CHECK(std::fabs(im.mean() - mean_ref.imag()) <
              4.0 * im.stderr_mean());
        CHECK(std::fabs(spread.mean() - var_ref) <
              4.0 * spread.stderr_mean());
    }
}

TEST_CASE("fsk moments enumerate tones sensor-major") {
    auto means = calibrate_means(0.3, 2, 1.0);
    std::vector<ConfusionMatrix> conf = {confusion_matrix(means, 0.5, 0.5),
                                         confusion_matrix(means, 0.5, 0.5)};
    std::vector<double> g_hat = {0.9, 1.7};
    std::vector<double> pd = {1.2, 0.4};
    std::vector<double> w2 = {0.2, 0.3};
    double sn2 = 0.05;

    HypothesisMoments mom = fsk_moments(conf, 2, g_hat, pd, w2, sn2);
    REQUIRE(mom.mean.size() == 4); // two sensors, two tones each
    for (int k = 0; k < 2; ++k) {
        for (int l = 1; l <= 2; ++l) {
            std::size_t idx = static_cast<std::size_t>(k * 2 + l - 1);
            double pli = conf[static_cast<std::size_t>(k)](l, 2);
            double amp = std::sqrt(
                g_hat[static_cast<std::size_t>(k)] *
                pd[static_cast<std::size_t>(k)]);
            CHECK(mom.mean[idx].real() ==
                  doctest::Approx(amp * pli).epsilon(1e-12));
            CHECK(mom.mean[idx].imag() == doctest::Approx(0.0));
            double base = l == 2 ? w2[static_cast<std::size_t>(k)] : sn2;
            double var_ref = base + g_hat[static_cast<std::size_t>(k)] *
                                        pd[static_cast<std::size_t>(k)] *
                                        pli * (1.0 - pli);
            CHECK(mom.variance[idx] ==
                  doctest::Approx(var_ref).epsilon(1e-12));
        }
    }
}

TEST_CASE("conditional_j assembles prior-weighted pairwise divergences") {
    auto means = calibrate_means(0.25, 2, 1.0);
    std::vector<ConfusionMatrix> conf = {confusion_matrix(means, 0.5, 0.5),
                                         symmetric_binary(0.85)};
    std::vector<double> g_hat = {1.1, 0.6};
    PowerPlan plan = split_plan({2.0, 3.0}, 0.5);
    std::vector<double> errv = {0.05, 0.08};
    std::vector<double> priors = {0.3, 0.7};

    for (Modulation mod : {Modulation::psk, Modulation::fsk}) {
        DivergenceReport rep =
            conditional_j(conf, g_hat, plan, errv, priors, mod, 1e-2);
        CHECK(rep.total > 0.0);
        double manual = 0.0;
        for (int i = 1; i <= 2; ++i) {
            CHECK(rep.pair(i, i) == 0.0);
            for (int j = 1; j <= 2; ++j) {
                CHECK(rep.pair(i, j) ==
                      doctest::Approx(rep.pair(j, i)).epsilon(1e-12));
                manual += 0.5 * priors[static_cast<std::size_t>(i - 1)] *
                          priors[static_cast<std::size_t>(j - 1)] *
                          rep.pair(i, j);
            }
        }
        CHECK(rep.total == doctest::Approx(manual).epsilon(1e-12));
        CHECK(rep.approx_trace > 0.0);
    }
}

TEST_CASE("conditional_j grows with data power") {
    std::vector<ConfusionMatrix> conf = {symmetric_binary(0.9)};
    std::vector<double> g_hat = {1.0};
    std::vector<double> errv = {0.02};
    std::vector<double> priors = {0.5, 0.5};
    double prev = 0.0;
    for (double p : {0.5, 1.0, 2.0, 4.0, 8.0}) {
        PowerPlan plan = split_plan({p}, 0.6);
        double j = conditional_j(conf, g_hat, plan, errv, priors,
                                 Modulation::psk, 1e-2)
                       .total;
        CHECK(j > prev);
        prev = j;
    }
}

TEST_CASE("average_j_coherent equals the sampled mean of conditional_j") {
    NetworkScenario s = tiny_scenario(4000.0);
    std::vector<ConfusionMatrix> conf = {symmetric_binary(0.9),
                                         symmetric_binary(0.7)};
    double r = 0.4;
    std::vector<double> totals = {0.6 * s.p_total, 0.4 * s.p_total};
    PowerPlan plan = split_plan(totals, r);

    DivergenceReport closed =
        average_j_coherent(s, plan, conf, s.priors);

    RngStream g(404);
    oracle::Accum acc;
    std::vector<double> errv(2), mg(2);
    for (int k = 0; k < 2; ++k) {
        double gt = plan.training_powers[static_cast<std::size_t>(k)] /
                    s.noise_variance;
        double sh2 = s.channel_variances[static_cast<std::size_t>(k)];
        errv[static_cast<std::size_t>(k)] = sh2 / (1.0 + sh2 * gt);
        mg[static_cast<std::size_t>(k)] =
            sh2 * sh2 * gt / (1.0 + sh2 * gt);
    }
    for (int t = 0; t < 100000; ++t) {
        std::vector<double> g_hat = {g.exponential(mg[0]),
                                     g.exponential(mg[1])};
        acc.add(conditional_j(conf, g_hat, plan, errv, s.priors,
                              Modulation::psk, s.noise_variance)
                    .total);
    }
    CHECK(std::fabs(acc.mean() - closed.total) <
          4.0 * acc.stderr_mean() + 1e-3 * closed.total);
}

TEST_CASE("average_j_coherent is symmetric in the data share") {
    NetworkScenario s = tiny_scenario(1000.0);
    std::vector<ConfusionMatrix> conf = {symmetric_binary(0.85),
                                         symmetric_binary(0.75)};
    std::vector<double> totals = {600.0, 400.0};
    for (double r : {0.1, 0.25, 0.45}) {
        double lo =
            average_j_coherent(s, split_plan(totals, r), conf, s.priors)
                .total;
        double hi = average_j_coherent(s, split_plan(totals, 1.0 - r), conf,
                                       s.priors)
                        .total;
        CHECK(lo == doctest::Approx(hi).epsilon(1e-10));
    }
}

TEST_CASE("average_j_coherent rejects degenerate splits of powered sensors") {
    NetworkScenario s = tiny_scenario(1000.0);
    std::vector<ConfusionMatrix> conf = {symmetric_binary(0.85),
                                         symmetric_binary(0.75)};
    CHECK_THROWS_AS(
        average_j_coherent(s, split_plan({600.0, 400.0}, 0.0), conf,
                           s.priors),
        std::domain_error);
    CHECK_THROWS_AS(
        average_j_coherent(s, split_plan({600.0, 400.0}, 1.0), conf,
                           s.priors),
        std::domain_error);
}

TEST_CASE("a powerless sensor adds nothing to the average divergence") {
    NetworkScenario s = tiny_scenario(1000.0);
    std::vector<ConfusionMatrix> conf = {symmetric_binary(0.85),
                                         symmetric_binary(0.75)};
    PowerPlan full = split_plan({1000.0, 0.0}, 0.5);
    double with_dead = average_j_coherent(s, full, conf, s.priors).total;

    NetworkScenario solo = s;
    solo.n_sensors = 1;
    solo.distances = {2.0};
    solo.channel_variances = {1e-3};
    PowerPlan one = split_plan({1000.0}, 0.5);
    double alone = average_j_coherent(
                       solo, one, {symmetric_binary(0.85)}, solo.priors)
                       .total;
    CHECK(with_dead == doctest::Approx(alone).epsilon(1e-12));
}

TEST_CASE("average_j_coherent stays finite as the mixture variance vanishes") {
    NetworkScenario s = tiny_scenario(1000.0);
    // Near-perfect local sensing drives B = 1 - |beta|^2 toward zero.
    std::vector<ConfusionMatrix> conf = {symmetric_binary(1.0 - 1e-13),
                                         symmetric_binary(1.0 - 1e-13)};
    PowerPlan plan = split_plan({600.0, 400.0}, 0.5);
    double tiny_b = average_j_coherent(s, plan, conf, s.priors).total;
    CHECK(std::isfinite(tiny_b));

    // B = 4e(1 - e) sits just above the limit branch threshold here, so the
    // general form should agree with the B -> 0 limit to O(B / x).
    std::vector<ConfusionMatrix> conf2 = {symmetric_binary(1.0 - 2.5e-8),
                                          symmetric_binary(1.0 - 2.5e-8)};
    double small_b = average_j_coherent(s, plan, conf2, s.priors).total;
    CHECK(tiny_b == doctest::Approx(small_b).epsilon(1e-3));
    CHECK(average_j_coherent(s, plan, conf, s.priors).positive_dcoef_terms ==
          0);
}

TEST_CASE("total_j_statistics matches direct enumeration") {
    NetworkScenario s = tiny_scenario(3000.0);
    auto means = calibrate_means(0.2, 2, 1.0);
    std::vector<ConfusionMatrix> conf = {confusion_matrix(means, 0.5, 0.5),
                                         symmetric_binary(0.8)};
    std::vector<double> pd = {1800.0, 1200.0};

    DivergenceReport rep = total_j_statistics(s, pd, conf, s.priors);

    double manual_pair = 0.0;
    for (int k = 0; k < 2; ++k) {
        for (int l = 1; l <= 2; ++l) {
            auto v = [&](int hyp) {
                return s.noise_variance +
                       conf[static_cast<std::size_t>(k)](l, hyp) *
                           pd[static_cast<std::size_t>(k)] *
                           s.channel_variances[static_cast<std::size_t>(k)];
            };
            double d = v(1) - v(2);
            manual_pair += 0.5 * d * d / (v(1) * v(2));
        }
    }
    CHECK(rep.pair(1, 2) == doctest::Approx(manual_pair).epsilon(1e-12));
    CHECK(rep.total ==
          doctest::Approx(0.5 * 2.0 * 0.25 * manual_pair).epsilon(1e-12));
    CHECK(rep.total >= 0.0);
}

TEST_CASE("report pair() reads the row-major pairwise table") {
    NetworkScenario s = tiny_scenario(3000.0);
    std::vector<ConfusionMatrix> conf = {symmetric_binary(0.9),
                                         symmetric_binary(0.8)};
    std::vector<double> even = {1500.0, 1500.0};
    DivergenceReport rep = total_j_statistics(s, even, conf, s.priors);
    REQUIRE(rep.pairwise.size() == 4);
    CHECK(rep.pair(1, 2) == rep.pairwise[1]);
    CHECK(rep.pair(2, 1) == rep.pairwise[2]);
    CHECK(rep.pair(1, 1) == rep.pairwise[0]);
}
