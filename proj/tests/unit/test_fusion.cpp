#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "detfuse/errors.hpp"
#include "detfuse/fusion.hpp"
#include "detfuse/rng.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace detfuse;

namespace {

std::vector<double> random_simplex(int m, RngStream& g) {
    std::vector<double> p(static_cast<std::size_t>(m));
    double sum = 0.0;
    for (double& v : p) {
        v = g.exponential(1.0) + 0.05;
        sum += v;
    }
    for (double& v : p) v /= sum;
    return p;
}

// One physically generated sensor observation with plausible magnitudes.
FusionInput random_input(Receiver rx, int n, int m, RngStream& g) {
    FusionInput in;
    in.modulation = receiver_modulation(rx);
    in.noise_variance = 0.05;
    in.priors = random_simplex(m, g);
    int truth = g.categorical(in.priors);
    for (int k = 0; k < n; ++k) {
        double sh2 = g.exponential(0.8) + 0.05;
        double pt = rx == Receiver::noncoherent_statistics
                        ? 0.0
                        : 0.2 + 4.0 * g.uniform();
        double pd = 0.2 + 4.0 * g.uniform();
        double cap = (m - 1.0) / m;
        auto means =
            calibrate_means(0.05 + (cap - 0.1) * g.uniform(), m, 1.0);
        ConfusionMatrix conf = confusion_matrix(means, 0.5, 0.5);

        auto [g1, g2] = g.normal_pair();
        ChannelDraw ch = draw_channel(sh2, g1, g2);
        auto pilot = transmit_training(ch, pt, in.modulation, m,
                                       in.noise_variance, g);
        ChannelEstimate est;
        switch (rx) {
            case Receiver::coherent:
                est = mmse_channel_estimate(pilot[0], pt, sh2,
                                            in.noise_variance);
                break;
            case Receiver::noncoherent_amplitude: {
                double gamma_eff = pt * sh2 / in.noise_variance;
                // Any positive error variance is a valid receiver input;
                // a cheap surrogate keeps this test fast.
                double unit_err = 1.0 / (1.0 + gamma_eff);
                est = amplitude_estimate_for_channel(std::norm(pilot[0]), pt,
                                                     sh2, in.noise_variance,
                                                     unit_err);
                break;
            }
            case Receiver::noncoherent_statistics:
                est = ChannelEstimate::statistics(sh2);
                break;
        }
        int sent = g.categorical([&] {
            std::vector<double> col(static_cast<std::size_t>(m));
            for (int l = 1; l <= m; ++l)
                col[static_cast<std::size_t>(l - 1)] = conf(l, truth);
            return col;
        }());

        SensorChannel s;
        s.data = transmit_data(ch, pd, sent, in.modulation, m,
                               in.noise_variance, g);
        s.estimate = est;
        s.confusion = conf;
        s.data_power = pd;
        s.training_power = pt;
        in.sensors.push_back(std::move(s));
    }
    return in;
}

ConfusionMatrix symmetric_binary(double correct) {
    ConfusionMatrix c(2);
    c(1, 1) = correct;
    c(2, 1) = 1.0 - correct;
    c(1, 2) = 1.0 - correct;
    c(2, 2) = correct;
    return c;
}

} // namespace

TEST_CASE("fusion agrees with the probability-domain oracle") {
    RngStream g(1001);
    for (Receiver rx : {Receiver::coherent, Receiver::noncoherent_amplitude,
                        Receiver::noncoherent_statistics}) {
        for (int m : {2, 4}) {
            int mismatches = 0;
            for (int t = 0; t < 800; ++t) {
                int n = 1 + static_cast<int>(g.uniform() * 6.0);
                FusionInput in = random_input(rx, n, m, g);
                FusionDecision d = fuse(rx, in);
                if (d.decision != oracle::fuse_probability_domain(rx, in))
                    ++mismatches;
            }
            CHECK(mismatches == 0);
        }
    }
}

TEST_CASE("per-receiver entry points match the dispatcher") {
    RngStream g(77);
    FusionInput a = random_input(Receiver::coherent, 3, 2, g);
    CHECK(fuse_coherent_psk(a).decision ==
          fuse(Receiver::coherent, a).decision);
    FusionInput b = random_input(Receiver::noncoherent_amplitude, 3, 4, g);
    CHECK(fuse_noncoherent_amplitude_fsk(b).decision ==
          fuse(Receiver::noncoherent_amplitude, b).decision);
    FusionInput c = random_input(Receiver::noncoherent_statistics, 3, 4, g);
    CHECK(fuse_noncoherent_statistics_fsk(c).decision ==
          fuse(Receiver::noncoherent_statistics, c).decision);
}

TEST_CASE("log scores rank hypotheses on a hand-built coherent input") {
    // One sensor, near-perfect local detector, strong channel knowledge:
    // the decision must follow the symbol actually sent.
    FusionInput in;
    in.modulation = Modulation::psk;
    in.noise_variance = 1e-4;
    in.priors = {0.5, 0.5};
    SensorChannel s;
    s.estimate = ChannelEstimate::coherent({1.0, 0.0}, 1e-6);
    s.data_power = 1.0;
    s.training_power = 1.0;
    s.confusion = symmetric_binary(0.999);
    s.data = {std::complex<double>(-1.0, 0.0)}; // symbol 2 at unit gain
    in.sensors.push_back(s);
    FusionDecision d = fuse_coherent_psk(in);
    CHECK(d.decision == 2);
    REQUIRE(d.log_scores.size() == 2);
    CHECK(d.log_scores[1] > d.log_scores[0]);

    in.sensors[0].data = {std::complex<double>(1.0, 0.0)};
    CHECK(fuse_coherent_psk(in).decision == 1);
}

TEST_CASE("exact score ties resolve to the lowest hypothesis") {
    FusionInput in;
    in.modulation = Modulation::psk;
    in.noise_variance = 0.1;
    in.priors = {0.5, 0.5};
    SensorChannel s;
    s.estimate = ChannelEstimate::coherent({0.7, 0.0}, 0.01);
    s.data_power = 2.0;
    s.training_power = 1.0;
    s.confusion = symmetric_binary(0.9);
    s.data = {std::complex<double>(0.0, 0.0)}; // no signal: all exponents 0
    in.sensors.push_back(s);
    FusionDecision d = fuse_coherent_psk(in);
    CHECK(d.log_scores[0] == d.log_scores[1]);
    CHECK(d.decision == 1);

    FusionInput fs;
    fs.modulation = Modulation::fsk;
    fs.noise_variance = 0.1;
    fs.priors = {0.5, 0.5};
    SensorChannel t;
    t.estimate = ChannelEstimate::statistics(0.4);
    t.data_power = 1.0;
    t.training_power = 0.0;
    t.confusion = symmetric_binary(0.8);
    t.data = {std::complex<double>(0.5, 0.0), std::complex<double>(0.0, -0.5)};
    fs.sensors.push_back(t);
    FusionDecision e = fuse_noncoherent_statistics_fsk(fs);
    CHECK(e.log_scores[0] == e.log_scores[1]);
    CHECK(e.decision == 1);
}

TEST_CASE("receiver and input consistency is enforced") {
    RngStream g(13);
    FusionInput ok = random_input(Receiver::coherent, 2, 2, g);

    FusionInput wrong_mod = ok;
    wrong_mod.modulation = Modulation::fsk;
    CHECK_THROWS_AS(fuse_coherent_psk(wrong_mod), config_error);

    FusionInput wrong_kind = ok;
    wrong_kind.sensors[0].estimate = ChannelEstimate::statistics(0.5);
    CHECK_THROWS_AS(fuse_coherent_psk(wrong_kind), config_error);

    FusionInput empty = ok;
    empty.sensors.clear();
    CHECK_THROWS_AS(fuse_coherent_psk(empty), config_error);

    // Structural misuse of the call, as opposed to a bad configuration.
    FusionInput bad_block = ok;
    bad_block.sensors[1].data.push_back({0.0, 0.0});
    CHECK_THROWS_AS(fuse_coherent_psk(bad_block), std::invalid_argument);

    FusionInput bad_conf = ok;
    bad_conf.sensors[0].confusion = ConfusionMatrix(4);
    CHECK_THROWS_AS(fuse_coherent_psk(bad_conf), std::invalid_argument);

    FusionInput neg_power = ok;
    neg_power.sensors[0].data_power = -1.0;
    CHECK_THROWS_AS(fuse_coherent_psk(neg_power), std::invalid_argument);

    FusionInput st = random_input(Receiver::noncoherent_statistics, 2, 2, g);
    st.sensors[0].training_power = 0.5;
    CHECK_THROWS_AS(fuse_noncoherent_statistics_fsk(st), config_error);
}

TEST_CASE("receiver names round trip") {
    for (Receiver r : {Receiver::coherent, Receiver::noncoherent_amplitude,
                       Receiver::noncoherent_statistics})
        CHECK(receiver_from_string(to_string(r)) == r);
    CHECK_THROWS_AS(receiver_from_string("psk"), config_error);
    CHECK(receiver_modulation(Receiver::coherent) == Modulation::psk);
    CHECK(receiver_modulation(Receiver::noncoherent_amplitude) ==
          Modulation::fsk);
}
