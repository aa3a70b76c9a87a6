#include "detfuse/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "detfuse/errors.hpp"
#include "detfuse/specfun.hpp"

namespace detfuse {

std::string to_string(Receiver r) {
    switch (r) {
        case Receiver::coherent: return "coherent";
        case Receiver::noncoherent_amplitude: return "noncoherent_amplitude";
        case Receiver::noncoherent_statistics: return "noncoherent_statistics";
    }
    throw std::invalid_argument("to_string: bad Receiver");
}

Receiver receiver_from_string(const std::string& s) {
    if (s == "coherent") return Receiver::coherent;
    if (s == "noncoherent_amplitude") return Receiver::noncoherent_amplitude;
    if (s == "noncoherent_statistics") return Receiver::noncoherent_statistics;
    throw config_error("unknown receiver: " + s);
}

Modulation receiver_modulation(Receiver r) {
    return r == Receiver::coherent ? Modulation::psk : Modulation::fsk;
}

namespace {

void check_input(const FusionInput& in, Modulation expected,
                 EstimateKind expected_kind, const char* fn) {
    if (in.modulation != expected)
        throw config_error(std::string(fn) + ": wrong modulation");
    int m = static_cast<int>(in.priors.size());
    if (m < 2) throw std::invalid_argument(std::string(fn) + ": priors length");
    if (!(in.noise_variance > 0.0))
        throw std::invalid_argument(std::string(fn) + ": noise variance <= 0");
    if (in.sensors.empty())
        throw config_error(std::string(fn) + ": no sensors");
    std::size_t want =
        expected == Modulation::psk ? 1u : static_cast<std::size_t>(m);
    for (const auto& s : in.sensors) {
        if (s.data.size() != want)
            throw std::invalid_argument(std::string(fn) + ": data block size");
        if (s.estimate.kind != expected_kind)
            throw config_error(std::string(fn) + ": wrong estimate kind");
        if (s.confusion.order() != m)
            throw std::invalid_argument(std::string(fn) + ": confusion order");
        if (s.data_power < 0.0 || s.training_power < 0.0)
            throw std::invalid_argument(std::string(fn) + ": negative power");
    }
}

// Adds, for every hypothesis m, the max-shifted log of
// sum_i p(i|m) exp(exponents[i]) to scores[m].
void accumulate_sensor(std::vector<double>& scores,
                       const std::vector<double>& exponents,
                       const ConfusionMatrix& conf) {
    const int m = static_cast<int>(scores.size());
    double shift = *std::max_element(exponents.begin(), exponents.end());
    for (int hyp = 1; hyp <= m; ++hyp) {
        double acc = 0.0;
        for (int i = 1; i <= m; ++i)
            acc += conf(i, hyp) *
                   std::exp(exponents[static_cast<std::size_t>(i - 1)] - shift);
        scores[static_cast<std::size_t>(hyp - 1)] += shift + std::log(acc);
    }
}

FusionDecision finish(std::vector<double> scores) {
    FusionDecision out;
    out.decision = 1;
    for (std::size_t i = 1; i < scores.size(); ++i)
        if (scores[i] > scores[static_cast<std::size_t>(out.decision - 1)])
            out.decision = static_cast<int>(i) + 1;
    out.log_scores = std::move(scores);
    return out;
}

std::vector<double> prior_scores(const FusionInput& in) {
    std::vector<double> scores(in.priors.size());
    for (std::size_t i = 0; i < in.priors.size(); ++i) {
        if (!(in.priors[i] > 0.0))
            throw std::invalid_argument("fusion: prior <= 0");
        scores[i] = std::log(in.priors[i]);
    }
    return scores;
}

} // namespace

FusionDecision fuse_coherent_psk(const FusionInput& in) {
    check_input(in, Modulation::psk, EstimateKind::coherent_full,
                "fuse_coherent_psk");
    const int m = static_cast<int>(in.priors.size());
    auto scores = prior_scores(in);
    std::vector<double> exponents(static_cast<std::size_t>(m));
    for (const auto& s : in.sensors) {
        double sig_w2 = s.data_power * s.estimate.error_variance + in.noise_variance;
        std::complex<double> corr = s.data[0] * std::conj(s.estimate.coefficient);
        double scale = 2.0 * std::sqrt(s.data_power) / sig_w2;
        for (int i = 1; i <= m; ++i) {
            std::complex<double> rot = std::conj(modulate_psk(i, m)) * corr;
            exponents[static_cast<std::size_t>(i - 1)] = scale * rot.real();
        }
        accumulate_sensor(scores, exponents, s.confusion);
    }
    return finish(std::move(scores));
}

FusionDecision fuse_noncoherent_amplitude_fsk(const FusionInput& in) {
    check_input(in, Modulation::fsk, EstimateKind::amplitude_only,
                "fuse_noncoherent_amplitude_fsk");
    const int m = static_cast<int>(in.priors.size());
    auto scores = prior_scores(in);
    std::vector<double> exponents(static_cast<std::size_t>(m));
    for (const auto& s : in.sensors) {
        double sig_w2 = s.data_power * s.estimate.error_variance + in.noise_variance;
        double quad = s.data_power * s.estimate.error_variance /
                      (in.noise_variance * sig_w2);
        double bess = 2.0 * std::sqrt(s.data_power) * s.estimate.amplitude / sig_w2;
        for (int i = 0; i < m; ++i) {
            double mag = std::abs(s.data[static_cast<std::size_t>(i)]);
            exponents[static_cast<std::size_t>(i)] =
                quad * mag * mag + specfun::log_bessel_i0(bess * mag);
        }
        accumulate_sensor(scores, exponents, s.confusion);
    }
    return finish(std::move(scores));
}

FusionDecision fuse_noncoherent_statistics_fsk(const FusionInput& in) {
    check_input(in, Modulation::fsk, EstimateKind::statistics_only,
                "fuse_noncoherent_statistics_fsk");
    for (const auto& s : in.sensors)
        if (s.training_power != 0.0)
            throw config_error(
                "fuse_noncoherent_statistics_fsk: nonzero training power");
    const int m = static_cast<int>(in.priors.size());
    auto scores = prior_scores(in);
    std::vector<double> exponents(static_cast<std::size_t>(m));
    for (const auto& s : in.sensors) {
        double ps = s.data_power * s.estimate.channel_variance;
        double quad = ps / (in.noise_variance * (in.noise_variance + ps));
        for (int i = 0; i < m; ++i) {
            double mag = std::abs(s.data[static_cast<std::size_t>(i)]);
            exponents[static_cast<std::size_t>(i)] = quad * mag * mag;
        }
        accumulate_sensor(scores, exponents, s.confusion);
    }
    return finish(std::move(scores));
}

FusionDecision fuse(Receiver r, const FusionInput& in) {
    switch (r) {
        case Receiver::coherent: return fuse_coherent_psk(in);
        case Receiver::noncoherent_amplitude:
            return fuse_noncoherent_amplitude_fsk(in);
        case Receiver::noncoherent_statistics:
            return fuse_noncoherent_statistics_fsk(in);
    }
    throw std::invalid_argument("fuse: bad receiver");
}

} // namespace detfuse
