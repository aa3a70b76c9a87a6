#include "detfuse/phy.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "detfuse/specfun.hpp"

namespace detfuse {

namespace {
constexpr double two_pi = 6.283185307179586476925286766559;

void check_symbol(int i, int m, const char* fn) {
    if (m < 2) throw std::invalid_argument(std::string(fn) + ": m < 2");
    if (i < 1 || i > m)
        throw std::out_of_range(std::string(fn) + ": symbol index out of range");
}
} // namespace

ChannelEstimate ChannelEstimate::coherent(std::complex<double> h, double err_var) {
    ChannelEstimate e;
    e.kind = EstimateKind::coherent_full;
    e.coefficient = h;
    e.amplitude = std::abs(h);
    e.error_variance = err_var;
    return e;
}

ChannelEstimate ChannelEstimate::amplitude_only_est(double amp, double err_var) {
    ChannelEstimate e;
    e.kind = EstimateKind::amplitude_only;
    e.amplitude = amp;
    e.error_variance = err_var;
    return e;
}

ChannelEstimate ChannelEstimate::statistics(double sigma_h2) {
    ChannelEstimate e;
    e.kind = EstimateKind::statistics_only;
    e.channel_variance = sigma_h2;
    return e;
}

std::complex<double> modulate_psk(int i, int m) {
    check_symbol(i, m, "modulate_psk");
    double ang = two_pi * (i - 1) / m;
    return {std::cos(ang), std::sin(ang)};
}

std::vector<std::complex<double>> modulate_fsk(int i, int m) {
    check_symbol(i, m, "modulate_fsk");
    std::vector<std::complex<double>> tones(static_cast<std::size_t>(m),
                                            {0.0, 0.0});
    tones[static_cast<std::size_t>(i - 1)] = {1.0, 0.0};
    return tones;
}

ChannelDraw draw_channel(double sigma_h2, double g1, double g2) {
    if (!(sigma_h2 > 0.0))
        throw std::domain_error("draw_channel: sigma_h2 <= 0");
    double s = std::sqrt(sigma_h2 / 2.0);
    ChannelDraw d;
    d.coefficient = {s * g1, s * g2};
    d.amplitude = std::abs(d.coefficient);
    d.phase = std::arg(d.coefficient);
    if (d.phase < 0.0) d.phase += two_pi;
    return d;
}

namespace {

std::vector<std::complex<double>> received_vector(
    const ChannelDraw& ch, double power,
    const std::vector<std::complex<double>>& symbol, double noise_variance,
    RngStream& rng) {
    std::vector<std::complex<double>> y(symbol.size());
    double amp = std::sqrt(power);
    for (std::size_t i = 0; i < symbol.size(); ++i)
        y[i] = amp * ch.coefficient * symbol[i] + rng.complex_normal(noise_variance);
    return y;
}

} // namespace

std::vector<std::complex<double>> transmit_training(const ChannelDraw& ch,
                                                    double p_training,
                                                    Modulation mod, int m,
                                                    double noise_variance,
                                                    RngStream& rng) {
    if (p_training < 0.0)
        throw std::domain_error("transmit_training: negative power");
    if (!(noise_variance > 0.0))
        throw std::domain_error("transmit_training: noise variance <= 0");
    auto pilot = (mod == Modulation::psk)
                     ? std::vector<std::complex<double>>{{1.0, 0.0}}
                     : modulate_fsk(1, m);
    return received_vector(ch, p_training, pilot, noise_variance, rng);
}

std::vector<std::complex<double>> transmit_data(const ChannelDraw& ch,
                                                double p_data, int symbol,
                                                Modulation mod, int m,
                                                double noise_variance,
                                                RngStream& rng) {
    if (p_data < 0.0) throw std::domain_error("transmit_data: negative power");
    if (!(noise_variance > 0.0))
        throw std::domain_error("transmit_data: noise variance <= 0");
    auto sym = (mod == Modulation::psk)
                   ? std::vector<std::complex<double>>{modulate_psk(symbol, m)}
                   : modulate_fsk(symbol, m);
    return received_vector(ch, p_data, sym, noise_variance, rng);
}

ReceivedBlock transmit(const ChannelDraw& ch, double p_training, double p_data,
                       int symbol, Modulation mod, int m,
                       double noise_variance, RngStream& rng) {
    ReceivedBlock b;
    b.training = transmit_training(ch, p_training, mod, m, noise_variance, rng);
    b.data = transmit_data(ch, p_data, symbol, mod, m, noise_variance, rng);
    return b;
}

ChannelEstimate mmse_channel_estimate(std::complex<double> y_training,
                                      double p_training, double sigma_h2,
                                      double sigma_n2) {
    if (p_training < 0.0)
        throw std::domain_error("mmse_channel_estimate: negative power");
    if (!(sigma_h2 > 0.0) || !(sigma_n2 > 0.0))
        throw std::domain_error("mmse_channel_estimate: variance <= 0");
    double gamma_t = p_training / sigma_n2;
    std::complex<double> h_est = sigma_h2 * std::sqrt(p_training) /
                                 (sigma_h2 * p_training + sigma_n2) * y_training;
    double err_var = sigma_h2 / (1.0 + sigma_h2 * gamma_t);
    return ChannelEstimate::coherent(h_est, err_var);
}

double mmse_amplitude_estimate(double v_training, double gamma_t,
                               double sigma_n2) {
    if (v_training < 0.0)
        throw std::domain_error("mmse_amplitude_estimate: negative energy");
    if (gamma_t < 0.0)
        throw std::domain_error("mmse_amplitude_estimate: negative pilot SNR");
    if (!(sigma_n2 > 0.0))
        throw std::domain_error("mmse_amplitude_estimate: noise variance <= 0");
    double s2 = 1.0 / (gamma_t + 1.0);
    double nu = std::sqrt(gamma_t * v_training / sigma_n2) / (gamma_t + 1.0);
    double arg = -nu * nu / s2;
    return 0.5 * std::sqrt(3.14159265358979323846 * s2) *
           specfun::kummer_f1_half(arg);
}

double amplitude_error_variance(double gamma_t, int mc_samples,
                                std::uint64_t seed) {
    if (gamma_t < 0.0)
        throw std::domain_error("amplitude_error_variance: negative pilot SNR");
    if (mc_samples < 1)
        throw std::invalid_argument("amplitude_error_variance: mc_samples < 1");
    // For a unit-variance channel, nu^2/s2 = gamma_t * u with u ~ Exp(1),
    // independent of the noise level.  Conditioned on the pilot the channel
    // is complex normal with mean magnitude nu and variance s2, so
    // E[alpha^2 | v] = nu^2 + s2 and the per-pilot residual is
    //   s2 * (t + 1 - (pi/4) F(t)^2),  t = nu^2/s2.
    // That quantity is bounded in (0, 1], so its average keeps full
    // relative precision where the algebraically equal 1 - E[est^2] form
    // cancels to noise at high pilot SNR.
    RngStream rng(seed);
    double acc = 0.0;
    for (int i = 0; i < mc_samples; ++i) {
        double t = gamma_t * rng.exponential(1.0);
        double f = specfun::kummer_f1_half(-t);
        acc += t + 1.0 - 0.25 * 3.14159265358979323846 * f * f;
    }
    return acc / mc_samples / (gamma_t + 1.0);
}

ChannelEstimate amplitude_estimate_for_channel(double v_training,
                                               double p_training,
                                               double sigma_h2,
                                               double sigma_n2,
                                               double unit_error_variance) {
    if (!(sigma_h2 > 0.0))
        throw std::domain_error("amplitude_estimate_for_channel: sigma_h2 <= 0");
    double gamma_eff = p_training * sigma_h2 / sigma_n2;
    double unit_amp = mmse_amplitude_estimate(v_training, gamma_eff, sigma_n2);
    return ChannelEstimate::amplitude_only_est(std::sqrt(sigma_h2) * unit_amp,
                                               sigma_h2 * unit_error_variance);
}

} // namespace detfuse
