#ifndef DETFUSE_PHY_HPP
#define DETFUSE_PHY_HPP

#include <complex>
#include <cstdint>
#include <vector>

#include "detfuse/rng.hpp"

namespace detfuse {

enum class Modulation { psk, fsk };

// One Rayleigh block-fading realization.
struct ChannelDraw {
    std::complex<double> coefficient;
    double amplitude = 0.0;
    double phase = 0.0; // [0, 2*pi)
};

// Training and data halves of one sensor-to-fusion-center block.
// PSK blocks hold one sample each; FSK blocks hold one sample per tone.
struct ReceivedBlock {
    std::vector<std::complex<double>> training;
    std::vector<std::complex<double>> data;
};

enum class EstimateKind { coherent_full, amplitude_only, statistics_only };

// What the fusion center knows about one sensor's channel.
struct ChannelEstimate {
    EstimateKind kind = EstimateKind::statistics_only;
    std::complex<double> coefficient{}; // coherent_full
    double amplitude = 0.0;             // amplitude_only
    double error_variance = 0.0;        // coherent_full, amplitude_only
    double channel_variance = 0.0;      // statistics_only

    static ChannelEstimate coherent(std::complex<double> h, double err_var);
    static ChannelEstimate amplitude_only_est(double amp, double err_var);
    static ChannelEstimate statistics(double sigma_h2);
};

// Unit-energy symbol for hypothesis index i, 1 <= i <= m.
std::complex<double> modulate_psk(int i, int m);
std::vector<std::complex<double>> modulate_fsk(int i, int m);

// h = sqrt(sigma_h2 / 2) (g1 + j g2) from two standard normal draws.
ChannelDraw draw_channel(double sigma_h2, double g1, double g2);

// Training phase always sends a fixed pilot: the unit symbol for PSK, the
// first tone for FSK.
std::vector<std::complex<double>> transmit_training(const ChannelDraw& ch,
                                                    double p_training,
                                                    Modulation mod, int m,
                                                    double noise_variance,
                                                    RngStream& rng);

std::vector<std::complex<double>> transmit_data(const ChannelDraw& ch,
                                                double p_data, int symbol,
                                                Modulation mod, int m,
                                                double noise_variance,
                                                RngStream& rng);

// Full block: training noise is drawn first, then data noise.
ReceivedBlock transmit(const ChannelDraw& ch, double p_training, double p_data,
                       int symbol, Modulation mod, int m,
                       double noise_variance, RngStream& rng);

// Linear MMSE channel estimate from the PSK pilot observation:
//   h_est = sigma_h2 sqrt(p_t) / (sigma_h2 p_t + sigma_n2) * y_t
// with estimation error variance sigma_h2 / (1 + sigma_h2 p_t / sigma_n2).
ChannelEstimate mmse_channel_estimate(std::complex<double> y_training,
                                      double p_training, double sigma_h2,
                                      double sigma_n2);

// Posterior mean amplitude from the pilot tone energy v_t = |y_t|^2 for a
// unit-variance channel at pilot SNR gamma_t = p_t / sigma_n2:
//   s2 = 1/(gamma_t + 1), nu = sqrt(gamma_t v_t / sigma_n2) / (gamma_t + 1),
//   est = sqrt(pi s2)/2 * F(-1/2, 1; -nu^2/s2).
double mmse_amplitude_estimate(double v_training, double gamma_t,
                               double sigma_n2);

// Mean squared error of the unit-variance amplitude estimator at pilot SNR
// gamma_t, evaluated by Monte Carlo over the pilot observation.  The draw
// stream is fixed by `seed`, so results are reproducible.
double amplitude_error_variance(double gamma_t, int mc_samples,
                                std::uint64_t seed = 0x5eed);

// Physical-units amplitude estimate for a channel with variance sigma_h2:
// the pilot is renormalized to a unit-variance channel, estimated, and the
// result rescaled.  unit_error_variance is amplitude_error_variance() at
// the renormalized pilot SNR p_t sigma_h2 / sigma_n2.
ChannelEstimate amplitude_estimate_for_channel(double v_training,
                                               double p_training,
                                               double sigma_h2,
                                               double sigma_n2,
                                               double unit_error_variance);

} // namespace detfuse

#endif
