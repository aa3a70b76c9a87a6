#ifndef DETFUSE_FUSION_HPP
#define DETFUSE_FUSION_HPP

#include <complex>
#include <string>
#include <vector>

#include "detfuse/phy.hpp"
#include "detfuse/sensing.hpp"

namespace detfuse {

// Which fusion-center receiver is in use.  coherent demodulates PSK with a
// full channel estimate; the other two demodulate FSK envelopes, either
// with an estimated amplitude or with channel statistics alone.
enum class Receiver { coherent, noncoherent_amplitude, noncoherent_statistics };

std::string to_string(Receiver r);
Receiver receiver_from_string(const std::string& s); // throws config_error
Modulation receiver_modulation(Receiver r);

// Everything the fusion center sees for one sensor in one block.
struct SensorChannel {
    std::vector<std::complex<double>> data; // 1 sample (PSK) or M (FSK)
    ChannelEstimate estimate;
    ConfusionMatrix confusion;
    double data_power = 0.0;
    double training_power = 0.0;
};

struct FusionInput {
    Modulation modulation = Modulation::psk;
    std::vector<double> priors;
    double noise_variance = 0.0;
    std::vector<SensorChannel> sensors;
};

struct FusionDecision {
    int decision = 0;               // 1-based hypothesis index
    std::vector<double> log_scores; // up to a common additive constant
};

// MAP fusion of PSK data using full channel estimates.  Per-sensor
// exponents are max-shifted before the log-sum, so the evaluation never
// overflows; score ties resolve to the lowest hypothesis index.
FusionDecision fuse_coherent_psk(const FusionInput& in);

// MAP fusion of FSK envelopes using amplitude estimates.
FusionDecision fuse_noncoherent_amplitude_fsk(const FusionInput& in);

// MAP fusion of FSK envelopes from channel statistics alone.  No pilot is
// transmitted in this mode; any nonzero training power is a config_error.
FusionDecision fuse_noncoherent_statistics_fsk(const FusionInput& in);

// Dispatch on receiver kind.
FusionDecision fuse(Receiver r, const FusionInput& in);

} // namespace detfuse

#endif
