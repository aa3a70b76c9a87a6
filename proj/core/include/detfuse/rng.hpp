#ifndef DETFUSE_RNG_HPP
#define DETFUSE_RNG_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>

namespace detfuse {

// Counter-based random stream.  Streams are derived from a root seed plus
// (point, trial) indices, so concurrent trial execution cannot reorder
// randomness: trial t always sees the same draws no matter which thread
// runs it.  The generator is splitmix64; draws within a stream are
// sequential applications of the mix function to an incrementing counter.
class RngStream {
public:
    explicit RngStream(std::uint64_t key) : counter_(key) {}

    // Derivation used everywhere in the harness: one stream per
    // (root seed, sweep point, trial) triple.
    static RngStream for_trial(std::uint64_t root, std::uint64_t point,
                               std::uint64_t trial) {
        std::uint64_t k = mix(root + 0x9e3779b97f4a7c15ULL);
        k = mix(k ^ (point + 0xbf58476d1ce4e5b9ULL));
        k = mix(k ^ (trial + 0x94d049bb133111ebULL));
        return RngStream(k);
    }

    std::uint64_t next_u64() {
        counter_ += 0x9e3779b97f4a7c15ULL;
        return mix(counter_);
    }

    // Uniform on (0,1]; never returns 0 so log() below is safe.
    double uniform_pos() {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    }

    // Uniform on [0,1).
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Box-Muller pair of independent standard normals.
    std::pair<double, double> normal_pair() {
        double u1 = uniform_pos();
        double u2 = uniform();
        double rad = std::sqrt(-2.0 * std::log(u1));
        double ang = 6.283185307179586476925286766559 * u2;
        return {rad * std::cos(ang), rad * std::sin(ang)};
    }

    // Single standard normal.  Consumes a full pair; keeping no cached
    // state makes stream replay independent of call pairing.
    double normal() { return normal_pair().first; }

    double exponential(double mean) { return -mean * std::log(uniform_pos()); }

    // Circularly symmetric complex normal with E|z|^2 = variance.
    std::complex<double> complex_normal(double variance) {
        auto [a, b] = normal_pair();
        double s = std::sqrt(variance / 2.0);
        return {s * a, s * b};
    }

    // Draws a 1-based index from a probability vector.
    int categorical(std::span<const double> probs) {
        double u = uniform();
        double acc = 0.0;
        for (std::size_t i = 0; i < probs.size(); ++i) {
            acc += probs[i];
            if (u < acc) return static_cast<int>(i) + 1;
        }
        return static_cast<int>(probs.size());
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xbf58476d1ce4e5b9ULL;
        z ^= z >> 27;
        z *= 0x94d049bb133111ebULL;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t counter_;
};

} // namespace detfuse

#endif
