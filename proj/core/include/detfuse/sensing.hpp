#ifndef DETFUSE_SENSING_HPP
#define DETFUSE_SENSING_HPP

#include <span>
#include <vector>

namespace detfuse {

// Local observation model.  Under hypothesis m sensor k sees
//   x_k = eta_{k,m} + nu + z,  nu ~ N(0, sigma_nu2), z ~ N(0, sigma_z2).
// Means are strictly increasing in m for every sensor.
struct SourceModel {
    std::vector<std::vector<double>> means; // [sensor][hypothesis]
    double sigma_nu2 = 0.0;
    double sigma_z2 = 1.0;

    void validate() const; // throws std::invalid_argument
};

// P(decide i | true m), stored column-stochastic: sum_i p(i,m) = 1.
class ConfusionMatrix {
public:
    ConfusionMatrix() = default;
    explicit ConfusionMatrix(int m)
        : m_(m), p_(static_cast<std::size_t>(m) * m, 0.0) {}

    int order() const { return m_; }

    // 1-based hypothesis indices.
    double operator()(int decided, int truth) const {
        return p_[index(decided, truth)];
    }
    double& operator()(int decided, int truth) { return p_[index(decided, truth)]; }

private:
    std::size_t index(int decided, int truth) const {
        return static_cast<std::size_t>(decided - 1) * m_ +
               static_cast<std::size_t>(truth - 1);
    }
    int m_ = 0;
    std::vector<double> p_;
};

// One noisy observation of hypothesis m (1-based) at sensor k (1-based).
// draw1/draw2 are standard normal variates supplied by the caller.
double observe(const SourceModel& model, int sensor, int hypothesis,
               double draw1, double draw2);

// Minimum-distance decision over the given means, 1-based result,
// ties resolved to the lower index.
int local_decide(std::span<const double> means, double x);

// Exact confusion matrix of the minimum-distance detector: decision
// thresholds at midpoints between adjacent means, Gaussian tails with
// standard deviation sqrt(sigma_nu2 + sigma_z2).
ConfusionMatrix confusion_matrix(std::span<const double> means,
                                 double sigma_nu2, double sigma_z2);

// Prior-weighted probability that the local decision is wrong.
double sensor_error_prob(const ConfusionMatrix& c, std::span<const double> priors);

// Equally spaced symmetric means around 0 whose minimum-distance error
// under uniform priors matches target_error to within 1e-6.  sigma is the
// total observation standard deviation.  Valid targets lie in
// (0, (M-1)/M]; the boundary value maps to a minimal spacing.
std::vector<double> calibrate_means(double target_error, int m, double sigma);

} // namespace detfuse

#endif
