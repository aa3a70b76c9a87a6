#ifndef DETFUSE_DIVERGENCE_HPP
#define DETFUSE_DIVERGENCE_HPP

#include <complex>
#include <span>
#include <vector>

#include "detfuse/phy.hpp"
#include "detfuse/scenario.hpp"
#include "detfuse/sensing.hpp"

namespace detfuse {

// Moment-matched Gaussian surrogate for the fusion-center observation
// under one hypothesis: independent complex coordinates with the given
// means and variances.  Dimension is N for PSK, N*M for FSK (sensor-major,
// tone-minor).
struct HypothesisMoments {
    std::vector<std::complex<double>> mean;
    std::vector<double> variance;
};

enum class DivergenceKind {
    conditional_coherent,
    conditional_noncoherent,
    average_coherent,
    total_statistics
};

struct DivergenceReport {
    DivergenceKind kind = DivergenceKind::conditional_coherent;
    double total = 0.0;
    std::vector<double> pairwise; // M x M, row-major, zero diagonal
    // Count of off-diagonal closed-form terms whose D() coefficient is
    // positive.  The average-J monotonicity argument assumes none are;
    // violations are reported here rather than silently ignored.
    std::size_t positive_dcoef_terms = 0;
    // Sum over sensors of mean signal-to-filtered-noise ratio.  Small
    // values indicate the regime where the Gaussian surrogate is tight.
    // Reported for diagnostics only, never gated on.
    double approx_trace = 0.0;

    double pair(int i, int j) const; // 1-based
};

// J-divergence between two independent-coordinate Gaussians:
//   1/2 sum_d [ v1/v2 + v2/v1 + (1/v1 + 1/v2) |mu1 - mu2|^2 ] - dim.
double gaussian_j(const HypothesisMoments& a, const HypothesisMoments& b);

// Surrogate moments for hypothesis i (1-based) given realized channel
// gains g_hat (|h_est|^2 per sensor) and per-sensor filtered noise
// variances sigma_w2 = p_data * estimate_error_variance + sigma_n2.
// PSK mixes the constellation through each sensor's confusion column:
//   beta_i(k) = sum_l u_l p(l|i),  B_i(k) = 1 - |beta_i(k)|^2,
//   mean_k = sqrt(g_k p_k) beta_i(k),  var_k = sigma_w2_k + g_k p_k B_i(k).
HypothesisMoments psk_moments(const std::vector<ConfusionMatrix>& confusions,
                              int hypothesis, std::span<const double> g_hat,
                              std::span<const double> data_powers,
                              std::span<const double> sigma_w2);

// FSK analogue over N*M tone coordinates: tone l of sensor k has mean
// sqrt(g_k p_k) p(l|i) and variance sigma(k,l) + g_k p_k p(l|i)(1 - p(l|i)),
// where sigma(k,l) is sigma_w2_k on hypothesis i's own tone and the raw
// noise variance elsewhere.
HypothesisMoments fsk_moments(const std::vector<ConfusionMatrix>& confusions,
                              int hypothesis, std::span<const double> g_hat,
                              std::span<const double> data_powers,
                              std::span<const double> sigma_w2,
                              double sigma_n2);

// Total J-divergence conditioned on the realized channel estimates:
// pairwise gaussian_j over the surrogate moments, prior-weighted
//   total = 1/2 sum_i sum_j pi_i pi_j J_ij.
// error_variances holds the per-sensor estimator error variance.  For PSK
// the equivalent scalar ratio form is evaluated as well and the two paths
// are checked against each other to 1e-8.
DivergenceReport conditional_j(const std::vector<ConfusionMatrix>& confusions,
                               std::span<const double> g_hat,
                               const PowerPlan& plan,
                               std::span<const double> error_variances,
                               std::span<const double> priors,
                               Modulation modulation, double sigma_n2);

// Closed-form expectation of the coherent conditional J over the Rayleigh
// distribution of the channel estimate, expressed through
// D(x) = x e^x E1(x) with per-sensor
//   x_k = (1/s_k + 1/s_k^2) / (r_k (1 - r_k)),  s_k = sigma_h_k^2 P_k / sigma_n2.
// Sensors with zero power contribute nothing; a powered sensor needs
// 0 < r_k < 1 or std::domain_error is thrown.
DivergenceReport average_j_coherent(const NetworkScenario& scenario,
                                    const PowerPlan& plan,
                                    const std::vector<ConfusionMatrix>& confusions,
                                    std::span<const double> priors);

// Total J-divergence for the statistics-only receiver.  Coordinates are
// zero mean with variance sigma_n2 + p(l|i) P_k sigma_h_k^2, so
//   J_ij = 1/2 sum_{k,l} [ v_il/v_jl + v_jl/v_il ] - N M.
DivergenceReport total_j_statistics(const NetworkScenario& scenario,
                                    std::span<const double> data_powers,
                                    const std::vector<ConfusionMatrix>& confusions,
                                    std::span<const double> priors);

} // namespace detfuse

#endif
