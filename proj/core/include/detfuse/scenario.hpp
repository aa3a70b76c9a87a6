#ifndef DETFUSE_SCENARIO_HPP
#define DETFUSE_SCENARIO_HPP

#include <string>
#include <vector>

namespace detfuse {

// Static description of one network: sensor geometry, channel statistics,
// hypothesis priors and the total power budget.  Powers are in milliwatts;
// the default noise floor of 1e-3 mW corresponds to -30 dBm.
struct NetworkScenario {
    int n_sensors = 0;
    int m_hypotheses = 0;
    std::vector<double> priors;            // length M, sums to 1
    std::vector<double> distances;         // length N, meters
    std::vector<double> channel_variances; // length N
    double noise_variance = 1e-3;
    double p_total = 1.0;

    // Throws std::invalid_argument when any field is inconsistent.
    void validate() const;
};

// Per-sensor split of the budget into training and data energy.
struct PowerPlan {
    std::vector<double> data_powers;
    std::vector<double> training_powers;

    double data_total() const;
    double training_total() const;
    double total() const { return data_total() + training_total(); }
};

// Benchmark network presets.  The four cases differ in how sensing quality
// is paired with distance from the fusion center:
//   v_a1  better sensors sit closer to the fusion center
//   v_a2  better sensors sit farther away
//   v_a3  all sensors at 2 m, mixed quality
//   v_a4  regular geometry, every sensor equally reliable
enum class CaseId { v_a1, v_a2, v_a3, v_a4 };

std::string to_string(CaseId id);
CaseId case_id_from_string(const std::string& s); // throws config_error

struct CasePreset {
    NetworkScenario scenario;
    // Target local error probability per sensor, index-aligned with
    // scenario.distances.
    std::vector<double> target_errors;
    // The preset's canonical error vector, before pairing with distances.
    std::vector<double> case_errors;
};

// Indoor log-distance path loss, d in meters, d > 0.
double path_loss_db(double distance);

// Rayleigh channel gain variance implied by the path loss at d.
double channel_variance_from_distance(double distance);

// Network SNR definition used by all sweeps:
//   10 log10( p_total * sum_k sigma_h_k^2 / (N^2 sigma_n^2) ).
double network_snr_db(const NetworkScenario& s);

// Inverse of network_snr_db in p_total.
double solve_p_total_for_snr(const NetworkScenario& s, double snr_db);

// Builds one of the preset cases. n must be 5 or 10, m must be 2 or 4;
// anything else throws config_error.
CasePreset build_case(CaseId id, int n, int m);

} // namespace detfuse

#endif
