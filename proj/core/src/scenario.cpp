#include "detfuse/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>

#include "detfuse/errors.hpp"

namespace detfuse {

void NetworkScenario::validate() const {
    if (n_sensors < 1) throw std::invalid_argument("scenario: n_sensors < 1");
    if (m_hypotheses < 2) throw std::invalid_argument("scenario: m_hypotheses < 2");
    if (static_cast<int>(priors.size()) != m_hypotheses)
        throw std::invalid_argument("scenario: priors length != M");
    if (static_cast<int>(distances.size()) != n_sensors)
        throw std::invalid_argument("scenario: distances length != N");
    if (static_cast<int>(channel_variances.size()) != n_sensors)
        throw std::invalid_argument("scenario: channel_variances length != N");
    double psum = 0.0;
    for (double p : priors) {
        if (!(p > 0.0)) throw std::invalid_argument("scenario: prior <= 0");
        psum += p;
    }
    if (std::fabs(psum - 1.0) > 1e-9)
        throw std::invalid_argument("scenario: priors do not sum to 1");
    for (double d : distances)
        if (!(d > 0.0)) throw std::invalid_argument("scenario: distance <= 0");
    for (double v : channel_variances)
        if (!(v > 0.0)) throw std::invalid_argument("scenario: channel variance <= 0");
    if (!(noise_variance > 0.0))
        throw std::invalid_argument("scenario: noise_variance <= 0");
    if (!(p_total > 0.0)) throw std::invalid_argument("scenario: p_total <= 0");
}

double PowerPlan::data_total() const {
    return std::accumulate(data_powers.begin(), data_powers.end(), 0.0);
}

double PowerPlan::training_total() const {
    return std::accumulate(training_powers.begin(), training_powers.end(), 0.0);
}

std::string to_string(CaseId id) {
    switch (id) {
        case CaseId::v_a1: return "V-A1";
        case CaseId::v_a2: return "V-A2";
        case CaseId::v_a3: return "V-A3";
        case CaseId::v_a4: return "V-A4";
    }
    throw std::invalid_argument("to_string: bad CaseId");
}

CaseId case_id_from_string(const std::string& s) {
    if (s == "V-A1") return CaseId::v_a1;
    if (s == "V-A2") return CaseId::v_a2;
    if (s == "V-A3") return CaseId::v_a3;
    if (s == "V-A4") return CaseId::v_a4;
    throw config_error("unknown case id: " + s);
}

double path_loss_db(double distance) {
    if (!(distance > 0.0) || !std::isfinite(distance))
        throw std::domain_error("path_loss_db: requires d > 0");
    return 55.0 + 20.0 * std::log10(distance);
}

double channel_variance_from_distance(double distance) {
    return std::pow(10.0, -path_loss_db(distance) / 10.0);
}

double network_snr_db(const NetworkScenario& s) {
    s.validate();
    double gsum = std::accumulate(s.channel_variances.begin(),
                                  s.channel_variances.end(), 0.0);
    double n = static_cast<double>(s.n_sensors);
    return 10.0 * std::log10(s.p_total * gsum / (n * n * s.noise_variance));
}

double solve_p_total_for_snr(const NetworkScenario& s, double snr_db) {
    NetworkScenario probe = s;
    probe.p_total = 1.0;
    probe.validate();
    double gsum = std::accumulate(s.channel_variances.begin(),
                                  s.channel_variances.end(), 0.0);
    double n = static_cast<double>(s.n_sensors);
    return std::pow(10.0, snr_db / 10.0) * n * n * s.noise_variance / gsum;
}

namespace {

std::vector<double> preset_distances(CaseId id, int n) {
    std::vector<double> d(static_cast<std::size_t>(n));
    if (id == CaseId::v_a3) {
        std::fill(d.begin(), d.end(), 2.0);
        return d;
    }
    for (int k = 0; k < n; ++k)
        d[static_cast<std::size_t>(k)] =
            (n == 5) ? 2.0 + 2.0 * k : static_cast<double>(k + 1);
    return d;
}

std::vector<double> preset_errors(int n, int m) {
    if (n == 5) return {0.5, 0.5, 0.4, 0.3, 0.1};
    if (m == 2)
        return {0.5, 0.5, 0.48, 0.46, 0.4, 0.35, 0.3, 0.2, 0.15, 0.1};
    return {0.75, 0.74, 0.7, 0.68, 0.6, 0.55, 0.45, 0.3, 0.2, 0.1};
}

} // namespace

CasePreset build_case(CaseId id, int n, int m) {
    if (n != 5 && n != 10)
        throw config_error("build_case: n must be 5 or 10");
    if (m != 2 && m != 4)
        throw config_error("build_case: m must be 2 or 4");

    CasePreset preset;
    preset.case_errors = preset_errors(n, m);

    // Distances are ascending by construction.  v_a1 pairs the smallest
    // error with the nearest sensor, v_a2 the largest.
    preset.target_errors = preset.case_errors;
    switch (id) {
        case CaseId::v_a1:
            std::sort(preset.target_errors.begin(), preset.target_errors.end());
            break;
        case CaseId::v_a2:
            std::sort(preset.target_errors.begin(), preset.target_errors.end(),
                      std::greater<double>());
            break;
        case CaseId::v_a3:
            break;
        case CaseId::v_a4: {
            double mean = std::accumulate(preset.case_errors.begin(),
                                          preset.case_errors.end(), 0.0) /
                          static_cast<double>(n);
            std::fill(preset.target_errors.begin(), preset.target_errors.end(),
                      mean);
            break;
        }
    }

    NetworkScenario& s = preset.scenario;
    s.n_sensors = n;
    s.m_hypotheses = m;
    s.priors.assign(static_cast<std::size_t>(m), 1.0 / m);
    s.distances = preset_distances(id, n);
    s.channel_variances.resize(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k)
        s.channel_variances[static_cast<std::size_t>(k)] =
            channel_variance_from_distance(s.distances[static_cast<std::size_t>(k)]);
    s.noise_variance = 1e-3;
    s.p_total = 1.0;
    s.validate();
    return preset;
}

} // namespace detfuse
