#include "detfuse/sensing.hpp"

#include <cmath>
#include <stdexcept>

#include "detfuse/errors.hpp"
#include "detfuse/specfun.hpp"

namespace detfuse {

void SourceModel::validate() const {
    if (means.empty()) throw std::invalid_argument("source model: no sensors");
    std::size_t m = means.front().size();
    if (m < 2) throw std::invalid_argument("source model: fewer than 2 hypotheses");
    for (const auto& row : means) {
        if (row.size() != m)
            throw std::invalid_argument("source model: ragged means");
        for (std::size_t i = 1; i < row.size(); ++i)
            if (!(row[i] > row[i - 1]))
                throw std::invalid_argument("source model: means not increasing");
    }
    if (!(sigma_nu2 >= 0.0) || !(sigma_z2 >= 0.0) || !(sigma_nu2 + sigma_z2 > 0.0))
        throw std::invalid_argument("source model: bad variances");
}

double observe(const SourceModel& model, int sensor, int hypothesis,
               double draw1, double draw2) {
    if (sensor < 1 || sensor > static_cast<int>(model.means.size()))
        throw std::out_of_range("observe: sensor index");
    const auto& row = model.means[static_cast<std::size_t>(sensor - 1)];
    if (hypothesis < 1 || hypothesis > static_cast<int>(row.size()))
        throw std::out_of_range("observe: hypothesis index");
    return row[static_cast<std::size_t>(hypothesis - 1)] +
           std::sqrt(model.sigma_nu2) * draw1 + std::sqrt(model.sigma_z2) * draw2;
}

int local_decide(std::span<const double> means, double x) {
    if (means.empty()) throw std::invalid_argument("local_decide: empty means");
    int best = 1;
    double best_d = std::fabs(x - means[0]);
    for (std::size_t i = 1; i < means.size(); ++i) {
        double d = std::fabs(x - means[i]);
        if (d < best_d) {
            best_d = d;
            best = static_cast<int>(i) + 1;
        }
    }
    return best;
}

ConfusionMatrix confusion_matrix(std::span<const double> means,
                                 double sigma_nu2, double sigma_z2) {
    const int m = static_cast<int>(means.size());
    if (m < 2) throw std::invalid_argument("confusion_matrix: need >= 2 means");
    for (int i = 1; i < m; ++i)
        if (!(means[static_cast<std::size_t>(i)] > means[static_cast<std::size_t>(i - 1)]))
            throw std::invalid_argument("confusion_matrix: means not increasing");
    double var = sigma_nu2 + sigma_z2;
    if (!(var > 0.0)) throw std::invalid_argument("confusion_matrix: variance <= 0");
    double sigma = std::sqrt(var);

    auto q_arg = [&](int i, int truth) {
        // Tail argument at the midpoint between means i and i+1 (1-based).
        return (means[static_cast<std::size_t>(i - 1)] +
                means[static_cast<std::size_t>(i)] -
                2.0 * means[static_cast<std::size_t>(truth - 1)]) /
               (2.0 * sigma);
    };

    ConfusionMatrix c(m);
    for (int truth = 1; truth <= m; ++truth) {
        for (int dec = 1; dec <= m; ++dec) {
            double p;
            if (dec == 1)
                p = 1.0 - specfun::q_function(q_arg(1, truth));
            else if (dec == m)
                p = specfun::q_function(q_arg(m - 1, truth));
            else
                p = specfun::q_function(q_arg(dec - 1, truth)) -
                    specfun::q_function(q_arg(dec, truth));
            c(dec, truth) = p;
        }
    }
    return c;
}

double sensor_error_prob(const ConfusionMatrix& c, std::span<const double> priors) {
    if (static_cast<int>(priors.size()) != c.order())
        throw std::invalid_argument("sensor_error_prob: priors length");
    double pe = 0.0;
    for (int m = 1; m <= c.order(); ++m)
        pe += priors[static_cast<std::size_t>(m - 1)] * (1.0 - c(m, m));
    return pe;
}

namespace {

std::vector<double> spaced_means(int m, double delta) {
    std::vector<double> means(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i)
        means[static_cast<std::size_t>(i)] =
            (static_cast<double>(i) - (m - 1) / 2.0) * delta;
    return means;
}

double uniform_error_for_spacing(int m, double sigma, double delta) {
    auto means = spaced_means(m, delta);
    auto conf = confusion_matrix(means, 0.0, sigma * sigma);
    std::vector<double> uniform(static_cast<std::size_t>(m), 1.0 / m);
    return sensor_error_prob(conf, uniform);
}

} // namespace

std::vector<double> calibrate_means(double target_error, int m, double sigma) {
    if (m < 2) throw config_error("calibrate_means: m < 2");
    if (!(sigma > 0.0)) throw config_error("calibrate_means: sigma <= 0");
    double ceiling = static_cast<double>(m - 1) / m;
    if (!(target_error > 0.0) || target_error > ceiling)
        throw config_error("calibrate_means: target outside (0, (M-1)/M]");

    // Chance level is the delta -> 0 limit.
    const double min_spacing = 1e-9;
    if (target_error == ceiling) return spaced_means(m, min_spacing);

    double lo = min_spacing;
    double hi = 2.0 * sigma;
    while (uniform_error_for_spacing(m, sigma, hi) > target_error) {
        hi *= 2.0;
        if (hi > 1e6 * sigma)
            throw config_error("calibrate_means: target unreachable");
    }
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        double err = uniform_error_for_spacing(m, sigma, mid);
        if (std::fabs(err - target_error) <= 1e-9) return spaced_means(m, mid);
        if (err > target_error)
            lo = mid;
        else
            hi = mid;
    }
    return spaced_means(m, 0.5 * (lo + hi));
}

} // namespace detfuse
