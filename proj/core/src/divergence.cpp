#include "detfuse/divergence.hpp"

#include <cmath>
#include <stdexcept>

#include "detfuse/specfun.hpp"

namespace detfuse {

double DivergenceReport::pair(int i, int j) const {
    int m = static_cast<int>(std::lround(std::sqrt(
        static_cast<double>(pairwise.size()))));
    return pairwise[static_cast<std::size_t>(i - 1) * m +
                    static_cast<std::size_t>(j - 1)];
}

double gaussian_j(const HypothesisMoments& a, const HypothesisMoments& b) {
    if (a.mean.size() != a.variance.size() || b.mean.size() != b.variance.size() ||
        a.mean.size() != b.mean.size())
        throw std::invalid_argument("gaussian_j: dimension mismatch");
    double j = 0.0;
    for (std::size_t d = 0; d < a.mean.size(); ++d) {
        double v1 = a.variance[d], v2 = b.variance[d];
        if (!(v1 > 0.0) || !(v2 > 0.0))
            throw std::invalid_argument("gaussian_j: variance <= 0");
        double dv = v1 - v2;
        double dm = std::norm(a.mean[d] - b.mean[d]);
        // Equal to v1/v2 + v2/v1 - 2 plus the mean term; this arrangement
        // keeps the result exactly zero for identical moments.
        j += 0.5 * (dv * dv / (v1 * v2) + dm * (1.0 / v1 + 1.0 / v2));
    }
    return j;
}

namespace {

struct MixtureStats {
    std::complex<double> beta; // confusion-weighted constellation mean
    double b;                  // 1 - |beta|^2
};

MixtureStats psk_mixture(const ConfusionMatrix& conf, int hypothesis) {
    const int m = conf.order();
    std::complex<double> beta{0.0, 0.0};
    for (int l = 1; l <= m; ++l)
        beta += modulate_psk(l, m) * conf(l, hypothesis);
    double b = 1.0 - std::norm(beta);
    if (b < 0.0) b = 0.0; // |beta| <= 1, guard rounding
    return {beta, b};
}

void check_sizes(const std::vector<ConfusionMatrix>& confusions,
                 std::span<const double> g_hat,
                 std::span<const double> data_powers,
                 std::span<const double> sigma_w2) {
    std::size_t n = confusions.size();
    if (n == 0) throw std::invalid_argument("moments: no sensors");
    if (g_hat.size() != n || data_powers.size() != n || sigma_w2.size() != n)
        throw std::invalid_argument("moments: per-sensor length mismatch");
    for (std::size_t k = 0; k < n; ++k) {
        if (g_hat[k] < 0.0 || data_powers[k] < 0.0)
            throw std::invalid_argument("moments: negative gain or power");
        if (!(sigma_w2[k] > 0.0))
            throw std::invalid_argument("moments: sigma_w2 <= 0");
    }
}

} // namespace

HypothesisMoments psk_moments(const std::vector<ConfusionMatrix>& confusions,
                              int hypothesis, std::span<const double> g_hat,
                              std::span<const double> data_powers,
                              std::span<const double> sigma_w2) {
    check_sizes(confusions, g_hat, data_powers, sigma_w2);
    const std::size_t n = confusions.size();
    HypothesisMoments mom;
    mom.mean.resize(n);
    mom.variance.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        auto mix = psk_mixture(confusions[k], hypothesis);
        double gp = g_hat[k] * data_powers[k];
        mom.mean[k] = std::sqrt(gp) * mix.beta;
        mom.variance[k] = sigma_w2[k] + gp * mix.b;
    }
    return mom;
}

HypothesisMoments fsk_moments(const std::vector<ConfusionMatrix>& confusions,
                              int hypothesis, std::span<const double> g_hat,
                              std::span<const double> data_powers,
                              std::span<const double> sigma_w2,
                              double sigma_n2) {
    check_sizes(confusions, g_hat, data_powers, sigma_w2);
    if (!(sigma_n2 > 0.0))
        throw std::invalid_argument("fsk_moments: sigma_n2 <= 0");
    const std::size_t n = confusions.size();
    const int m = confusions.front().order();
    HypothesisMoments mom;
    mom.mean.resize(n * static_cast<std::size_t>(m));
    mom.variance.resize(n * static_cast<std::size_t>(m));
    for (std::size_t k = 0; k < n; ++k) {
        double gp = g_hat[k] * data_powers[k];
        double amp = std::sqrt(gp);
        for (int l = 1; l <= m; ++l) {
            double p = confusions[k](l, hypothesis);
            std::size_t d = k * static_cast<std::size_t>(m) +
                            static_cast<std::size_t>(l - 1);
            mom.mean[d] = {amp * p, 0.0};
            double noise = (l == hypothesis) ? sigma_w2[k] : sigma_n2;
            mom.variance[d] = noise + gp * p * (1.0 - p);
        }
    }
    return mom;
}

namespace {

std::vector<double> filtered_noise(const PowerPlan& plan,
                                   std::span<const double> error_variances,
                                   double sigma_n2) {
    std::size_t n = plan.data_powers.size();
    if (plan.training_powers.size() != n || error_variances.size() != n)
        throw std::invalid_argument("conditional_j: per-sensor length mismatch");
    std::vector<double> w(n);
    for (std::size_t k = 0; k < n; ++k) {
        if (error_variances[k] < 0.0)
            throw std::invalid_argument("conditional_j: error variance < 0");
        w[k] = plan.data_powers[k] * error_variances[k] + sigma_n2;
    }
    return w;
}

void check_priors(std::span<const double> priors, int m) {
    if (static_cast<int>(priors.size()) != m)
        throw std::invalid_argument("divergence: priors length");
    for (double p : priors)
        if (!(p > 0.0)) throw std::invalid_argument("divergence: prior <= 0");
}

double weighted_total(const std::vector<double>& pairwise,
                      std::span<const double> priors) {
    const int m = static_cast<int>(priors.size());
    double tot = 0.0;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            tot += priors[static_cast<std::size_t>(i)] *
                   priors[static_cast<std::size_t>(j)] *
                   pairwise[static_cast<std::size_t>(i) * m +
                            static_cast<std::size_t>(j)];
    return 0.5 * tot;
}

// Scalar ratio form of the coherent conditional pairwise J; algebraically
// identical to the trace form over psk_moments.
double psk_pair_closed_form(const std::vector<ConfusionMatrix>& confusions,
                            int i, int j, std::span<const double> g_hat,
                            std::span<const double> data_powers,
                            std::span<const double> sigma_w2) {
    double jsum = 0.0;
    for (std::size_t k = 0; k < confusions.size(); ++k) {
        auto mi = psk_mixture(confusions[k], i);
        auto mj = psk_mixture(confusions[k], j);
        double q = std::norm(mi.beta - mj.beta);
        double gamma_ij = mi.b + q;
        double gamma_ji = mj.b + q;
        double gp = g_hat[k] * data_powers[k];
        double w = sigma_w2[k];
        jsum += 0.5 * ((gp * gamma_ij + w) / (gp * mj.b + w) +
                       (gp * gamma_ji + w) / (gp * mi.b + w)) -
                1.0;
    }
    return jsum;
}

} // namespace

DivergenceReport conditional_j(const std::vector<ConfusionMatrix>& confusions,
                               std::span<const double> g_hat,
                               const PowerPlan& plan,
                               std::span<const double> error_variances,
                               std::span<const double> priors,
                               Modulation modulation, double sigma_n2) {
    if (confusions.empty())
        throw std::invalid_argument("conditional_j: no sensors");
    if (!(sigma_n2 > 0.0))
        throw std::invalid_argument("conditional_j: sigma_n2 <= 0");
    const int m = confusions.front().order();
    check_priors(priors, m);
    auto sigma_w2 = filtered_noise(plan, error_variances, sigma_n2);

    DivergenceReport rep;
    rep.kind = modulation == Modulation::psk
                   ? DivergenceKind::conditional_coherent
                   : DivergenceKind::conditional_noncoherent;
    rep.pairwise.assign(static_cast<std::size_t>(m) * m, 0.0);

    std::vector<HypothesisMoments> moments(static_cast<std::size_t>(m));
    for (int i = 1; i <= m; ++i)
        moments[static_cast<std::size_t>(i - 1)] =
            modulation == Modulation::psk
                ? psk_moments(confusions, i, g_hat, plan.data_powers, sigma_w2)
                : fsk_moments(confusions, i, g_hat, plan.data_powers, sigma_w2,
                              sigma_n2);

    for (int i = 1; i <= m; ++i) {
        for (int j = i + 1; j <= m; ++j) {
            double v = gaussian_j(moments[static_cast<std::size_t>(i - 1)],
                                  moments[static_cast<std::size_t>(j - 1)]);
            if (modulation == Modulation::psk) {
                double cf = psk_pair_closed_form(confusions, i, j, g_hat,
                                                 plan.data_powers, sigma_w2);
                if (std::fabs(cf - v) > 1e-8 * std::max(1.0, std::fabs(v)))
                    throw std::logic_error(
                        "conditional_j: ratio and trace forms disagree");
            }
            rep.pairwise[static_cast<std::size_t>(i - 1) * m +
                         static_cast<std::size_t>(j - 1)] = v;
            rep.pairwise[static_cast<std::size_t>(j - 1) * m +
                         static_cast<std::size_t>(i - 1)] = v;
        }
    }
    rep.total = weighted_total(rep.pairwise, priors);
    for (std::size_t k = 0; k < confusions.size(); ++k)
        rep.approx_trace += g_hat[k] * plan.data_powers[k] / sigma_w2[k];
    return rep;
}

namespace {

// E over the exponential gain of one pair term
//   (g p gamma + w) / (g p B + w)
// equals gamma/B + (1 - gamma/B) D(x/B); at B = 0 the exact limit is
// 1 + gamma/x.  x = w / (p * mean_gain).
double averaged_pair_term(double gamma, double b, double x, bool* dcoef_positive) {
    if (b < 1e-8) {
        if (dcoef_positive) *dcoef_positive = false;
        return 1.0 + gamma / x;
    }
    double coef = 1.0 - gamma / b;
    if (dcoef_positive) *dcoef_positive = coef > 0.0;
    return gamma / b + coef * specfun::d_func(x / b);
}

} // namespace

DivergenceReport average_j_coherent(const NetworkScenario& scenario,
                                    const PowerPlan& plan,
                                    const std::vector<ConfusionMatrix>& confusions,
                                    std::span<const double> priors) {
    scenario.validate();
    const int n = scenario.n_sensors;
    const int m = scenario.m_hypotheses;
    if (static_cast<int>(confusions.size()) != n)
        throw std::invalid_argument("average_j_coherent: confusions length");
    check_priors(priors, m);
    if (static_cast<int>(plan.data_powers.size()) != n ||
        static_cast<int>(plan.training_powers.size()) != n)
        throw std::invalid_argument("average_j_coherent: plan length");

    // Per-sensor D() argument scale; powered sensors need interior r.
    std::vector<double> x(static_cast<std::size_t>(n), 0.0);
    std::vector<bool> active(static_cast<std::size_t>(n), false);
    for (int k = 0; k < n; ++k) {
        double pd = plan.data_powers[static_cast<std::size_t>(k)];
        double pt = plan.training_powers[static_cast<std::size_t>(k)];
        double p = pd + pt;
        if (p == 0.0) continue;
        double r = pd / p;
        if (!(r > 0.0) || !(r < 1.0))
            throw std::domain_error(
                "average_j_coherent: powered sensor needs 0 < r < 1");
        double s = scenario.channel_variances[static_cast<std::size_t>(k)] * p /
                   scenario.noise_variance;
        x[static_cast<std::size_t>(k)] = (1.0 / s + 1.0 / (s * s)) / (r * (1.0 - r));
        active[static_cast<std::size_t>(k)] = true;
    }

    DivergenceReport rep;
    rep.kind = DivergenceKind::average_coherent;
    rep.pairwise.assign(static_cast<std::size_t>(m) * m, 0.0);

    for (int i = 1; i <= m; ++i) {
        for (int j = i + 1; j <= m; ++j) {
            double jsum = 0.0;
            for (int k = 0; k < n; ++k) {
                if (!active[static_cast<std::size_t>(k)]) continue;
                auto mi = psk_mixture(confusions[static_cast<std::size_t>(k)], i);
                auto mj = psk_mixture(confusions[static_cast<std::size_t>(k)], j);
                double q = std::norm(mi.beta - mj.beta);
                double xk = x[static_cast<std::size_t>(k)];
                bool pos1 = false, pos2 = false;
                double t1 = averaged_pair_term(mi.b + q, mj.b, xk, &pos1);
                double t2 = averaged_pair_term(mj.b + q, mi.b, xk, &pos2);
                rep.positive_dcoef_terms += (pos1 ? 1u : 0u) + (pos2 ? 1u : 0u);
                jsum += 0.5 * (t1 + t2) - 1.0;
            }
            rep.pairwise[static_cast<std::size_t>(i - 1) * m +
                         static_cast<std::size_t>(j - 1)] = jsum;
            rep.pairwise[static_cast<std::size_t>(j - 1) * m +
                         static_cast<std::size_t>(i - 1)] = jsum;
        }
    }
    rep.total = weighted_total(rep.pairwise, priors);
    for (int k = 0; k < n; ++k) {
        if (!active[static_cast<std::size_t>(k)]) continue;
        // mean gain of the channel estimate over its filtered noise
        double sh2 = scenario.channel_variances[static_cast<std::size_t>(k)];
        double pt = plan.training_powers[static_cast<std::size_t>(k)];
        double pd = plan.data_powers[static_cast<std::size_t>(k)];
        double gt = pt / scenario.noise_variance;
        double mean_gain = sh2 * sh2 * gt / (1.0 + sh2 * gt);
        double err = sh2 / (1.0 + sh2 * gt);
        rep.approx_trace +=
            mean_gain * pd / (pd * err + scenario.noise_variance);
    }
    return rep;
}

DivergenceReport total_j_statistics(const NetworkScenario& scenario,
                                    std::span<const double> data_powers,
                                    const std::vector<ConfusionMatrix>& confusions,
                                    std::span<const double> priors) {
    scenario.validate();
    const int n = scenario.n_sensors;
    const int m = scenario.m_hypotheses;
    if (static_cast<int>(confusions.size()) != n)
        throw std::invalid_argument("total_j_statistics: confusions length");
    if (static_cast<int>(data_powers.size()) != n)
        throw std::invalid_argument("total_j_statistics: powers length");
    check_priors(priors, m);
    for (double p : data_powers)
        if (p < 0.0)
            throw std::invalid_argument("total_j_statistics: negative power");

    DivergenceReport rep;
    rep.kind = DivergenceKind::total_statistics;
    rep.pairwise.assign(static_cast<std::size_t>(m) * m, 0.0);

    for (int i = 1; i <= m; ++i) {
        for (int j = i + 1; j <= m; ++j) {
            double jsum = 0.0;
            for (int k = 0; k < n; ++k) {
                double ps = data_powers[static_cast<std::size_t>(k)] *
                            scenario.channel_variances[static_cast<std::size_t>(k)];
                for (int l = 1; l <= m; ++l) {
                    double vi = scenario.noise_variance +
                                confusions[static_cast<std::size_t>(k)](l, i) * ps;
                    double vj = scenario.noise_variance +
                                confusions[static_cast<std::size_t>(k)](l, j) * ps;
                    double dv = vi - vj;
                    jsum += 0.5 * dv * dv / (vi * vj);
                }
            }
            rep.pairwise[static_cast<std::size_t>(i - 1) * m +
                         static_cast<std::size_t>(j - 1)] = jsum;
            rep.pairwise[static_cast<std::size_t>(j - 1) * m +
                         static_cast<std::size_t>(i - 1)] = jsum;
        }
    }
    rep.total = weighted_total(rep.pairwise, priors);
    for (int k = 0; k < n; ++k)
        rep.approx_trace += data_powers[static_cast<std::size_t>(k)] *
                            scenario.channel_variances[static_cast<std::size_t>(k)] /
                            scenario.noise_variance;
    return rep;
}

} // namespace detfuse
