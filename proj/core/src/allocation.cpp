#include "detfuse/allocation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>

#include "detfuse/errors.hpp"
#include "detfuse/rng.hpp"

namespace detfuse {

std::string to_string(AllocationStrategy s) {
    switch (s) {
        case AllocationStrategy::uniform: return "uniform";
        case AllocationStrategy::conditional_j_gradient:
            return "conditional_j_gradient";
        case AllocationStrategy::average_j_search: return "average_j_search";
        case AllocationStrategy::statistics_extreme_point:
            return "statistics_extreme_point";
    }
    throw std::invalid_argument("to_string: bad AllocationStrategy");
}

AllocationStrategy allocation_from_string(const std::string& s) {
    if (s == "uniform") return AllocationStrategy::uniform;
    if (s == "conditional_j_gradient")
        return AllocationStrategy::conditional_j_gradient;
    if (s == "average_j_search") return AllocationStrategy::average_j_search;
    if (s == "statistics_extreme_point")
        return AllocationStrategy::statistics_extreme_point;
    throw config_error("unknown allocation strategy: " + s);
}

PowerPlan uniform_plan(const NetworkScenario& scenario, double r) {
    scenario.validate();
    if (!(r >= 0.0) || !(r <= 1.0))
        throw std::domain_error("uniform_plan: r outside [0, 1]");
    double n = static_cast<double>(scenario.n_sensors);
    PowerPlan plan;
    plan.data_powers.assign(static_cast<std::size_t>(scenario.n_sensors),
                            r * scenario.p_total / n);
    plan.training_powers.assign(static_cast<std::size_t>(scenario.n_sensors),
                                (1.0 - r) * scenario.p_total / n);
    return plan;
}

namespace {

using Objective = std::function<double(std::span<const double>)>;

// Euclidean projection onto { x >= 0, sum x = budget }.
std::vector<double> project_simplex(std::vector<double> v, double budget) {
    std::vector<double> u = v;
    std::sort(u.begin(), u.end(), std::greater<double>());
    double cum = 0.0, tau = 0.0;
    int rho = 0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        cum += u[k];
        double t = (cum - budget) / static_cast<double>(k + 1);
        if (u[k] - t > 0.0) {
            rho = static_cast<int>(k + 1);
            tau = t;
        }
    }
    (void)rho;
    for (double& x : v) x = std::max(0.0, x - tau);
    return v;
}

std::vector<double> numeric_gradient(const Objective& f,
                                     const std::vector<double>& x, double fx) {
    std::vector<double> g(x.size());
    std::vector<double> probe = x;
    for (std::size_t k = 0; k < x.size(); ++k) {
        double h = std::max(1e-6, 1e-6 * x[k]);
        if (x[k] >= h) {
            probe[k] = x[k] + h;
            double fp = f(probe);
            probe[k] = x[k] - h;
            double fm = f(probe);
            g[k] = (fp - fm) / (2.0 * h);
        } else {
            probe[k] = x[k] + h;
            double fp = f(probe);
            g[k] = (fp - fx) / h;
        }
        probe[k] = x[k];
    }
    return g;
}

double kkt_residual(const std::vector<double>& x, const std::vector<double>& g,
                    double budget) {
    double floor = 1e-12 * std::max(1.0, budget);
    double lambda = 0.0;
    int support = 0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        if (x[k] > floor) {
            lambda += g[k];
            ++support;
        }
    }
    if (support == 0) return 0.0;
    lambda /= support;
    double res = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        if (x[k] > floor)
            res = std::max(res, std::fabs(g[k] - lambda));
        else
            res = std::max(res, std::max(0.0, g[k] - lambda));
    }
    return res;
}

struct SolveOutcome {
    std::vector<double> x;
    double f = 0.0;
    long iterations = 0;
    double residual = 0.0;
};

SolveOutcome projected_gradient_ascent(const Objective& f,
                                       std::vector<double> x, double budget,
                                       double tol, long max_iters) {
    SolveOutcome out;
    double fx = f(x);
    double eta = 0.0;
    for (long it = 0; it < max_iters; ++it) {
        auto g = numeric_gradient(f, x, fx);
        out.residual = kkt_residual(x, g, budget);
        out.iterations = it;
        if (out.residual <= tol) break;

        double gmax = 0.0;
        for (double v : g) gmax = std::max(gmax, std::fabs(v));
        if (gmax == 0.0) break;
        if (eta == 0.0) eta = 0.5 * budget / gmax;

        bool moved = false;
        double step = eta;
        for (int bt = 0; bt < 60; ++bt) {
            std::vector<double> trial = x;
            for (std::size_t k = 0; k < x.size(); ++k) trial[k] += step * g[k];
            trial = project_simplex(std::move(trial), budget);
            double ft = f(trial);
            double along = 0.0;
            for (std::size_t k = 0; k < x.size(); ++k)
                along += g[k] * (trial[k] - x[k]);
            if (ft > fx && ft >= fx + 1e-4 * along) {
                x = std::move(trial);
                fx = ft;
                eta = step * 2.0;
                moved = true;
                break;
            }
            step *= 0.5;
        }
        if (!moved) break;
    }
    out.x = std::move(x);
    out.f = fx;
    return out;
}

} // namespace

AllocationResult allocate_data_conditional_j(
    const NetworkScenario& scenario,
    const std::vector<ConfusionMatrix>& confusions,
    std::span<const double> g_hat, std::span<const double> error_variances,
    Modulation modulation, double data_budget,
    std::span<const double> training_powers, std::span<const double> priors) {
    scenario.validate();
    const auto n = static_cast<std::size_t>(scenario.n_sensors);
    if (confusions.size() != n || g_hat.size() != n ||
        error_variances.size() != n || training_powers.size() != n)
        throw std::invalid_argument(
            "allocate_data_conditional_j: per-sensor length mismatch");
    if (!(data_budget > 0.0))
        throw std::domain_error("allocate_data_conditional_j: budget <= 0");

    PowerPlan plan;
    plan.training_powers.assign(training_powers.begin(), training_powers.end());
    plan.data_powers.assign(n, 0.0);
    Objective f = [&](std::span<const double> p) {
        PowerPlan probe = plan;
        probe.data_powers.assign(p.begin(), p.end());
        return conditional_j(confusions, g_hat, probe, error_variances, priors,
                             modulation, scenario.noise_variance)
            .total;
    };

    std::vector<double> start(n, data_budget / static_cast<double>(n));
    auto sol = projected_gradient_ascent(f, std::move(start), data_budget, 1e-8,
                                         10000);
    AllocationResult res;
    plan.data_powers = sol.x;
    res.plan = std::move(plan);
    res.objective = sol.f;
    res.iterations = sol.iterations;
    res.residual = sol.residual;
    res.starts = 1;
    return res;
}

AllocationResult allocate_average_j(const NetworkScenario& scenario,
                                    const std::vector<ConfusionMatrix>& confusions,
                                    std::span<const double> priors) {
    scenario.validate();
    const auto n = static_cast<std::size_t>(scenario.n_sensors);
    if (confusions.size() != n)
        throw std::invalid_argument("allocate_average_j: confusions length");
    const double budget = scenario.p_total;

    Objective f = [&](std::span<const double> p) {
        PowerPlan plan;
        plan.data_powers.resize(n);
        plan.training_powers.resize(n);
        for (std::size_t k = 0; k < n; ++k) {
            plan.data_powers[k] = 0.5 * p[k];
            plan.training_powers[k] = 0.5 * p[k];
        }
        return average_j_coherent(scenario, plan, confusions, priors).total;
    };

    std::vector<std::vector<double>> starts;
    starts.emplace_back(n, budget / static_cast<double>(n));
    for (std::size_t k = 0; k < n; ++k) {
        std::vector<double> s(n, 0.1 * budget / std::max<double>(1.0, n - 1));
        s[k] = 0.9 * budget;
        starts.push_back(project_simplex(std::move(s), budget));
    }
    RngStream rng(0xa110c);
    while (starts.size() < 8 || starts.size() < n + 3) {
        std::vector<double> s(n);
        double tot = 0.0;
        for (double& v : s) {
            v = rng.exponential(1.0);
            tot += v;
        }
        for (double& v : s) v *= budget / tot;
        starts.push_back(std::move(s));
    }

    AllocationResult best;
    best.objective = -1.0;
    best.starts = static_cast<int>(starts.size());
    long total_iters = 0;
    for (auto& s : starts) {
        auto sol = projected_gradient_ascent(f, std::move(s), budget, 1e-8, 10000);
        total_iters += sol.iterations;
        if (sol.f > best.objective) {
            best.objective = sol.f;
            best.residual = sol.residual;
            best.plan.data_powers.resize(n);
            best.plan.training_powers.resize(n);
            for (std::size_t k = 0; k < n; ++k) {
                best.plan.data_powers[k] = 0.5 * sol.x[k];
                best.plan.training_powers[k] = 0.5 * sol.x[k];
            }
        }
    }
    best.iterations = total_iters;
    return best;
}

AllocationResult allocate_statistics_extreme_point(
    const NetworkScenario& scenario,
    const std::vector<ConfusionMatrix>& confusions,
    std::span<const double> priors, double data_budget) {
    scenario.validate();
    const auto n = static_cast<std::size_t>(scenario.n_sensors);
    if (confusions.size() != n)
        throw std::invalid_argument(
            "allocate_statistics_extreme_point: confusions length");
    if (data_budget < 0.0)
        throw std::domain_error("allocate_statistics_extreme_point: budget < 0");

    std::vector<double> best_p(n, 0.0);
    double best_j =
        total_j_statistics(scenario, best_p, confusions, priors).total;
    long evals = 1;
    for (std::size_t k = 0; k < n; ++k) {
        std::vector<double> cand(n, 0.0);
        cand[k] = data_budget;
        double j = total_j_statistics(scenario, cand, confusions, priors).total;
        ++evals;
        if (j > best_j) {
            best_j = j;
            best_p = std::move(cand);
        }
    }
    AllocationResult res;
    res.plan.data_powers = std::move(best_p);
    res.plan.training_powers.assign(n, 0.0);
    res.objective = best_j;
    res.iterations = evals;
    res.residual = 0.0;
    res.starts = static_cast<int>(n) + 1;
    return res;
}

AllocationResult allocate(AllocationStrategy strategy, Receiver receiver,
                          const NetworkScenario& scenario,
                          const std::vector<ConfusionMatrix>& confusions,
                          double r, std::span<const double> g_hat,
                          std::span<const double> error_variances) {
    scenario.validate();
    const auto n = static_cast<std::size_t>(scenario.n_sensors);
    const bool stats = receiver == Receiver::noncoherent_statistics;

    switch (strategy) {
        case AllocationStrategy::uniform: {
            if (stats && r != 1.0)
                throw config_error("statistics receiver requires r = 1");
            if (!stats && !(r > 0.0 && r < 1.0))
                throw config_error("receiver requires 0 < r < 1");
            AllocationResult res;
            res.plan = uniform_plan(scenario, r);
            return res;
        }
        case AllocationStrategy::conditional_j_gradient: {
            if (stats)
                throw config_error(
                    "conditional_j_gradient needs an estimating receiver");
            if (!(r > 0.0 && r < 1.0))
                throw config_error("conditional_j_gradient requires 0 < r < 1");
            if (g_hat.size() != n || error_variances.size() != n)
                throw config_error(
                    "conditional_j_gradient requires channel estimates");
            std::vector<double> training(
                n, (1.0 - r) * scenario.p_total / static_cast<double>(n));
            return allocate_data_conditional_j(
                scenario, confusions, g_hat, error_variances,
                receiver_modulation(receiver), r * scenario.p_total, training,
                scenario.priors);
        }
        case AllocationStrategy::average_j_search: {
            if (receiver != Receiver::coherent)
                throw config_error("average_j_search is coherent only");
            return allocate_average_j(scenario, confusions, scenario.priors);
        }
        case AllocationStrategy::statistics_extreme_point: {
            if (!stats)
                throw config_error(
                    "statistics_extreme_point needs the statistics receiver");
            return allocate_statistics_extreme_point(scenario, confusions,
                                                     scenario.priors,
                                                     scenario.p_total);
        }
    }
    throw std::invalid_argument("allocate: bad strategy");
}

} // namespace detfuse
