#include "detfuse/harness.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <thread>

#include "detfuse/errors.hpp"
#include "detfuse/phy.hpp"
#include "detfuse/rng.hpp"

namespace detfuse {

namespace {

// Point state shared by every trial: resolved plan (or the fixed training
// side for per-trial allocation) and cached estimator error constants.
struct ResolvedPoint {
    const PointContext& ctx;
    Modulation mod;
    bool per_trial_alloc = false;
    PowerPlan plan;                      // fixed-plan strategies
    std::vector<double> training_powers; // always valid
    double data_budget = 0.0;            // per-trial allocation budget
    std::vector<double> amp_unit_err;    // amplitude receiver only
    std::vector<double> error_variances; // physical units, per sensor
};

ResolvedPoint resolve_point(const PointContext& ctx) {
    ctx.scenario.validate();
    ctx.source.validate();
    const auto n = static_cast<std::size_t>(ctx.scenario.n_sensors);
    if (ctx.confusions.size() != n)
        throw std::invalid_argument("run_point: confusions length");
    if (ctx.trials < 1) throw std::invalid_argument("run_point: trials < 1");

    ResolvedPoint rp{ctx, receiver_modulation(ctx.receiver)};
    switch (ctx.allocation) {
        case AllocationStrategy::uniform:
        case AllocationStrategy::average_j_search:
        case AllocationStrategy::statistics_extreme_point:
            rp.plan = allocate(ctx.allocation, ctx.receiver, ctx.scenario,
                               ctx.confusions, ctx.r)
                          .plan;
            rp.training_powers = rp.plan.training_powers;
            break;
        case AllocationStrategy::conditional_j_gradient: {
            if (!(ctx.r > 0.0 && ctx.r < 1.0))
                throw config_error("run_point: conditional allocation needs 0 < r < 1");
            rp.per_trial_alloc = true;
            rp.training_powers.assign(
                n, (1.0 - ctx.r) * ctx.scenario.p_total / static_cast<double>(n));
            rp.data_budget = ctx.r * ctx.scenario.p_total;
            break;
        }
    }

    rp.error_variances.resize(n);
    if (ctx.receiver == Receiver::noncoherent_amplitude) {
        rp.amp_unit_err.resize(n);
        for (std::size_t k = 0; k < n; ++k) {
            double gamma_eff = rp.training_powers[k] *
                               ctx.scenario.channel_variances[k] /
                               ctx.scenario.noise_variance;
            rp.amp_unit_err[k] = amplitude_error_variance(
                gamma_eff, ctx.amplitude_mc_samples,
                0x5eedULL + static_cast<std::uint64_t>(k));
            rp.error_variances[k] =
                ctx.scenario.channel_variances[k] * rp.amp_unit_err[k];
        }
    } else if (ctx.receiver == Receiver::coherent) {
        for (std::size_t k = 0; k < n; ++k) {
            double sh2 = ctx.scenario.channel_variances[k];
            double gt = rp.training_powers[k] / ctx.scenario.noise_variance;
            rp.error_variances[k] = sh2 / (1.0 + sh2 * gt);
        }
    }
    return rp;
}

bool run_one_trial(const ResolvedPoint& rp, std::uint64_t trial) {
    const PointContext& ctx = rp.ctx;
    const auto n = static_cast<std::size_t>(ctx.scenario.n_sensors);
    const int m = ctx.scenario.m_hypotheses;
    const double sn2 = ctx.scenario.noise_variance;

    RngStream rng = RngStream::for_trial(ctx.seed, ctx.point_index, trial);
    int truth = rng.categorical(ctx.scenario.priors);

    // Local sensing decisions.
    std::vector<int> sent(n);
    for (std::size_t k = 0; k < n; ++k) {
        double x = observe(ctx.source, static_cast<int>(k) + 1, truth,
                           rng.normal(), rng.normal());
        sent[k] = local_decide(ctx.source.means[k], x);
    }

    // Fading block, then the pilot half of every sensor's transmission.
    std::vector<ChannelDraw> channels(n);
    for (std::size_t k = 0; k < n; ++k) {
        auto [g1, g2] = rng.normal_pair();
        channels[k] = draw_channel(ctx.scenario.channel_variances[k], g1, g2);
    }
    std::vector<std::vector<std::complex<double>>> pilots(n);
    for (std::size_t k = 0; k < n; ++k)
        pilots[k] = transmit_training(channels[k], rp.training_powers[k],
                                      rp.mod, m, sn2, rng);

    std::vector<ChannelEstimate> estimates(n);
    for (std::size_t k = 0; k < n; ++k) {
        switch (ctx.receiver) {
            case Receiver::coherent:
                estimates[k] = mmse_channel_estimate(
                    pilots[k][0], rp.training_powers[k],
                    ctx.scenario.channel_variances[k], sn2);
                break;
            case Receiver::noncoherent_amplitude:
                estimates[k] = amplitude_estimate_for_channel(
                    std::norm(pilots[k][0]), rp.training_powers[k],
                    ctx.scenario.channel_variances[k], sn2, rp.amp_unit_err[k]);
                break;
            case Receiver::noncoherent_statistics:
                estimates[k] = ChannelEstimate::statistics(
                    ctx.scenario.channel_variances[k]);
                break;
        }
    }

    std::vector<double> data_powers;
    if (rp.per_trial_alloc) {
        std::vector<double> g_hat(n);
        for (std::size_t k = 0; k < n; ++k) {
            double a = ctx.receiver == Receiver::coherent
                           ? std::abs(estimates[k].coefficient)
                           : estimates[k].amplitude;
            g_hat[k] = a * a;
        }
        data_powers =
            allocate_data_conditional_j(ctx.scenario, ctx.confusions, g_hat,
                                        rp.error_variances, rp.mod,
                                        rp.data_budget, rp.training_powers,
                                        ctx.scenario.priors)
                .plan.data_powers;
    } else {
        data_powers = rp.plan.data_powers;
    }

    FusionInput in;
    in.modulation = rp.mod;
    in.priors = ctx.scenario.priors;
    in.noise_variance = sn2;
    in.sensors.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        SensorChannel& s = in.sensors[k];
        s.data = transmit_data(channels[k], data_powers[k], sent[k], rp.mod, m,
                               sn2, rng);
        s.estimate = estimates[k];
        s.confusion = ctx.confusions[k];
        s.data_power = data_powers[k];
        s.training_power = rp.training_powers[k];
    }
    return fuse(ctx.receiver, in).decision == truth;
}

} // namespace

PePoint run_point(const PointContext& ctx) {
    ResolvedPoint rp = resolve_point(ctx);

    int threads = ctx.threads > 0
                      ? ctx.threads
                      : static_cast<int>(std::thread::hardware_concurrency());
    if (threads < 1) threads = 1;
    if (static_cast<long>(threads) > ctx.trials)
        threads = static_cast<int>(ctx.trials);

    std::vector<long> errors(static_cast<std::size_t>(threads), 0);
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    const long chunk = (ctx.trials + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
        long lo = static_cast<long>(t) * chunk;
        long hi = std::min(ctx.trials, lo + chunk);
        pool.emplace_back([&rp, &errors, t, lo, hi] {
            long local = 0;
            for (long i = lo; i < hi; ++i)
                if (!run_one_trial(rp, static_cast<std::uint64_t>(i))) ++local;
            errors[static_cast<std::size_t>(t)] = local;
        });
    }
    for (auto& th : pool) th.join();

    long total_errors = 0;
    for (long e : errors) total_errors += e;

    PePoint p;
    p.trials = ctx.trials;
    p.pe = static_cast<double>(total_errors) / static_cast<double>(ctx.trials);
    p.ci95 = 1.96 * std::sqrt(p.pe * (1.0 - p.pe) /
                              static_cast<double>(ctx.trials));
    return p;
}

std::vector<PePoint> run_sweep(const ExperimentSpec& spec, int threads) {
    spec.validate();
    CasePreset preset = build_case(spec.case_id, spec.n, spec.m);

    // Local observations are calibrated at unit total standard deviation,
    // split evenly between source and measurement noise.
    SourceModel source;
    source.sigma_nu2 = 0.5;
    source.sigma_z2 = 0.5;
    std::vector<ConfusionMatrix> confusions;
    for (int k = 0; k < spec.n; ++k) {
        auto means = calibrate_means(
            preset.target_errors[static_cast<std::size_t>(k)], spec.m, 1.0);
        confusions.push_back(confusion_matrix(means, 0.5, 0.5));
        source.means.push_back(std::move(means));
    }

    std::vector<PePoint> points;
    points.reserve(spec.grid.size());
    for (std::size_t gi = 0; gi < spec.grid.size(); ++gi) {
        PointContext ctx;
        ctx.scenario = preset.scenario;
        double snr = spec.sweep == SweepKind::snr ? spec.grid[gi] : spec.snr_db;
        ctx.scenario.p_total = solve_p_total_for_snr(ctx.scenario, snr);
        ctx.source = source;
        ctx.confusions = confusions;
        ctx.receiver = spec.receiver;
        ctx.allocation = spec.allocation;
        ctx.r = spec.sweep == SweepKind::r ? spec.grid[gi] : spec.r;
        ctx.seed = spec.seed;
        ctx.point_index = gi;
        ctx.trials = spec.trials;
        ctx.threads = threads;
        PePoint p = run_point(ctx);
        p.sweep_value = spec.grid[gi];
        points.push_back(p);
    }
    return points;
}

std::string format_csv(const ExperimentSpec& spec,
                       const std::vector<PePoint>& points) {
    std::string out =
        "sweep_name,sweep_value,pe,ci95,trials,receiver,allocation,case_id,n,"
        "m,seed\n";
    char buf[256];
    for (const auto& p : points) {
        std::snprintf(buf, sizeof buf,
                      "%s,%.10g,%.10g,%.10g,%ld,%s,%s,%s,%d,%d,%" PRIu64 "\n",
                      to_string(spec.sweep).c_str(), p.sweep_value, p.pe,
                      p.ci95, p.trials, to_string(spec.receiver).c_str(),
                      to_string(spec.allocation).c_str(),
                      to_string(spec.case_id).c_str(), spec.n, spec.m,
                      spec.seed);
        out += buf;
    }
    return out;
}

void write_csv(const ExperimentSpec& spec, const std::vector<PePoint>& points,
               const std::string& path) {
    if (path.empty())
        throw std::invalid_argument("write_csv: empty output path");
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("write_csv: cannot open " + path);
    f << format_csv(spec, points);
    if (!f) throw std::runtime_error("write_csv: write failed for " + path);
}

} // namespace detfuse
