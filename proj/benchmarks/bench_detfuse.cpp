// Microbenchmarks for the per-trial hot path (fusion, estimation) and the
// allocation solvers that run once per sweep point or per block.

#include <benchmark/benchmark.h>

#include <complex>
#include <vector>

#include "detfuse/allocation.hpp"
#include "detfuse/divergence.hpp"
#include "detfuse/fusion.hpp"
#include "detfuse/harness.hpp"
#include "detfuse/phy.hpp"
#include "detfuse/rng.hpp"
#include "detfuse/scenario.hpp"
#include "detfuse/sensing.hpp"
#include "detfuse/specfun.hpp"

using namespace detfuse;

namespace {

std::vector<ConfusionMatrix> preset_confusions(const CasePreset& preset,
                                               int m) {
    std::vector<ConfusionMatrix> out;
    for (double target : preset.target_errors) {
        auto means = calibrate_means(target, m, 1.0);
        out.push_back(confusion_matrix(means, 0.5, 0.5));
    }
    return out;
}

// One physically drawn fusion input for the preset network.
FusionInput make_input(Receiver rx, int m, RngStream& g) {
    CasePreset preset = build_case(CaseId::v_a1, 5, m);
    NetworkScenario s = preset.scenario;
    s.p_total = solve_p_total_for_snr(s, 10.0);
    auto confusions = preset_confusions(preset, m);

    FusionInput in;
    in.modulation = receiver_modulation(rx);
    in.noise_variance = s.noise_variance;
    in.priors = s.priors;
    double per = s.p_total / s.n_sensors;
    double pt = rx == Receiver::noncoherent_statistics ? 0.0 : 0.5 * per;
    double pd = per - pt;
    int truth = g.categorical(s.priors);
    for (int k = 0; k < s.n_sensors; ++k) {
        std::size_t uk = static_cast<std::size_t>(k);
        double sh2 = s.channel_variances[uk];
        auto [g1, g2] = g.normal_pair();
        ChannelDraw ch = draw_channel(sh2, g1, g2);
        auto pilot =
            transmit_training(ch, pt, in.modulation, m, s.noise_variance, g);
        ChannelEstimate est;
        switch (rx) {
            case Receiver::coherent:
                est = mmse_channel_estimate(pilot[0], pt, sh2,
                                            s.noise_variance);
                break;
            case Receiver::noncoherent_amplitude: {
                double gamma_eff = pt * sh2 / s.noise_variance;
                est = amplitude_estimate_for_channel(
                    std::norm(pilot[0]), pt, sh2, s.noise_variance,
                    1.0 / (1.0 + gamma_eff));
                break;
            }
            case Receiver::noncoherent_statistics:
                est = ChannelEstimate::statistics(sh2);
                break;
        }
        std::vector<double> col(static_cast<std::size_t>(m));
        for (int l = 1; l <= m; ++l)
            col[static_cast<std::size_t>(l - 1)] = confusions[uk](l, truth);
        int sent = g.categorical(col);
        SensorChannel sc;
        sc.data =
            transmit_data(ch, pd, sent, in.modulation, m, s.noise_variance, g);
        sc.estimate = est;
        sc.confusion = confusions[uk];
        sc.data_power = pd;
        sc.training_power = pt;
        in.sensors.push_back(std::move(sc));
    }
    return in;
}

void bm_fuse(benchmark::State& state, Receiver rx, int m) {
    RngStream g(17);
    FusionInput in = make_input(rx, m, g);
    for (auto _ : state) benchmark::DoNotOptimize(fuse(rx, in).decision);
}

void fuse_coherent_m2(benchmark::State& s) { bm_fuse(s, Receiver::coherent, 2); }
void fuse_coherent_m4(benchmark::State& s) { bm_fuse(s, Receiver::coherent, 4); }
void fuse_amplitude_m4(benchmark::State& s) {
    bm_fuse(s, Receiver::noncoherent_amplitude, 4);
}
void fuse_statistics_m4(benchmark::State& s) {
    bm_fuse(s, Receiver::noncoherent_statistics, 4);
}

void conditional_j_n5_m4(benchmark::State& state) {
    CasePreset preset = build_case(CaseId::v_a1, 5, 4);
    NetworkScenario s = preset.scenario;
    s.p_total = solve_p_total_for_snr(s, 10.0);
    auto conf = preset_confusions(preset, 4);
    PowerPlan plan = uniform_plan(s, 0.5);
    RngStream g(5);
    std::vector<double> ghat(5), errv(5);
    for (int k = 0; k < 5; ++k) {
        std::size_t uk = static_cast<std::size_t>(k);
        double sh2 = s.channel_variances[uk];
        double gt = plan.training_powers[uk] / s.noise_variance;
        errv[uk] = sh2 / (1.0 + sh2 * gt);
        ghat[uk] = g.exponential(sh2 * sh2 * gt / (1.0 + sh2 * gt));
    }
    for (auto _ : state)
        benchmark::DoNotOptimize(conditional_j(conf, ghat, plan, errv,
                                               s.priors, Modulation::psk,
                                               s.noise_variance)
                                     .total);
}

void average_j_n5_m2(benchmark::State& state) {
    CasePreset preset = build_case(CaseId::v_a1, 5, 2);
    NetworkScenario s = preset.scenario;
    s.p_total = solve_p_total_for_snr(s, 10.0);
    auto conf = preset_confusions(preset, 2);
    PowerPlan plan = uniform_plan(s, 0.5);
    for (auto _ : state)
        benchmark::DoNotOptimize(
            average_j_coherent(s, plan, conf, s.priors).total);
}

void conditional_allocation_n5(benchmark::State& state) {
    CasePreset preset = build_case(CaseId::v_a1, 5, 2);
    NetworkScenario s = preset.scenario;
    s.p_total = solve_p_total_for_snr(s, 10.0);
    auto conf = preset_confusions(preset, 2);
    PowerPlan plan = uniform_plan(s, 0.5);
    RngStream g(9);
    std::vector<double> ghat(5), errv(5);
    for (int k = 0; k < 5; ++k) {
        std::size_t uk = static_cast<std::size_t>(k);
        double sh2 = s.channel_variances[uk];
        double gt = plan.training_powers[uk] / s.noise_variance;
        errv[uk] = sh2 / (1.0 + sh2 * gt);
        ghat[uk] = g.exponential(sh2 * sh2 * gt / (1.0 + sh2 * gt));
    }
    for (auto _ : state)
        benchmark::DoNotOptimize(
            allocate(AllocationStrategy::conditional_j_gradient,
                     Receiver::coherent, s, conf, 0.5, ghat, errv)
                .objective);
}

void amplitude_posterior_mean(benchmark::State& state) {
    RngStream g(3);
    double v = 2.4;
    for (auto _ : state) {
        benchmark::DoNotOptimize(mmse_amplitude_estimate(v, 10.0, 1.0));
        v = 0.5 + 4.0 * g.uniform();
    }
}

void amplitude_error_variance_20k(benchmark::State& state) {
    for (auto _ : state)
        benchmark::DoNotOptimize(amplitude_error_variance(50.0, 20000));
}

void run_point_coherent(benchmark::State& state) {
    CasePreset preset = build_case(CaseId::v_a1, 5, 2);
    PointContext ctx;
    ctx.scenario = preset.scenario;
    ctx.scenario.p_total = solve_p_total_for_snr(ctx.scenario, 10.0);
    for (double target : preset.target_errors) {
        auto means = calibrate_means(target, 2, 1.0);
        ctx.source.means.push_back(means);
        ctx.confusions.push_back(confusion_matrix(means, 0.5, 0.5));
    }
    ctx.source.sigma_nu2 = 0.5;
    ctx.source.sigma_z2 = 0.5;
    ctx.receiver = Receiver::coherent;
    ctx.trials = 1000;
    ctx.threads = 1;
    for (auto _ : state) benchmark::DoNotOptimize(run_point(ctx).pe);
    state.SetItemsProcessed(state.iterations() * ctx.trials);
}

} // namespace

BENCHMARK(fuse_coherent_m2);
BENCHMARK(fuse_coherent_m4);
BENCHMARK(fuse_amplitude_m4);
BENCHMARK(fuse_statistics_m4);
BENCHMARK(conditional_j_n5_m4);
BENCHMARK(average_j_n5_m2);
BENCHMARK(conditional_allocation_n5);
BENCHMARK(amplitude_posterior_mean);
BENCHMARK(amplitude_error_variance_20k);
// Trials run on worker threads, so CPU time of the calling thread is not
// the interesting number here.
BENCHMARK(run_point_coherent)->UseRealTime();

BENCHMARK_MAIN();
