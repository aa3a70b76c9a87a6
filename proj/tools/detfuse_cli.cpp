// Command line front end: runs Monte Carlo sweeps and one-shot power
// allocations from a key=value config file.

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "detfuse/allocation.hpp"
#include "detfuse/errors.hpp"
#include "detfuse/harness.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw detfuse::config_error("cannot open config file: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

int cmd_sweep(const detfuse::ExperimentSpec& spec, int threads) {
    auto points = detfuse::run_sweep(spec, threads);
    if (spec.out.empty()) {
        std::fputs(detfuse::format_csv(spec, points).c_str(), stdout);
    } else {
        detfuse::write_csv(spec, points, spec.out);
        std::fprintf(stderr, "wrote %zu points to %s\n", points.size(),
                     spec.out.c_str());
    }
    return 0;
}

int cmd_allocate(const detfuse::ExperimentSpec& spec, double snr_db,
                 double r) {
    detfuse::CasePreset preset =
        detfuse::build_case(spec.case_id, spec.n, spec.m);
    std::vector<detfuse::ConfusionMatrix> confusions;
    for (int k = 0; k < spec.n; ++k) {
        auto means = detfuse::calibrate_means(
            preset.target_errors[static_cast<std::size_t>(k)], spec.m, 1.0);
        confusions.push_back(detfuse::confusion_matrix(means, 0.5, 0.5));
    }
    detfuse::NetworkScenario scenario = preset.scenario;
    scenario.p_total = detfuse::solve_p_total_for_snr(scenario, snr_db);

    detfuse::AllocationResult res = detfuse::allocate(
        spec.allocation, spec.receiver, scenario, confusions, r);

    std::printf("case          %s (n=%d, m=%d)\n",
                detfuse::to_string(spec.case_id).c_str(), spec.n, spec.m);
    std::printf("receiver      %s\n", detfuse::to_string(spec.receiver).c_str());
    std::printf("strategy      %s\n",
                detfuse::to_string(spec.allocation).c_str());
    std::printf("snr_db        %.6g\n", snr_db);
    std::printf("p_total       %.10g\n", scenario.p_total);
    std::printf("r             %.6g\n", r);
    std::printf("objective     %.10g\n", res.objective);
    std::printf("iterations    %ld\n", res.iterations);
    std::printf("kkt_residual  %.3g\n", res.residual);
    std::printf("%-8s%-22s%s\n", "sensor", "data_power", "training_power");
    for (std::size_t k = 0; k < res.plan.data_powers.size(); ++k)
        std::printf("%-8zu%-22.10g%.10g\n", k + 1, res.plan.data_powers[k],
                    res.plan.training_powers[k]);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"distributed M-ary detection over fading channels"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_override;
    long trials_override = 0;
    std::uint64_t seed_override = 0;
    int threads = 0;
    double snr_override = 0.0;
    double r_override = 0.0;

    CLI::App* sweep = app.add_subcommand(
        "sweep", "run a Monte Carlo error-probability sweep");
    sweep->add_option("--config", config_path, "key=value experiment file")
        ->required()
        ->check(CLI::ExistingFile);
    sweep->add_option("--out", out_override,
                      "CSV output path (overrides config; default stdout)");
    sweep->add_option("--trials", trials_override,
                      "Monte Carlo trials per point (overrides config)")
        ->check(CLI::PositiveNumber);
    sweep->add_option("--seed", seed_override, "RNG seed (overrides config)");
    sweep->add_option("--threads", threads,
                      "worker threads (default: hardware concurrency)")
        ->check(CLI::NonNegativeNumber);

    CLI::App* alloc = app.add_subcommand(
        "allocate", "solve one power allocation and print the plan");
    alloc->add_option("--config", config_path, "key=value experiment file")
        ->required()
        ->check(CLI::ExistingFile);
    alloc->add_option("--snr-db", snr_override,
                      "network SNR in dB (overrides config)");
    alloc->add_option("--r", r_override,
                      "data share of the power budget (overrides config)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        detfuse::ExperimentSpec spec =
            detfuse::parse_config(read_file(config_path));
        if (sweep->parsed()) {
            if (sweep->count("--trials")) spec.trials = trials_override;
            if (sweep->count("--seed")) spec.seed = seed_override;
            if (sweep->count("--out")) spec.out = out_override;
            spec.validate();
            return cmd_sweep(spec, threads);
        }
        double snr = alloc->count("--snr-db") ? snr_override : spec.snr_db;
        double r = alloc->count("--r") ? r_override : spec.r;
        return cmd_allocate(spec, snr, r);
    } catch (const detfuse::config_error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
