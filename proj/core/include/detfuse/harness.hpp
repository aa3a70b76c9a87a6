#ifndef DETFUSE_HARNESS_HPP
#define DETFUSE_HARNESS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "detfuse/allocation.hpp"
#include "detfuse/fusion.hpp"
#include "detfuse/scenario.hpp"
#include "detfuse/sensing.hpp"

namespace detfuse {

enum class SweepKind { snr, r };

std::string to_string(SweepKind s);
SweepKind sweep_from_string(const std::string& s);

// One experiment: a preset case swept over SNR or over the data fraction r.
// Field names double as config file keys.
struct ExperimentSpec {
    CaseId case_id = CaseId::v_a1;
    int n = 5;
    int m = 2;
    Receiver receiver = Receiver::coherent;
    AllocationStrategy allocation = AllocationStrategy::uniform;
    SweepKind sweep = SweepKind::snr;
    std::vector<double> grid;
    long trials = 10000;
    std::uint64_t seed = 1;
    double snr_db = 10.0; // fixed network SNR for r sweeps
    double r = 0.5;       // fixed data fraction for SNR sweeps
    std::string out;      // output CSV path ("" = stdout)

    void validate() const; // throws config_error
};

// Flat key=value text, one pair per line, '#' starts a comment.  Unknown
// or malformed keys raise parse_error naming the key and line.  Absent
// keys fall back to the defaults above; `grid` is required.  For the
// statistics receiver, r defaults to 1 instead of 0.5.
ExperimentSpec parse_config(const std::string& text);

// Canonical form: every key, fixed order, full precision.
// parse_config(serialize_config(s)) reproduces s exactly.
std::string serialize_config(const ExperimentSpec& spec);

struct PePoint {
    double sweep_value = 0.0;
    double pe = 0.0;
    double ci95 = 0.0;
    long trials = 0;
};

// One fully resolved sweep point, runnable on its own.  Tests drive
// hand-built instances of this through run_point directly.
struct PointContext {
    NetworkScenario scenario; // p_total already set for this point
    SourceModel source;
    std::vector<ConfusionMatrix> confusions;
    Receiver receiver = Receiver::coherent;
    AllocationStrategy allocation = AllocationStrategy::uniform;
    double r = 0.5;
    std::uint64_t seed = 1;
    std::uint64_t point_index = 0;
    long trials = 10000;
    int threads = 0;                 // <= 0 picks hardware concurrency
    int amplitude_mc_samples = 20000;
};

PePoint run_point(const PointContext& ctx);

// Builds the preset sensors and runs every grid point.  Trials execute
// concurrently; each (point, trial) pair owns a counter-derived random
// stream, so results are identical for any thread count.
std::vector<PePoint> run_sweep(const ExperimentSpec& spec, int threads = 0);

// Writes points in the fixed column layout
//   sweep_name,sweep_value,pe,ci95,trials,receiver,allocation,case_id,n,m,seed
// with deterministic formatting.
std::string format_csv(const ExperimentSpec& spec,
                       const std::vector<PePoint>& points);
void write_csv(const ExperimentSpec& spec, const std::vector<PePoint>& points,
               const std::string& path);

} // namespace detfuse

#endif
