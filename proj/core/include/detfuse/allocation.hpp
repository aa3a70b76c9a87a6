#ifndef DETFUSE_ALLOCATION_HPP
#define DETFUSE_ALLOCATION_HPP

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "detfuse/divergence.hpp"
#include "detfuse/fusion.hpp"
#include "detfuse/scenario.hpp"
#include "detfuse/sensing.hpp"

namespace detfuse {

enum class AllocationStrategy {
    uniform,
    conditional_j_gradient,
    average_j_search,
    statistics_extreme_point
};

std::string to_string(AllocationStrategy s);
AllocationStrategy allocation_from_string(const std::string& s);

struct AllocationResult {
    PowerPlan plan;
    double objective = 0.0;
    long iterations = 0;
    double residual = 0.0; // projected-gradient (KKT) residual at exit
    int starts = 1;
};

// Even split of the budget: every sensor gets r p_total / N of data power
// and (1 - r) p_total / N of training power.  r must lie in [0, 1].
PowerPlan uniform_plan(const NetworkScenario& scenario, double r);

// Maximizes the conditional total J over data powers on the simplex
// { p >= 0, sum p = data_budget } with training powers held fixed.
// Projected gradient ascent from the even split; central-difference
// gradients with per-coordinate step max(1e-6, 1e-6 * p_k); stops when the
// KKT residual drops below 1e-8 or after 1e4 iterations.
AllocationResult allocate_data_conditional_j(
    const NetworkScenario& scenario,
    const std::vector<ConfusionMatrix>& confusions,
    std::span<const double> g_hat, std::span<const double> error_variances,
    Modulation modulation, double data_budget,
    std::span<const double> training_powers, std::span<const double> priors);

// Maximizes the fading-averaged coherent J over per-sensor total powers
// with every sensor's split pinned at r_k = 1/2.  The objective is not
// concave, so the gradient solver is restarted from at least 8 points
// (even split, vertex-leaning starts, seeded random interiors) and the
// best result wins.
AllocationResult allocate_average_j(const NetworkScenario& scenario,
                                    const std::vector<ConfusionMatrix>& confusions,
                                    std::span<const double> priors);

// Maximizes the statistics-only total J by enumerating the simplex
// extreme points {0} and {data_budget e_k}; ties go to the earliest
// candidate in that order.
AllocationResult allocate_statistics_extreme_point(
    const NetworkScenario& scenario,
    const std::vector<ConfusionMatrix>& confusions,
    std::span<const double> priors, double data_budget);

// Strategy dispatch with receiver compatibility checks:
//   uniform                  any receiver
//   conditional_j_gradient   coherent or amplitude; needs g_hat and
//                            error_variances from the current block
//   average_j_search         coherent only
//   statistics_extreme_point statistics only
// r is the data fraction of the budget (ignored by average_j_search,
// forced to 1 for the statistics receiver).  Incompatible combinations
// throw config_error.
AllocationResult allocate(AllocationStrategy strategy, Receiver receiver,
                          const NetworkScenario& scenario,
                          const std::vector<ConfusionMatrix>& confusions,
                          double r,
                          std::span<const double> g_hat = {},
                          std::span<const double> error_variances = {});

} // namespace detfuse

#endif
