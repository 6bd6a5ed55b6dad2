#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "panelgap/cv.hpp"
#include "panelgap/mc_solver.hpp"
#include "panelgap/panel.hpp"

namespace panelgap {

enum class PlaceboKind { in_space, in_time };

struct PlaceboRun {
    std::string label;  // source donor or pseudo-date
    double ate = 0.0;
    bool ok = true;
};

struct PlaceboDistribution {
    PlaceboKind kind = PlaceboKind::in_space;
    std::vector<PlaceboRun> runs;  // successful runs only
    double observed_ate = 0.0;
    double p_value = 1.0;  // (1 + #{|placebo| >= |observed|}) / (1 + n_runs)
    double ci_low = 0.0;   // empirical 2.5th percentile of placebo effects
    double ci_high = 0.0;  // 97.5th percentile
    int n_runs = 0;
    int n_failed = 0;
    std::vector<std::string> warnings;
};

// Fills p-value and CI fields from the run list and observed effect.
void summarize_placebos(PlaceboDistribution& dist);

// Re-runs the full pipeline once per donor with that donor as pseudo-treated
// at the true t0; the true treated unit is dropped from each placebo run's
// pool (its post block is contaminated). observed_ate comes from the real fit.
PlaceboDistribution in_space_placebos(const PanelMatrix& panel,
                                      const TreatmentAssignment& treat,
                                      const McConfig& config);

// Truncates the panel at t0 - 1 and re-runs with each pseudo-date as T0.
// Every pseudo-date must leave >= min_train pre-periods and >= horizon
// periods before the true t0.
PlaceboDistribution in_time_placebos(const PanelMatrix& panel,
                                     const TreatmentAssignment& treat,
                                     const std::vector<PeriodIndex>& pseudo_dates,
                                     const McConfig& config, int min_train = 60,
                                     int horizon = 12);

// Every 6th month from min_train to t0 - horizon.
std::vector<PeriodIndex> default_pseudo_dates(const PanelMatrix& panel,
                                              const TreatmentAssignment& treat,
                                              int min_train = 60, int horizon = 12);

struct ResampleSummary {
    int n_boot = 0;
    double se_location = 0.0;  // bootstrap SE of the placebo-distribution mean
    double se_p_value = 0.0;
    bool degenerate = false;   // all placebo effects equal
};

// Bootstrap (with replacement) over the placebo-effect set.
ResampleSummary resample_summary(const PlaceboDistribution& dist, int n_boot,
                                 std::uint64_t seed);

// Interpolated empirical quantile (linear, in [0, 1]).
double empirical_quantile(std::vector<double> values, double q);

}  // namespace panelgap
