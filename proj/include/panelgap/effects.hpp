#pragma once

#include <cstdint>
#include <vector>

#include "panelgap/mc_solver.hpp"
#include "panelgap/panel.hpp"

namespace panelgap {

// Dynamic gaps tau_t = observed - counterfactual on the post block, plus
// pre-treatment residual diagnostics for the treated unit.
struct EffectPath {
    std::vector<PeriodIndex> periods;  // post-treatment, time order
    std::vector<double> tau;
    double ate = 0.0;
    std::vector<double> pre_residuals;       // observed - fitted, treated pre cells
    std::vector<PeriodIndex> pre_periods;
    double pre_mse = 0.0;
    double pre_mean = 0.0;
};

// Post-treatment split into impact / adjustment / persistence windows,
// expressed as 1-based post-month ranges [1..impact_end], (impact_end..adjust_end],
// (adjust_end..post_len].
struct HorizonWindows {
    int impact_end = 3;
    int adjust_end = 12;
};

struct HorizonAtes {
    double impact = 0.0;
    double adjustment = 0.0;
    double persistence = 0.0;
};

struct PreFitReport {
    double pre_mean = 0.0;
    double pre_mse = 0.0;
    double lag1_autocorr = 0.0;
    double p_value = 1.0;  // sign-flip permutation p for |mean residual|
    int n_flips = 0;
};

EffectPath effect_path(const PanelMatrix& panel, const ObservedSets& sets,
                       const McFit& fit);

// Mean of tau over 1-based post months [begin, end] inclusive.
double window_ate(const EffectPath& path, int begin, int end);

// Clamps the default 3/9/rest layout to short post periods while keeping the
// three windows disjoint, contiguous, and covering.
HorizonWindows default_windows(int post_len);

HorizonAtes horizon_decomposition(const EffectPath& path, const HorizonWindows& windows);

// Sign-flip permutation check of the mean pre-treatment residual.
PreFitReport pre_fit_report(const EffectPath& path, int n_flips = 2000,
                            std::uint64_t seed = 0);

}  // namespace panelgap
