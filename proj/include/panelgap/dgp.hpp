#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "panelgap/panel.hpp"

namespace panelgap {

enum class EffectKind { zero, constant, hump };

struct EffectProfile {
    EffectKind kind = EffectKind::zero;
    double value = 0.0;     // constant effect
    double peak = 0.0;      // hump
    int peak_time = 1;      // hump: post month of the peak (1-based)
    double decay = 0.0;     // hump: geometric decay rate in (0,1]; 0 = hold the peak
    double floor = 0.5;     // hump: resting level as a fraction of peak, clamped at 0.4
};

struct DgpSpec {
    int n_units = 12;
    int n_periods = 212;
    int t0 = 189;  // 0-based first treated period (2023-10 on the default calendar)
    int rank = 2;
    double factor_persistence = 0.9;  // AR(1) coefficient, in [0, 1)
    double loading_scale = 1.0;
    double fe_scale = 1.0;
    double noise_sigma = 0.1;
    EffectProfile effect;
    std::uint64_t seed = 0;
    PeriodIndex origin{Frequency::monthly, 2008, 1, 0};
};

struct GroundTruth {
    std::vector<double> y0_missing;   // untreated outcomes on the missing block
    std::vector<double> effect_path;  // injected effect per post period
    Eigen::MatrixXd l;                // true low-rank component Lambda * f
    Eigen::VectorXd alpha;
    Eigen::VectorXd gamma;
};

struct DgpDraw {
    PanelMatrix panel;
    TreatmentAssignment treat;
    GroundTruth truth;
};

// Latent-factor panel: Y(0) = alpha_i + gamma_t + sum_k lambda_ik f_kt + eps,
// factors AR(1) with unit stationary variance; the treated unit's post block
// gets the effect profile added. Deterministic given spec.seed.
DgpDraw generate(const DgpSpec& spec);

// Linear rise to `peak` at post month peak_time, then geometric decay toward
// max(floor, 0.4) * peak.
std::vector<double> hump_profile(double peak, int peak_time, double decay, int length,
                                 double floor = 0.5);

}  // namespace panelgap
