#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "panelgap/inference.hpp"
#include "panelgap/panel.hpp"

namespace panelgap {

struct SdidWeights {
    Eigen::VectorXd omega;  // per donor, simplex
    double omega_intercept = 0.0;
    Eigen::VectorXd time_weights;  // per pre-period, simplex
    double time_intercept = 0.0;
    double zeta = 0.0;
    bool unit_converged = true;
    bool time_converged = true;
};

struct SdidEstimate {
    double tau = 0.0;
    Eigen::VectorXd per_donor_delta;  // time-weighted pre/post change per donor
    double treated_delta = 0.0;
    SdidWeights weights;
};

enum class ZetaMode { automatic, fixed };

struct SdidConfig {
    ZetaMode zeta_mode = ZetaMode::automatic;
    double zeta = 0.0;  // used when zeta_mode == fixed
    int max_iters = 20000;
    double kkt_tol = 1e-8;
};

// Simplex-constrained ridge regression of the treated pre path on donor pre
// paths (free intercept), solved by projected gradient. The penalty is
// zeta^2 * T_pre * ||omega||^2.
SdidWeights solve_unit_weights(const PanelMatrix& panel, const TreatmentAssignment& treat,
                               double zeta, int max_iters = 20000, double kkt_tol = 1e-8);

// Simplex weights over pre-periods matching each donor's post mean from its
// pre path (free intercept); no ridge term.
void solve_time_weights(const PanelMatrix& panel, const TreatmentAssignment& treat,
                        SdidWeights& weights, int max_iters = 20000, double kkt_tol = 1e-8);

// Weighted DiD contrast: delta_unit = mean_post(Y) - sum_t lambda_t Y_t,
// tau = delta_treated - sum_d omega_d delta_d. Automatic zeta follows
// (N_donors * T_post)^(1/4) * sd(first-differenced donor pre outcomes).
SdidEstimate sdid_estimate(const PanelMatrix& panel, const TreatmentAssignment& treat,
                           const SdidConfig& config = {});

// Repeated placebo reassignment of treatment to a random donor (true treated
// unit excluded), n draws, seeded per run.
PlaceboDistribution sdid_placebo(const PanelMatrix& panel, const TreatmentAssignment& treat,
                                 int n, std::uint64_t seed, const SdidConfig& config = {});

// Euclidean projection onto the probability simplex.
Eigen::VectorXd project_simplex(const Eigen::VectorXd& v);

}  // namespace panelgap
