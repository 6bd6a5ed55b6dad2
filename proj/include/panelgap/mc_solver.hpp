#pragma once

#include <Eigen/Dense>
#include <vector>

#include "panelgap/panel.hpp"

namespace panelgap {

enum class FeMode { both, none };

struct McConfig {
    double lambda = 1e-4;  // nuclear-norm shrinkage weight
    int max_iters = 10000;
    double rel_tol = 1e-8;
    FeMode fe_mode = FeMode::both;
};

// Fitted decomposition Y ~ mu + alpha_i + gamma_t + L_{i,t} on the observed
// untreated set. alpha and gamma are normalized to omega-weighted zero mean;
// the grand level lives in mu, so the imputed counterfactual is
// mu + alpha[treated] + gamma[t] + l[treated, t].
struct McFit {
    double mu = 0.0;
    Eigen::VectorXd alpha;  // per unit
    Eigen::VectorXd gamma;  // per period
    Eigen::MatrixXd l;      // units x periods low-rank component
    std::vector<double> imputed;           // counterfactual on missing, time order
    std::vector<int> imputed_periods;      // matching period indices
    std::vector<double> objective_trace;   // non-increasing
    bool converged = false;
    int iters = 0;
    int effective_rank = 0;  // singular values of l above 1e-9
};

// Block-coordinate descent on
//   sum_{(i,t) in omega} (Y - mu - alpha_i - gamma_t - L)^2 + lambda*||L||_*
// alternating exact fixed-effect updates with the SVT proximal step at
// threshold lambda/2. Deterministic; no RNG.
McFit fit(const PanelMatrix& panel, const ObservedSets& sets, const McConfig& config);

double objective(const PanelMatrix& panel, const ObservedSets& sets, double mu,
                 const Eigen::VectorXd& alpha, const Eigen::VectorXd& gamma,
                 const Eigen::MatrixXd& l, double lambda);

// Counterfactual values over the missing set, in time order.
std::vector<double> impute_counterfactual(const McFit& fit, const ObservedSets& sets);

}  // namespace panelgap
