#pragma once

#include <Eigen/Dense>
#include <vector>

#include "panelgap/mc_solver.hpp"
#include "panelgap/panel.hpp"

namespace panelgap {

struct CvPlan {
    std::vector<double> lambda_grid;  // strictly ascending, all >= 0
    int horizon = 24;                 // validation window length in periods
    int n_folds = 4;
    int min_train = 60;
    bool use_one_se = false;  // select one_se_lambda instead of the argmin
};

// One rolling-origin fold over the pre-treatment block. Indices are 0-based
// period columns; validation is [val_begin, val_end] inclusive, immediately
// after train_end.
struct CvFold {
    int train_end;
    int val_begin;
    int val_end;
};

struct CvReport {
    std::vector<double> lambda_grid;
    std::vector<CvFold> folds;
    Eigen::MatrixXd mse;        // lambda x fold
    Eigen::VectorXd mean_mse;   // per lambda
    double selected_lambda = 0.0;
    double one_se_lambda = 0.0;
};

// Validation windows end at the last pre-treatment period and step backward
// by `horizon`, most-recent-first.
std::vector<CvFold> make_folds(int pre_periods, const CvPlan& plan);

// Default plan bracketing the shrinkage values used in practice: 12 log-spaced
// lambdas in [1e-5, 1e-1], horizon = min(post length, 24), 4 folds, 60-period
// minimum training window.
CvPlan default_cv_plan(const PanelMatrix& panel, const TreatmentAssignment& treat);

// For each fold, hides the treated unit's validation window (donors stay fully
// observed), fits at every lambda on the panel truncated at the window's end,
// and scores imputation MSE on the hidden cells. Ties go to the larger lambda.
CvReport select_lambda(const PanelMatrix& panel, const TreatmentAssignment& treat,
                       const CvPlan& plan, const McConfig& config_template);

}  // namespace panelgap
