#include "panelgap/cv.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace panelgap {

std::vector<CvFold> make_folds(int pre_periods, const CvPlan& plan) {
    if (plan.lambda_grid.empty())
        throw std::invalid_argument("make_folds: empty lambda grid");
    for (size_t k = 0; k < plan.lambda_grid.size(); ++k) {
        if (plan.lambda_grid[k] < 0.0 ||
            (k > 0 && plan.lambda_grid[k] <= plan.lambda_grid[k - 1]))
            throw std::invalid_argument("make_folds: lambda grid must be strictly ascending and >= 0");
    }
    if (plan.horizon < 1 || plan.n_folds < 1)
        throw std::invalid_argument("make_folds: horizon and n_folds must be >= 1");
    const int needed = plan.min_train + plan.n_folds * plan.horizon;
    if (pre_periods < needed)
        throw std::invalid_argument(
            "make_folds: " + std::to_string(pre_periods) +
            " pre-treatment periods are too few; need >= " + std::to_string(needed) +
            " (min_train " + std::to_string(plan.min_train) + " + " +
            std::to_string(plan.n_folds) + " x horizon " + std::to_string(plan.horizon) + ")");
    std::vector<CvFold> folds;
    for (int k = 0; k < plan.n_folds; ++k) {
        CvFold f;
        f.val_end = pre_periods - 1 - k * plan.horizon;
        f.val_begin = f.val_end - plan.horizon + 1;
        f.train_end = f.val_begin - 1;
        folds.push_back(f);
    }
    return folds;
}

CvPlan default_cv_plan(const PanelMatrix& panel, const TreatmentAssignment& treat) {
    CvPlan plan;
    int t0 = period_distance(panel.start, treat.t0);
    int post_len = panel.n_periods() - t0;
    plan.horizon = std::max(1, std::min(post_len, 24));
    plan.n_folds = 4;
    plan.min_train = 60;
    const int grid_size = 12;
    const double lo = std::log(1e-5), hi = std::log(1e-1);
    for (int k = 0; k < grid_size; ++k)
        plan.lambda_grid.push_back(std::exp(lo + (hi - lo) * k / (grid_size - 1)));
    return plan;
}

CvReport select_lambda(const PanelMatrix& panel, const TreatmentAssignment& treat,
                       const CvPlan& plan, const McConfig& config_template) {
    const int treated = panel.unit_index(treat.treated_unit);
    if (treated < 0)
        throw std::invalid_argument("select_lambda: treated unit '" + treat.treated_unit +
                                    "' not found");
    const int t0 = period_distance(panel.start, treat.t0);
    auto folds = make_folds(t0, plan);
    const int n_lambda = static_cast<int>(plan.lambda_grid.size());
    const int n_folds = static_cast<int>(folds.size());

    CvReport report;
    report.lambda_grid = plan.lambda_grid;
    report.folds = folds;
    report.mse = Eigen::MatrixXd::Constant(n_lambda, n_folds,
                                           std::numeric_limits<double>::quiet_NaN());

    for (int f = 0; f < n_folds; ++f) {
        const CvFold& fold = folds[f];
        // panel truncated at the validation window's end; no post-t0 leakage
        PanelMatrix sub = panel;
        sub.values = panel.values.leftCols(fold.val_end + 1);
        sub.mask = panel.mask.leftCols(fold.val_end + 1);
        TreatmentAssignment pseudo{treat.treated_unit, panel.period(fold.val_begin)};
        ObservedSets sets = build_observed_sets(sub, pseudo);
        if (sets.missing.empty()) continue;  // window fully unobserved in raw data
        for (int k = 0; k < n_lambda; ++k) {
            McConfig cfg = config_template;
            cfg.lambda = plan.lambda_grid[k];
            McFit fitted = fit(sub, sets, cfg);
            double sse = 0.0;
            for (size_t m = 0; m < sets.missing.size(); ++m) {
                auto [i, j] = sets.missing[m];
                double err = sub.values(i, j) - fitted.imputed[m];
                sse += err * err;
            }
            report.mse(k, f) = sse / static_cast<double>(sets.missing.size());
        }
    }

    report.mean_mse = Eigen::VectorXd::Constant(n_lambda,
                                                std::numeric_limits<double>::quiet_NaN());
    int best = -1;
    for (int k = 0; k < n_lambda; ++k) {
        double sum = 0.0;
        int cnt = 0;
        for (int f = 0; f < n_folds; ++f)
            if (std::isfinite(report.mse(k, f))) {
                sum += report.mse(k, f);
                ++cnt;
            }
        if (cnt == 0) continue;
        report.mean_mse[k] = sum / cnt;
        if (best < 0 || report.mean_mse[k] <= report.mean_mse[best]) best = k;  // ties -> larger lambda
    }
    if (best < 0)
        throw std::runtime_error("select_lambda: no finite validation MSE at any lambda");
    report.selected_lambda = plan.lambda_grid[best];

    // one-SE rule: largest lambda within one standard error of the minimum
    double mean_best = report.mean_mse[best];
    double var = 0.0;
    int cnt = 0;
    for (int f = 0; f < n_folds; ++f)
        if (std::isfinite(report.mse(best, f))) {
            double d = report.mse(best, f) - mean_best;
            var += d * d;
            ++cnt;
        }
    double se = cnt > 1 ? std::sqrt(var / (cnt - 1)) / std::sqrt(static_cast<double>(cnt)) : 0.0;
    report.one_se_lambda = report.selected_lambda;
    for (int k = n_lambda - 1; k >= 0; --k)
        if (std::isfinite(report.mean_mse[k]) && report.mean_mse[k] <= mean_best + se) {
            report.one_se_lambda = plan.lambda_grid[k];
            break;
        }
    if (plan.use_one_se) report.selected_lambda = report.one_se_lambda;
    return report;
}

}  // namespace panelgap
