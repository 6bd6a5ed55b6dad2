#include "panelgap/report.hpp"

#include <cmath>
#include <sstream>

namespace panelgap {

namespace {

std::string format_value(double v) {
    std::ostringstream s;
    s.precision(17);
    s << v;
    return s.str();
}

json vec_to_json(const Eigen::VectorXd& v) {
    json out = json::array();
    for (int k = 0; k < v.size(); ++k) out.push_back(v[k]);
    return out;
}

}  // namespace

json fit_report(const PanelMatrix& panel, const ObservedSets& sets, const McFit& fit,
                double lambda) {
    json out;
    out["lambda"] = lambda;
    out["converged"] = fit.converged;
    out["iterations"] = fit.iters;
    out["objective"] = fit.objective_trace.back();
    out["effective_rank"] = fit.effective_rank;
    out["mu"] = fit.mu;
    json alpha;
    for (int i = 0; i < panel.n_units(); ++i) alpha[panel.units[i]] = fit.alpha[i];
    out["alpha"] = std::move(alpha);
    out["gamma"] = vec_to_json(fit.gamma);
    json imputed = json::array();
    for (size_t k = 0; k < fit.imputed.size(); ++k)
        imputed.push_back({{"period", panel.period(fit.imputed_periods[k]).label()},
                           {"value", fit.imputed[k]}});
    out["counterfactual"] = std::move(imputed);
    out["n_observed"] = sets.omega.size();
    out["n_missing"] = sets.missing.size();
    return out;
}

json effects_report(const EffectPath& path, const HorizonWindows& windows,
                    const PreFitReport& diag) {
    json out;
    out["ate"] = path.ate;
    json tau = json::array();
    for (size_t k = 0; k < path.tau.size(); ++k)
        tau.push_back({{"period", path.periods[k].label()}, {"tau", path.tau[k]}});
    out["tau"] = std::move(tau);
    auto h = horizon_decomposition(path, windows);
    out["windows"] = {{"impact_end", windows.impact_end},
                      {"adjust_end", windows.adjust_end}};
    out["horizon_ates"] = {{"impact", h.impact},
                           {"adjustment", h.adjustment},
                           {"persistence", h.persistence}};
    out["pre_fit"] = {{"mean", diag.pre_mean},
                      {"mse", diag.pre_mse},
                      {"lag1_autocorr", diag.lag1_autocorr},
                      {"sign_flip_p", diag.p_value},
                      {"n_flips", diag.n_flips}};
    return out;
}

json cv_report(const CvReport& report) {
    json out;
    out["lambda_grid"] = report.lambda_grid;
    json folds = json::array();
    for (const auto& f : report.folds)
        folds.push_back({{"train_end", f.train_end},
                         {"val_begin", f.val_begin},
                         {"val_end", f.val_end}});
    out["folds"] = std::move(folds);
    json mse = json::array();
    for (int r = 0; r < report.mse.rows(); ++r) {
        json row = json::array();
        for (int c = 0; c < report.mse.cols(); ++c) row.push_back(report.mse(r, c));
        mse.push_back(std::move(row));
    }
    out["mse"] = std::move(mse);
    out["mean_mse"] = vec_to_json(report.mean_mse);
    out["selected_lambda"] = report.selected_lambda;
    out["one_se_lambda"] = report.one_se_lambda;
    return out;
}

json placebo_report(const PlaceboDistribution& dist) {
    json out;
    out["kind"] = dist.kind == PlaceboKind::in_space ? "in_space" : "in_time";
    out["observed_ate"] = dist.observed_ate;
    out["p_value"] = dist.p_value;
    out["ci_low"] = dist.ci_low;
    out["ci_high"] = dist.ci_high;
    out["n_runs"] = dist.n_runs;
    out["n_failed"] = dist.n_failed;
    json runs = json::array();
    for (const auto& r : dist.runs)
        runs.push_back({{"label", r.label}, {"ate", r.ate}});
    out["runs"] = std::move(runs);
    out["warnings"] = dist.warnings;
    return out;
}

json sdid_report(const PanelMatrix& panel, const TreatmentAssignment& treat,
                 const SdidEstimate& est) {
    json out;
    out["tau"] = est.tau;
    out["treated_delta"] = est.treated_delta;
    out["zeta"] = est.weights.zeta;
    json omega;
    int d = 0;
    for (const auto& u : panel.units) {
        if (u == treat.treated_unit) continue;
        double w = est.weights.omega[d];
        omega[u] = w < 1e-4 ? 0.0 : w;
        ++d;
    }
    out["unit_weights"] = std::move(omega);
    out["unit_intercept"] = est.weights.omega_intercept;
    out["time_weights"] = vec_to_json(est.weights.time_weights);
    out["time_intercept"] = est.weights.time_intercept;
    out["per_donor_delta"] = vec_to_json(est.per_donor_delta);
    out["unit_converged"] = est.weights.unit_converged;
    out["time_converged"] = est.weights.time_converged;
    return out;
}

json truth_report(const DgpSpec& spec, const DgpDraw& draw) {
    json out;
    out["spec"] = {{"n_units", spec.n_units},
                   {"n_periods", spec.n_periods},
                   {"t0", spec.t0},
                   {"rank", spec.rank},
                   {"factor_persistence", spec.factor_persistence},
                   {"loading_scale", spec.loading_scale},
                   {"fe_scale", spec.fe_scale},
                   {"noise_sigma", spec.noise_sigma},
                   {"seed", spec.seed}};
    switch (spec.effect.kind) {
        case EffectKind::zero:
            out["spec"]["effect"] = {{"kind", "zero"}};
            break;
        case EffectKind::constant:
            out["spec"]["effect"] = {{"kind", "constant"}, {"value", spec.effect.value}};
            break;
        case EffectKind::hump:
            out["spec"]["effect"] = {{"kind", "hump"},
                                     {"peak", spec.effect.peak},
                                     {"peak_time", spec.effect.peak_time},
                                     {"decay", spec.effect.decay},
                                     {"floor", spec.effect.floor}};
            break;
    }
    out["treated_unit"] = draw.treat.treated_unit;
    out["t0"] = draw.treat.t0.label();
    out["effect_path"] = draw.truth.effect_path;
    out["y0_missing"] = draw.truth.y0_missing;
    return out;
}

std::string effects_csv(const EffectPath& path) {
    std::ostringstream out;
    out << "period,tau\n";
    for (size_t k = 0; k < path.tau.size(); ++k)
        out << path.periods[k].label() << ',' << format_value(path.tau[k]) << '\n';
    return out.str();
}

std::string placebo_csv(const PlaceboDistribution& dist) {
    std::ostringstream out;
    out << "label,ate\n";
    for (const auto& r : dist.runs)
        out << r.label << ',' << format_value(r.ate) << '\n';
    return out.str();
}

std::string sdid_weights_csv(const PanelMatrix& panel, const TreatmentAssignment& treat,
                             const SdidEstimate& est) {
    std::ostringstream out;
    out << "unit,omega\n";
    int d = 0;
    for (const auto& u : panel.units) {
        if (u == treat.treated_unit) continue;
        double w = est.weights.omega[d];
        out << u << ',' << format_value(w < 1e-4 ? 0.0 : w) << '\n';
        ++d;
    }
    return out.str();
}

}  // namespace panelgap
