#include "panelgap/effects.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace panelgap {

EffectPath effect_path(const PanelMatrix& panel, const ObservedSets& sets,
                       const McFit& fit) {
    if (fit.alpha.size() != panel.values.rows() || fit.gamma.size() != panel.values.cols())
        throw std::invalid_argument("effect_path: fit does not match panel");
    if (fit.imputed.size() != sets.missing.size())
        throw std::invalid_argument("effect_path: fit does not match observed sets");

    EffectPath path;
    double sum = 0.0;
    for (size_t m = 0; m < sets.missing.size(); ++m) {
        auto [i, j] = sets.missing[m];
        double t = panel.values(i, j) - fit.imputed[m];
        path.periods.push_back(panel.period(j));
        path.tau.push_back(t);
        sum += t;
    }
    path.ate = path.tau.empty() ? 0.0 : sum / static_cast<double>(path.tau.size());

    double rsum = 0.0, rsq = 0.0;
    for (int j = 0; j < sets.t0_index; ++j) {
        int i = sets.treated_unit;
        if (!panel.mask(i, j)) continue;
        double fitted = fit.mu + fit.alpha[i] + fit.gamma[j] + fit.l(i, j);
        double d = panel.values(i, j) - fitted;
        path.pre_residuals.push_back(d);
        path.pre_periods.push_back(panel.period(j));
        rsum += d;
        rsq += d * d;
    }
    if (!path.pre_residuals.empty()) {
        path.pre_mean = rsum / static_cast<double>(path.pre_residuals.size());
        path.pre_mse = rsq / static_cast<double>(path.pre_residuals.size());
    }
    return path;
}

double window_ate(const EffectPath& path, int begin, int end) {
    const int post_len = static_cast<int>(path.tau.size());
    if (begin < 1 || end > post_len || begin > end)
        throw std::invalid_argument("window_ate: window [" + std::to_string(begin) + ", " +
                                    std::to_string(end) + "] invalid for " +
                                    std::to_string(post_len) + " post periods");
    double sum = 0.0;
    for (int h = begin; h <= end; ++h) sum += path.tau[h - 1];
    return sum / static_cast<double>(end - begin + 1);
}

HorizonWindows default_windows(int post_len) {
    if (post_len < 3) throw std::invalid_argument("default_windows: need >= 3 post periods");
    HorizonWindows w;
    w.impact_end = std::min(3, post_len - 2);
    w.adjust_end = std::min(12, post_len - 1);
    if (w.adjust_end <= w.impact_end) w.adjust_end = w.impact_end + 1;
    return w;
}

HorizonAtes horizon_decomposition(const EffectPath& path, const HorizonWindows& windows) {
    const int post_len = static_cast<int>(path.tau.size());
    if (windows.impact_end < 1 || windows.adjust_end <= windows.impact_end ||
        windows.adjust_end >= post_len)
        throw std::invalid_argument("horizon_decomposition: windows must be disjoint, "
                                    "contiguous, and cover the post period");
    HorizonAtes out;
    out.impact = window_ate(path, 1, windows.impact_end);
    out.adjustment = window_ate(path, windows.impact_end + 1, windows.adjust_end);
    out.persistence = window_ate(path, windows.adjust_end + 1, post_len);
    return out;
}

PreFitReport pre_fit_report(const EffectPath& path, int n_flips, std::uint64_t seed) {
    const auto& d = path.pre_residuals;
    const int n = static_cast<int>(d.size());
    if (n < 8)
        throw std::invalid_argument("pre_fit_report: need >= 8 pre-treatment residuals, have " +
                                    std::to_string(n));
    PreFitReport rep;
    rep.pre_mean = path.pre_mean;
    rep.pre_mse = path.pre_mse;
    rep.n_flips = n_flips;

    double var = 0.0, cov = 0.0;
    for (int k = 0; k < n; ++k) var += (d[k] - path.pre_mean) * (d[k] - path.pre_mean);
    for (int k = 1; k < n; ++k) cov += (d[k] - path.pre_mean) * (d[k - 1] - path.pre_mean);
    rep.lag1_autocorr = var > 0.0 ? cov / var : 0.0;

    std::mt19937_64 rng(seed);
    std::bernoulli_distribution flip(0.5);
    const double observed = std::abs(path.pre_mean);
    int exceed = 0;
    for (int b = 0; b < n_flips; ++b) {
        double sum = 0.0;
        for (int k = 0; k < n; ++k) sum += flip(rng) ? d[k] : -d[k];
        if (std::abs(sum / n) >= observed) ++exceed;
    }
    rep.p_value = (1.0 + exceed) / (1.0 + n_flips);
    return rep;
}

}  // namespace panelgap
