#include "panelgap/inference.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "panelgap/effects.hpp"

namespace panelgap {

double empirical_quantile(std::vector<double> values, double q) {
    if (values.empty()) throw std::invalid_argument("empirical_quantile: empty sample");
    std::sort(values.begin(), values.end());
    const double pos = q * (values.size() - 1);
    const size_t lo = static_cast<size_t>(std::floor(pos));
    const size_t hi = static_cast<size_t>(std::ceil(pos));
    const double frac = pos - lo;
    return values[lo] * (1.0 - frac) + values[hi] * frac;
}

void summarize_placebos(PlaceboDistribution& dist) {
    dist.n_runs = static_cast<int>(dist.runs.size());
    if (dist.n_runs == 0) {
        dist.p_value = 1.0;
        dist.ci_low = dist.ci_high = 0.0;
        return;
    }
    int exceed = 0;
    std::vector<double> effects;
    effects.reserve(dist.runs.size());
    for (const auto& r : dist.runs) {
        effects.push_back(r.ate);
        if (std::abs(r.ate) >= std::abs(dist.observed_ate)) ++exceed;
    }
    dist.p_value = (1.0 + exceed) / (1.0 + dist.n_runs);
    dist.ci_low = empirical_quantile(effects, 0.025);
    dist.ci_high = empirical_quantile(effects, 0.975);
}

namespace {

double pipeline_ate(const PanelMatrix& panel, const TreatmentAssignment& treat,
                    const McConfig& config) {
    ObservedSets sets = build_observed_sets(panel, treat);
    McFit fitted = fit(panel, sets, config);
    return effect_path(panel, sets, fitted).ate;
}

}  // namespace

PlaceboDistribution in_space_placebos(const PanelMatrix& panel,
                                      const TreatmentAssignment& treat,
                                      const McConfig& config) {
    const int treated = panel.unit_index(treat.treated_unit);
    if (treated < 0)
        throw std::invalid_argument("in_space_placebos: treated unit not found");
    if (panel.n_units() < 3)
        throw std::invalid_argument("in_space_placebos: need at least 2 donors");

    PlaceboDistribution dist;
    dist.kind = PlaceboKind::in_space;
    dist.observed_ate = pipeline_ate(panel, treat, config);

    std::vector<std::string> donors;
    for (const auto& u : panel.units)
        if (u != treat.treated_unit) donors.push_back(u);
    PanelMatrix donor_panel = panel.subset(donors);

    for (const auto& d : donors) {
        PlaceboRun run;
        run.label = d;
        try {
            run.ate = pipeline_ate(donor_panel, {d, treat.t0}, config);
            dist.runs.push_back(run);
        } catch (const std::exception& e) {
            ++dist.n_failed;
            dist.warnings.push_back("placebo on '" + d + "' failed: " + e.what());
        }
    }
    summarize_placebos(dist);
    return dist;
}

std::vector<PeriodIndex> default_pseudo_dates(const PanelMatrix& panel,
                                              const TreatmentAssignment& treat,
                                              int min_train, int horizon) {
    const int t0 = period_distance(panel.start, treat.t0);
    std::vector<PeriodIndex> dates;
    for (int j = min_train; j <= t0 - horizon; j += 6) dates.push_back(panel.period(j));
    return dates;
}

PlaceboDistribution in_time_placebos(const PanelMatrix& panel,
                                     const TreatmentAssignment& treat,
                                     const std::vector<PeriodIndex>& pseudo_dates,
                                     const McConfig& config, int min_train, int horizon) {
    const int t0 = period_distance(panel.start, treat.t0);
    if (panel.unit_index(treat.treated_unit) < 0)
        throw std::invalid_argument("in_time_placebos: treated unit not found");

    PlaceboDistribution dist;
    dist.kind = PlaceboKind::in_time;
    dist.observed_ate = pipeline_ate(panel, treat, config);

    for (const auto& date : pseudo_dates) {
        const int j = period_distance(panel.start, date);
        if (j < min_train || j > t0 - horizon)
            throw std::invalid_argument(
                "in_time_placebos: pseudo-date " + date.label() + " infeasible; need period index in [" +
                std::to_string(min_train) + ", " + std::to_string(t0 - horizon) + "]");
        // truncate at the pseudo window's end (never past t0 - 1) so every
        // pseudo run has the same pre/post geometry as the real one
        const int last = std::min(t0 - 1, j + horizon - 1);
        PanelMatrix pre = panel;
        pre.values = panel.values.leftCols(last + 1);
        pre.mask = panel.mask.leftCols(last + 1);
        PlaceboRun run;
        run.label = date.label();
        try {
            run.ate = pipeline_ate(pre, {treat.treated_unit, date}, config);
            dist.runs.push_back(run);
        } catch (const std::exception& e) {
            ++dist.n_failed;
            dist.warnings.push_back("pseudo-date " + date.label() + " failed: " + e.what());
        }
    }
    summarize_placebos(dist);
    return dist;
}

ResampleSummary resample_summary(const PlaceboDistribution& dist, int n_boot,
                                 std::uint64_t seed) {
    const int n = dist.n_runs;
    if (n < 2) throw std::invalid_argument("resample_summary: need >= 2 placebo runs");
    ResampleSummary out;
    out.n_boot = n_boot;

    std::vector<double> effects;
    for (const auto& r : dist.runs) effects.push_back(r.ate);
    out.degenerate =
        std::all_of(effects.begin(), effects.end(), [&](double e) { return e == effects[0]; });
    if (out.degenerate) return out;  // SE 0, flagged

    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> pick(0, n - 1);
    const double obs = std::abs(dist.observed_ate);
    std::vector<double> means(n_boot), pvals(n_boot);
    for (int b = 0; b < n_boot; ++b) {
        double sum = 0.0;
        int exceed = 0;
        for (int k = 0; k < n; ++k) {
            double e = effects[pick(rng)];
            sum += e;
            if (std::abs(e) >= obs) ++exceed;
        }
        means[b] = sum / n;
        pvals[b] = (1.0 + exceed) / (1.0 + n);
    }
    auto sd = [](const std::vector<double>& x) {
        double m = 0.0;
        for (double v : x) m += v;
        m /= x.size();
        double s = 0.0;
        for (double v : x) s += (v - m) * (v - m);
        return std::sqrt(s / (x.size() - 1));
    };
    out.se_location = sd(means);
    out.se_p_value = sd(pvals);
    return out;
}

}  // namespace panelgap
