#include "panelgap/sdid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace panelgap {

Eigen::VectorXd project_simplex(const Eigen::VectorXd& v) {
    const int n = static_cast<int>(v.size());
    std::vector<double> u(v.data(), v.data() + n);
    std::sort(u.begin(), u.end(), std::greater<double>());
    double css = 0.0, theta = 0.0;
    int rho = 0;
    for (int k = 0; k < n; ++k) {
        css += u[k];
        double t = (css - 1.0) / (k + 1);
        if (u[k] - t > 0.0) {
            rho = k + 1;
            theta = t;
        }
    }
    (void)rho;
    Eigen::VectorXd out(n);
    for (int k = 0; k < n; ++k) out[k] = std::max(v[k] - theta, 0.0);
    return out;
}

namespace {

struct SdidData {
    Eigen::MatrixXd donors_pre;    // donors x pre columns used
    Eigen::VectorXd treated_pre;   // treated over the same columns
    Eigen::VectorXd donors_post;   // per-donor post mean
    double treated_post = 0.0;
    std::vector<int> pre_cols;     // panel column index per used pre column
    int t_post = 0;
    int treated = 0;
    std::vector<int> donor_rows;
};

SdidData extract(const PanelMatrix& panel, const TreatmentAssignment& treat) {
    SdidData d;
    d.treated = panel.unit_index(treat.treated_unit);
    if (d.treated < 0)
        throw std::invalid_argument("sdid: treated unit '" + treat.treated_unit + "' not found");
    const int t0 = period_distance(panel.start, treat.t0);
    if (t0 <= 1 || t0 >= panel.n_periods())
        throw std::invalid_argument("sdid: t0 must leave >= 2 pre and >= 1 post periods");
    for (int i = 0; i < panel.n_units(); ++i)
        if (i != d.treated) d.donor_rows.push_back(i);
    if (d.donor_rows.size() < 2) throw std::invalid_argument("sdid: need >= 2 donors");

    // weight solving uses pre columns observed for every unit
    for (int j = 0; j < t0; ++j) {
        bool full = true;
        for (int i = 0; i < panel.n_units(); ++i)
            if (!panel.mask(i, j)) full = false;
        if (full) d.pre_cols.push_back(j);
    }
    if (d.pre_cols.size() < 2)
        throw std::invalid_argument("sdid: need >= 2 fully observed pre-treatment periods");

    const int nd = static_cast<int>(d.donor_rows.size());
    const int tp = static_cast<int>(d.pre_cols.size());
    d.donors_pre.resize(nd, tp);
    d.treated_pre.resize(tp);
    for (int c = 0; c < tp; ++c) {
        d.treated_pre[c] = panel.values(d.treated, d.pre_cols[c]);
        for (int k = 0; k < nd; ++k)
            d.donors_pre(k, c) = panel.values(d.donor_rows[k], d.pre_cols[c]);
    }

    d.donors_post = Eigen::VectorXd::Zero(nd);
    int post_count = 0;
    {
        double sum = 0.0;
        int cnt = 0;
        for (int j = t0; j < panel.n_periods(); ++j)
            if (panel.mask(d.treated, j)) {
                sum += panel.values(d.treated, j);
                ++cnt;
            }
        if (cnt == 0) throw std::invalid_argument("sdid: treated unit has no post observations");
        d.treated_post = sum / cnt;
        post_count = cnt;
    }
    for (int k = 0; k < nd; ++k) {
        double sum = 0.0;
        int cnt = 0;
        for (int j = t0; j < panel.n_periods(); ++j)
            if (panel.mask(d.donor_rows[k], j)) {
                sum += panel.values(d.donor_rows[k], j);
                ++cnt;
            }
        if (cnt == 0)
            throw std::invalid_argument("sdid: donor '" + panel.units[d.donor_rows[k]] +
                                        "' has no post observations");
        d.donors_post[k] = sum / cnt;
    }
    d.t_post = post_count;
    return d;
}

// Projected gradient on 0.5-scaled || y - X w ||^2 + ridge*||w||^2 over the
// simplex, intercept absorbed by centering. Returns KKT convergence flag.
bool simplex_regress(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double ridge,
                     int max_iters, double kkt_tol, Eigen::VectorXd& w,
                     double& intercept) {
    const int n = static_cast<int>(x.rows());
    const int p = static_cast<int>(x.cols());
    Eigen::VectorXd xbar = x.colwise().mean();
    double ybar = y.mean();
    Eigen::MatrixXd xc = x.rowwise() - xbar.transpose();
    Eigen::VectorXd yc = y.array() - ybar;

    w = Eigen::VectorXd::Constant(p, 1.0 / p);
    if (p == 1) {
        w[0] = 1.0;
        intercept = ybar - xbar.dot(w);
        return true;
    }
    Eigen::MatrixXd gram = xc.transpose() * xc;
    double lip = 2.0 * (gram.operatorNorm() + ridge);
    if (lip <= 0.0) lip = 1.0;
    const double step = 1.0 / lip;

    bool converged = false;
    for (int it = 0; it < max_iters; ++it) {
        Eigen::VectorXd grad = 2.0 * (gram * w - xc.transpose() * yc) + 2.0 * ridge * w;
        Eigen::VectorXd next = project_simplex(w - step * grad);
        double move = (next - w).lpNorm<Eigen::Infinity>();
        w = next;
        if (move <= kkt_tol) {
            converged = true;
            break;
        }
    }
    intercept = ybar - xbar.dot(w);
    (void)n;
    return converged;
}

double auto_zeta(const SdidData& d) {
    // sd of first-differenced donor pre outcomes, pooled across donors
    std::vector<double> diffs;
    for (int k = 0; k < d.donors_pre.rows(); ++k)
        for (int c = 1; c < d.donors_pre.cols(); ++c)
            diffs.push_back(d.donors_pre(k, c) - d.donors_pre(k, c - 1));
    double m = std::accumulate(diffs.begin(), diffs.end(), 0.0) / diffs.size();
    double v = 0.0;
    for (double x : diffs) v += (x - m) * (x - m);
    double sd = std::sqrt(v / (diffs.size() - 1));
    return std::pow(static_cast<double>(d.donors_pre.rows()) * d.t_post, 0.25) * sd;
}

}  // namespace

SdidWeights solve_unit_weights(const PanelMatrix& panel, const TreatmentAssignment& treat,
                               double zeta, int max_iters, double kkt_tol) {
    if (zeta < 0.0) throw std::invalid_argument("solve_unit_weights: negative zeta");
    SdidData d = extract(panel, treat);
    SdidWeights w;
    w.zeta = zeta;
    const double ridge = zeta * zeta * static_cast<double>(d.pre_cols.size());
    // rows = pre periods, columns = donors
    w.unit_converged = simplex_regress(d.donors_pre.transpose(), d.treated_pre, ridge,
                                       max_iters, kkt_tol, w.omega, w.omega_intercept);
    return w;
}

void solve_time_weights(const PanelMatrix& panel, const TreatmentAssignment& treat,
                        SdidWeights& weights, int max_iters, double kkt_tol) {
    SdidData d = extract(panel, treat);
    // rows = donors, columns = pre periods; target = donor post means
    weights.time_converged = simplex_regress(d.donors_pre, d.donors_post, 0.0, max_iters,
                                             kkt_tol, weights.time_weights,
                                             weights.time_intercept);
}

SdidEstimate sdid_estimate(const PanelMatrix& panel, const TreatmentAssignment& treat,
                           const SdidConfig& config) {
    SdidData d = extract(panel, treat);
    double zeta = config.zeta_mode == ZetaMode::fixed ? config.zeta : auto_zeta(d);

    SdidEstimate est;
    est.weights = solve_unit_weights(panel, treat, zeta, config.max_iters, config.kkt_tol);
    solve_time_weights(panel, treat, est.weights, config.max_iters, config.kkt_tol);

    const Eigen::VectorXd& tw = est.weights.time_weights;
    est.treated_delta = d.treated_post - d.treated_pre.dot(tw);
    est.per_donor_delta = d.donors_post - d.donors_pre * tw;
    est.tau = est.treated_delta - est.weights.omega.dot(est.per_donor_delta);
    return est;
}

PlaceboDistribution sdid_placebo(const PanelMatrix& panel, const TreatmentAssignment& treat,
                                 int n, std::uint64_t seed, const SdidConfig& config) {
    if (n < 1) throw std::invalid_argument("sdid_placebo: n must be >= 1");
    if (panel.n_units() < 4)
        throw std::invalid_argument("sdid_placebo: need >= 3 donors");

    PlaceboDistribution dist;
    dist.kind = PlaceboKind::in_space;
    dist.observed_ate = sdid_estimate(panel, treat, config).tau;

    std::vector<std::string> donors;
    for (const auto& u : panel.units)
        if (u != treat.treated_unit) donors.push_back(u);
    PanelMatrix donor_panel = panel.subset(donors);

    for (int run_idx = 0; run_idx < n; ++run_idx) {
        // per-run seed: independent of execution order
        std::mt19937_64 rng(seed + 0x9e3779b97f4a7c15ULL * (run_idx + 1));
        std::uniform_int_distribution<int> pick(0, static_cast<int>(donors.size()) - 1);
        const std::string& d = donors[pick(rng)];
        PlaceboRun run;
        run.label = d;
        try {
            run.ate = sdid_estimate(donor_panel, {d, treat.t0}, config).tau;
            dist.runs.push_back(run);
        } catch (const std::exception& e) {
            ++dist.n_failed;
            dist.warnings.push_back("sdid placebo on '" + d + "' failed: " + e.what());
        }
    }
    summarize_placebos(dist);
    return dist;
}

}  // namespace panelgap
