#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "panelgap/cv.hpp"
#include "panelgap/dgp.hpp"
#include "panelgap/effects.hpp"
#include "panelgap/linalg.hpp"
#include "panelgap/mc_solver.hpp"

using namespace panelgap;

namespace {

DgpDraw small_draw(std::uint64_t seed, int n = 8, int t = 60, int t0 = 48,
                   double sigma = 0.1, int rank = 2) {
    DgpSpec spec;
    spec.n_units = n;
    spec.n_periods = t;
    spec.t0 = t0;
    spec.rank = rank;
    spec.noise_sigma = sigma;
    spec.seed = seed;
    return generate(spec);
}

void check_monotone(const std::vector<double>& trace) {
    for (size_t k = 1; k < trace.size(); ++k)
        CHECK(trace[k] <= trace[k - 1] + 1e-12);
}

}  // namespace

TEST_CASE("fit: pure two-way structure gives zero residuals and L = 0") {
    const int n = 5, t = 20;
    PanelMatrix p;
    p.units = {"t", "a", "b", "c", "d"};
    p.start = parse_period("2020-01");
    p.values.resize(n, t);
    p.mask = BoolGrid::Constant(n, t, true);
    std::mt19937_64 rng(2);
    std::normal_distribution<double> gauss;
    Eigen::VectorXd a(n), g(t);
    for (int i = 0; i < n; ++i) a[i] = gauss(rng);
    for (int j = 0; j < t; ++j) g[j] = gauss(rng);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < t; ++j) p.values(i, j) = a[i] + g[j];

    auto sets = build_observed_sets(p, {"t", p.period(15)});
    auto f = fit(p, sets, {.lambda = 1.0});
    CHECK(f.l.norm() < 1e-10);
    CHECK(f.objective_trace.back() < 1e-18);
    // imputed = FE extrapolation
    for (size_t m = 0; m < sets.missing.size(); ++m) {
        auto [i, j] = sets.missing[m];
        CHECK(f.imputed[m] == doctest::Approx(a[i] + g[j]).epsilon(1e-9));
    }
}

TEST_CASE("fit: huge lambda collapses to the closed-form FE fit") {
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL, 4ULL, 5ULL}) {
        auto draw = small_draw(seed);
        auto sets = build_observed_sets(draw.panel, draw.treat);

        Eigen::MatrixXd fe_oracle = oracles::fe_fit(draw.panel.values, sets.omega);
        Eigen::MatrixXd resid = draw.panel.values - fe_oracle;
        double smax = 0.0;
        {
            Eigen::MatrixXd r = resid;
            for (auto [i, j] : sets.missing) r(i, j) = 0.0;
            smax = svd(r).s[0];
        }
        auto f = fit(draw.panel, sets, {.lambda = 2.5 * smax});
        CHECK(f.l.norm() < 1e-10);
        CHECK(f.effective_rank == 0);
        for (size_t m = 0; m < sets.missing.size(); ++m) {
            auto [i, j] = sets.missing[m];
            CHECK(f.imputed[m] == doctest::Approx(fe_oracle(i, j)).epsilon(1e-6));
        }
    }
}

TEST_CASE("fit: monotone descent across a lambda sweep") {
    for (std::uint64_t seed : {10ULL, 11ULL, 12ULL}) {
        auto draw = small_draw(seed);
        auto sets = build_observed_sets(draw.panel, draw.treat);
        for (double lam : {1e-5, 1e-3, 1e-2, 1e-1}) {
            auto f = fit(draw.panel, sets, {.lambda = lam});
            check_monotone(f.objective_trace);
            CHECK(f.converged);
        }
    }
}

TEST_CASE("fit: fixed-point stationarity at convergence") {
    auto draw = small_draw(21);
    auto sets = build_observed_sets(draw.panel, draw.treat);
    McConfig cfg{.lambda = 1e-2, .rel_tol = 1e-10};
    auto f = fit(draw.panel, sets, cfg);
    REQUIRE(f.converged);
    double before = f.objective_trace.back();
    // one more full block update from the converged state
    McConfig one_more = cfg;
    one_more.max_iters = f.iters + 1;
    auto f2 = fit(draw.panel, sets, one_more);
    double after = f2.objective_trace.back();
    CHECK(std::abs(before - after) < 10.0 * cfg.rel_tol * std::abs(before) + 1e-15);
}

TEST_CASE("objective matches the naive double-loop oracle") {
    auto draw = small_draw(31, 6, 30, 24);
    auto sets = build_observed_sets(draw.panel, draw.treat);
    std::mt19937_64 rng(5);
    std::normal_distribution<double> gauss;
    Eigen::VectorXd alpha(6), gamma(30);
    Eigen::MatrixXd l(6, 30);
    for (int i = 0; i < 6; ++i) alpha[i] = gauss(rng);
    for (int j = 0; j < 30; ++j) gamma[j] = gauss(rng);
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 30; ++j) l(i, j) = gauss(rng);
    double mu = gauss(rng);
    double mine = objective(draw.panel, sets, mu, alpha, gamma, l, 0.37);
    double ref = oracles::mc_objective(draw.panel.values, sets.omega, mu, alpha, gamma,
                                       l, 0.37);
    CHECK(mine == doctest::Approx(ref).epsilon(1e-10));

    CHECK(objective(draw.panel, sets, 0.0, Eigen::VectorXd::Zero(6),
                    Eigen::VectorXd::Zero(30), Eigen::MatrixXd::Zero(6, 30), 1.0) ==
          doctest::Approx([&] {
              double s = 0.0;
              for (auto [i, j] : sets.omega) s += draw.panel.values(i, j) * draw.panel.values(i, j);
              return s;
          }()));

    CHECK_THROWS_AS(objective(draw.panel, sets, 0.0, Eigen::VectorXd::Zero(5),
                              Eigen::VectorXd::Zero(30), l, 1.0),
                    std::invalid_argument);
}

TEST_CASE("fit: shift invariance of the effect path") {
    auto draw = small_draw(41);
    auto sets = build_observed_sets(draw.panel, draw.treat);
    McConfig cfg{.lambda = 1e-3};
    auto f1 = fit(draw.panel, sets, cfg);

    PanelMatrix shifted = draw.panel;
    shifted.values.array() += 17.5;
    auto f2 = fit(shifted, sets, cfg);
    for (size_t m = 0; m < sets.missing.size(); ++m) {
        auto [i, j] = sets.missing[m];
        double tau1 = draw.panel.values(i, j) - f1.imputed[m];
        double tau2 = shifted.values(i, j) - f2.imputed[m];
        CHECK(tau1 == doctest::Approx(tau2).epsilon(1e-8));
    }
}

TEST_CASE("fit: unit-permutation equivariance") {
    auto draw = small_draw(51, 6, 40, 32);
    auto sets = build_observed_sets(draw.panel, draw.treat);
    McConfig cfg{.lambda = 1e-3};
    auto f1 = fit(draw.panel, sets, cfg);

    // permute donor rows (treated stays first)
    std::vector<std::string> perm = draw.panel.units;
    std::swap(perm[1], perm[4]);
    std::swap(perm[2], perm[5]);
    PanelMatrix permuted = draw.panel.subset(perm);
    auto sets2 = build_observed_sets(permuted, draw.treat);
    auto f2 = fit(permuted, sets2, cfg);

    for (size_t m = 0; m < sets.missing.size(); ++m)
        CHECK(f1.imputed[m] == doctest::Approx(f2.imputed[m]).epsilon(1e-10));
    for (int k = 0; k < 6; ++k) {
        int from = draw.panel.unit_index(perm[k]);
        CHECK(f2.alpha[k] == doctest::Approx(f1.alpha[from]).epsilon(1e-8));
        CHECK((f2.l.row(k) - f1.l.row(from)).norm() < 1e-8);
    }
}

TEST_CASE("fit: effective rank non-increasing in lambda") {
    auto draw = small_draw(61);
    auto sets = build_observed_sets(draw.panel, draw.treat);
    int prev = std::numeric_limits<int>::max();
    for (double lam : {1e-4, 1e-3, 1e-2, 1e-1, 1.0, 10.0}) {
        auto f = fit(draw.panel, sets, {.lambda = lam});
        CHECK(f.effective_rank <= prev);
        prev = f.effective_rank;
    }
}

TEST_CASE("fit: lambda=0 with one missing cell matches FE least-squares interpolation") {
    // At lambda = 0 from the L = 0 start, the first prox step absorbs the
    // observed residuals exactly and leaves 0 on the hidden cell, so the
    // imputation is the rank-unrestricted FE interpolation. Oracle: dummy-coded
    // normal equations on the observed cells.
    std::mt19937_64 rng(71);
    std::normal_distribution<double> gauss;
    for (int rep = 0; rep < 5; ++rep) {
        const int n = 4, t = 6;
        PanelMatrix p;
        p.units = {"t", "a", "b", "c"};
        p.start = parse_period("2020-01");
        p.values.resize(n, t);
        p.mask = BoolGrid::Constant(n, t, true);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < t; ++j) p.values(i, j) = gauss(rng);

        auto sets = build_observed_sets(p, {"t", p.period(t - 1)});
        REQUIRE(sets.missing.size() == 1);
        auto f = fit(p, sets, {.lambda = 0.0, .max_iters = 20000, .rel_tol = 1e-14});
        CHECK(f.objective_trace.back() < 1e-12);

        Eigen::MatrixXd fe = oracles::fe_fit(p.values, sets.omega);
        auto [mi, mj] = sets.missing[0];
        CHECK(f.imputed[0] == doctest::Approx(fe(mi, mj)).epsilon(1e-6));
    }
}

TEST_CASE("fit: error paths") {
    auto draw = small_draw(81, 4, 30, 24);
    auto sets = build_observed_sets(draw.panel, draw.treat);
    McConfig bad;
    bad.lambda = -1.0;
    CHECK_THROWS_AS(fit(draw.panel, sets, bad), std::invalid_argument);

    // a unit with zero observed cells
    PanelMatrix p = draw.panel;
    p.mask.row(2).setConstant(false);
    auto sets2 = build_observed_sets(p, draw.treat);
    CHECK_THROWS_WITH_AS(fit(p, sets2, {.lambda = 1e-3}), doctest::Contains("no observed"),
                         std::invalid_argument);
}

TEST_CASE("fit: dgp recovery of an injected constant effect at CV lambda") {
    DgpSpec spec;
    spec.n_units = 12;
    spec.n_periods = 60;
    spec.t0 = 48;
    spec.rank = 2;
    spec.noise_sigma = 0.1;
    spec.seed = 7;
    spec.effect = {.kind = EffectKind::constant, .value = 0.7};
    auto draw = generate(spec);
    auto sets = build_observed_sets(draw.panel, draw.treat);

    CvPlan plan = default_cv_plan(draw.panel, draw.treat);
    plan.min_train = 24;
    plan.horizon = 6;
    auto report = select_lambda(draw.panel, draw.treat, plan, {});
    auto f = fit(draw.panel, sets, {.lambda = report.selected_lambda});

    // imputed block close to true Y(0)
    double sse = 0.0;
    for (size_t m = 0; m < sets.missing.size(); ++m) {
        double err = f.imputed[m] - draw.truth.y0_missing[m];
        sse += err * err;
    }
    double rmse = std::sqrt(sse / sets.missing.size());
    CHECK(rmse <= 3.0 * spec.noise_sigma);

    // per-period gap near 0.7 on average
    auto path = effect_path(draw.panel, sets, f);
    CHECK(std::abs(path.ate - 0.7) <= 0.15);
}

TEST_CASE("impute_counterfactual matches the embedded imputed block") {
    auto draw = small_draw(91);
    auto sets = build_observed_sets(draw.panel, draw.treat);
    auto f = fit(draw.panel, sets, {.lambda = 1e-3});
    auto imp = impute_counterfactual(f, sets);
    REQUIRE(imp.size() == f.imputed.size());
    for (size_t m = 0; m < imp.size(); ++m) CHECK(imp[m] == f.imputed[m]);
}
