#include "panelgap/dgp.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace panelgap {

std::vector<double> hump_profile(double peak, int peak_time, double decay, int length,
                                 double floor) {
    if (peak_time < 1) throw std::invalid_argument("hump_profile: peak_time must be >= 1");
    if (decay < 0.0 || decay > 1.0)
        throw std::invalid_argument("hump_profile: decay must lie in [0, 1]");
    double rest = std::max(floor, 0.4) * peak;
    std::vector<double> out(length);
    for (int h = 1; h <= length; ++h) {
        if (h <= peak_time)
            out[h - 1] = peak * static_cast<double>(h) / peak_time;
        else
            out[h - 1] = rest + (peak - rest) * std::pow(1.0 - decay, h - peak_time);
    }
    return out;
}

namespace {

std::vector<double> effect_series(const EffectProfile& p, int post_len) {
    switch (p.kind) {
        case EffectKind::zero:
            return std::vector<double>(post_len, 0.0);
        case EffectKind::constant:
            return std::vector<double>(post_len, p.value);
        case EffectKind::hump:
            return hump_profile(p.peak, p.peak_time, p.decay, post_len, p.floor);
    }
    throw std::invalid_argument("effect_series: bad kind");
}

}  // namespace

DgpDraw generate(const DgpSpec& spec) {
    if (spec.n_units < 2 || spec.n_periods < 3)
        throw std::invalid_argument("generate: need >= 2 units and >= 3 periods");
    if (spec.rank < 0 || spec.rank > std::min(spec.n_units, spec.n_periods))
        throw std::invalid_argument("generate: rank out of range");
    if (spec.t0 <= 0 || spec.t0 >= spec.n_periods)
        throw std::invalid_argument("generate: t0 must be interior");
    if (spec.noise_sigma < 0.0) throw std::invalid_argument("generate: negative sigma");
    if (spec.factor_persistence < 0.0 || spec.factor_persistence >= 1.0)
        throw std::invalid_argument("generate: factor_persistence must lie in [0, 1)");

    const int n = spec.n_units, t = spec.n_periods, r = spec.rank;
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    GroundTruth truth;
    truth.alpha = Eigen::VectorXd::Zero(n);
    truth.gamma = Eigen::VectorXd::Zero(t);
    for (int i = 0; i < n; ++i) truth.alpha[i] = spec.fe_scale * gauss(rng);
    for (int j = 0; j < t; ++j) truth.gamma[j] = spec.fe_scale * gauss(rng);

    Eigen::MatrixXd loadings(n, r), factors(r, t);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < r; ++k) loadings(i, k) = spec.loading_scale * gauss(rng);
    const double rho = spec.factor_persistence;
    const double innov = std::sqrt(1.0 - rho * rho);  // unit stationary variance
    for (int k = 0; k < r; ++k) {
        double f = gauss(rng);
        factors(k, 0) = f;
        for (int j = 1; j < t; ++j) {
            f = rho * f + innov * gauss(rng);
            factors(k, j) = f;
        }
    }
    truth.l = r > 0 ? Eigen::MatrixXd(loadings * factors) : Eigen::MatrixXd::Zero(n, t);

    DgpDraw draw;
    draw.panel.start = spec.origin;
    draw.panel.units.reserve(n);
    draw.panel.units.push_back("treated");
    for (int i = 1; i < n; ++i) draw.panel.units.push_back("donor" + std::to_string(i));
    draw.panel.values.resize(n, t);
    draw.panel.mask = BoolGrid::Constant(n, t, true);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < t; ++j)
            draw.panel.values(i, j) =
                truth.alpha[i] + truth.gamma[j] + truth.l(i, j) + spec.noise_sigma * gauss(rng);

    const int post_len = t - spec.t0;
    truth.effect_path = effect_series(spec.effect, post_len);
    truth.y0_missing.resize(post_len);
    for (int h = 0; h < post_len; ++h) {
        truth.y0_missing[h] = draw.panel.values(0, spec.t0 + h);
        draw.panel.values(0, spec.t0 + h) += truth.effect_path[h];
    }

    draw.treat.treated_unit = draw.panel.units[0];
    draw.treat.t0 = spec.origin.plus(spec.t0);
    draw.truth = std::move(truth);
    draw.panel.validate();
    return draw;
}

}  // namespace panelgap
