#include "panelgap/pipeline.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace panelgap {

namespace {

struct LoadedRun {
    PanelMatrix panel;
    TreatmentAssignment treat;
};

double require_number(const json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_number())
        throw std::invalid_argument(std::string("config: missing numeric '") + key + "'");
    return j[key].get<double>();
}

std::string require_string(const json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_string())
        throw std::invalid_argument(std::string("config: missing string '") + key + "'");
    return j[key].get<std::string>();
}

// Fills defaults in place so the echoed config is fully resolved.
void resolve_defaults(json& cfg) {
    if (!cfg.contains("seed")) cfg["seed"] = 0;
    if (!cfg.contains("jobs")) cfg["jobs"] = 1;
    if (!cfg.contains("outcome")) cfg["outcome"] = "outcome";
    if (cfg["jobs"].get<int>() < 1)
        throw std::invalid_argument("config: jobs must be >= 1");
}

LoadedRun load_run(json& cfg) {
    LoadedRun run;
    PanelMatrix raw = load_panel_file(require_string(cfg, "input"));
    run.treat.treated_unit = require_string(cfg, "treated");
    run.treat.t0 = parse_period(require_string(cfg, "t0"));
    if (raw.unit_index(run.treat.treated_unit) < 0)
        throw std::invalid_argument("config: treated unit '" + run.treat.treated_unit +
                                    "' not in the panel");

    std::vector<std::string> donors;
    if (cfg.contains("donors")) {
        donors = cfg["donors"].get<std::vector<std::string>>();
        for (const auto& d : donors)
            if (d == run.treat.treated_unit)
                throw std::invalid_argument("config: treated unit listed among donors");
    } else {
        for (const auto& u : raw.units)
            if (u != run.treat.treated_unit) donors.push_back(u);
        cfg["donors"] = donors;
    }
    std::vector<std::string> keep{run.treat.treated_unit};
    keep.insert(keep.end(), donors.begin(), donors.end());
    run.panel = raw.subset(keep);
    return run;
}

CvPlan resolve_cv_plan(json& cfg, const PanelMatrix& panel,
                       const TreatmentAssignment& treat) {
    CvPlan plan = default_cv_plan(panel, treat);
    if (cfg.contains("cv")) {
        const json& c = cfg["cv"];
        if (c.contains("lambda_grid")) plan.lambda_grid = c["lambda_grid"].get<std::vector<double>>();
        if (c.contains("horizon")) plan.horizon = c["horizon"].get<int>();
        if (c.contains("n_folds")) plan.n_folds = c["n_folds"].get<int>();
        if (c.contains("min_train")) plan.min_train = c["min_train"].get<int>();
        if (c.contains("one_se")) plan.use_one_se = c["one_se"].get<bool>();
    }
    cfg["cv"] = {{"lambda_grid", plan.lambda_grid},
                 {"horizon", plan.horizon},
                 {"n_folds", plan.n_folds},
                 {"min_train", plan.min_train},
                 {"one_se", plan.use_one_se}};
    return plan;
}

// lambda is either a number or "cv"; CV runs land in bundle as cv.json.
double resolve_lambda(json& cfg, const LoadedRun& run, RunBundle& bundle) {
    if (!cfg.contains("lambda")) cfg["lambda"] = "cv";
    if (cfg["lambda"].is_number()) {
        double lam = cfg["lambda"].get<double>();
        if (lam < 0.0) throw std::invalid_argument("config: lambda must be >= 0");
        return lam;
    }
    if (!cfg["lambda"].is_string() || cfg["lambda"].get<std::string>() != "cv")
        throw std::invalid_argument("config: lambda must be a number or \"cv\"");
    CvPlan plan = resolve_cv_plan(cfg, run.panel, run.treat);
    CvReport report = select_lambda(run.panel, run.treat, plan, {});
    bundle.files["cv.json"] = cv_report(report);
    return plan.use_one_se ? report.one_se_lambda : report.selected_lambda;
}

HorizonWindows resolve_windows(json& cfg, int post_len) {
    HorizonWindows w = default_windows(post_len);
    if (cfg.contains("windows")) {
        // "i:a:p" window lengths, summing to the post-period count
        std::string text = cfg["windows"].get<std::string>();
        int i = 0, a = 0, p = 0;
        char c1 = 0, c2 = 0;
        std::istringstream in(text);
        if (!(in >> i >> c1 >> a >> c2 >> p) || c1 != ':' || c2 != ':' || !in.eof() ||
            i < 1 || a < 1 || p < 1)
            throw std::invalid_argument("config: windows must look like '3:9:11'");
        if (i + a + p != post_len)
            throw std::invalid_argument("config: window lengths sum to " +
                                        std::to_string(i + a + p) + ", post period has " +
                                        std::to_string(post_len));
        w.impact_end = i;
        w.adjust_end = i + a;
    }
    cfg["windows"] = std::to_string(w.impact_end) + ":" +
                     std::to_string(w.adjust_end - w.impact_end) + ":" +
                     std::to_string(post_len - w.adjust_end);
    return w;
}

void cmd_estimate(json& cfg, RunBundle& bundle) {
    LoadedRun run = load_run(cfg);
    if (auto warn = check_assignment(run.panel, run.treat)) bundle.warnings.push_back(*warn);

    double lambda = resolve_lambda(cfg, run, bundle);
    ObservedSets sets = build_observed_sets(run.panel, run.treat);
    McFit fitted = fit(run.panel, sets, {.lambda = lambda});
    if (!fitted.converged) {
        bundle.nonconverged = true;
        bundle.warnings.push_back("solver hit the iteration cap; results are flagged");
    }
    EffectPath path = effect_path(run.panel, sets, fitted);
    HorizonWindows windows = resolve_windows(cfg, static_cast<int>(path.tau.size()));
    PreFitReport diag = pre_fit_report(path, 2000, cfg["seed"].get<std::uint64_t>());

    bundle.files["fit.json"] = fit_report(run.panel, sets, fitted, lambda);
    bundle.files["effects.json"] = effects_report(path, windows, diag);
    bundle.files["effects.csv"] = effects_csv(path);
}

void cmd_cv(json& cfg, RunBundle& bundle) {
    LoadedRun run = load_run(cfg);
    CvPlan plan = resolve_cv_plan(cfg, run.panel, run.treat);
    bundle.files["cv.json"] = cv_report(select_lambda(run.panel, run.treat, plan, {}));
}

void cmd_placebo(json& cfg, RunBundle& bundle) {
    LoadedRun run = load_run(cfg);
    json& p = cfg["placebo"];
    std::string kind = p.contains("kind") ? p["kind"].get<std::string>() : "space";
    if (kind != "space" && kind != "time")
        throw std::invalid_argument("config: placebo.kind must be 'space' or 'time'");
    p["kind"] = kind;
    int n_boot = p.contains("n_boot") ? p["n_boot"].get<int>() : 1000;
    p["n_boot"] = n_boot;

    double lambda = resolve_lambda(cfg, run, bundle);
    McConfig mc{.lambda = lambda};

    PlaceboDistribution dist;
    if (kind == "space") {
        dist = in_space_placebos(run.panel, run.treat, mc);
    } else {
        int min_train = p.contains("min_train") ? p["min_train"].get<int>() : 60;
        int horizon = p.contains("horizon") ? p["horizon"].get<int>() : 12;
        p["min_train"] = min_train;
        p["horizon"] = horizon;
        std::vector<PeriodIndex> dates;
        if (p.contains("pseudo_dates"))
            for (const auto& d : p["pseudo_dates"])
                dates.push_back(parse_period(d.get<std::string>()));
        else
            dates = default_pseudo_dates(run.panel, run.treat, min_train, horizon);
        json labels = json::array();
        for (const auto& d : dates) labels.push_back(d.label());
        p["pseudo_dates"] = labels;
        dist = in_time_placebos(run.panel, run.treat, dates, mc, min_train, horizon);
    }
    for (const auto& w : dist.warnings) bundle.warnings.push_back(w);

    json report = placebo_report(dist);
    if (n_boot > 0 && dist.n_runs >= 2) {
        auto rs = resample_summary(dist, n_boot, cfg["seed"].get<std::uint64_t>());
        report["resample"] = {{"n_boot", rs.n_boot},
                              {"se_location", rs.se_location},
                              {"se_p_value", rs.se_p_value},
                              {"degenerate", rs.degenerate}};
    }
    bundle.files["placebo.json"] = std::move(report);
    bundle.files["placebo.csv"] = placebo_csv(dist);
}

void cmd_sdid(json& cfg, RunBundle& bundle) {
    LoadedRun run = load_run(cfg);
    json& s = cfg["sdid"];
    SdidConfig sc;
    if (s.contains("zeta") && s["zeta"].is_number()) {
        sc.zeta_mode = ZetaMode::fixed;
        sc.zeta = s["zeta"].get<double>();
        if (sc.zeta < 0.0) throw std::invalid_argument("config: sdid.zeta must be >= 0");
    } else {
        s["zeta"] = "auto";
    }
    int n_placebo = s.contains("n_placebo") ? s["n_placebo"].get<int>() : 0;
    s["n_placebo"] = n_placebo;

    SdidEstimate est = sdid_estimate(run.panel, run.treat, sc);
    json report = sdid_report(run.panel, run.treat, est);
    if (n_placebo > 0) {
        auto dist = sdid_placebo(run.panel, run.treat, n_placebo,
                                 cfg["seed"].get<std::uint64_t>(), sc);
        for (const auto& w : dist.warnings) bundle.warnings.push_back(w);
        report["placebo"] = placebo_report(dist);
    }
    bundle.files["sdid.json"] = std::move(report);
    bundle.files["weights.csv"] = sdid_weights_csv(run.panel, run.treat, est);
}

void cmd_simulate(json& cfg, RunBundle& bundle) {
    DgpSpec spec;
    json& s = cfg["simulate"];
    if (s.contains("n_units")) spec.n_units = s["n_units"].get<int>();
    if (s.contains("n_periods")) spec.n_periods = s["n_periods"].get<int>();
    if (s.contains("t0")) spec.t0 = s["t0"].get<int>();
    if (s.contains("rank")) spec.rank = s["rank"].get<int>();
    if (s.contains("factor_persistence"))
        spec.factor_persistence = s["factor_persistence"].get<double>();
    if (s.contains("loading_scale")) spec.loading_scale = s["loading_scale"].get<double>();
    if (s.contains("fe_scale")) spec.fe_scale = s["fe_scale"].get<double>();
    if (s.contains("noise_sigma")) spec.noise_sigma = s["noise_sigma"].get<double>();
    spec.seed = cfg["seed"].get<std::uint64_t>();
    if (s.contains("effect")) {
        const json& e = s["effect"];
        std::string kind = require_string(e, "kind");
        if (kind == "zero") {
            spec.effect.kind = EffectKind::zero;
        } else if (kind == "constant") {
            spec.effect.kind = EffectKind::constant;
            spec.effect.value = require_number(e, "value");
        } else if (kind == "hump") {
            spec.effect.kind = EffectKind::hump;
            spec.effect.peak = require_number(e, "peak");
            spec.effect.peak_time = static_cast<int>(require_number(e, "peak_time"));
            spec.effect.decay = require_number(e, "decay");
            if (e.contains("floor")) spec.effect.floor = e["floor"].get<double>();
        } else {
            throw std::invalid_argument("config: effect kind must be zero|constant|hump");
        }
    }
    DgpDraw draw = generate(spec);
    std::ostringstream csv;
    write_panel_csv(draw.panel, csv);
    bundle.files["panel.csv"] = csv.str();
    bundle.files["truth.json"] = truth_report(spec, draw);
}

}  // namespace

RunBundle run_command(const json& config) {
    if (!config.is_object()) throw std::invalid_argument("config must be a JSON object");
    json cfg = config;
    resolve_defaults(cfg);
    std::string command = require_string(cfg, "command");

    RunBundle bundle;
    if (command == "estimate")
        cmd_estimate(cfg, bundle);
    else if (command == "cv")
        cmd_cv(cfg, bundle);
    else if (command == "placebo")
        cmd_placebo(cfg, bundle);
    else if (command == "sdid")
        cmd_sdid(cfg, bundle);
    else if (command == "simulate")
        cmd_simulate(cfg, bundle);
    else
        throw std::invalid_argument("unknown command '" + command + "'");

    // every json report carries the resolved config it came from
    for (auto& [name, content] : bundle.files.items())
        if (content.is_object()) content["config"] = cfg;
    return bundle;
}

}  // namespace panelgap
