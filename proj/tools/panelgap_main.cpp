// Command-line front end; all computation goes through the C API.
#include <CLI11.hpp>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <string>
#include <vector>

#include "panelgap/panelgap.h"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

struct CommonOpts {
    std::string input;
    std::string outcome = "outcome";
    std::string treated;
    std::string t0;
    std::vector<std::string> donors;
    std::string lambda = "cv";
    std::string windows;
    std::string out_dir = ".";
    long long seed = -1;  // -1 = unset, fall back to PANELGAP_SEED then 0
    int jobs = 1;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool needs_input) {
    if (needs_input) {
        cmd->add_option("--input", o.input, "long-format CSV (unit,period,value)")
            ->required();
        cmd->add_option("--treated", o.treated, "treated unit id")->required();
        cmd->add_option("--t0", o.t0, "first treated period, YYYY-MM or YYYY")
            ->required();
        cmd->add_option("--donors", o.donors, "donor pool (default: all other units)")
            ->delimiter(',');
        cmd->add_option("--outcome", o.outcome, "outcome label echoed into reports");
    }
    cmd->add_option("--seed", o.seed, "RNG seed (default: $PANELGAP_SEED, else 0)");
    cmd->add_option("--jobs", o.jobs, "parallelism cap (results independent of it)");
    cmd->add_option("--out-dir", o.out_dir, "report directory")->capture_default_str();
}

ordered_json base_config(const CommonOpts& o, const std::string& command,
                         bool needs_input) {
    ordered_json cfg;
    cfg["command"] = command;
    if (needs_input) {
        cfg["input"] = o.input;
        cfg["outcome"] = o.outcome;
        cfg["treated"] = o.treated;
        cfg["t0"] = o.t0;
        if (!o.donors.empty()) cfg["donors"] = o.donors;
    }
    long long seed = o.seed;
    if (seed < 0) {
        const char* env = std::getenv("PANELGAP_SEED");
        seed = env ? std::atoll(env) : 0;
    }
    cfg["seed"] = static_cast<std::uint64_t>(seed);
    cfg["jobs"] = o.jobs;
    return cfg;
}

void set_lambda(ordered_json& cfg, const std::string& lambda) {
    if (lambda == "cv") {
        cfg["lambda"] = "cv";
    } else {
        try {
            size_t used = 0;
            double v = std::stod(lambda, &used);
            if (used != lambda.size()) throw std::invalid_argument(lambda);
            cfg["lambda"] = v;
        } catch (const std::exception&) {
            std::cerr << "error: --lambda expects a number or 'cv', got '" << lambda
                      << "'\n";
            std::exit(2);
        }
    }
}

int write_bundle(const ordered_json& cfg, const std::string& out_dir) {
    char* result = nullptr;
    pg_status status = pg_run(cfg.dump().c_str(), &result);
    if (status != PG_OK && status != PG_ERR_NONCONVERGED) {
        std::cerr << "error: " << pg_last_error() << "\n";
        return 2;
    }
    ordered_json bundle = ordered_json::parse(result);
    pg_free_string(result);

    fs::create_directories(out_dir);
    for (const auto& [name, content] : bundle["files"].items()) {
        std::ofstream out(fs::path(out_dir) / name, std::ios::binary);
        if (!out) {
            std::cerr << "error: cannot write " << name << " in " << out_dir << "\n";
            return 2;
        }
        if (content.is_string())
            out << content.get<std::string>();
        else
            out << content.dump(2) << "\n";
    }
    for (const auto& w : bundle["warnings"]) {
        std::cerr << "warning: " << w.get<std::string>() << "\n";
    }
    {
        // timestamps live here so the reports themselves stay byte-stable
        std::ofstream meta(fs::path(out_dir) / "run_info.txt", std::ios::binary);
        std::time_t now = std::time(nullptr);
        char buf[64];
        std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
        meta << "finished_at: " << buf << "\n"
             << "panelgap_version: " << pg_version() << "\n";
    }
    if (status == PG_ERR_NONCONVERGED) {
        std::cerr << "warning: solver did not converge; reports are flagged\n";
        return 3;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Counterfactual panel inference via matrix completion"};
    app.require_subcommand(1);

    CommonOpts est_o, cv_o, plc_o, sdid_o, sim_o;

    auto* est = app.add_subcommand("estimate", "fit the counterfactual and effect path");
    add_common(est, est_o, true);
    est->add_option("--lambda", est_o.lambda, "shrinkage value, or 'cv'")
        ->capture_default_str();
    est->add_option("--windows", est_o.windows,
                    "impact:adjustment:persistence window lengths, e.g. 3:9:11");

    auto* cvc = app.add_subcommand("cv", "cross-validate the shrinkage parameter");
    add_common(cvc, cv_o, true);
    std::vector<double> grid;
    int folds = 0, cv_horizon = 0, cv_min_train = 0;
    bool one_se = false;
    cvc->add_option("--grid", grid, "ascending lambda grid")->delimiter(',');
    cvc->add_option("--folds", folds, "number of rolling folds");
    cvc->add_option("--horizon", cv_horizon, "validation window length");
    cvc->add_option("--min-train", cv_min_train, "minimum training periods");
    cvc->add_flag("--one-se", one_se, "select by the one-standard-error rule");

    auto* plc = app.add_subcommand("placebo", "in-space or in-time placebo inference");
    add_common(plc, plc_o, true);
    plc->add_option("--lambda", plc_o.lambda, "shrinkage value, or 'cv'")
        ->capture_default_str();
    std::string kind = "space";
    std::vector<std::string> pseudo_dates;
    int min_train = 60, horizon = 12, n_boot = 1000;
    plc->add_option("--kind", kind, "space | time")->capture_default_str();
    plc->add_option("--pseudo-dates", pseudo_dates, "explicit pseudo treatment dates")
        ->delimiter(',');
    plc->add_option("--min-train", min_train, "minimum pre-periods per pseudo run")
        ->capture_default_str();
    plc->add_option("--horizon", horizon, "pseudo post-window length")
        ->capture_default_str();
    plc->add_option("--n-boot", n_boot, "bootstrap replications for the SE summary")
        ->capture_default_str();

    auto* sdd = app.add_subcommand("sdid", "synthetic difference-in-differences");
    add_common(sdd, sdid_o, true);
    std::string zeta = "auto";
    int n_placebo = 0;
    sdd->add_option("--zeta", zeta, "ridge scale, or 'auto'")->capture_default_str();
    sdd->add_option("--n-placebo", n_placebo, "placebo reassignment draws")
        ->capture_default_str();

    auto* sim = app.add_subcommand("simulate", "draw a synthetic fixture panel");
    add_common(sim, sim_o, false);
    int n_units = 12, n_periods = 212, t0_index = 189, rank = 2;
    double noise = 0.1, persistence = 0.9;
    std::string effect = "zero";
    double value = 0.7, peak = 0.8, decay = 0.8, floor_frac = 0.5;
    int peak_time = 12;
    sim->add_option("--units", n_units)->capture_default_str();
    sim->add_option("--periods", n_periods)->capture_default_str();
    sim->add_option("--t0-index", t0_index, "0-based first treated period")
        ->capture_default_str();
    sim->add_option("--rank", rank)->capture_default_str();
    sim->add_option("--noise", noise, "idiosyncratic sigma")->capture_default_str();
    sim->add_option("--persistence", persistence, "factor AR(1) coefficient")
        ->capture_default_str();
    sim->add_option("--effect", effect, "zero | constant | hump")->capture_default_str();
    sim->add_option("--value", value, "constant effect size")->capture_default_str();
    sim->add_option("--peak", peak, "hump peak")->capture_default_str();
    sim->add_option("--peak-time", peak_time, "hump peak month")->capture_default_str();
    sim->add_option("--decay", decay, "hump decay rate")->capture_default_str();
    sim->add_option("--floor", floor_frac, "hump resting fraction of peak")
        ->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    if (est->parsed()) {
        ordered_json cfg = base_config(est_o, "estimate", true);
        set_lambda(cfg, est_o.lambda);
        if (!est_o.windows.empty()) cfg["windows"] = est_o.windows;
        return write_bundle(cfg, est_o.out_dir);
    }
    if (cvc->parsed()) {
        ordered_json cfg = base_config(cv_o, "cv", true);
        ordered_json c = ordered_json::object();
        if (!grid.empty()) c["lambda_grid"] = grid;
        if (folds > 0) c["n_folds"] = folds;
        if (cv_horizon > 0) c["horizon"] = cv_horizon;
        if (cv_min_train > 0) c["min_train"] = cv_min_train;
        if (one_se) c["one_se"] = true;
        if (!c.empty()) cfg["cv"] = c;
        return write_bundle(cfg, cv_o.out_dir);
    }
    if (plc->parsed()) {
        ordered_json cfg = base_config(plc_o, "placebo", true);
        set_lambda(cfg, plc_o.lambda);
        cfg["placebo"] = {{"kind", kind},
                          {"min_train", min_train},
                          {"horizon", horizon},
                          {"n_boot", n_boot}};
        if (!pseudo_dates.empty()) cfg["placebo"]["pseudo_dates"] = pseudo_dates;
        return write_bundle(cfg, plc_o.out_dir);
    }
    if (sdd->parsed()) {
        ordered_json cfg = base_config(sdid_o, "sdid", true);
        cfg["sdid"] = ordered_json::object();
        if (zeta != "auto") {
            try {
                cfg["sdid"]["zeta"] = std::stod(zeta);
            } catch (const std::exception&) {
                std::cerr << "error: --zeta expects a number or 'auto'\n";
                return 2;
            }
        }
        cfg["sdid"]["n_placebo"] = n_placebo;
        return write_bundle(cfg, sdid_o.out_dir);
    }
    // simulate
    ordered_json cfg = base_config(sim_o, "simulate", false);
    cfg["simulate"] = {{"n_units", n_units},
                       {"n_periods", n_periods},
                       {"t0", t0_index},
                       {"rank", rank},
                       {"noise_sigma", noise},
                       {"factor_persistence", persistence}};
    if (effect == "constant")
        cfg["simulate"]["effect"] = {{"kind", "constant"}, {"value", value}};
    else if (effect == "hump")
        cfg["simulate"]["effect"] = {{"kind", "hump"},
                                     {"peak", peak},
                                     {"peak_time", peak_time},
                                     {"decay", decay},
                                     {"floor", floor_frac}};
    else if (effect != "zero") {
        std::cerr << "error: --effect must be zero, constant, or hump\n";
        return 2;
    }
    return write_bundle(cfg, sim_o.out_dir);
}
