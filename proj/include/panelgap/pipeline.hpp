#pragma once

#include <string>
#include <vector>

#include "panelgap/report.hpp"

namespace panelgap {

// One command's outputs: filename -> content (json object, or string for CSV
// exports). Every json file embeds the fully resolved config and seeds, so a
// report reproduces itself; nonconverged runs still produce files.
struct RunBundle {
    json files;
    std::vector<std::string> warnings;
    bool nonconverged = false;
};

// Executes a command described by a config object:
//   command   estimate | placebo | sdid | cv | simulate
//   input     CSV path (all but simulate)
//   treated, t0, donors, lambda (number or "cv"), windows, seed, jobs,
//   outcome   echoed into reports
//   placebo   {kind, pseudo_dates, min_train, horizon, n_boot}
//   sdid      {zeta (number or "auto"), n_placebo}
//   cv        {lambda_grid, horizon, n_folds, min_train, one_se}
//   simulate  DgpSpec fields
// Throws std::invalid_argument on bad configs or data.
RunBundle run_command(const json& config);

}  // namespace panelgap
