#pragma once

#include <json.hpp>
#include <string>

#include "panelgap/cv.hpp"
#include "panelgap/dgp.hpp"
#include "panelgap/effects.hpp"
#include "panelgap/inference.hpp"
#include "panelgap/mc_solver.hpp"
#include "panelgap/panel.hpp"
#include "panelgap/sdid.hpp"

namespace panelgap {

using json = nlohmann::ordered_json;

// JSON report fragments. Key order is fixed so equal inputs dump to equal
// bytes; timestamps never appear here.
json fit_report(const PanelMatrix& panel, const ObservedSets& sets, const McFit& fit,
                double lambda);
json effects_report(const EffectPath& path, const HorizonWindows& windows,
                    const PreFitReport& diag);
json cv_report(const CvReport& report);
json placebo_report(const PlaceboDistribution& dist);
json sdid_report(const PanelMatrix& panel, const TreatmentAssignment& treat,
                 const SdidEstimate& est);
json truth_report(const DgpSpec& spec, const DgpDraw& draw);

// Plot-ready exports.
std::string effects_csv(const EffectPath& path);
std::string placebo_csv(const PlaceboDistribution& dist);
// unit,omega rows; weights below 1e-4 print as 0.
std::string sdid_weights_csv(const PanelMatrix& panel, const TreatmentAssignment& treat,
                             const SdidEstimate& est);

}  // namespace panelgap
