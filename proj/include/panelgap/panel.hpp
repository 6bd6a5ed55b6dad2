#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "panelgap/calendar.hpp"

namespace panelgap {

using BoolGrid = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

// Rectangular units x periods outcome grid with an observation mask.
// Mask-false cells are holes in the raw data; their values are never read.
struct PanelMatrix {
    std::vector<std::string> units;  // treated unit first by convention
    PeriodIndex start;               // period j is start.plus(j)
    Eigen::MatrixXd values;          // units x periods
    BoolGrid mask;                   // units x periods, true = observed

    int n_units() const { return static_cast<int>(units.size()); }
    int n_periods() const { return static_cast<int>(values.cols()); }
    PeriodIndex period(int j) const { return start.plus(j); }

    int unit_index(const std::string& name) const;  // -1 if absent

    // Checks the structural invariants (dimensions, >=2 units, >=3 periods).
    void validate() const;

    // New panel restricted to the named units, in the given order.
    PanelMatrix subset(const std::vector<std::string>& keep) const;
};

struct TreatmentAssignment {
    std::string treated_unit;
    PeriodIndex t0;  // first treated period
};

// Partition of the mask-true cells into the observed-untreated set and the
// treated unit's post-treatment block to impute.
struct ObservedSets {
    std::vector<std::pair<int, int>> omega;    // (unit, period) indices
    std::vector<std::pair<int, int>> missing;  // treated post cells, time order
    int treated_unit = 0;
    int t0_index = 0;  // column index of the first treated period
};

struct CsvSchema {
    std::string unit_col = "unit";
    std::string period_col = "period";
    std::string value_col = "value";
};

PanelMatrix load_panel(std::istream& csv, const CsvSchema& schema = {});
PanelMatrix load_panel_file(const std::string& path, const CsvSchema& schema = {});

void write_panel_csv(const PanelMatrix& panel, std::ostream& out);
// Debug export: first column `period`, one column per unit, empty = hole.
void write_panel_wide_csv(const PanelMatrix& panel, std::ostream& out);

ObservedSets build_observed_sets(const PanelMatrix& panel,
                                 const TreatmentAssignment& treat);

// Emits a warning string when the assignment has fewer than 24 pre-periods;
// throws when the assignment is structurally invalid.
std::optional<std::string> check_assignment(const PanelMatrix& panel,
                                            const TreatmentAssignment& treat);

// Elementwise base - benchmark.
std::vector<double> spread(const std::vector<double>& base,
                           const std::vector<double>& benchmark);

enum class GrowthMethod { simple, log };

// Percent growth: simple 100*(x_t - x_{t-1})/|x_{t-1}|, log 100*ln(x_t/x_{t-1}).
std::vector<double> growth_rate(const std::vector<double>& series, GrowthMethod method);

}  // namespace panelgap
