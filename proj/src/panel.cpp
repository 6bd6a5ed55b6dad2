#include "panelgap/panel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace panelgap {

int PanelMatrix::unit_index(const std::string& name) const {
    auto it = std::find(units.begin(), units.end(), name);
    return it == units.end() ? -1 : static_cast<int>(it - units.begin());
}

void PanelMatrix::validate() const {
    if (values.rows() != static_cast<Eigen::Index>(units.size()) ||
        mask.rows() != values.rows() || mask.cols() != values.cols())
        throw std::invalid_argument("PanelMatrix: grid dimensions inconsistent");
    if (n_units() < 2) throw std::invalid_argument("PanelMatrix: need at least 2 units");
    if (n_periods() < 3) throw std::invalid_argument("PanelMatrix: need at least 3 periods");
}

PanelMatrix PanelMatrix::subset(const std::vector<std::string>& keep) const {
    PanelMatrix out;
    out.start = start;
    out.values.resize(keep.size(), n_periods());
    out.mask.resize(keep.size(), n_periods());
    for (size_t k = 0; k < keep.size(); ++k) {
        int i = unit_index(keep[k]);
        if (i < 0) throw std::invalid_argument("subset: unknown unit '" + keep[k] + "'");
        out.units.push_back(keep[k]);
        out.values.row(k) = values.row(i);
        out.mask.row(k) = mask.row(i);
    }
    out.validate();
    return out;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

struct Row {
    std::string unit;
    PeriodIndex period;
    double value;
};

}  // namespace

PanelMatrix load_panel(std::istream& csv, const CsvSchema& schema) {
    std::string line;
    if (!std::getline(csv, line))
        throw std::runtime_error("load_panel: empty input");
    auto header = split_csv_line(line);
    int ui = -1, pi = -1, vi = -1;
    for (size_t k = 0; k < header.size(); ++k) {
        if (header[k] == schema.unit_col) ui = static_cast<int>(k);
        if (header[k] == schema.period_col) pi = static_cast<int>(k);
        if (header[k] == schema.value_col) vi = static_cast<int>(k);
    }
    if (ui < 0 || pi < 0 || vi < 0)
        throw std::runtime_error("load_panel: header must contain columns '" +
                                 schema.unit_col + "," + schema.period_col + "," +
                                 schema.value_col + "', got '" + line + "'");

    std::vector<Row> rows;
    std::vector<std::string> unit_order;
    std::optional<Frequency> freq;
    int min_abs = 0, max_abs = 0;
    int lineno = 1;
    while (std::getline(csv, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        auto fields = split_csv_line(line);
        int needed = std::max({ui, pi, vi}) + 1;
        if (static_cast<int>(fields.size()) < needed)
            throw std::runtime_error("load_panel: row " + std::to_string(lineno) +
                                     " has too few columns");
        Row r;
        r.unit = fields[ui];
        try {
            r.period = parse_period(fields[pi]);
        } catch (const std::exception& e) {
            throw std::runtime_error("load_panel: row " + std::to_string(lineno) + ": " +
                                     e.what());
        }
        try {
            size_t pos = 0;
            r.value = std::stod(fields[vi], &pos);
            if (pos != fields[vi].size()) throw std::invalid_argument(fields[vi]);
        } catch (const std::exception&) {
            throw std::runtime_error("load_panel: row " + std::to_string(lineno) +
                                     ": non-numeric value '" + fields[vi] + "'");
        }
        if (!freq) {
            freq = r.period.freq;
        } else if (*freq != r.period.freq) {
            throw std::runtime_error("load_panel: row " + std::to_string(lineno) +
                                     ": mixed monthly/annual periods");
        }
        if (rows.empty()) {
            min_abs = max_abs = r.period.absolute();
        } else {
            min_abs = std::min(min_abs, r.period.absolute());
            max_abs = std::max(max_abs, r.period.absolute());
        }
        if (std::find(unit_order.begin(), unit_order.end(), r.unit) == unit_order.end())
            unit_order.push_back(r.unit);
        rows.push_back(std::move(r));
    }
    if (rows.empty()) throw std::runtime_error("load_panel: no data rows");

    PanelMatrix panel;
    panel.units = unit_order;
    panel.start = rows.front().period;
    panel.start.offset = 0;
    // normalize origin to the earliest date seen
    if (*freq == Frequency::monthly) {
        panel.start.origin_year = min_abs / 12;
        panel.start.origin_month = min_abs % 12 + 1;
    } else {
        panel.start.origin_year = min_abs;
        panel.start.origin_month = 1;
    }
    int n_periods = max_abs - min_abs + 1;
    int n_units = static_cast<int>(unit_order.size());
    panel.values = Eigen::MatrixXd::Zero(n_units, n_periods);
    panel.mask = BoolGrid::Constant(n_units, n_periods, false);
    for (const Row& r : rows) {
        int i = panel.unit_index(r.unit);
        int j = r.period.absolute() - min_abs;
        if (panel.mask(i, j))
            throw std::runtime_error("load_panel: duplicate cell (" + r.unit + ", " +
                                     r.period.label() + ")");
        panel.values(i, j) = r.value;
        panel.mask(i, j) = true;
    }
    panel.validate();
    return panel;
}

PanelMatrix load_panel_file(const std::string& path, const CsvSchema& schema) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_panel: cannot open '" + path + "'");
    return load_panel(in, schema);
}

void write_panel_csv(const PanelMatrix& panel, std::ostream& out) {
    out << "unit,period,value\n";
    out.precision(17);
    for (int i = 0; i < panel.n_units(); ++i)
        for (int j = 0; j < panel.n_periods(); ++j)
            if (panel.mask(i, j))
                out << panel.units[i] << ',' << panel.period(j).label() << ','
                    << panel.values(i, j) << '\n';
}

void write_panel_wide_csv(const PanelMatrix& panel, std::ostream& out) {
    out << "period";
    for (const auto& u : panel.units) out << ',' << u;
    out << '\n';
    out.precision(17);
    for (int j = 0; j < panel.n_periods(); ++j) {
        out << panel.period(j).label();
        for (int i = 0; i < panel.n_units(); ++i) {
            out << ',';
            if (panel.mask(i, j)) out << panel.values(i, j);
        }
        out << '\n';
    }
}

std::optional<std::string> check_assignment(const PanelMatrix& panel,
                                            const TreatmentAssignment& treat) {
    if (panel.unit_index(treat.treated_unit) < 0)
        throw std::invalid_argument("treated unit '" + treat.treated_unit +
                                    "' not found in panel");
    int j0 = period_distance(panel.start, treat.t0);
    if (j0 <= 0 || j0 >= panel.n_periods())
        throw std::invalid_argument("t0 " + treat.t0.label() +
                                    " is not strictly inside the period range " +
                                    panel.period(0).label() + ".." +
                                    panel.period(panel.n_periods() - 1).label());
    if (j0 < 24)
        return "only " + std::to_string(j0) +
               " pre-treatment periods; at least 24 recommended";
    return std::nullopt;
}

ObservedSets build_observed_sets(const PanelMatrix& panel,
                                 const TreatmentAssignment& treat) {
    check_assignment(panel, treat);
    ObservedSets sets;
    sets.treated_unit = panel.unit_index(treat.treated_unit);
    sets.t0_index = period_distance(panel.start, treat.t0);
    for (int j = 0; j < panel.n_periods(); ++j)
        if (panel.mask(sets.treated_unit, j) && j >= sets.t0_index)
            sets.missing.emplace_back(sets.treated_unit, j);
    for (int i = 0; i < panel.n_units(); ++i)
        for (int j = 0; j < panel.n_periods(); ++j)
            if (panel.mask(i, j) && !(i == sets.treated_unit && j >= sets.t0_index))
                sets.omega.emplace_back(i, j);
    return sets;
}

std::vector<double> spread(const std::vector<double>& base,
                           const std::vector<double>& benchmark) {
    if (base.size() != benchmark.size())
        throw std::invalid_argument("spread: series lengths differ (" +
                                    std::to_string(base.size()) + " vs " +
                                    std::to_string(benchmark.size()) + ")");
    std::vector<double> out(base.size());
    for (size_t k = 0; k < base.size(); ++k) out[k] = base[k] - benchmark[k];
    return out;
}

std::vector<double> growth_rate(const std::vector<double>& series, GrowthMethod method) {
    if (series.size() < 2)
        throw std::invalid_argument("growth_rate: need at least 2 observations");
    std::vector<double> out(series.size() - 1);
    for (size_t k = 1; k < series.size(); ++k) {
        double prev = series[k - 1], cur = series[k];
        if (method == GrowthMethod::simple) {
            if (prev == 0.0)
                throw std::domain_error("growth_rate: zero base at position " +
                                        std::to_string(k - 1));
            out[k - 1] = 100.0 * (cur - prev) / std::abs(prev);
        } else {
            if (prev <= 0.0 || cur <= 0.0)
                throw std::domain_error("growth_rate: non-positive value under log at position " +
                                        std::to_string(prev <= 0.0 ? k - 1 : k));
            out[k - 1] = 100.0 * (std::log(cur) - std::log(prev));
        }
    }
    return out;
}

}  // namespace panelgap
