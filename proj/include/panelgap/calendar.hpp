#pragma once

#include <compare>
#include <stdexcept>
#include <string>

namespace panelgap {

enum class Frequency { monthly, annual };

// Calendar position of one panel period: an origin date plus a
// non-negative period offset. Monthly periods print as "YYYY-MM",
// annual periods as "YYYY".
struct PeriodIndex {
    Frequency freq = Frequency::monthly;
    int origin_year = 2008;
    int origin_month = 1;  // 1..12; fixed to 1 for annual
    int offset = 0;

    // Absolute period number on the frequency's global axis
    // (months since year 0 / years), used for ordering and distance.
    int absolute() const {
        if (freq == Frequency::monthly)
            return origin_year * 12 + (origin_month - 1) + offset;
        return origin_year + offset;
    }

    PeriodIndex plus(int k) const {
        PeriodIndex p = *this;
        p.offset += k;
        if (p.offset < 0) throw std::invalid_argument("PeriodIndex: negative offset");
        return p;
    }

    std::string label() const;

    friend bool operator==(const PeriodIndex& a, const PeriodIndex& b) {
        return a.freq == b.freq && a.absolute() == b.absolute();
    }
    friend std::strong_ordering operator<=>(const PeriodIndex& a, const PeriodIndex& b) {
        if (a.freq != b.freq) throw std::invalid_argument("PeriodIndex: mixed frequencies");
        return a.absolute() <=> b.absolute();
    }
};

// Signed number of periods from a to b; both must share a frequency.
int period_distance(const PeriodIndex& a, const PeriodIndex& b);

// Parses "YYYY-MM" (monthly) or "YYYY" (annual). Throws std::invalid_argument
// with the offending text otherwise.
PeriodIndex parse_period(const std::string& text);

}  // namespace panelgap
