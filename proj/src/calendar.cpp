#include "panelgap/calendar.hpp"

#include <cctype>
#include <cstdio>

namespace panelgap {

std::string PeriodIndex::label() const {
    char buf[16];
    if (freq == Frequency::monthly) {
        int a = absolute();
        int year = a / 12;
        int month = a % 12 + 1;
        std::snprintf(buf, sizeof(buf), "%04d-%02d", year, month);
    } else {
        std::snprintf(buf, sizeof(buf), "%04d", absolute());
    }
    return buf;
}

int period_distance(const PeriodIndex& a, const PeriodIndex& b) {
    if (a.freq != b.freq)
        throw std::invalid_argument("period_distance: mixed frequencies");
    return b.absolute() - a.absolute();
}

namespace {

bool all_digits(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
}

}  // namespace

PeriodIndex parse_period(const std::string& text) {
    PeriodIndex p;
    p.offset = 0;
    if (text.size() == 7 && text[4] == '-') {
        std::string y = text.substr(0, 4), m = text.substr(5, 2);
        if (all_digits(y) && all_digits(m)) {
            int month = std::stoi(m);
            if (month < 1 || month > 12)
                throw std::invalid_argument("bad month in period '" + text + "'");
            p.freq = Frequency::monthly;
            p.origin_year = std::stoi(y);
            p.origin_month = month;
            return p;
        }
    }
    if (text.size() == 4 && all_digits(text)) {
        p.freq = Frequency::annual;
        p.origin_year = std::stoi(text);
        p.origin_month = 1;
        return p;
    }
    throw std::invalid_argument("cannot parse period '" + text +
                                "' (expected YYYY-MM or YYYY)");
}

}  // namespace panelgap
