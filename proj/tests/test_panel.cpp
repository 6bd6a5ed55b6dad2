#include <doctest.h>

#include <random>
#include <sstream>

#include "panelgap/panel.hpp"

using namespace panelgap;

namespace {

PanelMatrix from_csv(const std::string& text) {
    std::istringstream in(text);
    return load_panel(in);
}

}  // namespace

TEST_CASE("period arithmetic and parsing") {
    PeriodIndex a = parse_period("2008-01");
    PeriodIndex b = parse_period("2025-08");
    CHECK(period_distance(a, b) == 211);  // 212 periods inclusive
    CHECK(a < b);
    CHECK(a.plus(211) == b);
    CHECK(b.label() == "2025-08");

    PeriodIndex y = parse_period("2019");
    CHECK(y.freq == Frequency::annual);
    CHECK(y.plus(3).label() == "2022");

    CHECK_THROWS_AS(parse_period("2008-13"), std::invalid_argument);
    CHECK_THROWS_AS(parse_period("Jan-2008"), std::invalid_argument);
    CHECK_THROWS_AS(period_distance(a, y), std::invalid_argument);
}

TEST_CASE("load_panel: complete 2x3 grid") {
    auto p = from_csv(
        "unit,period,value\n"
        "isr,2020-01,1.0\nisr,2020-02,1.1\nisr,2020-03,1.2\n"
        "usa,2020-01,0.5\nusa,2020-02,0.6\nusa,2020-03,0.7\n");
    CHECK(p.n_units() == 2);
    CHECK(p.n_periods() == 3);
    CHECK(p.mask.all());
    CHECK(p.values(1, 2) == 0.7);
    CHECK(p.units[0] == "isr");
}

TEST_CASE("load_panel: hole propagation") {
    auto p = from_csv(
        "unit,period,value\n"
        "isr,2020-01,1.0\nisr,2020-02,1.1\nisr,2020-03,1.2\n"
        "usa,2020-01,0.5\nusa,2020-03,0.7\n");
    CHECK(p.mask(1, 1) == false);
    CHECK(p.mask.count() == 5);
}

TEST_CASE("load_panel: error paths name the offending row") {
    CHECK_THROWS_WITH_AS(from_csv("unit,period,value\nisr,20-01,1.0\n"),
                         doctest::Contains("row 2"), std::runtime_error);
    CHECK_THROWS_WITH_AS(from_csv("unit,period,value\nisr,2020-01,abc\n"),
                         doctest::Contains("non-numeric"), std::runtime_error);
    CHECK_THROWS_WITH_AS(
        from_csv("unit,period,value\nisr,2020-01,1\nisr,2020-01,2\nusa,2020-02,1\n"),
        doctest::Contains("duplicate"), std::runtime_error);
}

TEST_CASE("load_panel round-trips through write_panel_csv") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> val(-5, 5);
    std::ostringstream src;
    src << "unit,period,value\n";
    src.precision(17);
    for (std::string u : {"a", "b", "c"})
        for (int m = 0; m < 14; ++m) {
            if (u == "b" && m % 5 == 0) continue;  // holes
            src << u << ',' << PeriodIndex{Frequency::monthly, 2010, 3, m}.label() << ','
                << val(rng) << '\n';
        }
    auto p = from_csv(src.str());
    std::ostringstream out;
    write_panel_csv(p, out);
    auto p2 = from_csv(out.str());
    CHECK(p2.units == p.units);
    CHECK(p2.start == p.start);
    CHECK((p2.mask == p.mask).all());
    CHECK(p2.values.cwiseProduct(p2.mask.cast<double>().matrix()) ==
          p.values.cwiseProduct(p.mask.cast<double>().matrix()));
}

TEST_CASE("wide export layout") {
    auto p = from_csv(
        "unit,period,value\n"
        "a,2020-01,1\na,2020-02,2\na,2020-03,3\nb,2020-01,4\nb,2020-03,6\n");
    std::ostringstream out;
    write_panel_wide_csv(p, out);
    CHECK(out.str() ==
          "period,a,b\n2020-01,1,4\n2020-02,2,\n2020-03,3,6\n");
}

TEST_CASE("12-unit monthly fixture spanning 2008-01..2025-08 gives 212 periods") {
    std::ostringstream src;
    src << "unit,period,value\n";
    PeriodIndex start = parse_period("2008-01");
    for (int u = 0; u < 12; ++u)
        for (int m = 0; m < 212; ++m)
            src << "u" << u << ',' << start.plus(m).label() << ',' << (u + m * 0.01) << '\n';
    auto p = from_csv(src.str());
    CHECK(p.n_units() == 12);
    CHECK(p.n_periods() == 212);
    CHECK(p.period(211).label() == "2025-08");
}

TEST_CASE("spread") {
    CHECK(spread({5.0}, {4.3})[0] == doctest::Approx(0.7));
    std::vector<double> x{1, 2, 3};
    auto z = spread(x, x);
    for (double v : z) CHECK(v == 0.0);
    CHECK_THROWS_AS(spread({1, 2}, {1}), std::invalid_argument);
}

TEST_CASE("growth_rate") {
    std::vector<double> constant{3.0, 3.0, 3.0, 3.0};
    for (auto m : {GrowthMethod::simple, GrowthMethod::log})
        for (double g : growth_rate(constant, m)) CHECK(g == 0.0);

    auto g = growth_rate({100.0, 102.0}, GrowthMethod::simple);
    CHECK(g.size() == 1);
    CHECK(g[0] == doctest::Approx(2.0));

    CHECK_THROWS_AS(growth_rate({0.0, 1.0}, GrowthMethod::simple), std::domain_error);
    CHECK_THROWS_AS(growth_rate({1.0, -1.0}, GrowthMethod::log), std::domain_error);
    CHECK_THROWS_AS(growth_rate({1.0}, GrowthMethod::simple), std::invalid_argument);
}

TEST_CASE("growth_rate: simple vs log agree to first order for small changes") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> step(-0.009, 0.009);
    std::vector<double> series{100.0};
    for (int k = 0; k < 200; ++k) series.push_back(series.back() * (1.0 + step(rng)));
    auto simple = growth_rate(series, GrowthMethod::simple);
    auto logg = growth_rate(series, GrowthMethod::log);
    for (size_t k = 0; k < simple.size(); ++k)
        if (std::abs(simple[k]) <= 1.0) CHECK(std::abs(simple[k] - logg[k]) <= 0.05);
}

TEST_CASE("build_observed_sets: counting and boundaries") {
    std::ostringstream src;
    src << "unit,period,value\n";
    for (std::string u : {"t", "d1", "d2"})
        for (int m = 0; m < 4; ++m)
            src << u << ',' << PeriodIndex{Frequency::monthly, 2020, 1, m}.label() << ",1\n";
    auto p = from_csv(src.str());

    auto sets = build_observed_sets(p, {"t", parse_period("2020-03")});
    CHECK(sets.missing.size() == 2);
    CHECK(sets.omega.size() == 10);

    auto last = build_observed_sets(p, {"t", parse_period("2020-04")});
    CHECK(last.missing.size() == 1);

    CHECK_THROWS_AS(build_observed_sets(p, {"nope", parse_period("2020-03")}),
                    std::invalid_argument);
}

TEST_CASE("build_observed_sets: full-calendar month counting") {
    std::ostringstream src;
    src << "unit,period,value\n";
    PeriodIndex start = parse_period("2008-01");
    for (int u = 0; u < 12; ++u)
        for (int m = 0; m < 212; ++m)
            src << "u" << u << ',' << start.plus(m).label() << ",0\n";
    auto p = from_csv(src.str());
    auto sets = build_observed_sets(p, {"u0", parse_period("2023-10")});
    CHECK(sets.missing.size() == 23);  // 2023-10 .. 2025-08
    CHECK(sets.omega.size() + sets.missing.size() == static_cast<size_t>(p.mask.count()));
}

TEST_CASE("build_observed_sets partitions mask-true cells on ragged panels") {
    std::mt19937_64 rng(8);
    std::bernoulli_distribution drop(0.1);
    std::ostringstream src;
    src << "unit,period,value\n";
    for (int u = 0; u < 5; ++u)
        for (int m = 0; m < 40; ++m) {
            if (u != 0 && drop(rng)) continue;
            src << "u" << u << ',' << PeriodIndex{Frequency::monthly, 2015, 1, m}.label()
                << ",1\n";
        }
    auto p = from_csv(src.str());
    auto sets = build_observed_sets(p, {"u0", parse_period("2017-07")});
    CHECK(sets.omega.size() + sets.missing.size() == static_cast<size_t>(p.mask.count()));
    for (auto [i, j] : sets.missing) {
        CHECK(i == 0);
        CHECK(j >= sets.t0_index);
    }
}

TEST_CASE("check_assignment warns below 24 pre-periods") {
    std::ostringstream src;
    src << "unit,period,value\n";
    for (std::string u : {"t", "d"})
        for (int m = 0; m < 30; ++m)
            src << u << ',' << PeriodIndex{Frequency::monthly, 2020, 1, m}.label() << ",1\n";
    auto p = from_csv(src.str());
    CHECK(check_assignment(p, {"t", p.period(10)}).has_value());
    CHECK(!check_assignment(p, {"t", p.period(25)}).has_value());
}
