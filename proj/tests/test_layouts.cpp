#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gradecho/layouts.hpp"
#include "gradecho/units.hpp"

using namespace gradecho;

TEST_CASE("ladder layout geometry") {
    const double us[] = {0.518, 1.0, 2.14};
    const auto layout = ladder_layout(3, 1.0, 0.05, 0.75, us);
    CHECK(layout.period_lx == doctest::Approx(2.0));
    CHECK(layout.electrodes.size() == 12);
    REQUIRE(layout.region_a.size() == 1);
    CHECK(layout.region_a[0].lo == doctest::Approx(-0.5));
    CHECK(layout.region_a[0].hi == doctest::Approx(0.5));

    // columns at k/4; the middle class sits on the region-A boundary
    int on_boundary = 0;
    for (const auto& e : layout.electrodes) {
        if (std::abs(std::abs(e.center_x) - 0.5) < 1e-12) {
            ++on_boundary;
            CHECK(std::abs(e.potential) == doctest::Approx(0.5));
        }
        // potential is odd under x -> -x and under y -> -y
        for (const auto& m : layout.electrodes)
            if (m.center_x == -e.center_x && m.center_y == e.center_y)
                CHECK(m.potential == doctest::Approx(-e.potential));
    }
    CHECK(on_boundary == 4);

    CHECK(quadrupole_layout(1.0, 0.05, 1.0, 1.0).electrodes.size() == 4);
    const double us5[] = {0.3, 0.7, 1.0, 1.5, 2.4};
    CHECK(ladder_layout(5, 1.0, 0.05, 0.75, us5).electrodes.size() == 20);
}

TEST_CASE("layout validation") {
    const double us[] = {1.0};
    auto layout = ladder_layout(1, 1.0, 0.05, 1.0, us);
    CHECK_NOTHROW(layout.validate());

    auto bad = layout;
    bad.electrodes[0].center_x = 2.0; // outside the period
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    bad = layout;
    bad.electrodes[1] = bad.electrodes[0]; // overlap
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    bad = layout;
    bad.region_a = {{-0.2, 0.2}, {0.1, 0.4}}; // overlapping intervals
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    CHECK_THROWS_AS(ladder_layout(0, 1.0, 0.05, 1.0, {}), std::invalid_argument);
    const double too_wide[] = {1.0};
    CHECK_THROWS_AS(ladder_layout(1, 1.0, 0.6, 1.0, too_wide), std::invalid_argument);
}

TEST_CASE("layout JSON round trip uses micrometers") {
    const double us[] = {0.5, 1.0};
    const auto layout = ladder_layout(2, 80.0 * units::um, 4.0 * units::um, 60.0 * units::um, us);
    const auto text = layout_to_json(layout);
    CHECK(text.find("period_lx_um") != std::string::npos);
    const auto back = load_layout_json(text);
    CHECK(back.period_lx == doctest::Approx(layout.period_lx).epsilon(1e-12));
    REQUIRE(back.electrodes.size() == layout.electrodes.size());
    for (size_t i = 0; i < back.electrodes.size(); ++i) {
        CHECK(back.electrodes[i].center_x ==
              doctest::Approx(layout.electrodes[i].center_x).epsilon(1e-12));
        CHECK(back.electrodes[i].potential == layout.electrodes[i].potential);
    }
    CHECK(back.region_a[0].hi == doctest::Approx(40.0 * units::um).epsilon(1e-12));
}

TEST_CASE("wires from layout replicate the potential pattern as currents") {
    const double us[] = {1.0};
    const auto layout = ladder_layout(1, 1.0, 0.05, 1.0, us);
    const auto wires = wires_from_layout(layout, 2.0, 5);
    CHECK(wires.wires.size() == 20);
    double total = 0;
    for (const auto& w : wires.wires) total += w.current;
    CHECK(total == doctest::Approx(0.0));
    CHECK_THROWS_AS(wires_from_layout(layout, 1.0, 0), std::invalid_argument);

    WireLayout coincident;
    coincident.wires = {{0, 0, 1}, {0, 0, -1}};
    CHECK_THROWS_AS(coincident.validate(), std::invalid_argument);
}
