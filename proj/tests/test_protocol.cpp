#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gradecho/materials.hpp"
#include "gradecho/protocol.hpp"
#include "gradecho/units.hpp"

using namespace gradecho;

TEST_CASE("reversal time worked examples") {
    const auto& pr = find_preset("pr-yso");
    CHECK(reversal_time(pr, 1e-3, 1.11e9) == doctest::Approx(2.676e-6).epsilon(1e-3));
    const double lx = (100.0 / 0.75) * pr.lambda_vac; // 133.3 lambda
    CHECK(reversal_time(pr, lx, 183e6) == doctest::Approx(1.31e-6).epsilon(2e-3));

    MaterialPreset unit = find_preset("ideal");
    unit.lambda_vac = 1.0;
    CHECK(reversal_time(unit, 1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS(reversal_time(pr, -1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(reversal_time(pr, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("subradiance times") {
    const auto tm = subradiance_times(183e6, 2);
    CHECK(tm[1] - tm[0] == doctest::Approx(2.732e-9).epsilon(1e-3));
    CHECK(subradiance_times(0.5, 1)[0] == doctest::Approx(1.0).epsilon(1e-15));
    const auto three = subradiance_times(1.0, 3);
    CHECK(three[0] == 0.5);
    CHECK(three[1] == 1.0);
    CHECK(three[2] == 1.5);
    // spacing times 2 delta_nu is exactly 1
    CHECK((three[2] - three[1]) * 2.0 == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS(subradiance_times(0.0, 3), std::invalid_argument);
}

TEST_CASE("wavevector evolution and phase conjugation") {
    const auto& pr = find_preset("pr-yso");
    const auto plan = make_plan(pr, 1e-3, 1.11e9);
    CHECK(wavevector_at(plan, 0.0) == plan.k0);
    CHECK(wavevector_at(plan, plan.t_rev) == doctest::Approx(-plan.k0).epsilon(1e-12));
    CHECK(std::abs(wavevector_at(plan, 0.5 * plan.t_rev)) < 1e-12 * plan.k0);
    CHECK(plan.beta * plan.t_rev == doctest::Approx(2 * plan.k0).epsilon(1e-12));
    CHECK_THROWS_AS(wavevector_at(plan, -1.0), std::invalid_argument);

    // t_rev is inversely proportional to delta_nu
    const auto plan2 = make_plan(pr, 1e-3, 2 * 1.11e9);
    CHECK(plan2.t_rev == doctest::Approx(plan.t_rev / 2).epsilon(1e-14));
}

TEST_CASE("phase twist and the freeze criterion") {
    const auto tw1 = phase_twist(1.0, 0.5, 1.0); // m = 1
    CHECK(tw1.delta_k == doctest::Approx(2 * units::pi).epsilon(1e-15));
    CHECK(tw1.period == doctest::Approx(1.0).epsilon(1e-15));

    const auto tw10 = phase_twist(183e6, 10.0 / (2 * 183e6), 1e-3, 1e4); // m = 10, Lx = 1 mm
    CHECK(tw10.delta_k == doctest::Approx(2 * units::pi * 1e4).epsilon(1e-12));
    CHECK(tw10.period == doctest::Approx(100e-6).epsilon(1e-12));
    CHECK(tw10.frozen); // period = 1/alpha exactly at m = 10
    CHECK(tw10.min_frozen_m == 10);

    const auto tw9 = phase_twist(183e6, 9.0 / (2 * 183e6), 1e-3, 1e4);
    CHECK(!tw9.frozen);
}

TEST_CASE("nonlinearity bounds") {
    const auto& pr = find_preset("pr-yso");
    const double lx = (100.0 / 0.75) * pr.lambda_vac;
    CHECK(nonlinearity_bound(pr, lx, 0.90) == doctest::Approx(2.14e-4).epsilon(0.01));
    CHECK(nonlinearity_bound(pr, lx, 0.99) == doctest::Approx(6.7e-5).epsilon(0.01));
    CHECK(nonlinearity_bound(pr, 1e-3) == doctest::Approx(8.4e-5).epsilon(5e-3));

    CHECK_THROWS_AS(nonlinearity_bound(pr, lx, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(nonlinearity_bound(pr, lx, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(nonlinearity_bound(pr, lx, -0.5), std::invalid_argument);

    // monotone decreasing in eps, approaching the quarter rule from below
    double prev = nonlinearity_bound(pr, lx);
    for (double eps : {1e-9, 0.1, 0.3, 0.5, 0.7, 0.9, 0.99}) {
        const double b = nonlinearity_bound(pr, lx, eps);
        CHECK(b < prev);
        prev = b;
    }
    CHECK(nonlinearity_bound(pr, lx, 1e-12) / nonlinearity_bound(pr, lx) ==
          doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("dephasing efficiency") {
    CHECK(dephasing_efficiency(0.0, 1.0) == 1.0);
    bool clamped = false;
    CHECK(dephasing_efficiency(0.25, 1.0, &clamped) == 0.0); // argument pi/2
    CHECK(clamped);
    CHECK(dephasing_efficiency(0.1, 1.0, &clamped) ==
          doctest::Approx(std::pow(std::cos(0.2 * units::pi), 2)).epsilon(1e-15));
    CHECK(!clamped);
    CHECK_THROWS_AS(dephasing_efficiency(-1.0, 1.0), std::invalid_argument);

    // round trip: bound(eps) back through the cos^2 factor gives eps
    const auto& pr = find_preset("pr-yso");
    const double lx = (100.0 / 0.75) * pr.lambda_vac;
    for (double eps = 0.1; eps < 0.995; eps += 0.02) {
        const auto budget = make_budget(pr, lx, eps);
        CHECK(budget.dephasing_factor == doctest::Approx(eps).epsilon(1e-10));
    }
}

TEST_CASE("field schedules") {
    const auto rect = rectangular_schedule(2.0);
    CHECK(rect.integral() == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(rect.value_at(1.0) == 1.0);
    CHECK(rect.integral_between(0.5, 1.5) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(rect.integral_between(1.5, 3.0) == doctest::Approx(0.5).epsilon(1e-15)); // off past the end

    FieldSchedule tri;
    tri.t = {0.0, 1.0, 3.0, 4.0};
    tri.g = {0.0, 1.0, 1.0, 0.0};
    CHECK(tri.integral() == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(tri.value_at(0.5) == doctest::Approx(0.5));

    FieldSchedule bad;
    bad.t = {0.0, 1.0};
    bad.g = {0.0, 1.5};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad.g = {0.0};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("schedule validation against a plan") {
    const auto& pr = find_preset("pr-yso");
    const auto plan = make_plan(pr, 1e-3, 1.11e9);

    const auto ok = validate_schedule(rectangular_schedule(plan.t_rev), plan);
    CHECK(ok.area_ok);
    CHECK(ok.deviation_ok);
    CHECK(ok.ok());
    CHECK(std::abs(ok.area_error) < 1e-9 * plan.t_rev);

    // overshoot by 1/(4 delta_nu): twice the allowed tolerance
    const double overshoot = 1.0 / (4.0 * plan.delta_nu);
    const auto bad = validate_schedule(rectangular_schedule(plan.t_rev + overshoot), plan);
    CHECK(!bad.area_ok);
    CHECK(bad.area_error == doctest::Approx(2.0 * bad.area_tolerance).epsilon(1e-9));

    // a smooth ramp with the same area passes: the field need not be
    // rectangular in time
    FieldSchedule ramp;
    const double r = 0.1 * plan.t_rev;
    ramp.t = {0.0, r, plan.t_rev, plan.t_rev + r};
    ramp.g = {0.0, 1.0, 1.0, 0.0};
    CHECK(validate_schedule(ramp, plan).area_ok);

    // time-averaged amplitude deviation must satisfy mean * t_rev < 1/4
    DeviationProfile dev;
    dev.t = {0.0, plan.t_rev};
    const double lethal = 0.3 / plan.t_rev;
    dev.dnu = {lethal, lethal};
    CHECK(!validate_schedule(rectangular_schedule(plan.t_rev), plan, dev).deviation_ok);
    dev.dnu = {0.1 / plan.t_rev, 0.1 / plan.t_rev};
    CHECK(validate_schedule(rectangular_schedule(plan.t_rev), plan, dev).deviation_ok);

    // switching tolerance at 183 MHz is 0.68 ns
    const auto plan183 = make_plan(pr, 80e-6, 183e6);
    CHECK(plan183.switching_tolerance == doctest::Approx(0.683e-9).epsilon(1e-3));
}

TEST_CASE("serialization") {
    const auto& pr = find_preset("pr-yso");
    const auto plan = make_plan(pr, 1e-3, 1.11e9, 4);
    const auto j = plan_to_json(plan);
    CHECK(j.find("t_rev_s") != std::string::npos);
    const auto csv = schedule_to_csv(rectangular_schedule(1.0));
    CHECK(csv.rfind("t_s,g\n", 0) == 0);
    const auto budget = make_budget(pr, 1e-3, 0.9);
    CHECK(budget_to_json(budget).find("allowed_ratio") != std::string::npos);
}
