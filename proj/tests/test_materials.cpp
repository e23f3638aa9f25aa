#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "gradecho/materials.hpp"
#include "gradecho/units.hpp"

using namespace gradecho;

TEST_CASE("builtin presets are valid and complete") {
    CHECK(builtin_presets().size() == 3);
    for (const auto& p : builtin_presets()) CHECK_NOTHROW(p.validate());
    CHECK(find_preset("pr-yso").stark_coefficient == doctest::Approx(1110.0));
    CHECK(find_preset("er-yso").zeeman_coefficient == doctest::Approx(1.5e10));
    CHECK(find_preset("ideal").lambda_vac == doctest::Approx(2 * units::pi));
    CHECK_THROWS_AS(find_preset("nope"), std::invalid_argument);
}

TEST_CASE("preset invariants are enforced") {
    MaterialPreset p = find_preset("pr-yso");
    p.t2 = 0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = find_preset("pr-yso");
    p.zeeman_coefficient = 1.0; // both drives set
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = find_preset("pr-yso");
    p.stark_coefficient = 0; // neither
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = find_preset("pr-yso");
    p.refractive_index = 0.5;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("shift_from_field worked examples") {
    const auto& pr = find_preset("pr-yso");
    // 10^4 V/cm drives the transition by about a GHz
    CHECK(shift_from_field(pr, 1e4 * units::v_per_cm, FieldKind::electric) ==
          doctest::Approx(1.11e9).epsilon(1e-12));
    CHECK(shift_from_field(pr, 0.0, FieldKind::electric) == 0.0);

    const auto& er = find_preset("er-yso");
    CHECK(shift_from_field(er, 70.0 * units::gauss, FieldKind::magnetic) ==
          doctest::Approx(105e6).epsilon(1e-12));

    CHECK_THROWS_AS(shift_from_field(pr, 1.0, FieldKind::magnetic), std::invalid_argument);
    CHECK_THROWS_AS(shift_from_field(er, 1.0, FieldKind::electric), std::invalid_argument);
    CHECK_THROWS_AS(shift_from_field(pr, std::nan(""), FieldKind::electric),
                    std::invalid_argument);
}

TEST_CASE("optical wavevector") {
    CHECK(optical_wavevector(find_preset("ideal")) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(optical_wavevector(find_preset("pr-yso")) == doctest::Approx(1.8664e7).epsilon(1e-4));
    MaterialPreset p = find_preset("pr-yso");
    const double k1 = optical_wavevector(p);
    p.refractive_index *= 2;
    CHECK(optical_wavevector(p) == doctest::Approx(2 * k1).epsilon(1e-15));
}

TEST_CASE("properties: linearity in field, k0 lambda identity") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> dist(-1e6, 1e6);
    const auto& pr = find_preset("pr-yso");
    for (int i = 0; i < 200; ++i) {
        const double e = dist(rng), c = dist(rng) / 1e5;
        CHECK(shift_from_field(pr, c * e, FieldKind::electric) ==
              doctest::Approx(c * shift_from_field(pr, e, FieldKind::electric))
                  .epsilon(1e-12));
    }
    for (const auto& p : builtin_presets())
        CHECK(optical_wavevector(p) * p.lambda_vac ==
              doctest::Approx(2 * units::pi * p.refractive_index).epsilon(1e-14));
}

TEST_CASE("JSON registry round trip with human units") {
    const auto text = presets_to_json(builtin_presets());
    const auto back = load_presets_json(text);
    REQUIRE(back.size() == builtin_presets().size());
    for (size_t i = 0; i < back.size(); ++i) {
        const auto& a = builtin_presets()[i];
        const auto& b = back[i];
        CHECK(a.name == b.name);
        CHECK(b.lambda_vac == doctest::Approx(a.lambda_vac).epsilon(1e-12));
        CHECK(b.stark_coefficient == doctest::Approx(a.stark_coefficient).epsilon(1e-12));
        CHECK(b.zeeman_coefficient == doctest::Approx(a.zeeman_coefficient).epsilon(1e-12));
        CHECK(b.t2 == doctest::Approx(a.t2).epsilon(1e-12));
    }

    const char* doc = R"([{"name":"x","lambda_vac_nm":600,"refractive_index":1.5,
        "stark_coefficient_khz_per_v_cm":111,"t2_us":100,"alpha_per_m":0}])";
    const auto loaded = load_presets_json(doc);
    CHECK(loaded[0].stark_coefficient == doctest::Approx(1110.0)); // kHz/(V/cm) -> Hz/(V/m)
    CHECK(loaded[0].lambda_vac == doctest::Approx(600e-9));
}
