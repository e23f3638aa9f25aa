#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gradecho/field_solver.hpp"
#include "gradecho/layouts.hpp"
#include "gradecho/materials.hpp"
#include "gradecho/profile.hpp"
#include "gradecho/units.hpp"

using namespace gradecho;

namespace {

// Independent least-squares reference: raw normal equations solved by
// Cramer's rule in extended precision (deliberately not the library path).
struct FitRef {
    long double slope, intercept, rms;
};

FitRef fit_reference(const std::vector<double>& x, const std::vector<double>& y) {
    long double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        n += 1;
        sx += x[i];
        sy += y[i];
        sxx += (long double)x[i] * x[i];
        sxy += (long double)x[i] * y[i];
    }
    const long double det = n * sxx - sx * sx;
    FitRef f{};
    f.slope = (n * sxy - sx * sy) / det;
    f.intercept = (sxx * sy - sx * sxy) / det;
    long double rr = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        const long double r = y[i] - (f.intercept + f.slope * x[i]);
        rr += r * r;
    }
    f.rms = sqrtl(rr / n);
    return f;
}

} // namespace

TEST_CASE("constant Dirichlet values give the constant solution") {
    ElectrodeLayout layout;
    layout.period_lx = 2.0;
    layout.ly = 1.0;
    layout.electrodes = {{-0.5, 0.45, 0.1, 0.1, 2.5},
                         {0.5, 0.45, 0.1, 0.1, 2.5},
                         {0.0, -0.45, 0.1, 0.1, 2.5}};
    GridSpec grid;
    grid.nx = 64;
    const auto map = solve_potential(layout, grid);
    for (double v : map.phi) CHECK(v == doctest::Approx(2.5).epsilon(1e-9));
    for (double e : map.ey) CHECK(std::abs(e) < 1e-6);
    CHECK(map.sweeps == 0); // constant start is already converged
}

TEST_CASE("harmonic boundary data is reproduced in the interior") {
    const auto map = solve_dirichlet_rect(
        129, 129, -1, 1, -1, 1, [](double x, double y) { return x * y; }, 1e-12);
    double worst = 0;
    for (int j = 0; j < map.ny; ++j)
        for (int i = 0; i < map.nx; ++i)
            worst = std::max(worst, std::abs(map.at(map.phi, i, j) - map.x_at(i) * map.y_at(j)));
    CHECK(worst < 1e-8);
    // phi = xy has E_y = -x: the induced shift is strictly linear
    const auto prof = shift_profile(map, find_preset("ideal"), 0.0);
    const auto rep = linearity_report(prof, {-0.9, 0.9});
    CHECK(rep.slope == doctest::Approx(-1.0).epsilon(1e-6));
    CHECK(rep.ratio < 1e-7);
}

TEST_CASE("quadrupole symmetry: odd transverse field, zero intercept") {
    const auto layout = quadrupole_layout(1.0, 0.05, 1.0, 1.0);
    GridSpec grid;
    grid.nx = 128;
    const auto map = solve_potential(layout, grid);
    const auto prof = shift_profile(map, find_preset("ideal"), 0.0);
    const double scale = *std::max_element(prof.shift.begin(), prof.shift.end());
    REQUIRE(scale > 0);
    // profile is odd about the region center (mirror node pairs i, nx-i)
    for (int i = 1; i < map.nx / 2; ++i)
        CHECK(prof.shift[i] + prof.shift[map.nx - i] == doctest::Approx(0.0).epsilon(1e-7 * scale));
    const auto rep = linearity_report(prof, {-0.4, 0.4});
    CHECK(std::abs(rep.intercept) < 1e-7 * scale);
    // approximately linear across the region core
    CHECK(rep.ratio < 0.05);
}

TEST_CASE("solver linearity and superposition") {
    GridSpec grid;
    grid.nx = 96;
    const auto a = solve_potential(quadrupole_layout(1.0, 0.05, 1.0, 1.0), grid);
    const auto b = solve_potential(quadrupole_layout(1.0, 0.05, 1.0, 2.0), grid);
    double worst = 0;
    for (size_t k = 0; k < a.phi.size(); ++k)
        worst = std::max(worst, std::abs(2.0 * a.phi[k] - b.phi[k]));
    CHECK(worst < 1e-9); // doubling is exact in binary floating point

    const auto c = solve_potential(quadrupole_layout(1.0, 0.05, 1.0, 0.7), grid);
    const auto d = solve_potential(quadrupole_layout(1.0, 0.05, 1.0, 1.7), grid);
    worst = 0;
    for (size_t k = 0; k < a.phi.size(); ++k)
        worst = std::max(worst, std::abs(a.phi[k] + c.phi[k] - d.phi[k]));
    CHECK(worst < 1e-8);
}

TEST_CASE("discrete harmonicity and grid refinement of the ratio") {
    const double us[] = {0.518, 1.0, 2.14};
    const auto layout = ladder_layout(3, 1.0, 0.05, 0.75, us);
    const auto& ideal = find_preset("ideal");

    GridSpec g256;
    g256.nx = 256;
    const auto m256 = solve_potential(layout, g256);
    CHECK(relative_residual_norm(m256) <= 1e-10);
    CHECK(max_node_residual(m256) < 1e-7);

    GridSpec g512;
    g512.nx = 512;
    const auto m512 = solve_potential(layout, g512);

    const auto r256 = linearity_report(shift_profile(m256, ideal, 0.075), {-0.5, 0.5});
    const auto r512 = linearity_report(shift_profile(m512, ideal, 0.075), {-0.5, 0.5});
    CHECK(std::abs(r512.ratio / r256.ratio - 1.0) < 0.10);
}

TEST_CASE("electrode coverage precondition") {
    const double us[] = {1.0};
    const auto layout = ladder_layout(1, 1.0, 0.05, 1.0, us);
    GridSpec grid;
    grid.nx = 32; // 0.05 wide electrode spans < 2 cells
    CHECK_THROWS_AS(solve_potential(layout, grid), std::invalid_argument);
}

TEST_CASE("wire fields") {
    WireLayout single;
    single.wires = {{0, 0, 1.0}};
    const auto b = wire_field(single, 1.0, 0.0);
    CHECK(std::hypot(b.x, b.y) == doctest::Approx(2e-7).epsilon(1e-12));
    CHECK(b.x == doctest::Approx(0.0));
    CHECK(b.y == doctest::Approx(2e-7).epsilon(1e-12));
    CHECK_THROWS_AS(wire_field(single, 0.0, 0.0), std::invalid_argument);

    // parallel pair symmetric about the y axis: b_y vanishes on the axis;
    // antiparallel pair: b_x vanishes there
    WireLayout parallel;
    parallel.wires = {{-0.3, 0, 1.0}, {0.3, 0, 1.0}};
    WireLayout anti;
    anti.wires = {{-0.3, 0, 1.0}, {0.3, 0, -1.0}};
    for (double y : {-0.7, 0.2, 1.3}) {
        CHECK(std::abs(wire_field(parallel, 0.0, y).y) < 1e-22);
        CHECK(std::abs(wire_field(anti, 0.0, y).x) < 1e-22);
    }
}

TEST_CASE("alternating wire array gives an odd shift profile in region A") {
    // currents replacing the electrode potentials generate the electrostatic
    // pattern rotated by 90 degrees, so the bias field lies along x to pick
    // out the component that mirrors E_y
    const double us[] = {1.0};
    const auto layout = ladder_layout(1, 1.0, 0.05, 1.0, us);
    const auto wires = wires_from_layout(layout, 1e-3, 41, 0.05, 0.0);
    MaterialPreset er = find_preset("er-yso");
    std::vector<double> xs;
    for (int i = -20; i <= 20; ++i) xs.push_back(0.4 * i / 20.0);
    const auto prof = wire_shift_profile(wires, er, xs, 0.0);
    double scale = 0;
    for (double s : prof.shift) scale = std::max(scale, std::abs(s));
    REQUIRE(scale > 0);
    for (size_t i = 0; i < xs.size(); ++i)
        CHECK(prof.shift[i] + prof.shift[xs.size() - 1 - i] ==
              doctest::Approx(0.0).epsilon(1e-6 * scale));
}

TEST_CASE("linearity report against the independent reference") {
    // shift(x) = x + 0.1 x^3 sampled densely on [-1, 1]
    ShiftProfile prof;
    const int n = 2001;
    for (int i = 0; i < n; ++i) {
        const double x = -1.0 + 2.0 * i / (n - 1);
        prof.x.push_back(x);
        prof.shift.push_back(x + 0.1 * x * x * x);
    }
    const auto rep = linearity_report(prof, {-1.0, 1.0});
    const auto ref = fit_reference(prof.x, prof.shift);
    CHECK(rep.slope == doctest::Approx((double)ref.slope).epsilon(1e-12));
    CHECK(rep.delta_nu_rms == doctest::Approx((double)ref.rms).epsilon(1e-12));
    // frozen value: continuum fit gives slope 1.06, rms residual
    // sqrt(integral of (0.1x^3 - 0.06x)^2 / 2) = 0.0151186, ratio 0.0142628
    CHECK(rep.ratio == doctest::Approx(0.0142628).epsilon(5e-4));
    // residuals are orthogonal to {1, x}
    long double s0 = 0, s1 = 0;
    for (size_t i = 0; i < rep.residuals.size(); ++i) {
        s0 += rep.residuals[i];
        s1 += rep.residuals[i] * prof.x[i];
    }
    CHECK(std::abs((double)s0) < 1e-9);
    CHECK(std::abs((double)s1) < 1e-9);
}

TEST_CASE("linearity report edge cases") {
    // exactly representable linear data: residuals vanish identically
    ShiftProfile lin;
    for (int i = 0; i < 11; ++i) {
        lin.x.push_back(i);
        lin.shift.push_back(3.0 * i - 1.0);
    }
    const auto rep = linearity_report(lin, {0.0, 10.0});
    CHECK(rep.delta_nu_rms == 0.0);
    CHECK(rep.ratio == 0.0);
    CHECK(rep.delta_nu == doctest::Approx(15.0).epsilon(1e-12));

    CHECK_THROWS_AS(linearity_report(lin, {8.5, 20.0}), std::invalid_argument); // < 3 samples
    ShiftProfile bad;
    bad.x = {0.0, 0.1, 0.05};
    bad.shift = {0, 0, 0};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("shift profile core band handling") {
    const auto layout = quadrupole_layout(1.0, 0.05, 1.0, 1.0);
    GridSpec grid;
    grid.nx = 96;
    const auto map = solve_potential(layout, grid);
    const auto& ideal = find_preset("ideal");
    CHECK_THROWS_AS(shift_profile(map, ideal, 10.0), std::invalid_argument);
    CHECK_THROWS_AS(shift_profile(map, find_preset("er-yso"), 0.0), std::invalid_argument);
    const auto axis = shift_profile(map, ideal, 0.0);
    const auto band = shift_profile(map, ideal, 0.1);
    CHECK(axis.x.size() == band.x.size());
    // averaging over a narrow band stays close to the axis row
    const double scale = *std::max_element(axis.shift.begin(), axis.shift.end());
    for (size_t i = 0; i < axis.x.size(); ++i)
        CHECK(std::abs(axis.shift[i] - band.shift[i]) < 0.05 * scale);
}

TEST_CASE("max_field scales with the potentials and vanishes without them") {
    const double us[] = {0.518, 1.0, 2.14};
    const auto layout = ladder_layout(3, 1.0, 0.05, 0.75, us);
    GridSpec grid;
    grid.nx = 128;
    const auto m1 = solve_potential(layout, grid);
    const auto m2 = solve_potential(layout.scaled_potentials(2.0), grid);
    const double e1 = max_field(m1, layout.region_a[0], 0.075);
    const double e2 = max_field(m2, layout.region_a[0], 0.075);
    CHECK(e2 == doctest::Approx(2 * e1).epsilon(1e-12));

    const auto m0 = solve_potential(layout.scaled_potentials(0.0), grid);
    CHECK(max_field(m0, layout.region_a[0], 0.075) == 0.0);
}
