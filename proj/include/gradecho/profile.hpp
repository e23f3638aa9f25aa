// Frequency-shift profile along the storage axis and its linear-fit
// statistics. The ratio delta_nu_rms / delta_nu is the central figure of
// merit for electrode geometry.

#pragma once

#include <string>
#include <vector>

#include "gradecho/field_solver.hpp"
#include "gradecho/materials.hpp"

namespace gradecho {

struct ShiftProfile {
    std::vector<double> x;     // m, strictly increasing
    std::vector<double> shift; // Hz
    void validate() const;
    double shift_at(double xq) const; // linear interpolation
};

// Shift from the transverse field component E_y along y = 0, or averaged over
// node rows with |y| <= core_half when core_half > 0.
ShiftProfile shift_profile(const FieldMap& map, const MaterialPreset& preset,
                           double core_half = 0);

// Magnetic variant, sampled at the given x positions.
ShiftProfile wire_shift_profile(const WireLayout& layout, const MaterialPreset& preset,
                                const std::vector<double>& xs, double y = 0);

// Analytic profile of an ideal linear gradient: +delta_nu at x = -lx/2 down
// to -delta_nu at x = +lx/2.
ShiftProfile linear_profile(double delta_nu, double lx, int samples = 257);

struct LinearityReport {
    double slope = 0;         // Hz/m
    double intercept = 0;     // Hz at x = 0
    double delta_nu = 0;      // |slope| * span/2 (Hz)
    double delta_nu_rms = 0;  // RMS residual (Hz)
    double ratio = 0;         // delta_nu_rms / delta_nu
    std::vector<double> residuals;
};

// Ordinary least squares of shift against x over [span.lo, span.hi].
LinearityReport linearity_report(const ShiftProfile& profile, const Interval& span);

std::string profile_to_csv(const ShiftProfile& profile);

} // namespace gradecho
