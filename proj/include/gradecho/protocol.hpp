// Closed-form protocol quantities: reversal time, subradiance times,
// wavevector evolution, nonlinearity bounds, the cos^2 dephasing factor and
// switching-schedule validation.

#pragma once

#include <string>
#include <vector>

#include "gradecho/materials.hpp"

namespace gradecho {

struct ReversalPlan {
    MaterialPreset preset;
    double lx = 0;                  // sample (region A) length (m)
    double delta_nu = 0;            // edge frequency shift (Hz)
    double k0 = 0;                  // optical wavevector (rad/m)
    double beta = 0;                // ramp rate 4*pi*delta_nu/lx (rad/(m s))
    double t_rev = 0;               // reversal time (s)
    std::vector<double> t_m;        // subradiance times m/(2 delta_nu)
    double switching_tolerance = 0; // (t_{m+1}-t_m)/4 = 1/(8 delta_nu) (s)
};

double reversal_time(const MaterialPreset& preset, double lx, double delta_nu);
std::vector<double> subradiance_times(double delta_nu, int m_max);
ReversalPlan make_plan(const MaterialPreset& preset, double lx, double delta_nu,
                       int m_max = 10);

// k(t) = k0 - beta*t; equals -k0 at t = t_rev (spatial phase conjugation).
double wavevector_at(const ReversalPlan& plan, double t);

struct PhaseTwist {
    double delta_k = 0;          // 4*pi*delta_nu*t_m/lx (rad/m)
    double period = 0;           // 2*pi/delta_k (m)
    double freeze_period = 0;    // 1/alpha (m), 0 when alpha not given
    bool frozen = false;         // period <= 1/alpha: optically thin layers
    int min_frozen_m = 0;        // smallest m with lx/m <= 1/alpha
};

PhaseTwist phase_twist(double delta_nu, double t_m, double lx, double alpha = 0);

// Allowed nonlinearity ratio delta_nu_rms/delta_nu. The two-argument form is
// the quarter-cycle rule; the three-argument form inverts the cos^2 factor
// for a required efficiency eps in (0,1).
double nonlinearity_bound(const MaterialPreset& preset, double lx);
double nonlinearity_bound(const MaterialPreset& preset, double lx, double eps);

// cos^2(2*pi*delta_nu_rms*t_rev), clamped to 0 once the argument reaches
// pi/2 (monotone dephasing model stops being valid there).
double dephasing_efficiency(double delta_nu_rms, double t_rev, bool* clamped = nullptr);

// Same factor expressed through the nonlinearity ratio; delta_nu cancels:
// cos^2(2*pi*ratio*lx*n/lambda).
double efficiency_from_ratio(const MaterialPreset& preset, double lx, double ratio,
                             bool* clamped = nullptr);

struct EfficiencyBudget {
    double target_efficiency = 0; // eps in (0,1)
    double allowed_ratio = 0;     // bound for delta_nu_rms/delta_nu
    double dephasing_factor = 0;  // cos^2 factor at the bound (= eps)
};

EfficiencyBudget make_budget(const MaterialPreset& preset, double lx, double eps);

// Piecewise-linear field amplitude g(t) in [-1, 1]; duplicate knot times
// encode jumps.
struct FieldSchedule {
    std::vector<double> t; // s, non-decreasing
    std::vector<double> g;
    void validate() const;
    double duration() const { return t.empty() ? 0 : t.back(); }
    double value_at(double time) const;
    double integral() const; // exact trapezoid over the knots
    double integral_between(double t0, double t1) const;
};

FieldSchedule rectangular_schedule(double duration, double amplitude = 1.0);

// Deviation of the achieved shift amplitude from the nominal one, in Hz,
// sampled at knot times (piecewise linear).
struct DeviationProfile {
    std::vector<double> t;
    std::vector<double> dnu;
    double mean() const; // time average over [t.front(), t.back()]
};

struct ScheduleReport {
    double effective_on_time = 0;  // integral of g (s)
    double area_error = 0;         // effective_on_time - t_rev (s)
    double area_tolerance = 0;     // 1/(8 delta_nu) (s)
    bool area_ok = false;
    double mean_deviation = 0;     // Hz
    double deviation_product = 0;  // |mean deviation| * t_rev
    bool deviation_ok = false;     // < 1/4
    bool ok() const { return area_ok && deviation_ok; }
};

ScheduleReport validate_schedule(const FieldSchedule& schedule, const ReversalPlan& plan,
                                 const DeviationProfile& deviation = {});

std::string plan_to_json(const ReversalPlan& plan);
std::string budget_to_json(const EfficiencyBudget& budget);
std::string schedule_to_csv(const FieldSchedule& schedule);

} // namespace gradecho
