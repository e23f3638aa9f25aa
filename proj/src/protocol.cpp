#include "gradecho/protocol.hpp"
#include "gradecho/units.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include <json.hpp>

namespace gradecho {

double reversal_time(const MaterialPreset& preset, double lx, double delta_nu) {
    preset.validate();
    if (!(lx > 0) || !(delta_nu > 0))
        throw std::invalid_argument("reversal_time: lx and delta_nu must be > 0");
    return (lx * preset.refractive_index / preset.lambda_vac) / delta_nu;
}

std::vector<double> subradiance_times(double delta_nu, int m_max) {
    if (!(delta_nu > 0) || m_max < 1)
        throw std::invalid_argument("subradiance_times: need delta_nu > 0 and m_max >= 1");
    std::vector<double> out(m_max);
    for (int m = 1; m <= m_max; ++m) out[m - 1] = m / (2.0 * delta_nu);
    return out;
}

ReversalPlan make_plan(const MaterialPreset& preset, double lx, double delta_nu, int m_max) {
    ReversalPlan plan;
    plan.preset = preset;
    plan.lx = lx;
    plan.delta_nu = delta_nu;
    plan.k0 = optical_wavevector(preset);
    plan.t_rev = reversal_time(preset, lx, delta_nu);
    plan.beta = 4.0 * units::pi * delta_nu / lx;
    plan.t_m = subradiance_times(delta_nu, m_max);
    plan.switching_tolerance = 1.0 / (8.0 * delta_nu);
    return plan;
}

double wavevector_at(const ReversalPlan& plan, double t) {
    if (t < 0) throw std::invalid_argument("wavevector_at: t must be >= 0");
    return plan.k0 - plan.beta * t;
}

PhaseTwist phase_twist(double delta_nu, double t_m, double lx, double alpha) {
    if (!(delta_nu > 0) || !(t_m > 0) || !(lx > 0))
        throw std::invalid_argument("phase_twist: inputs must be positive");
    PhaseTwist tw;
    tw.delta_k = 4.0 * units::pi * delta_nu * t_m / lx;
    tw.period = 2.0 * units::pi / tw.delta_k;
    if (alpha > 0) {
        tw.freeze_period = 1.0 / alpha;
        tw.frozen = tw.period <= tw.freeze_period;
        tw.min_frozen_m = static_cast<int>(std::ceil(alpha * lx - 1e-9));
    }
    return tw;
}

double nonlinearity_bound(const MaterialPreset& preset, double lx) {
    preset.validate();
    if (!(lx > 0)) throw std::invalid_argument("nonlinearity_bound: lx must be > 0");
    return 0.25 * preset.lambda_vac / (lx * preset.refractive_index);
}

double nonlinearity_bound(const MaterialPreset& preset, double lx, double eps) {
    preset.validate();
    if (!(lx > 0)) throw std::invalid_argument("nonlinearity_bound: lx must be > 0");
    if (!(eps > 0) || !(eps < 1))
        throw std::invalid_argument("nonlinearity_bound: eps must lie in (0,1)");
    return std::acos(std::sqrt(eps)) / (2.0 * units::pi) * preset.lambda_vac /
           (lx * preset.refractive_index);
}

double dephasing_efficiency(double delta_nu_rms, double t_rev, bool* clamped) {
    if (delta_nu_rms < 0 || t_rev < 0)
        throw std::invalid_argument("dephasing_efficiency: negative input");
    const double arg = 2.0 * units::pi * delta_nu_rms * t_rev;
    if (clamped) *clamped = false;
    if (arg >= 0.5 * units::pi) {
        if (clamped) *clamped = true;
        return 0.0;
    }
    const double c = std::cos(arg);
    return c * c;
}

double efficiency_from_ratio(const MaterialPreset& preset, double lx, double ratio,
                             bool* clamped) {
    preset.validate();
    // delta_nu_rms * t_rev = ratio * lx * n / lambda, independent of delta_nu
    const double product = ratio * lx * preset.refractive_index / preset.lambda_vac;
    return dephasing_efficiency(product, 1.0, clamped);
}

EfficiencyBudget make_budget(const MaterialPreset& preset, double lx, double eps) {
    EfficiencyBudget b;
    b.target_efficiency = eps;
    b.allowed_ratio = nonlinearity_bound(preset, lx, eps);
    b.dephasing_factor = efficiency_from_ratio(preset, lx, b.allowed_ratio);
    return b;
}

void FieldSchedule::validate() const {
    if (t.size() != g.size() || t.size() < 2)
        throw std::invalid_argument("schedule: need >= 2 knots");
    for (size_t i = 1; i < t.size(); ++i)
        if (t[i] < t[i - 1])
            throw std::invalid_argument("schedule: knot times must be non-decreasing");
    for (double v : g)
        if (std::abs(v) > 1.0 + 1e-12)
            throw std::invalid_argument("schedule: |g| must be <= 1");
}

double FieldSchedule::value_at(double time) const {
    validate();
    // the field is off outside the scheduled window
    if (time < t.front() || time > t.back()) return 0.0;
    if (time == t.front()) return g.front();
    if (time == t.back()) return g.back();
    const auto it = std::upper_bound(t.begin(), t.end(), time);
    const size_t hi = it - t.begin();
    const size_t lo = hi - 1;
    if (t[hi] == t[lo]) return g[hi];
    const double s = (time - t[lo]) / (t[hi] - t[lo]);
    return g[lo] + s * (g[hi] - g[lo]);
}

double FieldSchedule::integral() const {
    validate();
    double acc = 0;
    for (size_t i = 1; i < t.size(); ++i) acc += 0.5 * (g[i] + g[i - 1]) * (t[i] - t[i - 1]);
    return acc;
}

double FieldSchedule::integral_between(double t0, double t1) const {
    validate();
    if (t1 < t0) return -integral_between(t1, t0);
    double acc = 0;
    for (size_t i = 1; i < t.size(); ++i) {
        const double a = std::max(t[i - 1], t0);
        const double b = std::min(t[i], t1);
        if (b <= a) continue;
        acc += 0.5 * (value_at(a) + value_at(b)) * (b - a);
    }
    return acc;
}

FieldSchedule rectangular_schedule(double duration, double amplitude) {
    if (!(duration > 0)) throw std::invalid_argument("rectangular_schedule: duration <= 0");
    FieldSchedule s;
    s.t = {0.0, duration};
    s.g = {amplitude, amplitude};
    s.validate();
    return s;
}

double DeviationProfile::mean() const {
    if (t.size() != dnu.size() || t.size() < 2) return 0.0;
    double acc = 0;
    for (size_t i = 1; i < t.size(); ++i)
        acc += 0.5 * (dnu[i] + dnu[i - 1]) * (t[i] - t[i - 1]);
    const double span = t.back() - t.front();
    return span > 0 ? acc / span : 0.0;
}

ScheduleReport validate_schedule(const FieldSchedule& schedule, const ReversalPlan& plan,
                                 const DeviationProfile& deviation) {
    schedule.validate();
    ScheduleReport rep;
    rep.effective_on_time = schedule.integral();
    rep.area_error = rep.effective_on_time - plan.t_rev;
    rep.area_tolerance = plan.switching_tolerance;
    rep.area_ok = std::abs(rep.area_error) <= rep.area_tolerance;
    rep.mean_deviation = deviation.mean();
    rep.deviation_product = std::abs(rep.mean_deviation) * plan.t_rev;
    rep.deviation_ok = rep.deviation_product < 0.25;
    return rep;
}

std::string plan_to_json(const ReversalPlan& plan) {
    nlohmann::json doc;
    doc["preset"] = plan.preset.name;
    doc["lx_m"] = plan.lx;
    doc["delta_nu_hz"] = plan.delta_nu;
    doc["k0_rad_per_m"] = plan.k0;
    doc["beta_rad_per_m_s"] = plan.beta;
    doc["t_rev_s"] = plan.t_rev;
    doc["t_m_s"] = plan.t_m;
    doc["switching_tolerance_s"] = plan.switching_tolerance;
    return doc.dump(2);
}

std::string budget_to_json(const EfficiencyBudget& budget) {
    nlohmann::json doc;
    doc["target_efficiency"] = budget.target_efficiency;
    doc["allowed_ratio"] = budget.allowed_ratio;
    doc["dephasing_factor"] = budget.dephasing_factor;
    return doc.dump(2);
}

std::string schedule_to_csv(const FieldSchedule& schedule) {
    schedule.validate();
    std::string out = "t_s,g\n";
    char line[64];
    for (size_t i = 0; i < schedule.t.size(); ++i) {
        std::snprintf(line, sizeof(line), "%.17g,%.17g\n", schedule.t[i], schedule.g[i]);
        out += line;
    }
    return out;
}

} // namespace gradecho
