#include "gradecho/profile.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace gradecho {

void ShiftProfile::validate() const {
    if (x.size() != shift.size())
        throw std::invalid_argument("profile: size mismatch");
    for (size_t i = 1; i < x.size(); ++i)
        if (!(x[i] > x[i - 1]))
            throw std::invalid_argument("profile: x values must be strictly increasing");
}

double ShiftProfile::shift_at(double xq) const {
    if (x.size() < 2 || xq < x.front() || xq > x.back())
        throw std::out_of_range("profile: query outside the sampled span");
    const auto it = std::upper_bound(x.begin(), x.end(), xq);
    const size_t hi = std::min(static_cast<size_t>(it - x.begin()), x.size() - 1);
    const size_t lo = hi - 1;
    const double t = (xq - x[lo]) / (x[hi] - x[lo]);
    return shift[lo] + t * (shift[hi] - shift[lo]);
}

ShiftProfile shift_profile(const FieldMap& map, const MaterialPreset& preset,
                           double core_half) {
    preset.validate();
    if ((map.kind == FieldKind::electric) != (preset.field_kind() == FieldKind::electric))
        throw std::invalid_argument("shift_profile: field map kind does not match preset");
    const double y_max = std::abs(map.y0);
    if (core_half < 0 || core_half > y_max)
        throw std::invalid_argument("shift_profile: core band exceeds the grid");

    std::vector<int> rows;
    if (core_half == 0) {
        rows.push_back(map.row_at_y(0.0));
    } else {
        for (int j = 0; j < map.ny; ++j)
            if (std::abs(map.y_at(j)) <= core_half + 1e-12 * map.hy) rows.push_back(j);
    }

    ShiftProfile p;
    p.x.resize(map.nx);
    p.shift.resize(map.nx);
    for (int i = 0; i < map.nx; ++i) {
        double acc = 0;
        for (int j : rows) acc += map.at(map.ey, i, j);
        acc /= static_cast<double>(rows.size());
        p.x[i] = map.x_at(i);
        p.shift[i] = shift_from_field(preset, acc, map.kind);
    }
    p.validate();
    return p;
}

ShiftProfile wire_shift_profile(const WireLayout& layout, const MaterialPreset& preset,
                                const std::vector<double>& xs, double y) {
    preset.validate();
    if (preset.field_kind() != FieldKind::magnetic)
        throw std::invalid_argument("wire_shift_profile: preset is not magnetically driven");
    ShiftProfile p;
    for (double x : xs) {
        p.x.push_back(x);
        p.shift.push_back(shift_from_field(
            preset, wire_field_magnitude_change(layout, x, y), FieldKind::magnetic));
    }
    p.validate();
    return p;
}

ShiftProfile linear_profile(double delta_nu, double lx, int samples) {
    if (samples < 2) throw std::invalid_argument("linear_profile: need >= 2 samples");
    ShiftProfile p;
    p.x.resize(samples);
    p.shift.resize(samples);
    for (int i = 0; i < samples; ++i) {
        const double x = -0.5 * lx + lx * i / (samples - 1);
        p.x[i] = x;
        p.shift[i] = -2.0 * delta_nu * x / lx;
    }
    return p;
}

LinearityReport linearity_report(const ShiftProfile& profile, const Interval& span) {
    profile.validate();
    std::vector<double> xs, ss;
    for (size_t i = 0; i < profile.x.size(); ++i)
        if (profile.x[i] >= span.lo && profile.x[i] <= span.hi) {
            xs.push_back(profile.x[i]);
            ss.push_back(profile.shift[i]);
        }
    const size_t n = xs.size();
    if (n < 3) throw std::invalid_argument("linearity_report: need >= 3 samples in span");
    if (xs.back() == xs.front())
        throw std::invalid_argument("linearity_report: degenerate span");

    double xm = 0, sm = 0;
    for (size_t i = 0; i < n; ++i) {
        xm += xs[i];
        sm += ss[i];
    }
    xm /= n;
    sm /= n;
    double sxx = 0, sxy = 0;
    for (size_t i = 0; i < n; ++i) {
        sxx += (xs[i] - xm) * (xs[i] - xm);
        sxy += (xs[i] - xm) * (ss[i] - sm);
    }
    LinearityReport rep;
    rep.slope = sxy / sxx;
    rep.intercept = sm - rep.slope * xm;
    double rr = 0;
    rep.residuals.resize(n);
    for (size_t i = 0; i < n; ++i) {
        rep.residuals[i] = ss[i] - (rep.intercept + rep.slope * xs[i]);
        rr += rep.residuals[i] * rep.residuals[i];
    }
    rep.delta_nu_rms = std::sqrt(rr / n);
    rep.delta_nu = 0.5 * std::abs(rep.slope) * span.length();
    rep.ratio = rep.delta_nu > 0
                    ? rep.delta_nu_rms / rep.delta_nu
                    : (rep.delta_nu_rms == 0 ? 0.0 : std::numeric_limits<double>::infinity());
    return rep;
}

std::string profile_to_csv(const ShiftProfile& profile) {
    std::string out = "x,shift_hz\n";
    char line[96];
    for (size_t i = 0; i < profile.x.size(); ++i) {
        std::snprintf(line, sizeof(line), "%.17g,%.17g\n", profile.x[i], profile.shift[i]);
        out += line;
    }
    return out;
}

} // namespace gradecho
