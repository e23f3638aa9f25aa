#include "gradecho/layouts.hpp"
#include "gradecho/units.hpp"

#include <cmath>
#include <stdexcept>
#include <json.hpp>

namespace gradecho {

namespace {

bool rects_overlap(const Electrode& a, const Electrode& b) {
    return std::abs(a.center_x - b.center_x) < 0.5 * (a.width + b.width) &&
           std::abs(a.center_y - b.center_y) < 0.5 * (a.height + b.height);
}

} // namespace

void ElectrodeLayout::validate() const {
    if (!(period_lx > 0) || !(ly > 0))
        throw std::invalid_argument("layout: period_lx and ly must be > 0");
    const double tol = 1e-12 * std::max(period_lx, ly);
    for (const auto& e : electrodes) {
        if (!(e.width > 0) || !(e.height > 0))
            throw std::invalid_argument("layout: electrode with non-positive extent");
        if (std::abs(e.center_x) + 0.5 * e.width > 0.5 * period_lx + tol ||
            std::abs(e.center_y) + 0.5 * e.height > 0.5 * ly + tol)
            throw std::invalid_argument("layout: electrode outside the domain");
    }
    for (size_t i = 0; i < electrodes.size(); ++i)
        for (size_t j = i + 1; j < electrodes.size(); ++j)
            if (rects_overlap(electrodes[i], electrodes[j]))
                throw std::invalid_argument("layout: overlapping electrodes");
    for (const auto& r : region_a) {
        if (!(r.lo < r.hi))
            throw std::invalid_argument("layout: empty region_a interval");
        if (r.lo < -0.5 * period_lx - tol || r.hi > 0.5 * period_lx + tol)
            throw std::invalid_argument("layout: region_a outside the period");
    }
    for (size_t i = 0; i < region_a.size(); ++i)
        for (size_t j = i + 1; j < region_a.size(); ++j) {
            const auto& a = region_a[i];
            const auto& b = region_a[j];
            if (a.lo < b.hi && b.lo < a.hi)
                throw std::invalid_argument("layout: overlapping region_a intervals");
        }
}

ElectrodeLayout ElectrodeLayout::scaled_potentials(double factor) const {
    ElectrodeLayout out = *this;
    for (auto& e : out.electrodes) e.potential *= factor;
    return out;
}

ElectrodeLayout ladder_layout(int classes, double lx, double d, double ly,
                              std::span<const double> potentials) {
    if (classes < 1)
        throw std::invalid_argument("ladder_layout: classes must be >= 1");
    if (potentials.size() != static_cast<size_t>(classes))
        throw std::invalid_argument("ladder_layout: need one potential per class");
    if (!(d > 0) || d >= lx / (classes + 1))
        throw std::invalid_argument("ladder_layout: cross-section d out of range");
    ElectrodeLayout layout;
    layout.period_lx = 2.0 * lx;
    layout.ly = ly;
    for (int k = 1; k <= classes; ++k) {
        const double xk = k * lx / (classes + 1.0);
        const double u = potentials[k - 1];
        for (int sx : {-1, 1})
            for (int sy : {-1, 1}) {
                Electrode e;
                e.center_x = sx * xk;
                e.center_y = sy * 0.5 * (ly - d);
                e.width = d;
                e.height = d;
                e.potential = -0.5 * sx * sy * u;
                layout.electrodes.push_back(e);
            }
    }
    layout.region_a = {{-0.5 * lx, 0.5 * lx}};
    layout.validate();
    return layout;
}

ElectrodeLayout quadrupole_layout(double lx, double d, double ly, double u) {
    const double us[1] = {u};
    return ladder_layout(1, lx, d, ly, us);
}

void WireLayout::validate() const {
    for (size_t i = 0; i < wires.size(); ++i)
        for (size_t j = i + 1; j < wires.size(); ++j)
            if (wires[i].x == wires[j].x && wires[i].y == wires[j].y)
                throw std::invalid_argument("wire layout: coincident wires");
}

WireLayout wires_from_layout(const ElectrodeLayout& layout, double current_per_volt,
                             int n_periods, double bias_x, double bias_y) {
    layout.validate();
    if (n_periods < 1)
        throw std::invalid_argument("wires_from_layout: n_periods must be >= 1");
    WireLayout out;
    out.bias_x = bias_x;
    out.bias_y = bias_y;
    const int half = n_periods / 2;
    for (int p = -half; p <= (n_periods - 1) - half; ++p)
        for (const auto& e : layout.electrodes)
            out.wires.push_back(
                {e.center_x + p * layout.period_lx, e.center_y, e.potential * current_per_volt});
    out.validate();
    return out;
}

ElectrodeLayout load_layout_json(const std::string& text) {
    const auto doc = nlohmann::json::parse(text);
    ElectrodeLayout layout;
    layout.period_lx = doc.at("period_lx_um").get<double>() * units::um;
    layout.ly = doc.at("ly_um").get<double>() * units::um;
    for (const auto& j : doc.at("electrodes")) {
        Electrode e;
        e.center_x = j.at("x_um").get<double>() * units::um;
        e.center_y = j.at("y_um").get<double>() * units::um;
        e.width = j.at("w_um").get<double>() * units::um;
        e.height = j.at("h_um").get<double>() * units::um;
        e.potential = j.at("potential_v").get<double>();
        layout.electrodes.push_back(e);
    }
    if (doc.contains("region_a"))
        for (const auto& r : doc.at("region_a"))
            layout.region_a.push_back(
                {r.at(0).get<double>() * units::um, r.at(1).get<double>() * units::um});
    layout.validate();
    return layout;
}

std::string layout_to_json(const ElectrodeLayout& layout) {
    layout.validate();
    nlohmann::json doc;
    doc["period_lx_um"] = layout.period_lx / units::um;
    doc["ly_um"] = layout.ly / units::um;
    doc["electrodes"] = nlohmann::json::array();
    for (const auto& e : layout.electrodes) {
        nlohmann::json j;
        j["x_um"] = e.center_x / units::um;
        j["y_um"] = e.center_y / units::um;
        j["w_um"] = e.width / units::um;
        j["h_um"] = e.height / units::um;
        j["potential_v"] = e.potential;
        doc["electrodes"].push_back(std::move(j));
    }
    doc["region_a"] = nlohmann::json::array();
    for (const auto& r : layout.region_a)
        doc["region_a"].push_back({r.lo / units::um, r.hi / units::um});
    return doc.dump(2);
}

} // namespace gradecho
