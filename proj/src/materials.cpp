#include "gradecho/materials.hpp"
#include "gradecho/units.hpp"

#include <cmath>
#include <json.hpp>

namespace gradecho {

void MaterialPreset::validate() const {
    if (name.empty())
        throw std::invalid_argument("preset: empty name");
    if (!(lambda_vac > 0))
        throw std::invalid_argument("preset " + name + ": lambda_vac must be > 0");
    if (!(refractive_index >= 1))
        throw std::invalid_argument("preset " + name + ": refractive_index must be >= 1");
    if (!(t2 > 0))
        throw std::invalid_argument("preset " + name + ": t2 must be > 0");
    if (!(alpha >= 0))
        throw std::invalid_argument("preset " + name + ": alpha must be >= 0");
    const bool stark = stark_coefficient != 0;
    const bool zeeman = zeeman_coefficient != 0;
    if (stark == zeeman)
        throw std::invalid_argument("preset " + name +
                                    ": exactly one of stark/zeeman coefficient must be nonzero");
}

double shift_from_field(const MaterialPreset& preset, double field, FieldKind kind) {
    preset.validate();
    if (!std::isfinite(field))
        throw std::invalid_argument("shift_from_field: field must be finite");
    if (kind != preset.field_kind())
        throw std::invalid_argument("shift_from_field: field kind does not match preset '" +
                                    preset.name + "'");
    return preset.coefficient() * field;
}

double optical_wavevector(const MaterialPreset& preset) {
    preset.validate();
    return 2.0 * units::pi * preset.refractive_index / preset.lambda_vac;
}

const std::vector<MaterialPreset>& builtin_presets() {
    static const std::vector<MaterialPreset> presets = [] {
        std::vector<MaterialPreset> v;
        // Pr3+:Y2SiO5, 1D2(1)-3H4(1) site-1 transition; zero-field T2.
        v.push_back({"pr-yso", 605.977 * units::nm, 1.8,
                     units::khz_per_v_cm_to_si(111.0), 0.0, 111.0 * units::us, 1000.0});
        // Er3+:Y2SiO5, 4I15/2(1)-4I13/2(1) telecom transition; T2 at 70 kG.
        v.push_back({"er-yso", 1536.0 * units::nm, 1.8, 0.0,
                     units::mhz_per_gauss_to_si(1.5), 6.4e-3, 1000.0});
        // Unit-normalized medium for tests: k0 = 1 rad/m, 1 Hz per V/m.
        v.push_back({"ideal", 2.0 * units::pi, 1.0, 1.0, 0.0, 1.0, 1.0});
        for (const auto& p : v) p.validate();
        return v;
    }();
    return presets;
}

const MaterialPreset& find_preset(const std::string& name) {
    for (const auto& p : builtin_presets())
        if (p.name == name) return p;
    throw std::invalid_argument("unknown preset '" + name + "'");
}

std::vector<MaterialPreset> load_presets_json(const std::string& text) {
    const auto doc = nlohmann::json::parse(text);
    std::vector<MaterialPreset> out;
    for (const auto& j : doc) {
        MaterialPreset p;
        p.name = j.at("name").get<std::string>();
        p.lambda_vac = j.at("lambda_vac_nm").get<double>() * units::nm;
        p.refractive_index = j.at("refractive_index").get<double>();
        p.stark_coefficient =
            units::khz_per_v_cm_to_si(j.value("stark_coefficient_khz_per_v_cm", 0.0));
        p.zeeman_coefficient =
            units::mhz_per_gauss_to_si(j.value("zeeman_coefficient_mhz_per_gauss", 0.0));
        p.t2 = j.at("t2_us").get<double>() * units::us;
        p.alpha = j.at("alpha_per_m").get<double>();
        p.validate();
        out.push_back(std::move(p));
    }
    return out;
}

std::string presets_to_json(const std::vector<MaterialPreset>& presets) {
    nlohmann::json doc = nlohmann::json::array();
    for (const auto& p : presets) {
        p.validate();
        nlohmann::json j;
        j["name"] = p.name;
        j["lambda_vac_nm"] = p.lambda_vac / units::nm;
        j["refractive_index"] = p.refractive_index;
        j["stark_coefficient_khz_per_v_cm"] = p.stark_coefficient / 10.0;
        j["zeeman_coefficient_mhz_per_gauss"] = p.zeeman_coefficient / 1e10;
        j["t2_us"] = p.t2 / units::us;
        j["alpha_per_m"] = p.alpha;
        doc.push_back(std::move(j));
    }
    return doc.dump(2);
}

} // namespace gradecho
