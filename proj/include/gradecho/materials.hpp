// Storage-medium presets: optical constants plus the linear field-to-shift
// response (Stark or Zeeman, one per medium).

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace gradecho {

enum class FieldKind { electric, magnetic };

struct MaterialPreset {
    std::string name;
    double lambda_vac = 0;         // vacuum wavelength (m)
    double refractive_index = 1;   // n
    double stark_coefficient = 0;  // Hz per (V/m), zero if magnetically driven
    double zeeman_coefficient = 0; // Hz per tesla, zero if electrically driven
    double t2 = 0;                 // phase relaxation time (s)
    double alpha = 0;              // resonant absorption coefficient (1/m)

    FieldKind field_kind() const {
        return stark_coefficient != 0 ? FieldKind::electric : FieldKind::magnetic;
    }
    double coefficient() const {
        return stark_coefficient != 0 ? stark_coefficient : zeeman_coefficient;
    }
    void validate() const;
};

// Signed frequency shift (Hz) induced by a field of the given kind.
// Rejects a field kind that does not match the preset's nonzero coefficient.
double shift_from_field(const MaterialPreset& preset, double field, FieldKind kind);

// k0 = 2 pi n / lambda (rad/m).
double optical_wavevector(const MaterialPreset& preset);

// Built-in registry: pr-yso, er-yso and a unit-normalized "ideal" medium.
// The absorption coefficients are configurable placeholders (no measured
// value is bundled); 1000 1/m by default.
const std::vector<MaterialPreset>& builtin_presets();
const MaterialPreset& find_preset(const std::string& name);

// JSON registry, array of objects with fields name, lambda_vac_nm,
// refractive_index, stark_coefficient_khz_per_v_cm,
// zeeman_coefficient_mhz_per_gauss, t2_us, alpha_per_m.
std::vector<MaterialPreset> load_presets_json(const std::string& text);
std::string presets_to_json(const std::vector<MaterialPreset>& presets);

} // namespace gradecho
