// Periodic 2D electrode and wire geometries that generate the control field.
// One period spans [-period_lx/2, period_lx/2] along x; the storage region A
// sits in the middle of the period, region B around the wrap point.

#pragma once

#include <span>
#include <string>
#include <vector>

namespace gradecho {

struct Electrode {
    double center_x = 0;  // m
    double center_y = 0;  // m
    double width = 0;     // m
    double height = 0;    // m
    double potential = 0; // V
};

struct Interval {
    double lo = 0;
    double hi = 0;
    double length() const { return hi - lo; }
    double mid() const { return 0.5 * (lo + hi); }
};

struct ElectrodeLayout {
    double period_lx = 0; // m
    double ly = 0;        // m
    std::vector<Electrode> electrodes;
    std::vector<Interval> region_a;
    void validate() const;
    ElectrodeLayout scaled_potentials(double factor) const;
};

// Mirror-symmetric electrode ladder: `classes` potential magnitudes per
// half-period, electrode columns evenly spaced at x = +-k*lx/(classes+1) on
// both surfaces, square d x d cross-sections flush with y = +-ly/2. Signs
// make the potential odd in x and in y, so the induced shift is odd across
// region A ([-lx/2, lx/2], half of the 2*lx period) with magnitudes applied
// outward from the region center.
//
// classes = 1 is the four-electrode quadrupole unit (columns on the region
// boundaries). classes = 3 is the eight-electrodes-per-region configuration:
// u[1] sits on the region-A boundary, so |E| there is approximately u[1]/ly.
// classes = 5 gives twelve electrodes per region.
ElectrodeLayout ladder_layout(int classes, double lx, double d, double ly,
                              std::span<const double> potentials);

ElectrodeLayout quadrupole_layout(double lx, double d, double ly, double u);

struct Wire {
    double x = 0;       // m
    double y = 0;       // m
    double current = 0; // A, positive out of the plane
};

struct WireLayout {
    std::vector<Wire> wires;
    double bias_x = 0; // T
    double bias_y = 0; // T
    void validate() const;
};

// Magnetic analogue of an electrode layout: one line current per electrode,
// current = potential * current_per_volt, replicated over n_periods periods
// centered on the original one. The current array reproduces the
// electrostatic field pattern rotated by 90 degrees, so with a bias field
// along x the |B| change along the axis mirrors the electrode E_y profile.
WireLayout wires_from_layout(const ElectrodeLayout& layout, double current_per_volt,
                             int n_periods, double bias_x = 0, double bias_y = 0);

// JSON layout files carry explicit micrometer suffixes.
ElectrodeLayout load_layout_json(const std::string& text);
std::string layout_to_json(const ElectrodeLayout& layout);

} // namespace gradecho
