// Finite-difference Laplace solver for periodic electrode arrays, plus the
// analytic line-current field for the magnetic variant.
//
// Discretization: 5-point stencil on an nx x ny node grid covering one period
// [-P/2, P/2) x [-ly/2, ly/2], periodic in x, insulating (zero normal
// derivative) at the y boundaries outside electrodes, Dirichlet on electrode
// nodes. Successive over-relaxation until the relative residual drops below
// the requested tolerance.

#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

#include "gradecho/layouts.hpp"
#include "gradecho/materials.hpp"

namespace gradecho {

struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GridSpec {
    int nx = 256; // nodes per period along x
    int ny = 0;   // 0: derive from the aspect ratio, forced odd
    double tolerance = 1e-10;
    long max_sweeps = 0; // 0: automatic
};

struct FieldMap {
    FieldKind kind = FieldKind::electric;
    int nx = 0, ny = 0;
    double hx = 0, hy = 0;
    double x0 = 0, y0 = 0; // node (0,0) position
    std::vector<double> phi;          // ny*nx, row-major
    std::vector<double> ex, ey;       // -grad(phi), central differences
    std::vector<uint8_t> fixed;       // Dirichlet mask
    long sweeps = 0;
    double relative_residual = 0;

    double x_at(int i) const { return x0 + i * hx; }
    double y_at(int j) const { return y0 + j * hy; }
    double at(const std::vector<double>& f, int i, int j) const { return f[j * nx + i]; }
    int row_at_y(double y) const;

    FieldMap& operator+=(const FieldMap& other); // superposition helper
};

FieldMap solve_potential(const ElectrodeLayout& layout, const GridSpec& grid);

// Residual diagnostics on the free nodes (relative to the stencil diagonal
// and the solution norm, same measure the solver converges on).
double relative_residual_norm(const FieldMap& map);
double max_node_residual(const FieldMap& map);

// Dirichlet-ring solve on [x0,x1]x[y0,y1] with boundary values from f;
// validation path for harmonic reference solutions.
FieldMap solve_dirichlet_rect(int nx, int ny, double x0, double x1, double y0, double y1,
                              const std::function<double(double, double)>& boundary,
                              double tolerance = 1e-12);

// Maximum |E| on the two boundary lines x = interval ends, restricted to
// |y| <= core_half (keeps clear of the electrode corner singularities).
double max_field(const FieldMap& map, const Interval& region, double core_half);

struct FieldVector {
    double x = 0;
    double y = 0;
};

// Static field of the line currents plus the bias field (T). Throws when
// evaluated on a wire position.
FieldVector wire_field(const WireLayout& layout, double x, double y);

// Shift-relevant scalar for a magnetically driven medium: change of |B|
// relative to the bias field alone.
double wire_field_magnitude_change(const WireLayout& layout, double x, double y);

std::string field_map_to_csv(const FieldMap& map);

} // namespace gradecho
