#include "gradecho/field_solver.hpp"
#include "gradecho/units.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace gradecho {

namespace {

struct GridProblem {
    int nx = 0, ny = 0;
    double hx = 0, hy = 0;
    bool periodic_x = false;
    std::vector<double> phi;
    std::vector<uint8_t> fixed;

    int idx(int i, int j) const { return j * nx + i; }
    int left(int i) const { return i > 0 ? i - 1 : (periodic_x ? nx - 1 : -1); }
    int right(int i) const { return i < nx - 1 ? i + 1 : (periodic_x ? 0 : -1); }
};

// Neighbor-weighted sum for the 5-point stencil; Neumann rows mirror the
// interior neighbor across the boundary.
inline double stencil_sum(const GridProblem& g, int i, int j, double ax, double ay) {
    const double w = g.phi[g.idx(g.left(i), j)];
    const double e = g.phi[g.idx(g.right(i), j)];
    double s, n;
    if (j == 0) {
        n = g.phi[g.idx(i, j + 1)];
        s = n;
    } else if (j == g.ny - 1) {
        s = g.phi[g.idx(i, j - 1)];
        n = s;
    } else {
        s = g.phi[g.idx(i, j - 1)];
        n = g.phi[g.idx(i, j + 1)];
    }
    return (w + e) * ax + (s + n) * ay;
}

struct SolveStats {
    long sweeps = 0;
    double relative_residual = 0;
};

double residual_norm(const GridProblem& g, double ax, double ay, double diag) {
    double rr = 0, pp = 0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double v = g.phi[g.idx(i, j)];
            pp += v * v;
            if (g.fixed[g.idx(i, j)]) continue;
            const double r = stencil_sum(g, i, j, ax, ay) - diag * v;
            rr += r * r;
        }
    if (pp == 0) return 0;
    return std::sqrt(rr) / (diag * std::sqrt(pp));
}

SolveStats sor_solve(GridProblem& g, double tolerance, long max_sweeps) {
    const double ax = 1.0 / (g.hx * g.hx);
    const double ay = 1.0 / (g.hy * g.hy);
    const double diag = 2.0 * (ax + ay);
    const int n = std::max(g.nx, g.ny);
    const double omega = std::clamp(2.0 / (1.0 + std::sin(units::pi / n)), 1.0, 1.995);
    if (max_sweeps <= 0) max_sweeps = 400L * n + 2000;

    SolveStats stats;
    stats.relative_residual = residual_norm(g, ax, ay, diag);
    if (stats.relative_residual <= tolerance) return stats;

    const long check_every = 16;
    for (long sweep = 1; sweep <= max_sweeps; ++sweep) {
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                const int id = g.idx(i, j);
                if (g.fixed[id]) continue;
                const double target = stencil_sum(g, i, j, ax, ay) / diag;
                g.phi[id] += omega * (target - g.phi[id]);
            }
        if (sweep % check_every == 0 || sweep == max_sweeps) {
            stats.sweeps = sweep;
            stats.relative_residual = residual_norm(g, ax, ay, diag);
            if (stats.relative_residual <= tolerance) return stats;
        }
    }
    throw SolverError("potential solve did not converge: relative residual " +
                      std::to_string(stats.relative_residual) + " after " +
                      std::to_string(stats.sweeps) + " sweeps");
}

void compute_fields(FieldMap& map) {
    const int nx = map.nx, ny = map.ny;
    map.ex.assign(map.phi.size(), 0.0);
    map.ey.assign(map.phi.size(), 0.0);
    auto phi = [&](int i, int j) { return map.phi[j * nx + i]; };
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const int il = i > 0 ? i - 1 : nx - 1;
            const int ir = i < nx - 1 ? i + 1 : 0;
            map.ex[j * nx + i] = -(phi(ir, j) - phi(il, j)) / (2.0 * map.hx);
            double dy;
            if (j == 0)
                dy = (-3.0 * phi(i, 0) + 4.0 * phi(i, 1) - phi(i, 2)) / (2.0 * map.hy);
            else if (j == ny - 1)
                dy = (3.0 * phi(i, j) - 4.0 * phi(i, j - 1) + phi(i, j - 2)) / (2.0 * map.hy);
            else
                dy = (phi(i, j + 1) - phi(i, j - 1)) / (2.0 * map.hy);
            map.ey[j * nx + i] = -dy;
        }
}

GridProblem problem_from_map(const FieldMap& map, bool periodic_x) {
    GridProblem g;
    g.nx = map.nx;
    g.ny = map.ny;
    g.hx = map.hx;
    g.hy = map.hy;
    g.periodic_x = periodic_x;
    g.phi = map.phi;
    g.fixed = map.fixed;
    return g;
}

} // namespace

int FieldMap::row_at_y(double y) const {
    const int j = static_cast<int>(std::lround((y - y0) / hy));
    if (j < 0 || j >= ny) throw std::out_of_range("row_at_y: outside the grid");
    return j;
}

FieldMap& FieldMap::operator+=(const FieldMap& other) {
    if (nx != other.nx || ny != other.ny || hx != other.hx || hy != other.hy)
        throw std::invalid_argument("FieldMap: superposition requires identical grids");
    for (size_t k = 0; k < phi.size(); ++k) {
        phi[k] += other.phi[k];
        ex[k] += other.ex[k];
        ey[k] += other.ey[k];
    }
    return *this;
}

FieldMap solve_potential(const ElectrodeLayout& layout, const GridSpec& grid) {
    layout.validate();
    if (grid.nx < 8) throw std::invalid_argument("solve_potential: nx too small");

    FieldMap map;
    map.kind = FieldKind::electric;
    map.nx = grid.nx;
    const double period = layout.period_lx;
    if (grid.ny > 0) {
        map.ny = grid.ny;
    } else {
        int ny = static_cast<int>(std::lround(grid.nx * layout.ly / period));
        if (ny % 2 == 0) ++ny; // keep a node row on the y = 0 axis
        map.ny = std::max(ny, 9);
    }
    map.hx = period / map.nx;
    map.hy = layout.ly / (map.ny - 1);
    map.x0 = -0.5 * period;
    map.y0 = -0.5 * layout.ly;
    map.phi.assign(static_cast<size_t>(map.nx) * map.ny, 0.0);
    map.fixed.assign(map.phi.size(), 0);

    // Mark electrode nodes. x distances wrap around the period.
    double mean_potential = 0;
    long n_fixed = 0;
    for (const auto& e : layout.electrodes) {
        int count_x = 0, count_y = 0;
        for (int i = 0; i < map.nx; ++i) {
            double dx = std::remainder(map.x_at(i) - e.center_x, period);
            if (std::abs(dx) <= 0.5 * e.width + 1e-12 * period) ++count_x;
        }
        for (int j = 0; j < map.ny; ++j)
            if (std::abs(map.y_at(j) - e.center_y) <= 0.5 * e.height + 1e-12 * layout.ly)
                ++count_y;
        if (count_x < 2 || count_y < 2)
            throw std::invalid_argument(
                "solve_potential: grid too coarse, electrodes need >= 2 nodes per side");
        for (int j = 0; j < map.ny; ++j) {
            if (std::abs(map.y_at(j) - e.center_y) > 0.5 * e.height + 1e-12 * layout.ly)
                continue;
            for (int i = 0; i < map.nx; ++i) {
                double dx = std::remainder(map.x_at(i) - e.center_x, period);
                if (std::abs(dx) > 0.5 * e.width + 1e-12 * period) continue;
                const int id = j * map.nx + i;
                map.phi[id] = e.potential;
                map.fixed[id] = 1;
                mean_potential += e.potential;
                ++n_fixed;
            }
        }
    }
    if (n_fixed > 0) {
        mean_potential /= n_fixed;
        for (size_t k = 0; k < map.phi.size(); ++k)
            if (!map.fixed[k]) map.phi[k] = mean_potential;
    }

    GridProblem g = problem_from_map(map, true);
    const auto stats = sor_solve(g, grid.tolerance, grid.max_sweeps);
    map.phi = std::move(g.phi);
    map.sweeps = stats.sweeps;
    map.relative_residual = stats.relative_residual;
    compute_fields(map);
    return map;
}

double relative_residual_norm(const FieldMap& map) {
    GridProblem g = problem_from_map(map, true);
    const double ax = 1.0 / (g.hx * g.hx), ay = 1.0 / (g.hy * g.hy);
    return residual_norm(g, ax, ay, 2.0 * (ax + ay));
}

double max_node_residual(const FieldMap& map) {
    GridProblem g = problem_from_map(map, true);
    const double ax = 1.0 / (g.hx * g.hx), ay = 1.0 / (g.hy * g.hy);
    const double diag = 2.0 * (ax + ay);
    double scale = 0;
    for (double v : g.phi) scale = std::max(scale, std::abs(v));
    if (scale == 0) return 0;
    double worst = 0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            if (g.fixed[g.idx(i, j)]) continue;
            const double r = stencil_sum(g, i, j, ax, ay) - diag * g.phi[g.idx(i, j)];
            worst = std::max(worst, std::abs(r) / (diag * scale));
        }
    return worst;
}

FieldMap solve_dirichlet_rect(int nx, int ny, double x0, double x1, double y0, double y1,
                              const std::function<double(double, double)>& boundary,
                              double tolerance) {
    FieldMap map;
    map.kind = FieldKind::electric;
    map.nx = nx;
    map.ny = ny;
    map.hx = (x1 - x0) / (nx - 1);
    map.hy = (y1 - y0) / (ny - 1);
    map.x0 = x0;
    map.y0 = y0;
    map.phi.assign(static_cast<size_t>(nx) * ny, 0.0);
    map.fixed.assign(map.phi.size(), 0);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            if (i != 0 && i != nx - 1 && j != 0 && j != ny - 1) continue;
            const int id = j * nx + i;
            map.phi[id] = boundary(map.x_at(i), map.y_at(j));
            map.fixed[id] = 1;
        }
    GridProblem g = problem_from_map(map, false);
    const auto stats = sor_solve(g, tolerance, 0);
    map.phi = std::move(g.phi);
    map.sweeps = stats.sweeps;
    map.relative_residual = stats.relative_residual;
    compute_fields(map);
    return map;
}

double max_field(const FieldMap& map, const Interval& region, double core_half) {
    double best = 0;
    for (double xb : {region.lo, region.hi}) {
        const int i = static_cast<int>(std::lround((xb - map.x0) / map.hx));
        if (i < 0 || i >= map.nx) throw std::out_of_range("max_field: region outside grid");
        for (int j = 0; j < map.ny; ++j) {
            if (std::abs(map.y_at(j)) > core_half) continue;
            const double e = std::hypot(map.at(map.ex, i, j), map.at(map.ey, i, j));
            best = std::max(best, e);
        }
    }
    return best;
}

FieldVector wire_field(const WireLayout& layout, double x, double y) {
    layout.validate();
    FieldVector b{layout.bias_x, layout.bias_y};
    for (const auto& w : layout.wires) {
        const double dx = x - w.x;
        const double dy = y - w.y;
        const double r2 = dx * dx + dy * dy;
        if (r2 == 0)
            throw std::invalid_argument("wire_field: evaluation on a wire position");
        const double c = units::mu0 * w.current / (2.0 * units::pi * r2);
        b.x += -c * dy;
        b.y += c * dx;
    }
    return b;
}

double wire_field_magnitude_change(const WireLayout& layout, double x, double y) {
    const FieldVector total = wire_field(layout, x, y);
    const double bias = std::hypot(layout.bias_x, layout.bias_y);
    return std::hypot(total.x, total.y) - bias;
}

std::string field_map_to_csv(const FieldMap& map) {
    std::string out = "x,y,phi,ex,ey\n";
    char line[192];
    for (int j = 0; j < map.ny; ++j)
        for (int i = 0; i < map.nx; ++i) {
            std::snprintf(line, sizeof(line), "%.17g,%.17g,%.17g,%.17g,%.17g\n", map.x_at(i),
                          map.y_at(j), map.at(map.phi, i, j), map.at(map.ex, i, j),
                          map.at(map.ey, i, j));
            out += line;
        }
    return out;
}

} // namespace gradecho
