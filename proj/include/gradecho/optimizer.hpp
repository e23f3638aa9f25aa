// Derivative-free minimization of the shift-profile nonlinearity ratio over
// free electrode parameters: Nelder-Mead simplex with seeded random restarts.
// The field solver is treated as a black box.

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "gradecho/field_solver.hpp"
#include "gradecho/layouts.hpp"
#include "gradecho/profile.hpp"

namespace gradecho {

enum class Dof { potential, x, y };

// One scalar degree of freedom, fanned out to one or more electrodes with a
// per-electrode factor. A mirror-symmetric potential class is a single
// parameter with factors +-1/2 on its four electrodes.
struct FreeParameter {
    Dof dof = Dof::potential;
    double lo = 0;
    double hi = 0;
    std::vector<std::pair<int, double>> targets; // (electrode index, factor)
};

struct OptimizationProblem {
    ElectrodeLayout base;
    MaterialPreset preset;
    std::vector<FreeParameter> free;
    Interval span;          // fit interval for the linearity report
    double core_half = 0;   // transverse averaging band, 0 = axis row only
    GridSpec search_grid;   // coarse grid used during the search
    GridSpec verify_grid;   // fine grid for the final evaluation
    void validate() const;
    ElectrodeLayout apply(const std::vector<double>& params) const;
};

double evaluate_objective(const OptimizationProblem& problem,
                          const std::vector<double>& params, const GridSpec& grid);

struct HistoryEntry {
    long eval = 0;
    std::vector<double> params;
    double ratio = 0;
    double best = 0; // best-so-far, non-increasing
};

struct OptimizationResult {
    std::vector<double> best_params;
    double achieved_ratio = 0; // recomputed on the verify grid
    double search_ratio = 0;   // best value seen on the search grid
    long evaluations = 0;
    bool converged = false;
    std::vector<HistoryEntry> history;
};

struct OptimizeConfig {
    std::string algorithm = "nelder-mead";
    int restarts = 8;
    long max_evals = 2000; // total budget across restarts
    uint64_t seed = 1;
    double ftol = 1e-4; // relative simplex spread for convergence
    double xtol = 1e-4;
    // Refinement pass on an intermediate grid (between search and verify)
    // before the final verify-grid evaluation; 0 disables.
    long polish_evals = 60;
};

OptimizationResult optimize(const OptimizationProblem& problem, const OptimizeConfig& config);

// Potentials-only problem over a ladder_layout family: one parameter per
// entry of free_classes (0-based class index), fanned out to the class's four
// electrodes, with the remaining classes held at base_potentials. Lengths are
// expressed through lx; the span and core band follow the region-A
// conventions (full region, |y| <= core_frac * ly).
OptimizationProblem make_ladder_problem(int classes, std::span<const double> base_potentials,
                                        std::span<const int> free_classes, double lx = 1.0,
                                        double d_frac = 0.05, double ly_frac = 0.75,
                                        double core_frac = 0.1, double span_frac = 1.0,
                                        int search_nx = 128, int verify_nx = 512,
                                        double bound_lo = 0.02, double bound_hi = 8.0);

std::string problem_to_json(const OptimizationProblem& problem);
OptimizationProblem problem_from_json(const std::string& text);
std::string result_to_json(const OptimizationResult& result);

// Standalone simplex core, also used for synthetic objectives in tests.
struct SimplexResult {
    std::vector<double> x;
    double f = 0;
    long evaluations = 0;
    bool converged = false;
};

SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                          const std::vector<double>& x0, const std::vector<double>& step,
                          long max_evals, double ftol = 1e-10, double xtol = 1e-10);

std::string history_to_csv(const OptimizationResult& result);

} // namespace gradecho
