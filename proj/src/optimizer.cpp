#include "gradecho/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <stdexcept>

#include <json.hpp>

#include "gradecho/units.hpp"
#include "gradecho/materials.hpp"

namespace gradecho {

void OptimizationProblem::validate() const {
    base.validate();
    preset.validate();
    if (free.empty())
        throw std::invalid_argument("problem: at least one free parameter required");
    for (const auto& p : free) {
        if (p.targets.empty())
            throw std::invalid_argument("problem: free parameter with no targets");
        if (!std::isfinite(p.lo) || !std::isfinite(p.hi) || !(p.lo < p.hi))
            throw std::invalid_argument("problem: bounds must be finite with lo < hi");
        for (const auto& [idx, factor] : p.targets) {
            if (idx < 0 || idx >= static_cast<int>(base.electrodes.size()))
                throw std::invalid_argument("problem: target references missing electrode");
            if (factor == 0)
                throw std::invalid_argument("problem: zero target factor");
        }
    }
    if (!(span.lo < span.hi))
        throw std::invalid_argument("problem: empty span");
}

ElectrodeLayout OptimizationProblem::apply(const std::vector<double>& params) const {
    if (params.size() != free.size())
        throw std::invalid_argument("apply: wrong parameter count");
    ElectrodeLayout layout = base;
    auto set = [&](int idx, Dof dof, double v) {
        Electrode& e = layout.electrodes[idx];
        switch (dof) {
            case Dof::potential: e.potential = v; break;
            case Dof::x: e.center_x = v; break;
            case Dof::y: e.center_y = v; break;
        }
    };
    for (size_t k = 0; k < free.size(); ++k)
        for (const auto& [idx, factor] : free[k].targets)
            set(idx, free[k].dof, factor * params[k]);
    return layout;
}

double evaluate_objective(const OptimizationProblem& problem,
                          const std::vector<double>& params, const GridSpec& grid) {
    problem.validate();
    for (size_t k = 0; k < params.size(); ++k)
        if (params[k] < problem.free[k].lo || params[k] > problem.free[k].hi)
            throw std::invalid_argument("evaluate_objective: parameters outside bounds");
    const auto layout = problem.apply(params);
    const auto map = solve_potential(layout, grid);
    const auto prof = shift_profile(map, problem.preset, problem.core_half);
    return linearity_report(prof, problem.span).ratio;
}

SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                          const std::vector<double>& x0, const std::vector<double>& step,
                          long max_evals, double ftol, double xtol) {
    const size_t n = x0.size();
    if (n == 0 || step.size() != n)
        throw std::invalid_argument("nelder_mead: bad dimensions");

    struct Vertex {
        std::vector<double> x;
        double f;
    };
    std::vector<Vertex> s;
    long evals = 0;
    auto eval = [&](const std::vector<double>& x) {
        ++evals;
        return f(x);
    };

    s.push_back({x0, eval(x0)});
    for (size_t k = 0; k < n; ++k) {
        auto x = x0;
        x[k] += step[k];
        s.push_back({x, eval(x)});
    }

    SimplexResult out;
    auto order = [&] { std::stable_sort(s.begin(), s.end(), [](const Vertex& a, const Vertex& b) {
                           return a.f < b.f;
                       }); };
    order();

    while (evals < max_evals) {
        // Convergence on both the function spread and the simplex extent.
        double fspread = std::abs(s.back().f - s.front().f);
        double xspread = 0;
        for (size_t k = 0; k < n; ++k)
            for (size_t v = 1; v <= n; ++v)
                xspread = std::max(xspread, std::abs(s[v].x[k] - s[0].x[k]));
        double xscale = 0;
        for (size_t k = 0; k < n; ++k) xscale = std::max(xscale, std::abs(s[0].x[k]));
        if (fspread <= ftol * (std::abs(s[0].f) + 1e-300) && xspread <= xtol * (xscale + 1e-300)) {
            out.converged = true;
            break;
        }

        std::vector<double> centroid(n, 0.0);
        for (size_t v = 0; v < n; ++v)
            for (size_t k = 0; k < n; ++k) centroid[k] += s[v].x[k] / n;

        auto blend = [&](double t) {
            std::vector<double> x(n);
            for (size_t k = 0; k < n; ++k) x[k] = centroid[k] + t * (s.back().x[k] - centroid[k]);
            return x;
        };

        const auto xr = blend(-1.0); // reflection
        const double fr = eval(xr);
        if (fr < s.front().f) {
            const auto xe = blend(-2.0); // expansion
            const double fe = eval(xe);
            if (fe < fr)
                s.back() = {xe, fe};
            else
                s.back() = {xr, fr};
        } else if (fr < s[n - 1].f) {
            s.back() = {xr, fr};
        } else {
            const bool outside = fr < s.back().f;
            const auto xc = blend(outside ? -0.5 : 0.5);
            const double fc = eval(xc);
            if (fc < std::min(fr, s.back().f)) {
                s.back() = {xc, fc};
            } else {
                // Shrink toward the best vertex.
                for (size_t v = 1; v <= n; ++v) {
                    for (size_t k = 0; k < n; ++k)
                        s[v].x[k] = s[0].x[k] + 0.5 * (s[v].x[k] - s[0].x[k]);
                    s[v].f = eval(s[v].x);
                }
            }
        }
        order();
    }

    order();
    out.x = s.front().x;
    out.f = s.front().f;
    out.evaluations = evals;
    return out;
}

OptimizationResult optimize(const OptimizationProblem& problem, const OptimizeConfig& config) {
    problem.validate();
    if (config.algorithm != "nelder-mead")
        throw std::invalid_argument("optimize: unknown algorithm '" + config.algorithm + "'");
    if (config.restarts < 1 || config.max_evals < 4)
        throw std::invalid_argument("optimize: bad budget");

    const size_t n = problem.free.size();
    OptimizationResult result;
    result.search_ratio = std::numeric_limits<double>::infinity();

    std::mt19937_64 rng(config.seed);
    auto clamp_params = [&](std::vector<double> x) {
        for (size_t k = 0; k < n; ++k) x[k] = std::clamp(x[k], problem.free[k].lo, problem.free[k].hi);
        return x;
    };

    long global_eval = 0;
    double best_running = std::numeric_limits<double>::infinity();
    auto objective = [&](const std::vector<double>& x) {
        for (size_t k = 0; k < n; ++k)
            if (x[k] < problem.free[k].lo || x[k] > problem.free[k].hi)
                return std::numeric_limits<double>::infinity();
        const double v = evaluate_objective(problem, x, problem.search_grid);
        ++global_eval;
        best_running = std::min(best_running, v);
        result.history.push_back({global_eval, x, v, best_running});
        return v;
    };

    const long per_restart = std::max<long>(config.max_evals / config.restarts, 4);
    bool best_converged = false;
    for (int r = 0; r < config.restarts; ++r) {
        std::vector<double> x0(n), step(n);
        for (size_t k = 0; k < n; ++k) {
            const double lo = problem.free[k].lo, hi = problem.free[k].hi;
            if (r == 0) {
                // First start from the base layout's own values.
                const auto& fp = problem.free[k];
                const auto& [idx, factor] = fp.targets.front();
                const auto& e = problem.base.electrodes[idx];
                double v = fp.dof == Dof::potential ? e.potential
                          : fp.dof == Dof::x        ? e.center_x
                                                    : e.center_y;
                x0[k] = std::clamp(v / factor, lo, hi);
            } else {
                x0[k] = std::uniform_real_distribution<double>(lo, hi)(rng);
            }
            step[k] = 0.15 * (hi - lo);
            if (x0[k] + step[k] > hi) step[k] = -step[k];
        }
        const auto sr = nelder_mead(objective, clamp_params(x0), step, per_restart,
                                    config.ftol, config.xtol);
        if (sr.f < result.search_ratio ||
            (sr.f == result.search_ratio && result.best_params.empty())) {
            result.search_ratio = sr.f;
            result.best_params = sr.x;
            best_converged = sr.converged;
        }
    }

    // Refine on an intermediate grid: the coarse-grid optimum drifts slightly
    // with electrode-footprint discretization.
    if (config.polish_evals > 0 && problem.verify_grid.nx > problem.search_grid.nx) {
        GridSpec polish = problem.search_grid;
        polish.nx = std::min(2 * problem.search_grid.nx, problem.verify_grid.nx);
        auto objective_polish = [&](const std::vector<double>& x) {
            for (size_t k = 0; k < n; ++k)
                if (x[k] < problem.free[k].lo || x[k] > problem.free[k].hi)
                    return std::numeric_limits<double>::infinity();
            const double v = evaluate_objective(problem, x, polish);
            ++global_eval;
            best_running = std::min(best_running, v);
            result.history.push_back({global_eval, x, v, best_running});
            return v;
        };
        std::vector<double> step(n);
        for (size_t k = 0; k < n; ++k)
            step[k] = 0.02 * (problem.free[k].hi - problem.free[k].lo);
        const auto pr = nelder_mead(objective_polish, result.best_params, step,
                                    config.polish_evals, config.ftol, config.xtol);
        result.best_params = pr.x;
        result.search_ratio = pr.f;
        best_converged = best_converged || pr.converged;
    }

    result.evaluations = global_eval;
    result.converged = best_converged;
    result.achieved_ratio =
        evaluate_objective(problem, result.best_params, problem.verify_grid);
    return result;
}

OptimizationProblem make_ladder_problem(int classes, std::span<const double> base_potentials,
                                        std::span<const int> free_classes, double lx,
                                        double d_frac, double ly_frac, double core_frac,
                                        double span_frac, int search_nx, int verify_nx,
                                        double bound_lo, double bound_hi) {
    OptimizationProblem prob;
    prob.base = ladder_layout(classes, lx, d_frac * lx, ly_frac * lx, base_potentials);
    prob.preset = find_preset("ideal");
    for (int k : free_classes) {
        if (k < 0 || k >= classes)
            throw std::invalid_argument("make_ladder_problem: free class out of range");
        FreeParameter p;
        p.dof = Dof::potential;
        p.lo = bound_lo;
        p.hi = bound_hi;
        // ladder_layout emits class k at indices 4k..4k+3 ordered
        // (sx,sy) = (-,-),(-,+),(+,-),(+,+) with potential -sx*sy*u/2.
        p.targets = {{4 * k + 0, -0.5}, {4 * k + 1, +0.5}, {4 * k + 2, +0.5}, {4 * k + 3, -0.5}};
        prob.free.push_back(p);
    }
    prob.span = {-0.5 * span_frac * lx, 0.5 * span_frac * lx};
    prob.core_half = core_frac * ly_frac * lx;
    prob.search_grid.nx = search_nx;
    prob.verify_grid.nx = verify_nx;
    prob.validate();
    return prob;
}

std::string problem_to_json(const OptimizationProblem& problem) {
    problem.validate();
    nlohmann::json doc;
    doc["layout"] = nlohmann::json::parse(layout_to_json(problem.base));
    doc["preset"] = nlohmann::json::parse(presets_to_json({problem.preset}))[0];
    doc["free"] = nlohmann::json::array();
    for (const auto& p : problem.free) {
        nlohmann::json j;
        j["dof"] = p.dof == Dof::potential ? "potential" : (p.dof == Dof::x ? "x" : "y");
        j["lo"] = p.lo;
        j["hi"] = p.hi;
        j["targets"] = nlohmann::json::array();
        for (const auto& [idx, factor] : p.targets) j["targets"].push_back({idx, factor});
        doc["free"].push_back(std::move(j));
    }
    doc["span_um"] = {problem.span.lo / units::um, problem.span.hi / units::um};
    doc["core_half_um"] = problem.core_half / units::um;
    doc["search_nx"] = problem.search_grid.nx;
    doc["verify_nx"] = problem.verify_grid.nx;
    return doc.dump(2);
}

OptimizationProblem problem_from_json(const std::string& text) {
    const auto doc = nlohmann::json::parse(text);
    OptimizationProblem prob;
    prob.base = load_layout_json(doc.at("layout").dump());
    prob.preset = load_presets_json("[" + doc.at("preset").dump() + "]").at(0);
    for (const auto& j : doc.at("free")) {
        FreeParameter p;
        const std::string dof = j.at("dof").get<std::string>();
        p.dof = dof == "potential" ? Dof::potential : (dof == "x" ? Dof::x : Dof::y);
        p.lo = j.at("lo").get<double>();
        p.hi = j.at("hi").get<double>();
        for (const auto& t : j.at("targets"))
            p.targets.emplace_back(t.at(0).get<int>(), t.at(1).get<double>());
        prob.free.push_back(std::move(p));
    }
    prob.span = {doc.at("span_um").at(0).get<double>() * units::um,
                 doc.at("span_um").at(1).get<double>() * units::um};
    prob.core_half = doc.at("core_half_um").get<double>() * units::um;
    prob.search_grid.nx = doc.value("search_nx", 128);
    prob.verify_grid.nx = doc.value("verify_nx", 512);
    prob.validate();
    return prob;
}

std::string result_to_json(const OptimizationResult& result) {
    nlohmann::json doc;
    doc["best_params"] = result.best_params;
    doc["achieved_ratio"] = result.achieved_ratio;
    doc["search_ratio"] = result.search_ratio;
    doc["evaluations"] = result.evaluations;
    doc["converged"] = result.converged;
    return doc.dump(2);
}

std::string history_to_csv(const OptimizationResult& result) {
    std::string out = "eval_index";
    if (!result.history.empty())
        for (size_t k = 0; k < result.history.front().params.size(); ++k)
            out += ",p" + std::to_string(k);
    out += ",ratio,best\n";
    char buf[64];
    for (const auto& h : result.history) {
        out += std::to_string(h.eval);
        for (double p : h.params) {
            std::snprintf(buf, sizeof(buf), ",%.17g", p);
            out += buf;
        }
        std::snprintf(buf, sizeof(buf), ",%.17g,%.17g\n", h.ratio, h.best);
        out += buf;
    }
    return out;
}

} // namespace gradecho
