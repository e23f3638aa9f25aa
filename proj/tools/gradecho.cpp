// Command-line front end: loads presets/layouts/configs, runs the pipelines
// and writes plot-ready CSV plus JSON summaries.
//
// Exit codes: 0 ok, 1 usage or malformed config, 2 numeric check failure,
// 3 solver non-convergence.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "gradecho/ensemble.hpp"
#include "gradecho/field_solver.hpp"
#include "gradecho/layouts.hpp"
#include "gradecho/materials.hpp"
#include "gradecho/optimizer.hpp"
#include "gradecho/profile.hpp"
#include "gradecho/propagation.hpp"
#include "gradecho/protocol.hpp"
#include "gradecho/reproduce.hpp"
#include "gradecho/units.hpp"

using namespace gradecho;

namespace {

// Quantity strings carry an optional unit suffix ("1mm", "1.11GHz", "2.7us",
// "10V"); bare numbers are SI base units.
double parse_quantity(const std::string& text, const std::string& kind) {
    size_t pos = 0;
    double value = 0;
    try {
        value = std::stod(text, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument(kind + ": cannot parse '" + text + "'");
    }
    std::string suffix = text.substr(pos);
    while (!suffix.empty() && suffix.front() == ' ') suffix.erase(suffix.begin());
    if (suffix.empty()) return value;
    static const std::map<std::string, double> scale = {
        {"m", 1.0},        {"mm", units::mm},  {"um", units::um},  {"µm", units::um},
        {"nm", units::nm}, {"s", 1.0},         {"ms", 1e-3},       {"us", units::us},
        {"µs", units::us}, {"ns", units::ns}, {"Hz", 1.0},    {"kHz", units::khz},
        {"MHz", units::mhz}, {"GHz", units::ghz}, {"V", 1.0},      {"kV", 1e3},
        {"G", units::gauss}, {"T", 1.0},        {"V/cm", units::v_per_cm}, {"V/m", 1.0}};
    const auto it = scale.find(suffix);
    if (it == scale.end())
        throw std::invalid_argument(kind + ": unknown unit suffix '" + suffix + "'");
    return value * it->second;
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::invalid_argument("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::invalid_argument("cannot write '" + path.string() + "'");
    f << content;
}

std::filesystem::path out_dir(const std::string& flag) {
    if (!flag.empty()) return flag;
    if (const char* env = std::getenv("GRADECHO_OUTDIR")) return env;
    return "gradecho-out";
}

MaterialPreset preset_from(const std::string& name, const std::string& file) {
    if (!file.empty()) {
        for (const auto& p : load_presets_json(read_file(file)))
            if (p.name == name) return p;
        throw std::invalid_argument("preset '" + name + "' not found in " + file);
    }
    return find_preset(name);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Design and simulation toolkit for field-controlled backward retrieval in "
                 "optical quantum memories"};
    app.require_subcommand(1);

    std::string out_flag;
    app.add_option("--out", out_flag,
                   "output directory (default $GRADECHO_OUTDIR or ./gradecho-out)");

    std::string preset_name = "pr-yso", preset_file;
    auto add_preset_opts = [&](CLI::App* cmd) {
        cmd->add_option("--preset", preset_name, "material preset name");
        cmd->add_option("--presets-file", preset_file, "JSON preset registry");
    };

    // timing
    auto* timing = app.add_subcommand("timing", "reversal time, subradiance times, tolerances");
    std::string lx_s = "1mm", dnu_s = "1.11GHz";
    int m_max = 10;
    add_preset_opts(timing);
    timing->add_option("--lx", lx_s, "sample (region A) length, e.g. 1mm");
    timing->add_option("--delta-nu", dnu_s, "edge frequency shift, e.g. 1.11GHz");
    timing->add_option("--m-max", m_max, "number of subradiance times");

    // bound
    auto* bound =
        app.add_subcommand("bound", "allowed nonlinearity ratio (quarter rule / target efficiency)");
    double eps = 0.9, n_override = 0, lx_over_lambda = 0;
    std::string bound_lx_s;
    add_preset_opts(bound);
    bound->add_option("--eps", eps, "required efficiency in (0,1)");
    bound->add_option("--lx-over-lambda", lx_over_lambda, "dimensionless sample length Lx/lambda");
    bound->add_option("--n", n_override, "refractive index for --lx-over-lambda mode");
    bound->add_option("--lx", bound_lx_s, "sample length (preset mode)");

    // field
    auto* field = app.add_subcommand("field", "solve a layout and report shift-profile linearity");
    std::string layout_file, family;
    int grid_nx = 256;
    double core_frac = 0.1, span_frac = 1.0;
    add_preset_opts(field);
    field->add_option("--layout", layout_file, "layout JSON file");
    field->add_option("--family", family, "built-in family: quadrupole | ladder8 | ladder12");
    field->add_option("--grid", grid_nx, "cells per period");
    field->add_option("--core-frac", core_frac,
                      "transverse averaging band, fraction of Ly (0: axis row)");
    field->add_option("--span-frac", span_frac, "fit span, fraction of region A");

    // optimize
    auto* opt =
        app.add_subcommand("optimize", "minimize the nonlinearity ratio over electrode potentials");
    std::string problem_file, opt_family = "ladder8";
    int restarts = 8;
    long max_evals = 1200;
    uint64_t seed = 1;
    opt->add_option("--problem", problem_file, "optimization problem JSON");
    opt->add_option("--family", opt_family, "built-in family: ladder8 | ladder12");
    opt->add_option("--restarts", restarts, "seeded random restarts");
    opt->add_option("--max-evals", max_evals, "total evaluation budget");
    opt->add_option("--seed", seed, "RNG seed");

    // ensemble
    auto* ens = app.add_subcommand("ensemble", "phased-array protocol run");
    std::string ens_lx_s = "1mm", ens_dnu_s = "1.11GHz", profile_kind = "ideal-linear";
    std::string profile_file, residual_kind = "none";
    int n_atoms = 10000;
    double alpha_l = 0, t2_us = 0, residual_rms = 0;
    bool reverse_readout = false;
    uint64_t ens_seed = 1;
    add_preset_opts(ens);
    ens->add_option("--profile", profile_kind, "ideal-linear | csv");
    ens->add_option("--profile-file", profile_file,
                    "shift profile CSV (x,shift_hz) for --profile csv");
    ens->add_option("--lx", ens_lx_s, "sample length");
    ens->add_option("--delta-nu", ens_dnu_s, "edge shift");
    ens->add_option("--n", n_atoms, "number of atoms");
    ens->add_option("--alpha-l", alpha_l, "optical depth for the stored amplitude profile");
    ens->add_option("--t2-us", t2_us, "phase relaxation time (us), 0 = none");
    ens->add_option("--residual", residual_kind, "none | two-point | gaussian");
    ens->add_option("--residual-rms", residual_rms, "residual RMS (Hz)");
    ens->add_flag("--reverse-readout", reverse_readout, "forward-retrieval variant");
    ens->add_option("--seed", ens_seed, "RNG seed");
    std::string ens_config;
    ens->add_option("--config", ens_config, "protocol config JSON (overrides the flags)");

    // propagate
    auto* prop = app.add_subcommand("propagate", "1D storage/retrieval with re-absorption");
    double p_alpha = 2.0;
    std::string mode_s = "backward";
    int n_classes = 256, p_nx = 144;
    double dt_factor = 0.04, pulse_sigma = 12.0;
    std::string sweep_s;
    prop->add_option("--alpha-l", p_alpha, "optical depth");
    prop->add_option("--mode", mode_s, "forward | backward | ramp");
    prop->add_option("--classes", n_classes, "detuning classes");
    prop->add_option("--nx", p_nx, "space steps");
    prop->add_option("--dt-factor", dt_factor, "time step in units of the line response");
    prop->add_option("--pulse-sigma", pulse_sigma, "pulse sigma in units of the line response");
    prop->add_option("--sweep", sweep_s, "comma-separated alpha_l grid (runs both modes)");
    std::string prop_config;
    prop->add_option("--config", prop_config, "propagation config JSON (overrides the flags)");

    // reproduce-paper
    auto* repro =
        app.add_subcommand("reproduce-paper", "run the claim-by-claim reproduction table");
    uint64_t repro_seed = 1;
    bool quick = false;
    repro->add_option("--seed", repro_seed, "RNG seed");
    repro->add_flag("--quick", quick, "reduced budgets (development aid)");

    for (auto* sub : app.get_subcommands({})) sub->fallthrough();
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1; // --help is a clean exit, anything else is usage
    }
    const auto dir = out_dir(out_flag);

    try {
        if (*timing) {
            const auto preset = preset_from(preset_name, preset_file);
            const double lx = parse_quantity(lx_s, "--lx");
            const double dnu = parse_quantity(dnu_s, "--delta-nu");
            const auto plan = make_plan(preset, lx, dnu, m_max);
            std::printf("t_rev = %.6g us\n", plan.t_rev * 1e6);
            std::printf("subradiance interval = %.6g ns\n", plan.t_m[0] * 1e9);
            std::printf("switching tolerance = %.6g ns\n", plan.switching_tolerance * 1e9);
            std::printf("k0 = %.6g rad/m, beta = %.6g rad/(m s)\n", plan.k0, plan.beta);
            write_file(dir / "plan.json", plan_to_json(plan) + "\n");
            write_file(dir / "schedule.csv", schedule_to_csv(rectangular_schedule(plan.t_rev)));
            return 0;
        }

        if (*bound) {
            MaterialPreset preset;
            double lx = 0;
            if (lx_over_lambda > 0) {
                preset = find_preset("ideal");
                preset.lambda_vac = 1.0;
                preset.refractive_index = n_override > 0 ? n_override : 1.8;
                lx = lx_over_lambda;
            } else {
                preset = preset_from(preset_name, preset_file);
                lx = parse_quantity(bound_lx_s, "--lx");
            }
            const auto budget = make_budget(preset, lx, eps);
            std::printf("quarter rule: delta_nu_rms/delta_nu < %.6g\n",
                        nonlinearity_bound(preset, lx));
            std::printf("eps = %.3g: delta_nu_rms/delta_nu < %.6g\n", eps, budget.allowed_ratio);
            write_file(dir / "budget.json", budget_to_json(budget) + "\n");
            return 0;
        }

        if (*field) {
            const auto preset = preset_from(preset_name, preset_file);
            ElectrodeLayout layout;
            if (!layout_file.empty()) {
                layout = load_layout_json(read_file(layout_file));
            } else if (family == "quadrupole") {
                layout = quadrupole_layout(1.0, 0.05, 1.0, 1.0);
            } else if (family == "ladder8") {
                const double us[] = {0.518, 1.0, 2.14};
                layout = ladder_layout(3, 1.0, 0.05, 0.75, us);
            } else if (family == "ladder12") {
                const double us[] = {0.33, 0.70, 1.0, 1.46, 2.42};
                layout = ladder_layout(5, 1.0, 0.05, 0.75, us);
            } else {
                throw std::invalid_argument("field: need --layout or --family");
            }
            GridSpec grid;
            grid.nx = grid_nx;
            const auto map = solve_potential(layout, grid);
            const auto prof = shift_profile(map, preset, core_frac * layout.ly);
            const auto region = layout.region_a.empty()
                                    ? Interval{-0.25 * layout.period_lx, 0.25 * layout.period_lx}
                                    : layout.region_a[0];
            const Interval span{region.mid() - 0.5 * span_frac * region.length(),
                                region.mid() + 0.5 * span_frac * region.length()};
            const auto rep = linearity_report(prof, span);
            const double emax =
                max_field(map, region, core_frac > 0 ? core_frac * layout.ly : 0.1 * layout.ly);
            std::printf("slope = %.6g Hz/m, delta_nu = %.6g Hz\n", rep.slope, rep.delta_nu);
            std::printf("delta_nu_rms = %.6g Hz, ratio = %.6g\n", rep.delta_nu_rms, rep.ratio);
            std::printf("|E|_max on region boundary (core band) = %.6g V/m\n", emax);
            write_file(dir / "field_map.csv", field_map_to_csv(map));
            write_file(dir / "shift_profile.csv", profile_to_csv(prof));
            nlohmann::json j;
            j["slope_hz_per_m"] = rep.slope;
            j["delta_nu_hz"] = rep.delta_nu;
            j["delta_nu_rms_hz"] = rep.delta_nu_rms;
            j["ratio"] = rep.ratio;
            j["emax_v_per_m"] = emax;
            write_file(dir / "linearity.json", j.dump(2) + "\n");
            return 0;
        }

        if (*opt) {
            OptimizationProblem problem;
            if (!problem_file.empty()) {
                problem = problem_from_json(read_file(problem_file));
            } else if (opt_family == "ladder8") {
                const double us[] = {0.518, 1.0, 2.14};
                const int free_cls[] = {0, 2};
                problem = make_ladder_problem(3, us, free_cls);
            } else if (opt_family == "ladder12") {
                const double us[] = {0.33, 0.70, 1.0, 1.46, 2.42};
                const int free_cls[] = {0, 1, 3, 4};
                problem = make_ladder_problem(5, us, free_cls, 1.0, 0.05, 0.75, 0.1, 1.0, 96, 384);
            } else {
                throw std::invalid_argument("optimize: need --problem or a known --family");
            }
            OptimizeConfig cfg;
            cfg.restarts = restarts;
            cfg.max_evals = max_evals;
            cfg.seed = seed;
            const auto res = optimize(problem, cfg);
            std::printf("best parameters:");
            for (double p : res.best_params) std::printf(" %.6g", p);
            std::printf("\nachieved ratio = %.6g (search %.6g), %ld evaluations%s\n",
                        res.achieved_ratio, res.search_ratio, res.evaluations,
                        res.converged ? "" : " [unconverged]");
            write_file(dir / "problem.json", problem_to_json(problem) + "\n");
            write_file(dir / "result.json", result_to_json(res) + "\n");
            write_file(dir / "history.csv", history_to_csv(res));
            return 0;
        }

        if (*ens) {
            ProtocolConfig pc;
            if (!ens_config.empty()) {
                pc = protocol_config_from_json(read_file(ens_config));
                const auto run = run_protocol(pc);
                std::printf("backward rate at t_rev = %.6f (forward %.3g), verdict: %s\n",
                            run.backward_at_t_rev, run.forward_at_t_rev, run.verdict.c_str());
                write_file(dir / "config.json", protocol_config_to_json(pc) + "\n");
                write_file(dir / "emission_series.csv", series_to_csv(run.series));
                return 0;
            }
            pc.preset = preset_from(preset_name, preset_file);
            pc.lx = parse_quantity(ens_lx_s, "--lx");
            pc.delta_nu = parse_quantity(ens_dnu_s, "--delta-nu");
            pc.n_atoms = n_atoms;
            pc.alpha_l = alpha_l;
            if (alpha_l > 0) pc.amplitude = AmplitudeProfile::exponential;
            if (t2_us > 0) pc.t2 = t2_us * units::us;
            pc.seed = ens_seed;
            pc.reverse_readout = reverse_readout;
            if (profile_kind == "csv") {
                ShiftProfile prof;
                std::istringstream ss(read_file(profile_file));
                std::string line;
                std::getline(ss, line); // header
                while (std::getline(ss, line)) {
                    const auto comma = line.find(',');
                    if (comma == std::string::npos) continue;
                    prof.x.push_back(std::stod(line.substr(0, comma)));
                    prof.shift.push_back(std::stod(line.substr(comma + 1)));
                }
                pc.profile = std::move(prof);
            } else if (profile_kind != "ideal-linear") {
                throw std::invalid_argument("ensemble: unknown --profile kind");
            }
            if (residual_kind == "two-point")
                pc.residual.kind = ResidualModel::Kind::two_point;
            else if (residual_kind == "gaussian")
                pc.residual.kind = ResidualModel::Kind::gaussian;
            else if (residual_kind != "none")
                throw std::invalid_argument("ensemble: unknown --residual kind");
            pc.residual.delta_nu_rms = residual_rms;
            pc.residual.seed = ens_seed;
            const auto run = run_protocol(pc);
            if (reverse_readout)
                std::printf("forward rate after reverse-field readout = %.6f\n",
                            run.forward_after_readout);
            else
                std::printf("backward rate at t_rev = %.6f (forward %.3g), verdict: %s\n",
                            run.backward_at_t_rev, run.forward_at_t_rev, run.verdict.c_str());
            write_file(dir / "config.json", protocol_config_to_json(pc) + "\n");
            write_file(dir / "emission_series.csv", series_to_csv(run.series));
            return 0;
        }

        if (*prop) {
            PropagationConfig cfg;
            if (!prop_config.empty()) {
                cfg = propagation_config_from_json(read_file(prop_config));
                mode_s.clear(); // the config file carries the mode
            } else {
                cfg.alpha_l = p_alpha;
                cfg.n_classes = n_classes;
                cfg.nx = p_nx;
                cfg.dt_factor = dt_factor;
                cfg.pulse_sigma = pulse_sigma;
            }
            if (!sweep_s.empty()) {
                std::vector<double> alphas;
                std::stringstream ss(sweep_s);
                std::string tok;
                while (std::getline(ss, tok, ',')) alphas.push_back(std::stod(tok));
                const auto rows = efficiency_sweep(alphas, cfg);
                for (const auto& row : rows)
                    std::printf("alpha_l=%.3g  eta_forward=%.5f  eta_backward=%.5f\n", row.alpha_l,
                                row.eta_forward, row.eta_backward);
                write_file(dir / "efficiency_sweep.csv", sweep_to_csv(rows));
                return 0;
            }
            if (mode_s == "forward")
                cfg.mode = RetrievalMode::forward_crib;
            else if (mode_s == "backward")
                cfg.mode = RetrievalMode::backward_conjugate;
            else if (mode_s == "ramp")
                cfg.mode = RetrievalMode::gradient_ramp;
            else if (!mode_s.empty())
                throw std::invalid_argument("propagate: unknown --mode '" + mode_s + "'");
            const auto st = simulate_storage(cfg);
            const auto outc = simulate_retrieval(st, cfg.mode);
            std::printf(
                "efficiency = %.5f, transmitted = %.5f, residual = %.5f, ledger error = %.2e\n",
                outc.efficiency, outc.transmitted, outc.residual, outc.ledger_error);
            write_file(dir / "config.json", propagation_config_to_json(cfg) + "\n");
            write_file(dir / "retrieval_waveform.csv", waveform_to_csv(outc));
            nlohmann::json j;
            j["efficiency"] = outc.efficiency;
            j["transmitted"] = outc.transmitted;
            j["residual"] = outc.residual;
            j["decayed"] = outc.decayed;
            j["ledger_error"] = outc.ledger_error;
            write_file(dir / "outcome.json", j.dump(2) + "\n");
            return 0;
        }

        if (*repro) {
            ReproduceOptions ro;
            ro.out_dir = dir.string();
            ro.seed = repro_seed;
            ro.quick = quick;
            const auto results = run_reproduction(ro);
            std::fputs(format_report(results).c_str(), stdout);
            return all_passed(results) ? 0 : 2;
        }
    } catch (const SolverError& e) {
        std::fprintf(stderr, "solver error: %s\n", e.what());
        return 3;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 1;
}
