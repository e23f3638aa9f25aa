#include "gradecho/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <random>
#include <stdexcept>

#include <json.hpp>

#include "gradecho/units.hpp"

namespace gradecho {

namespace {

// Fixed-shape pairwise reduction, deterministic and accurate for large N.
std::complex<double> pairwise_sum(const std::vector<std::complex<double>>& v, size_t lo,
                                  size_t hi) {
    if (hi - lo <= 64) {
        std::complex<double> acc{0.0, 0.0};
        for (size_t i = lo; i < hi; ++i) acc += v[i];
        return acc;
    }
    const size_t mid = lo + (hi - lo) / 2;
    return pairwise_sum(v, lo, mid) + pairwise_sum(v, mid, hi);
}

} // namespace

EnsembleState init_ensemble(int n_atoms, double lx, double k0, Placement placement,
                            AmplitudeProfile profile, double alpha_l, uint64_t seed,
                            double t2) {
    if (n_atoms < 2) throw std::invalid_argument("init_ensemble: need >= 2 atoms");
    if (!(lx > 0)) throw std::invalid_argument("init_ensemble: lx must be > 0");
    EnsembleState s;
    s.k0 = k0;
    s.lx = lx;
    s.t2 = t2;
    s.x.resize(n_atoms);
    if (placement == Placement::equispaced) {
        for (int j = 0; j < n_atoms; ++j) s.x[j] = -0.5 * lx + (j + 0.5) * lx / n_atoms;
    } else {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> dist(-0.5 * lx, 0.5 * lx);
        for (int j = 0; j < n_atoms; ++j) s.x[j] = dist(rng);
        std::sort(s.x.begin(), s.x.end());
    }
    s.amplitude.resize(n_atoms);
    if (profile == AmplitudeProfile::uniform || alpha_l == 0) {
        std::fill(s.amplitude.begin(), s.amplitude.end(), 1.0);
    } else {
        for (int j = 0; j < n_atoms; ++j) {
            const double depth = (s.x[j] + 0.5 * lx) / lx; // from the input face
            s.amplitude[j] = std::exp(-0.5 * alpha_l * depth);
        }
    }
    double norm2 = 0;
    for (double a : s.amplitude) norm2 += a * a;
    const double scale = 1.0 / std::sqrt(norm2);
    for (double& a : s.amplitude) a *= scale;
    s.phase.assign(n_atoms, 0.0);
    // Same pairwise reduction as emission_rate, so a phase-matched state
    // with undecayed amplitudes gives rate 1.0 bit-exactly.
    std::vector<std::complex<double>> amps(n_atoms);
    for (int j = 0; j < n_atoms; ++j) amps[j] = {s.amplitude[j], 0.0};
    s.norm0 = pairwise_sum(amps, 0, amps.size()).real();
    return s;
}

void apply_residual_model(EnsembleState& state, const ResidualModel& model) {
    using Kind = ResidualModel::Kind;
    if (model.kind == Kind::none) {
        state.extra_shift_hz.clear();
        return;
    }
    state.extra_shift_hz.assign(state.size(), 0.0);
    switch (model.kind) {
        case Kind::two_point:
            for (size_t j = 0; j < state.size(); ++j)
                state.extra_shift_hz[j] = (j % 2 == 0 ? 1.0 : -1.0) * model.delta_nu_rms;
            break;
        case Kind::gaussian: {
            std::mt19937_64 rng(model.seed);
            std::normal_distribution<double> dist(0.0, model.delta_nu_rms);
            for (size_t j = 0; j < state.size(); ++j) state.extra_shift_hz[j] = dist(rng);
            break;
        }
        case Kind::from_profile:
            for (size_t j = 0; j < state.size(); ++j)
                state.extra_shift_hz[j] = model.residual_profile.shift_at(state.x[j]);
            break;
        case Kind::none:
            break;
    }
}

static void advance(EnsembleState& state, const ShiftProfile& profile, double area,
                    double dt) {
    profile.validate();
    if (!state.x.empty() &&
        (state.x.front() < profile.x.front() || state.x.back() > profile.x.back()))
        throw std::out_of_range("evolve: atom outside the shift profile span");
    const bool extras = !state.extra_shift_hz.empty();
    for (size_t j = 0; j < state.size(); ++j) {
        double shift = profile.shift_at(state.x[j]);
        if (extras) shift += state.extra_shift_hz[j];
        state.phase[j] += 2.0 * units::pi * shift * area;
    }
    if (std::isfinite(state.t2) && dt > 0) {
        const double decay = std::exp(-dt / state.t2);
        for (double& a : state.amplitude) a *= decay;
    }
    state.elapsed += dt;
}

void evolve(EnsembleState& state, const ShiftProfile& profile, const FieldSchedule& schedule,
            double dt) {
    if (dt < 0) throw std::invalid_argument("evolve: dt must be >= 0");
    const double area = schedule.integral_between(state.elapsed, state.elapsed + dt);
    advance(state, profile, area, dt);
}

void evolve(EnsembleState& state, const ShiftProfile& profile, double g, double dt) {
    if (dt < 0) throw std::invalid_argument("evolve: dt must be >= 0");
    advance(state, profile, g * dt, dt);
}

double emission_rate(const EnsembleState& state, Direction direction) {
    if (state.size() == 0 || state.norm0 == 0) return 0.0;
    std::vector<std::complex<double>> terms(state.size());
    for (size_t j = 0; j < state.size(); ++j) {
        // theta = (k0 - k_d) x_j + phi_j, with k_d = +-k0
        const double theta = direction == Direction::forward
                                 ? state.phase[j]
                                 : 2.0 * state.k0 * state.x[j] + state.phase[j];
        terms[j] = std::polar(state.amplitude[j], theta);
    }
    const auto s = pairwise_sum(terms, 0, terms.size());
    const double r = std::norm(s) / (state.norm0 * state.norm0);
    return r;
}

ProtocolRun run_protocol(const ProtocolConfig& config) {
    config.preset.validate();
    if (!(config.delta_nu > 0))
        throw std::invalid_argument("run_protocol: delta_nu must be > 0");
    const double k0 = optical_wavevector(config.preset);
    const double t_rev = reversal_time(config.preset, config.lx, config.delta_nu);
    const ShiftProfile profile = config.profile
                                     ? *config.profile
                                     : linear_profile(config.delta_nu, config.lx);

    EnsembleState state =
        init_ensemble(config.n_atoms, config.lx, k0, config.placement, config.amplitude,
                      config.alpha_l, config.seed, config.t2);
    apply_residual_model(state, config.residual);

    ProtocolRun run;
    auto sample = [&](EnsembleState& s) {
        run.series.push_back({s.elapsed, emission_rate(s, Direction::forward),
                              emission_rate(s, Direction::backward)});
    };
    sample(state);

    if (config.reverse_readout) {
        const auto tm = subradiance_times(config.delta_nu, std::max(config.store_m, 1));
        const double t_store = tm.back();
        evolve(state, profile, 1.0, t_store);
        sample(state);
        if (config.hold_time > 0) {
            evolve(state, profile, 0.0, config.hold_time);
            sample(state);
        }
        evolve(state, profile, -1.0, t_store);
        sample(state);
        run.forward_after_readout = run.series.back().forward;
        run.verdict = "forward";
        return run;
    }

    std::vector<double> samples = subradiance_times(config.delta_nu, std::max(config.m_samples, 1));
    samples.push_back(0.5 * t_rev);
    samples.push_back(t_rev);
    std::sort(samples.begin(), samples.end());
    samples.erase(std::unique(samples.begin(), samples.end()), samples.end());
    double t_now = 0;
    for (double t : samples) {
        if (t > t_rev) break;
        evolve(state, profile, 1.0, t - t_now);
        t_now = t;
        sample(state);
    }

    run.forward_at_t_rev = run.series.back().forward;
    run.backward_at_t_rev = run.series.back().backward;
    run.verdict = run.backward_at_t_rev >= run.forward_at_t_rev ? "backward" : "forward";
    return run;
}

DephasingStudy residual_dephasing_study(const MaterialPreset& preset, double lx,
                                        double delta_nu, int n_atoms,
                                        const ResidualModel& model) {
    DephasingStudy study;
    const double t_rev = reversal_time(preset, lx, delta_nu);
    const double k0 = optical_wavevector(preset);
    EnsembleState state = init_ensemble(n_atoms, lx, k0);

    ResidualModel applied = model;
    if (model.kind == ResidualModel::Kind::from_profile) {
        // Fit the supplied profile over region A, rescale its residuals so
        // the fitted half-range matches delta_nu, and dephase with those.
        const auto rep = linearity_report(model.residual_profile, {-0.5 * lx, 0.5 * lx});
        if (rep.delta_nu <= 0)
            throw std::invalid_argument("residual_dephasing_study: degenerate profile");
        const double scale = delta_nu / rep.delta_nu;
        // Residuals relative to the span fit, kept on the full sampled range
        // so interpolation covers atoms at the very edges of the span.
        ShiftProfile residuals;
        for (size_t i = 0; i < model.residual_profile.x.size(); ++i) {
            const double x = model.residual_profile.x[i];
            residuals.x.push_back(x);
            residuals.shift.push_back(
                (model.residual_profile.shift[i] - (rep.intercept + rep.slope * x)) * scale);
        }
        applied.residual_profile = std::move(residuals);
        study.delta_nu_rms = rep.delta_nu_rms * scale;
    } else {
        study.delta_nu_rms = model.delta_nu_rms;
    }
    apply_residual_model(state, applied);

    const ShiftProfile profile = linear_profile(delta_nu, lx);
    evolve(state, profile, 1.0, t_rev);
    study.measured = emission_rate(state, Direction::backward);
    study.predicted = dephasing_efficiency(study.delta_nu_rms, t_rev);
    study.difference = study.measured - study.predicted;
    return study;
}

std::string protocol_config_to_json(const ProtocolConfig& config) {
    nlohmann::json doc;
    doc["preset"] = nlohmann::json::parse(presets_to_json({config.preset}))[0];
    doc["lx_m"] = config.lx;
    doc["delta_nu_hz"] = config.delta_nu;
    doc["n_atoms"] = config.n_atoms;
    doc["placement"] = config.placement == Placement::equispaced ? "equispaced" : "seeded-uniform";
    doc["amplitude"] = config.amplitude == AmplitudeProfile::uniform ? "uniform" : "exponential";
    doc["alpha_l"] = config.alpha_l;
    if (std::isfinite(config.t2)) doc["t2_s"] = config.t2;
    const char* kinds[] = {"none", "two-point", "gaussian", "from-profile"};
    doc["residual"] = {{"kind", kinds[static_cast<int>(config.residual.kind)]},
                       {"delta_nu_rms_hz", config.residual.delta_nu_rms},
                       {"seed", config.residual.seed}};
    doc["seed"] = config.seed;
    doc["m_samples"] = config.m_samples;
    doc["reverse_readout"] = config.reverse_readout;
    doc["store_m"] = config.store_m;
    doc["hold_time_s"] = config.hold_time;
    return doc.dump(2);
}

ProtocolConfig protocol_config_from_json(const std::string& text) {
    const auto doc = nlohmann::json::parse(text);
    ProtocolConfig config;
    config.preset = load_presets_json("[" + doc.at("preset").dump() + "]").at(0);
    config.lx = doc.at("lx_m").get<double>();
    config.delta_nu = doc.at("delta_nu_hz").get<double>();
    config.n_atoms = doc.value("n_atoms", 10000);
    config.placement = doc.value("placement", std::string("equispaced")) == "equispaced"
                           ? Placement::equispaced
                           : Placement::seeded_uniform;
    config.amplitude = doc.value("amplitude", std::string("uniform")) == "uniform"
                           ? AmplitudeProfile::uniform
                           : AmplitudeProfile::exponential;
    config.alpha_l = doc.value("alpha_l", 0.0);
    if (doc.contains("t2_s")) config.t2 = doc.at("t2_s").get<double>();
    if (doc.contains("residual")) {
        const auto& r = doc.at("residual");
        const std::string kind = r.value("kind", "none");
        if (kind == "two-point")
            config.residual.kind = ResidualModel::Kind::two_point;
        else if (kind == "gaussian")
            config.residual.kind = ResidualModel::Kind::gaussian;
        else if (kind == "from-profile")
            throw std::invalid_argument(
                "protocol config: from-profile residuals travel as CSV, not JSON");
        config.residual.delta_nu_rms = r.value("delta_nu_rms_hz", 0.0);
        config.residual.seed = r.value("seed", uint64_t{1});
    }
    config.seed = doc.value("seed", uint64_t{1});
    config.m_samples = doc.value("m_samples", 8);
    config.reverse_readout = doc.value("reverse_readout", false);
    config.store_m = doc.value("store_m", 4);
    config.hold_time = doc.value("hold_time_s", 0.0);
    return config;
}

std::string series_to_csv(const std::vector<EmissionReport>& series) {
    std::string out = "t_s,r_forward,r_backward\n";
    char line[96];
    for (const auto& r : series) {
        std::snprintf(line, sizeof(line), "%.17g,%.17g,%.17g\n", r.t, r.forward, r.backward);
        out += line;
    }
    return out;
}

} // namespace gradecho
