// Discrete phased-array model of the stored excitation: per-atom phases
// accumulated from a shift profile and a switching schedule, collective
// forward/backward emission rates, subradiance and dephasing penalties.
//
// Rate model: R(k_d) = |sum_j a_j exp(i(k0 x_j + phi_j)) exp(-i k_d x_j)|^2
// normalized by the initial (sum_j a_j)^2, so the freshly stored
// phase-matched state emits forward at rate 1 and T2 decay shows up as an
// overall exp(-2t/T2) on every rate.

#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "gradecho/materials.hpp"
#include "gradecho/profile.hpp"
#include "gradecho/protocol.hpp"

namespace gradecho {

enum class Placement { equispaced, seeded_uniform };
enum class AmplitudeProfile { uniform, exponential };
enum class Direction { forward, backward };

struct EnsembleState {
    std::vector<double> x;         // positions in [-lx/2, lx/2] (m)
    std::vector<double> amplitude; // magnitudes, sum of squares = 1 at init
    std::vector<double> phase;     // accumulated phases (rad)
    std::vector<double> extra_shift_hz; // per-atom residual shifts, may be empty
    double k0 = 0;
    double lx = 0;
    double elapsed = 0;
    double t2 = std::numeric_limits<double>::infinity();
    double norm0 = 0; // sum of amplitudes at init, fixes the rate normalization
    size_t size() const { return x.size(); }
};

EnsembleState init_ensemble(int n_atoms, double lx, double k0,
                            Placement placement = Placement::equispaced,
                            AmplitudeProfile profile = AmplitudeProfile::uniform,
                            double alpha_l = 0, uint64_t seed = 1,
                            double t2 = std::numeric_limits<double>::infinity());

// Residual models for dephasing studies.
struct ResidualModel {
    enum class Kind { none, two_point, gaussian, from_profile } kind = Kind::none;
    double delta_nu_rms = 0; // Hz, for two_point / gaussian
    uint64_t seed = 1;       // gaussian
    ShiftProfile residual_profile; // from_profile: shift(x) sampled per atom
};

void apply_residual_model(EnsembleState& state, const ResidualModel& model);

// Advance by dt: phi_j += 2*pi*(shift(x_j)+extra_j) * integral of g over
// [elapsed, elapsed+dt] on the global schedule clock; amplitudes decay by
// exp(-dt/t2).
void evolve(EnsembleState& state, const ShiftProfile& profile, const FieldSchedule& schedule,
            double dt);
// Constant-amplitude variant (g fixed over the step).
void evolve(EnsembleState& state, const ShiftProfile& profile, double g, double dt);

double emission_rate(const EnsembleState& state, Direction direction);

struct EmissionReport {
    double t = 0;
    double forward = 0;
    double backward = 0;
};

struct ProtocolConfig {
    MaterialPreset preset;
    double lx = 0;
    double delta_nu = 0; // ideal linear profile; ignored when profile set
    std::optional<ShiftProfile> profile;
    int n_atoms = 10000;
    Placement placement = Placement::equispaced;
    AmplitudeProfile amplitude = AmplitudeProfile::uniform;
    double alpha_l = 0;
    double t2 = std::numeric_limits<double>::infinity();
    ResidualModel residual;
    uint64_t seed = 1;
    int m_samples = 8;       // sample the first m subradiance times
    // Forward-retrieval variant: store for t_m[store_m-1], hold with the
    // field off, then reverse the field sign for the same duration.
    bool reverse_readout = false;
    int store_m = 4;
    double hold_time = 0;
};

struct ProtocolRun {
    std::vector<EmissionReport> series;
    std::string verdict; // "backward" or "forward"
    double backward_at_t_rev = 0;
    double forward_at_t_rev = 0;
    double forward_after_readout = 0; // reverse_readout variant only
};

ProtocolRun run_protocol(const ProtocolConfig& config);

struct DephasingStudy {
    double measured = 0;   // backward rate at t_rev
    double predicted = 0;  // cos^2(2*pi*delta_nu_rms*t_rev)
    double difference = 0;
    double delta_nu_rms = 0;
};

// Measures the backward-retrieval penalty of profile residuals against the
// cos^2 prediction. For Kind::from_profile the residuals are taken from the
// linear fit of the given profile over region A.
DephasingStudy residual_dephasing_study(const MaterialPreset& preset, double lx,
                                        double delta_nu, int n_atoms,
                                        const ResidualModel& model);

std::string series_to_csv(const std::vector<EmissionReport>& series);

// Config round trip (custom shift/residual profiles travel as CSV files, not
// inside the JSON document).
std::string protocol_config_to_json(const ProtocolConfig& config);
ProtocolConfig protocol_config_from_json(const std::string& text);

} // namespace gradecho
