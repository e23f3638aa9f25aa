// One-dimensional linear storage/retrieval simulation with re-absorption.
//
// Model: a narrow absorption line discretized into static detuning classes
// (no homogeneous decay), coupled to a forward (or backward) field in the
// retarded frame:
//
//   dE/dx = i g sum_c w_c P_c,   dP_c/dt = -i Delta_c P_c + i g E
//
// The coupling g is calibrated so the monochromatic resonant amplitude
// transmission equals exp(-alpha_l/2). Storage integrates a unit-energy
// pulse through the medium; retrieval either flips the detuning classes and
// re-emits forward (CRIB), or couples the stored grating to the backward
// field (phase conjugation / field-gradient ramp).

#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace gradecho {

enum class RetrievalMode { forward_crib, backward_conjugate, gradient_ramp };

struct DetuningClass {
    double detuning_hz = 0;
    double weight = 0;
};

// Lorentzian line sampled on a uniform grid +-span half-widths wide.
std::vector<DetuningClass> lorentzian_classes(int n, double halfwidth_hz, double span = 3.5);

struct PropagationConfig {
    double alpha_l = 1.0; // optical depth
    int nx = 144;         // space steps (nx+1 nodes)
    int nt = 0;           // time steps for the storage stage; 0 = derived
    double line_halfwidth_hz = 1.0e6;
    int n_classes = 64;
    double class_span = 3.5;
    std::vector<DetuningClass> classes; // optional explicit class list
    double dt_factor = 0.05;   // dt = dt_factor / (2 pi halfwidth)
    double pulse_sigma = 12.0; // sigma_t in units of 1 / (2 pi halfwidth)
    double input_amplitude = 1.0;
    // Optional custom envelope (complex, evaluated on [0, storage window]);
    // normalized to unit energy internally.
    std::function<std::complex<double>(double)> custom_pulse;
    RetrievalMode mode = RetrievalMode::backward_conjugate;
    double ramp_time = 0; // gradient_ramp: field-decoupled dwell before readout
    double hold_time = 0; // storage dwell, decays with t2
    double t2 = std::numeric_limits<double>::infinity();
    double retrieval_margin = 3.0; // extra pulse sigmas appended to the window

    std::vector<DetuningClass> resolved_classes() const;
    void validate() const;
};

struct CalibrationResult {
    double coupling = 0;               // g
    double amplitude_transmission = 0; // measured plateau |E(L)|/|E_in|
    double target = 0;                 // exp(-alpha_l/2)
    int iterations = 0;
};

// Quasi-steady monochromatic resonant transmission; fixes g so the amplitude
// transmission matches exp(-alpha_l/2) within 0.5%.
CalibrationResult calibrate_coupling(const PropagationConfig& config);

struct StorageResult {
    PropagationConfig config;
    std::vector<DetuningClass> classes;
    double coupling = 0;
    double dx = 0;
    double dt = 0;
    double duration = 0;        // storage stage length (s)
    double pulse_peak_time = 0; // s
    std::vector<std::complex<double>> polarization; // (nx+1) x n_classes
    double input_energy = 0;
    double transmitted_energy = 0;
    double stored_energy = 0;
};

StorageResult simulate_storage(const PropagationConfig& config);

struct RetrievalOutcome {
    RetrievalMode mode = RetrievalMode::backward_conjugate;
    double efficiency = 0;  // emitted / input
    double transmitted = 0; // unstored fraction leaked during storage
    double residual = 0;    // excitation left in the medium
    double decayed = 0;     // t2 loss during hold
    double ledger_error = 0;
    std::vector<double> output_t;     // s
    std::vector<double> output_power; // |field|^2 at the output face
};

RetrievalOutcome simulate_retrieval(const StorageResult& storage, RetrievalMode mode);

struct SweepRow {
    double alpha_l = 0;
    double eta_forward = 0;
    double eta_backward = 0;
};

std::vector<SweepRow> efficiency_sweep(const std::vector<double>& alphas,
                                       const PropagationConfig& base);

std::string waveform_to_csv(const RetrievalOutcome& outcome);
std::string sweep_to_csv(const std::vector<SweepRow>& rows);

// Config round trip; a custom_pulse callable does not serialize.
std::string propagation_config_to_json(const PropagationConfig& config);
PropagationConfig propagation_config_from_json(const std::string& text);

} // namespace gradecho
