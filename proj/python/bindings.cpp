#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gradecho/ensemble.hpp"
#include "gradecho/field_solver.hpp"
#include "gradecho/layouts.hpp"
#include "gradecho/materials.hpp"
#include "gradecho/optimizer.hpp"
#include "gradecho/profile.hpp"
#include "gradecho/propagation.hpp"
#include "gradecho/protocol.hpp"
#include "gradecho/reproduce.hpp"

namespace py = pybind11;
using namespace gradecho;

PYBIND11_MODULE(_gradecho, m) {
    m.doc() = "Field-controlled backward retrieval toolkit (C++ core)";

    // materials
    py::enum_<FieldKind>(m, "FieldKind")
        .value("electric", FieldKind::electric)
        .value("magnetic", FieldKind::magnetic);

    py::class_<MaterialPreset>(m, "MaterialPreset")
        .def(py::init<>())
        .def_readwrite("name", &MaterialPreset::name)
        .def_readwrite("lambda_vac", &MaterialPreset::lambda_vac)
        .def_readwrite("refractive_index", &MaterialPreset::refractive_index)
        .def_readwrite("stark_coefficient", &MaterialPreset::stark_coefficient)
        .def_readwrite("zeeman_coefficient", &MaterialPreset::zeeman_coefficient)
        .def_readwrite("t2", &MaterialPreset::t2)
        .def_readwrite("alpha", &MaterialPreset::alpha)
        .def("field_kind", &MaterialPreset::field_kind)
        .def("validate", &MaterialPreset::validate);

    m.def("builtin_presets", &builtin_presets);
    m.def("find_preset", &find_preset, py::return_value_policy::copy);
    m.def("shift_from_field", &shift_from_field);
    m.def("optical_wavevector", &optical_wavevector);
    m.def("load_presets_json", &load_presets_json);
    m.def("presets_to_json", &presets_to_json);

    // layouts
    py::class_<Electrode>(m, "Electrode")
        .def(py::init<>())
        .def_readwrite("center_x", &Electrode::center_x)
        .def_readwrite("center_y", &Electrode::center_y)
        .def_readwrite("width", &Electrode::width)
        .def_readwrite("height", &Electrode::height)
        .def_readwrite("potential", &Electrode::potential);

    py::class_<Interval>(m, "Interval")
        .def(py::init<double, double>())
        .def_readwrite("lo", &Interval::lo)
        .def_readwrite("hi", &Interval::hi);

    py::class_<ElectrodeLayout>(m, "ElectrodeLayout")
        .def(py::init<>())
        .def_readwrite("period_lx", &ElectrodeLayout::period_lx)
        .def_readwrite("ly", &ElectrodeLayout::ly)
        .def_readwrite("electrodes", &ElectrodeLayout::electrodes)
        .def_readwrite("region_a", &ElectrodeLayout::region_a)
        .def("validate", &ElectrodeLayout::validate)
        .def("scaled_potentials", &ElectrodeLayout::scaled_potentials);

    m.def("ladder_layout",
          [](int classes, double lx, double d, double ly, const std::vector<double>& us) {
              return ladder_layout(classes, lx, d, ly, us);
          });
    m.def("quadrupole_layout", &quadrupole_layout);
    m.def("load_layout_json", &load_layout_json);
    m.def("layout_to_json", &layout_to_json);

    // field solver and profiles
    py::class_<GridSpec>(m, "GridSpec")
        .def(py::init<>())
        .def_readwrite("nx", &GridSpec::nx)
        .def_readwrite("ny", &GridSpec::ny)
        .def_readwrite("tolerance", &GridSpec::tolerance);

    py::class_<FieldMap>(m, "FieldMap")
        .def_readonly("nx", &FieldMap::nx)
        .def_readonly("ny", &FieldMap::ny)
        .def_readonly("hx", &FieldMap::hx)
        .def_readonly("hy", &FieldMap::hy)
        .def_readonly("phi", &FieldMap::phi)
        .def_readonly("ex", &FieldMap::ex)
        .def_readonly("ey", &FieldMap::ey)
        .def_readonly("sweeps", &FieldMap::sweeps)
        .def_readonly("relative_residual", &FieldMap::relative_residual);

    m.def("solve_potential", &solve_potential);
    m.def("max_field", &max_field);

    py::class_<ShiftProfile>(m, "ShiftProfile")
        .def(py::init<>())
        .def_readwrite("x", &ShiftProfile::x)
        .def_readwrite("shift", &ShiftProfile::shift)
        .def("shift_at", &ShiftProfile::shift_at);

    m.def("shift_profile", &shift_profile, py::arg("map"), py::arg("preset"),
          py::arg("core_half") = 0.0);
    m.def("linear_profile", &linear_profile, py::arg("delta_nu"), py::arg("lx"),
          py::arg("samples") = 257);

    py::class_<LinearityReport>(m, "LinearityReport")
        .def_readonly("slope", &LinearityReport::slope)
        .def_readonly("intercept", &LinearityReport::intercept)
        .def_readonly("delta_nu", &LinearityReport::delta_nu)
        .def_readonly("delta_nu_rms", &LinearityReport::delta_nu_rms)
        .def_readonly("ratio", &LinearityReport::ratio)
        .def_readonly("residuals", &LinearityReport::residuals);

    m.def("linearity_report", &linearity_report);

    // protocol
    py::class_<ReversalPlan>(m, "ReversalPlan")
        .def_readonly("lx", &ReversalPlan::lx)
        .def_readonly("delta_nu", &ReversalPlan::delta_nu)
        .def_readonly("k0", &ReversalPlan::k0)
        .def_readonly("beta", &ReversalPlan::beta)
        .def_readonly("t_rev", &ReversalPlan::t_rev)
        .def_readonly("t_m", &ReversalPlan::t_m)
        .def_readonly("switching_tolerance", &ReversalPlan::switching_tolerance);

    m.def("reversal_time", &reversal_time);
    m.def("subradiance_times", &subradiance_times);
    m.def("make_plan", &make_plan, py::arg("preset"), py::arg("lx"), py::arg("delta_nu"),
          py::arg("m_max") = 10);
    m.def("wavevector_at", &wavevector_at);

    py::class_<PhaseTwist>(m, "PhaseTwist")
        .def_readonly("delta_k", &PhaseTwist::delta_k)
        .def_readonly("period", &PhaseTwist::period)
        .def_readonly("freeze_period", &PhaseTwist::freeze_period)
        .def_readonly("frozen", &PhaseTwist::frozen)
        .def_readonly("min_frozen_m", &PhaseTwist::min_frozen_m);

    m.def("phase_twist", &phase_twist, py::arg("delta_nu"), py::arg("t_m"), py::arg("lx"),
          py::arg("alpha") = 0.0);
    m.def("nonlinearity_bound",
          py::overload_cast<const MaterialPreset&, double>(&nonlinearity_bound));
    m.def("nonlinearity_bound",
          py::overload_cast<const MaterialPreset&, double, double>(&nonlinearity_bound));
    m.def("dephasing_efficiency",
          [](double rms, double t_rev) { return dephasing_efficiency(rms, t_rev); });
    m.def("efficiency_from_ratio", [](const MaterialPreset& p, double lx, double ratio) {
        return efficiency_from_ratio(p, lx, ratio);
    });

    py::class_<EfficiencyBudget>(m, "EfficiencyBudget")
        .def_readonly("target_efficiency", &EfficiencyBudget::target_efficiency)
        .def_readonly("allowed_ratio", &EfficiencyBudget::allowed_ratio)
        .def_readonly("dephasing_factor", &EfficiencyBudget::dephasing_factor);

    m.def("make_budget", &make_budget);

    py::class_<FieldSchedule>(m, "FieldSchedule")
        .def(py::init<>())
        .def_readwrite("t", &FieldSchedule::t)
        .def_readwrite("g", &FieldSchedule::g)
        .def("integral", &FieldSchedule::integral)
        .def("value_at", &FieldSchedule::value_at);

    m.def("rectangular_schedule", &rectangular_schedule, py::arg("duration"),
          py::arg("amplitude") = 1.0);

    // ensemble
    py::enum_<Placement>(m, "Placement")
        .value("equispaced", Placement::equispaced)
        .value("seeded_uniform", Placement::seeded_uniform);
    py::enum_<AmplitudeProfile>(m, "AmplitudeProfile")
        .value("uniform", AmplitudeProfile::uniform)
        .value("exponential", AmplitudeProfile::exponential);
    py::enum_<Direction>(m, "Direction")
        .value("forward", Direction::forward)
        .value("backward", Direction::backward);

    py::class_<EnsembleState>(m, "EnsembleState")
        .def_readonly("x", &EnsembleState::x)
        .def_readonly("amplitude", &EnsembleState::amplitude)
        .def_readonly("phase", &EnsembleState::phase)
        .def_readonly("elapsed", &EnsembleState::elapsed);

    m.def("init_ensemble", &init_ensemble, py::arg("n_atoms"), py::arg("lx"), py::arg("k0"),
          py::arg("placement") = Placement::equispaced,
          py::arg("profile") = AmplitudeProfile::uniform, py::arg("alpha_l") = 0.0,
          py::arg("seed") = 1, py::arg("t2") = std::numeric_limits<double>::infinity());
    m.def("evolve", [](EnsembleState& s, const ShiftProfile& p, double g, double dt) {
        evolve(s, p, g, dt);
    });
    m.def("emission_rate", &emission_rate);

    py::class_<EmissionReport>(m, "EmissionReport")
        .def_readonly("t", &EmissionReport::t)
        .def_readonly("forward", &EmissionReport::forward)
        .def_readonly("backward", &EmissionReport::backward);

    py::class_<ResidualModel> rm(m, "ResidualModel");
    py::enum_<ResidualModel::Kind>(rm, "Kind")
        .value("none", ResidualModel::Kind::none)
        .value("two_point", ResidualModel::Kind::two_point)
        .value("gaussian", ResidualModel::Kind::gaussian)
        .value("from_profile", ResidualModel::Kind::from_profile);
    rm.def(py::init<>())
        .def_readwrite("kind", &ResidualModel::kind)
        .def_readwrite("delta_nu_rms", &ResidualModel::delta_nu_rms)
        .def_readwrite("seed", &ResidualModel::seed)
        .def_readwrite("residual_profile", &ResidualModel::residual_profile);

    py::class_<ProtocolConfig>(m, "ProtocolConfig")
        .def(py::init<>())
        .def_readwrite("preset", &ProtocolConfig::preset)
        .def_readwrite("lx", &ProtocolConfig::lx)
        .def_readwrite("delta_nu", &ProtocolConfig::delta_nu)
        .def_readwrite("n_atoms", &ProtocolConfig::n_atoms)
        .def_readwrite("placement", &ProtocolConfig::placement)
        .def_readwrite("amplitude", &ProtocolConfig::amplitude)
        .def_readwrite("alpha_l", &ProtocolConfig::alpha_l)
        .def_readwrite("t2", &ProtocolConfig::t2)
        .def_readwrite("residual", &ProtocolConfig::residual)
        .def_readwrite("seed", &ProtocolConfig::seed)
        .def_readwrite("m_samples", &ProtocolConfig::m_samples)
        .def_readwrite("reverse_readout", &ProtocolConfig::reverse_readout)
        .def_readwrite("store_m", &ProtocolConfig::store_m)
        .def_readwrite("hold_time", &ProtocolConfig::hold_time);

    py::class_<ProtocolRun>(m, "ProtocolRun")
        .def_readonly("series", &ProtocolRun::series)
        .def_readonly("verdict", &ProtocolRun::verdict)
        .def_readonly("backward_at_t_rev", &ProtocolRun::backward_at_t_rev)
        .def_readonly("forward_at_t_rev", &ProtocolRun::forward_at_t_rev)
        .def_readonly("forward_after_readout", &ProtocolRun::forward_after_readout);

    m.def("run_protocol", &run_protocol);

    py::class_<DephasingStudy>(m, "DephasingStudy")
        .def_readonly("measured", &DephasingStudy::measured)
        .def_readonly("predicted", &DephasingStudy::predicted)
        .def_readonly("difference", &DephasingStudy::difference)
        .def_readonly("delta_nu_rms", &DephasingStudy::delta_nu_rms);

    m.def("residual_dephasing_study", &residual_dephasing_study);

    // propagation
    py::enum_<RetrievalMode>(m, "RetrievalMode")
        .value("forward_crib", RetrievalMode::forward_crib)
        .value("backward_conjugate", RetrievalMode::backward_conjugate)
        .value("gradient_ramp", RetrievalMode::gradient_ramp);

    py::class_<DetuningClass>(m, "DetuningClass")
        .def(py::init<>())
        .def_readwrite("detuning_hz", &DetuningClass::detuning_hz)
        .def_readwrite("weight", &DetuningClass::weight);

    m.def("lorentzian_classes", &lorentzian_classes, py::arg("n"), py::arg("halfwidth_hz"),
          py::arg("span") = 3.5);

    py::class_<PropagationConfig>(m, "PropagationConfig")
        .def(py::init<>())
        .def_readwrite("alpha_l", &PropagationConfig::alpha_l)
        .def_readwrite("nx", &PropagationConfig::nx)
        .def_readwrite("nt", &PropagationConfig::nt)
        .def_readwrite("line_halfwidth_hz", &PropagationConfig::line_halfwidth_hz)
        .def_readwrite("n_classes", &PropagationConfig::n_classes)
        .def_readwrite("class_span", &PropagationConfig::class_span)
        .def_readwrite("classes", &PropagationConfig::classes)
        .def_readwrite("dt_factor", &PropagationConfig::dt_factor)
        .def_readwrite("pulse_sigma", &PropagationConfig::pulse_sigma)
        .def_readwrite("input_amplitude", &PropagationConfig::input_amplitude)
        .def_readwrite("mode", &PropagationConfig::mode)
        .def_readwrite("ramp_time", &PropagationConfig::ramp_time)
        .def_readwrite("hold_time", &PropagationConfig::hold_time)
        .def_readwrite("t2", &PropagationConfig::t2);

    py::class_<CalibrationResult>(m, "CalibrationResult")
        .def_readonly("coupling", &CalibrationResult::coupling)
        .def_readonly("amplitude_transmission", &CalibrationResult::amplitude_transmission)
        .def_readonly("target", &CalibrationResult::target)
        .def_readonly("iterations", &CalibrationResult::iterations);

    py::class_<StorageResult>(m, "StorageResult")
        .def_readonly("input_energy", &StorageResult::input_energy)
        .def_readonly("transmitted_energy", &StorageResult::transmitted_energy)
        .def_readonly("stored_energy", &StorageResult::stored_energy)
        .def_readonly("duration", &StorageResult::duration);

    py::class_<RetrievalOutcome>(m, "RetrievalOutcome")
        .def_readonly("mode", &RetrievalOutcome::mode)
        .def_readonly("efficiency", &RetrievalOutcome::efficiency)
        .def_readonly("transmitted", &RetrievalOutcome::transmitted)
        .def_readonly("residual", &RetrievalOutcome::residual)
        .def_readonly("decayed", &RetrievalOutcome::decayed)
        .def_readonly("ledger_error", &RetrievalOutcome::ledger_error)
        .def_readonly("output_t", &RetrievalOutcome::output_t)
        .def_readonly("output_power", &RetrievalOutcome::output_power);

    py::class_<SweepRow>(m, "SweepRow")
        .def_readonly("alpha_l", &SweepRow::alpha_l)
        .def_readonly("eta_forward", &SweepRow::eta_forward)
        .def_readonly("eta_backward", &SweepRow::eta_backward);

    m.def("calibrate_coupling", &calibrate_coupling);
    m.def("simulate_storage", &simulate_storage);
    m.def("simulate_retrieval", &simulate_retrieval);
    m.def("efficiency_sweep", &efficiency_sweep);

    // optimizer
    py::enum_<Dof>(m, "Dof")
        .value("potential", Dof::potential)
        .value("x", Dof::x)
        .value("y", Dof::y);

    py::class_<OptimizationProblem>(m, "OptimizationProblem")
        .def_readonly("span", &OptimizationProblem::span)
        .def_readonly("core_half", &OptimizationProblem::core_half);

    py::class_<OptimizeConfig>(m, "OptimizeConfig")
        .def(py::init<>())
        .def_readwrite("restarts", &OptimizeConfig::restarts)
        .def_readwrite("max_evals", &OptimizeConfig::max_evals)
        .def_readwrite("seed", &OptimizeConfig::seed)
        .def_readwrite("polish_evals", &OptimizeConfig::polish_evals);

    py::class_<OptimizationResult>(m, "OptimizationResult")
        .def_readonly("best_params", &OptimizationResult::best_params)
        .def_readonly("achieved_ratio", &OptimizationResult::achieved_ratio)
        .def_readonly("search_ratio", &OptimizationResult::search_ratio)
        .def_readonly("evaluations", &OptimizationResult::evaluations)
        .def_readonly("converged", &OptimizationResult::converged);

    m.def(
        "make_ladder_problem",
        [](int classes, const std::vector<double>& us, const std::vector<int>& free_cls,
           double lx, double d_frac, double ly_frac, double core_frac, double span_frac,
           int search_nx, int verify_nx) {
            return make_ladder_problem(classes, us, free_cls, lx, d_frac, ly_frac, core_frac,
                                       span_frac, search_nx, verify_nx);
        },
        py::arg("classes"), py::arg("potentials"), py::arg("free_classes"), py::arg("lx") = 1.0,
        py::arg("d_frac") = 0.05, py::arg("ly_frac") = 0.75, py::arg("core_frac") = 0.1,
        py::arg("span_frac") = 1.0, py::arg("search_nx") = 128, py::arg("verify_nx") = 512);
    m.def("evaluate_objective", &evaluate_objective);
    m.def("optimize", &optimize);

    // reproduction
    py::class_<CheckResult>(m, "CheckResult")
        .def_readonly("id", &CheckResult::id)
        .def_readonly("name", &CheckResult::name)
        .def_readonly("gated", &CheckResult::gated)
        .def_readonly("passed", &CheckResult::pass)
        .def_readonly("value", &CheckResult::value)
        .def_readonly("target", &CheckResult::target)
        .def_readonly("detail", &CheckResult::detail);

    m.def(
        "run_reproduction",
        [](const std::string& out_dir, uint64_t seed, bool quick) {
            ReproduceOptions o;
            o.out_dir = out_dir;
            o.seed = seed;
            o.quick = quick;
            return run_reproduction(o);
        },
        py::arg("out_dir") = "", py::arg("seed") = 1, py::arg("quick") = false);
}
