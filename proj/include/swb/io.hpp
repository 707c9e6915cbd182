#pragma once

// Serialization: spec/config JSON, trajectory/plan/report CSV, grid and
// plot-data emission.  All floating-point CSV output uses a fixed "%.12g"
// format so identical runs produce byte-identical files.

#include <string>
#include <vector>

#include "swb/bounds.hpp"
#include "swb/design.hpp"
#include "swb/estimator.hpp"
#include "swb/harness.hpp"
#include "swb/mdp.hpp"
#include "swb/oracle.hpp"

namespace swb {

std::string format_double(double x);

// --- spec JSON ---------------------------------------------------------
// Either {"benchmark": {...params...}} or an explicit
// {"state_count", "kernel0", "kernel1" (nested row arrays),
//  "outcome_mean" (n x 2), "noise_sd", "initial_dist"} object.
FiniteMdpSpec load_spec_json(const std::string& json_text);
FiniteMdpSpec load_spec_file(const std::string& path);
std::string save_spec_json(const FiniteMdpSpec& spec);
std::string save_benchmark_json(const BenchmarkParams& params);

// --- experiment config JSON --------------------------------------------
// Keys: target ("gate"/"fate"), T_values, designs ({l_values, b} |
// {b_values, l_offset} | {pairs}), reps, master_seed, threads,
// strict_blocks, spec (inline spec object, optional; benchmark default).
ExperimentConfig load_config_json(const std::string& json_text);
ExperimentConfig load_config_file(const std::string& path);

// --- CSV ----------------------------------------------------------------
std::string trajectory_csv(const Trajectory& traj);           // t,w,s,y
Trajectory parse_trajectory_csv(const std::string& content);
std::string plan_blocks_csv(const AssignmentPlan& plan);      // block,z
std::string plan_periods_csv(const AssignmentPlan& plan);     // t,w
std::string tau_trace_csv(const EstimandReport& report);      // t,tau_t

// Bound components for a set of designs: T,l,b,component,value.
std::string bound_curve_csv(const ModelBounds& mb,
                            const std::vector<SwitchbackDesign>& designs);

std::string grid_csv(const GridResult& grid);
std::string envelope_csv(const GridResult& grid);

// series,target,T,l,b,mse,mc_se,slope: cell rows, envelope rows (slope =
// fitted envelope rate) and two reference curves anchored at the first
// envelope point (T^{-2/3} and ln(T)/T shapes; slope = their own fitted
// rate).  Throws std::invalid_argument on an empty grid.
std::string plot_data_csv(const GridResult& grid);

// --- report JSON --------------------------------------------------------
std::string estimate_report_json(const EstimateReport& report);
std::string estimate_report_csv(const EstimateReport& report);  // tau_hat,k1,k0,degenerate
std::string estimand_report_json(const EstimandReport& report);
std::string bounds_report_json(const BoundsReport& report);
std::string clt_diagnostics_json(const CltDiagnostics& d);
std::string mixing_fit_json(const MixingFit& fit);
std::string contraction_profile_csv(const MixingFit& fit);     // action,lag,delta
std::string design_choice_json(const DesignChoice& gate_choice,
                               const DesignChoice& fate_choice,
                               const ModelBounds& mb, int T);
std::string error_json(const std::string& type, const std::string& message);

// File helpers.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace swb
