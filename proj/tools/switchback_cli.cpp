// Command-line front end: simulate trajectories, estimate from trajectory
// files, query the estimand oracle and theory bounds, pick designs, run
// replicated experiment grids, and emit mixing/normality diagnostics.
//
// All outputs are CSV or JSON; errors print a machine-readable JSON object
// to stderr and exit nonzero.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "swb/errors.hpp"
#include "swb/harness.hpp"
#include "swb/io.hpp"

namespace {

struct SpecFlags {
  std::string spec_file;
  double stay_prob = 0.6;
  double noise_sd = 3.0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--spec", spec_file,
                    "Spec JSON file (default: built-in benchmark)");
    cmd->add_option("--stay-prob", stay_prob,
                    "Benchmark market persistence (ignored with --spec)");
    cmd->add_option("--noise-sd", noise_sd,
                    "Benchmark outcome noise SD (ignored with --spec)");
  }

  swb::FiniteMdpSpec build() const {
    if (!spec_file.empty()) return swb::load_spec_file(spec_file);
    swb::BenchmarkParams p;
    p.stay_prob = stay_prob;
    p.noise_sd = noise_sd;
    return swb::build_benchmark(p);
  }
};

struct ModelBoundFlags {
  std::optional<double> lambda, psi, sigma_sq, t_mix, sigma0_sq, gamma0, c_star;
  int max_lag = 64;

  void attach(CLI::App* cmd) {
    cmd->add_option("--lambda", lambda, "Outcome-mean bound (overrides spec)");
    cmd->add_option("--psi", psi, "Effect-heterogeneity bound");
    cmd->add_option("--sigma-sq", sigma_sq, "Noise variance bound");
    cmd->add_option("--tmix", t_mix, "Mixing time (overrides fitted value)");
    cmd->add_option("--sigma0-sq", sigma0_sq, "Noise variance lower bound");
    cmd->add_option("--gamma0", gamma0, "Outcome magnitude bound");
    cmd->add_option("--cstar", c_star, "Burn-in rule additive constant");
    cmd->add_option("--max-lag", max_lag, "Contraction profile length")
        ->check(CLI::PositiveNumber);
  }

  swb::ModelBounds resolve(const swb::FiniteMdpSpec& spec) const {
    swb::ModelBounds mb;
    // Fit from the spec only when some core field is not given explicitly.
    if (!(lambda && sigma_sq && t_mix))
      mb = swb::model_bounds_from_spec(spec, max_lag);
    if (lambda) mb.Lambda = *lambda;
    if (psi) mb.Psi = *psi;
    if (sigma_sq) mb.sigma_sq = *sigma_sq;
    if (t_mix) mb.t_mix = *t_mix;
    if (sigma0_sq) mb.sigma0_sq = *sigma0_sq;
    if (gamma0) mb.Gamma0 = *gamma0;
    if (c_star) mb.C_star = *c_star;
    mb.validate();
    return mb;
  }
};

void emit(const std::string& content, const std::string& out_path) {
  if (out_path.empty())
    std::cout << content;
  else
    swb::write_text_file(out_path, content);
}

int run(int argc, char** argv) {
  CLI::App app{"Switchback experiment toolkit for Markovian systems"};
  app.require_subcommand(1);

  // --- simulate ---------------------------------------------------------
  auto* sim = app.add_subcommand(
      "simulate", "Simulate one trajectory and write it as CSV (t,w,s,y)");
  SpecFlags sim_spec;
  sim_spec.attach(sim);
  int sim_T = 400, sim_l = 0, sim_b = 0;
  int sim_constant = -1;
  std::uint64_t sim_seed = 1;
  bool sim_strict = false;
  std::string sim_out, sim_plan_out, sim_plan_blocks_out;
  sim->add_option("--T", sim_T, "Horizon")->check(CLI::PositiveNumber);
  sim->add_option("--l", sim_l, "Block length (switchback mode)");
  sim->add_option("--b", sim_b, "Burn-in (recorded in the plan)");
  sim->add_option("--constant", sim_constant,
                  "Constant treatment 0 or 1 instead of a switchback plan");
  sim->add_option("--seed", sim_seed, "Master seed");
  sim->add_flag("--strict", sim_strict, "Require T divisible by l");
  sim->add_option("--out", sim_out, "Trajectory CSV path (default stdout)");
  sim->add_option("--plan-out", sim_plan_out, "Also write the plan as t,w CSV");
  sim->add_option("--plan-blocks-out", sim_plan_blocks_out,
                  "Also write the plan as block,z CSV");

  // --- estimate ---------------------------------------------------------
  auto* est = app.add_subcommand(
      "estimate", "Difference-in-means estimate from a trajectory CSV");
  std::string est_traj;
  int est_l = 0, est_b = 0;
  bool est_strict = false;
  std::string est_out, est_csv_out;
  est->add_option("--traj", est_traj, "Trajectory CSV (t,w,s,y)")->required();
  est->add_option("--l", est_l, "Block length")->required();
  est->add_option("--b", est_b, "Burn-in periods discarded per block");
  est->add_flag("--strict", est_strict, "Require T divisible by l");
  est->add_option("--out", est_out, "Report JSON path (default stdout)");
  est->add_option("--csv", est_csv_out, "Also write tau_hat,k1,k0,degenerate CSV");

  // --- oracle -----------------------------------------------------------
  auto* ora = app.add_subcommand(
      "oracle", "Exact estimands: per-period effects, horizon and filtered averages");
  SpecFlags ora_spec;
  ora_spec.attach(ora);
  int ora_T = 0, ora_l = 0, ora_b = 0;
  std::string ora_out, ora_trace_out;
  ora->add_option("--T", ora_T, "Horizon")->required()->check(CLI::PositiveNumber);
  ora->add_option("--l", ora_l, "Block length for the filtered average");
  ora->add_option("--b", ora_b, "Burn-in for the filtered average");
  ora->add_option("--out", ora_out, "Report JSON path (default stdout)");
  ora->add_option("--trace-csv", ora_trace_out, "Write the t,tau_t trace CSV");

  // --- bounds -----------------------------------------------------------
  auto* bnd = app.add_subcommand(
      "bounds", "Bias/variance bound components for a design");
  SpecFlags bnd_spec;
  bnd_spec.attach(bnd);
  ModelBoundFlags bnd_mb;
  bnd_mb.attach(bnd);
  int bnd_T = 0, bnd_l = 0, bnd_b = 0;
  std::vector<int> bnd_T_list;
  std::string bnd_out, bnd_curve_out;
  bnd->add_option("--T", bnd_T, "Horizon")->required()->check(CLI::PositiveNumber);
  bnd->add_option("--l", bnd_l, "Block length")->required();
  bnd->add_option("--b", bnd_b, "Burn-in");
  bnd->add_option("--T-list", bnd_T_list,
                  "Extra horizons for a T,l,b,component,value curve CSV");
  bnd->add_option("--out", bnd_out, "Report JSON path (default stdout)");
  bnd->add_option("--curve-out", bnd_curve_out, "Curve CSV path");

  // --- design -----------------------------------------------------------
  auto* des = app.add_subcommand(
      "design", "Rate-optimal (l, b) recommendations for both targets");
  SpecFlags des_spec;
  des_spec.attach(des);
  ModelBoundFlags des_mb;
  des_mb.attach(des);
  int des_T = 0;
  std::string des_out;
  des->add_option("--T", des_T, "Horizon")->required()->check(CLI::PositiveNumber);
  des->add_option("--out", des_out, "JSON path (default stdout)");

  // --- experiment -------------------------------------------------------
  auto* exp = app.add_subcommand(
      "experiment", "Replicated grid study from a config JSON file");
  std::string exp_config, exp_grid_out, exp_env_out, exp_plot_out;
  exp->add_option("--config", exp_config, "Experiment config JSON")->required();
  exp->add_option("--grid-out", exp_grid_out, "Cell CSV path (default stdout)");
  exp->add_option("--envelope-out", exp_env_out, "Envelope CSV path");
  exp->add_option("--plot-out", exp_plot_out, "Plot-data CSV path");

  // --- clt-check --------------------------------------------------------
  auto* clt = app.add_subcommand(
      "clt-check", "Normality and coverage diagnostics for one cell");
  SpecFlags clt_spec;
  clt_spec.attach(clt);
  int clt_T = 0, clt_l = 0, clt_b = -1, clt_span = 0, clt_reps = 1000;
  int clt_threads = 0, clt_max_lag = 64;
  std::uint64_t clt_seed = 20250817;
  std::string clt_out;
  clt->add_option("--T", clt_T, "Horizon")->required()->check(CLI::PositiveNumber);
  clt->add_option("--l", clt_l, "Block length (explicit cell)");
  clt->add_option("--b", clt_b, "Burn-in (explicit cell)");
  clt->add_option("--span", clt_span,
                  "Fixed l-b; picks b = round((t_mix/2) ln T) from the fitted "
                  "mixing time");
  clt->add_option("--reps", clt_reps, "Replicates (>= 100)");
  clt->add_option("--seed", clt_seed, "Master seed");
  clt->add_option("--threads", clt_threads, "Worker threads (0 = auto)");
  clt->add_option("--max-lag", clt_max_lag, "Contraction profile length");
  clt->add_option("--out", clt_out, "JSON path (default stdout)");

  // --- mixing -----------------------------------------------------------
  auto* mix = app.add_subcommand(
      "mixing", "Contraction profiles and fitted mixing time");
  SpecFlags mix_spec;
  mix_spec.attach(mix);
  int mix_max_lag = 64;
  std::string mix_out, mix_profile_out;
  mix->add_option("--max-lag", mix_max_lag, "Profile length")
      ->check(CLI::PositiveNumber);
  mix->add_option("--out", mix_out, "JSON path (default stdout)");
  mix->add_option("--profile-csv", mix_profile_out,
                  "Write action,lag,delta profile CSV");

  CLI11_PARSE(app, argc, argv);

  if (sim->parsed()) {
    swb::FiniteMdpSpec spec = sim_spec.build();
    swb::Trajectory traj;
    if (sim_constant >= 0) {
      if (sim_constant > 1)
        throw std::invalid_argument("simulate: --constant must be 0 or 1");
      std::vector<int> treatments(sim_T, sim_constant);
      traj = swb::simulate_trajectory(
          spec, treatments,
          swb::derive_seed(sim_seed, {swb::seed_tag::trajectory}));
    } else {
      if (sim_l <= 1)
        throw std::invalid_argument(
            "simulate: give --constant or a block length --l > 1");
      swb::SwitchbackDesign design(sim_T, sim_l, sim_b, sim_strict);
      swb::AssignmentPlan plan = swb::assign(
          design, swb::derive_seed(sim_seed, {swb::seed_tag::assignment}));
      traj = swb::simulate_trajectory(
          spec, plan.treatments,
          swb::derive_seed(sim_seed, {swb::seed_tag::trajectory}));
      if (!sim_plan_out.empty())
        swb::write_text_file(sim_plan_out, swb::plan_periods_csv(plan));
      if (!sim_plan_blocks_out.empty())
        swb::write_text_file(sim_plan_blocks_out, swb::plan_blocks_csv(plan));
    }
    emit(swb::trajectory_csv(traj), sim_out);
  }

  if (est->parsed()) {
    swb::Trajectory traj =
        swb::parse_trajectory_csv(swb::read_text_file(est_traj));
    swb::SwitchbackDesign design(traj.horizon, est_l, est_b, est_strict);
    swb::AssignmentPlan plan = swb::plan_from_trajectory(traj, design);
    swb::EstimateReport report = swb::dm_estimate(traj, plan, design);
    emit(swb::estimate_report_json(report) + "\n", est_out);
    if (!est_csv_out.empty())
      swb::write_text_file(est_csv_out, swb::estimate_report_csv(report));
  }

  if (ora->parsed()) {
    swb::FiniteMdpSpec spec = ora_spec.build();
    std::vector<int> filter;
    if (ora_l > 1) {
      swb::SwitchbackDesign design(ora_T, ora_l, ora_b, false);
      filter = swb::filtered_index_set(design);
    } else {
      filter.resize(ora_T);
      for (int t = 1; t <= ora_T; ++t) filter[t - 1] = t;
    }
    swb::EstimandReport report = swb::estimand_report(spec, ora_T, filter);
    emit(swb::estimand_report_json(report) + "\n", ora_out);
    if (!ora_trace_out.empty())
      swb::write_text_file(ora_trace_out, swb::tau_trace_csv(report));
  }

  if (bnd->parsed()) {
    swb::FiniteMdpSpec spec = bnd_spec.build();
    swb::ModelBounds mb = bnd_mb.resolve(spec);
    swb::SwitchbackDesign design(bnd_T, bnd_l, bnd_b, false);
    emit(swb::bounds_report_json(swb::mse_bound(mb, design)) + "\n", bnd_out);
    if (!bnd_curve_out.empty()) {
      std::vector<swb::SwitchbackDesign> designs;
      designs.push_back(design);
      for (int T : bnd_T_list)
        designs.emplace_back(T, bnd_l, bnd_b, false);
      swb::write_text_file(bnd_curve_out, swb::bound_curve_csv(mb, designs));
    }
  }

  if (des->parsed()) {
    swb::FiniteMdpSpec spec = des_spec.build();
    swb::ModelBounds mb = des_mb.resolve(spec);
    swb::DesignChoice g = swb::optimal_design_gate(des_T, mb.t_mix);
    swb::DesignChoice f = swb::optimal_design_fate(des_T, mb);
    emit(swb::design_choice_json(g, f, mb, des_T) + "\n", des_out);
  }

  if (exp->parsed()) {
    swb::ExperimentConfig config = swb::load_config_file(exp_config);
    swb::GridResult grid = swb::run_grid(config);
    emit(swb::grid_csv(grid), exp_grid_out);
    if (!exp_env_out.empty())
      swb::write_text_file(exp_env_out, swb::envelope_csv(grid));
    if (!exp_plot_out.empty())
      swb::write_text_file(exp_plot_out, swb::plot_data_csv(grid));
  }

  if (clt->parsed()) {
    swb::FiniteMdpSpec spec = clt_spec.build();
    std::optional<swb::SwitchbackDesign> design;
    if (clt_span > 0) {
      double t_mix = swb::estimate_mixing_time(spec, clt_max_lag).t_mix;
      design = swb::clt_default_cell(clt_T, t_mix, clt_span, false);
    } else {
      if (clt_l <= 1 || clt_b < 0)
        throw std::invalid_argument(
            "clt-check: give --span or an explicit --l/--b cell");
      design = swb::SwitchbackDesign(clt_T, clt_l, clt_b, false);
    }
    swb::CltDiagnostics d =
        swb::clt_check(spec, *design, clt_reps, clt_seed, clt_threads);
    emit(swb::clt_diagnostics_json(d) + "\n", clt_out);
  }

  if (mix->parsed()) {
    swb::FiniteMdpSpec spec = mix_spec.build();
    swb::MixingFit fit = swb::estimate_mixing_time(spec, mix_max_lag);
    emit(swb::mixing_fit_json(fit) + "\n", mix_out);
    if (!mix_profile_out.empty())
      swb::write_text_file(mix_profile_out, swb::contraction_profile_csv(fit));
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const swb::NonMixingError& e) {
    std::cerr << swb::error_json("non_mixing", e.what()) << "\n";
  } catch (const swb::NonErgodicError& e) {
    std::cerr << swb::error_json("non_ergodic", e.what()) << "\n";
  } catch (const swb::ConsistencyError& e) {
    std::cerr << swb::error_json("consistency", e.what()) << "\n";
  } catch (const std::invalid_argument& e) {
    std::cerr << swb::error_json("invalid_input", e.what()) << "\n";
  } catch (const std::exception& e) {
    std::cerr << swb::error_json("runtime", e.what()) << "\n";
  }
  return 1;
}
