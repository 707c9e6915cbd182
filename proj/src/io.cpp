#include "swb/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace swb {

using json = nlohmann::ordered_json;

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

// --- spec JSON ----------------------------------------------------------

namespace {

Eigen::MatrixXd matrix_from_json(const json& rows, const char* name) {
  if (!rows.is_array() || rows.empty())
    throw std::invalid_argument(std::string(name) + ": expected row array");
  const int n = static_cast<int>(rows.size());
  const int m = static_cast<int>(rows[0].size());
  Eigen::MatrixXd out(n, m);
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(rows[i].size()) != m)
      throw std::invalid_argument(std::string(name) + ": ragged rows");
    for (int j = 0; j < m; ++j) out(i, j) = rows[i][j].get<double>();
  }
  return out;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

BenchmarkParams benchmark_params_from_json(const json& j) {
  BenchmarkParams p;
  p.market_states = j.value("market_states", p.market_states);
  p.hidden_cap = j.value("hidden_cap", p.hidden_cap);
  p.stay_prob = j.value("stay_prob", p.stay_prob);
  p.up_prob_treated = j.value("up_prob_treated", p.up_prob_treated);
  p.up_prob_control = j.value("up_prob_control", p.up_prob_control);
  p.effect_multiplier = j.value("effect_multiplier", p.effect_multiplier);
  p.noise_sd = j.value("noise_sd", p.noise_sd);
  p.initial_hidden = j.value("initial_hidden", p.initial_hidden);
  return p;
}

FiniteMdpSpec spec_from_json(const json& j) {
  if (j.contains("benchmark"))
    return build_benchmark(benchmark_params_from_json(j["benchmark"]));
  for (const char* key :
       {"state_count", "kernel0", "kernel1", "outcome_mean", "noise_sd",
        "initial_dist"})
    if (!j.contains(key))
      throw std::invalid_argument(std::string("spec: missing key ") + key);
  Eigen::MatrixXd k0 = matrix_from_json(j["kernel0"], "kernel0");
  Eigen::MatrixXd k1 = matrix_from_json(j["kernel1"], "kernel1");
  Eigen::MatrixXd mu = matrix_from_json(j["outcome_mean"], "outcome_mean");
  const int n = j["state_count"].get<int>();
  if (k0.rows() != n)
    throw std::invalid_argument("spec: state_count/kernel mismatch");
  Eigen::VectorXd init(n);
  const auto& init_json = j["initial_dist"];
  if (static_cast<int>(init_json.size()) != n)
    throw std::invalid_argument("spec: initial_dist length mismatch");
  for (int s = 0; s < n; ++s) init(s) = init_json[s].get<double>();
  return FiniteMdpSpec(std::move(k0), std::move(k1), std::move(mu),
                       j["noise_sd"].get<double>(), std::move(init));
}

json parse_json(const std::string& text, const char* what) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded())
    throw std::invalid_argument(std::string(what) + ": malformed JSON");
  return j;
}

}  // namespace

FiniteMdpSpec load_spec_json(const std::string& json_text) {
  return spec_from_json(parse_json(json_text, "spec"));
}

FiniteMdpSpec load_spec_file(const std::string& path) {
  return load_spec_json(read_text_file(path));
}

std::string save_spec_json(const FiniteMdpSpec& spec) {
  json j;
  j["state_count"] = spec.state_count();
  j["kernel0"] = matrix_to_json(spec.kernel(0));
  j["kernel1"] = matrix_to_json(spec.kernel(1));
  j["outcome_mean"] = matrix_to_json(spec.outcome_mean());
  j["noise_sd"] = spec.noise_sd();
  json init = json::array();
  for (int s = 0; s < spec.state_count(); ++s)
    init.push_back(spec.initial_dist()(s));
  j["initial_dist"] = std::move(init);
  return j.dump(2);
}

std::string save_benchmark_json(const BenchmarkParams& p) {
  json j;
  j["benchmark"] = {{"market_states", p.market_states},
                    {"hidden_cap", p.hidden_cap},
                    {"stay_prob", p.stay_prob},
                    {"up_prob_treated", p.up_prob_treated},
                    {"up_prob_control", p.up_prob_control},
                    {"effect_multiplier", p.effect_multiplier},
                    {"noise_sd", p.noise_sd},
                    {"initial_hidden", p.initial_hidden}};
  return j.dump(2);
}

// --- experiment config --------------------------------------------------

ExperimentConfig load_config_json(const std::string& json_text) {
  json j = parse_json(json_text, "config");
  ExperimentConfig cfg;

  std::string target = j.value("target", std::string("gate"));
  if (target == "gate")
    cfg.target = Target::gate;
  else if (target == "fate")
    cfg.target = Target::fate;
  else
    throw std::invalid_argument("config: target must be gate or fate");

  if (j.contains("spec")) {
    if (j["spec"].contains("benchmark"))
      cfg.benchmark = benchmark_params_from_json(j["spec"]["benchmark"]);
    cfg.spec_json = j["spec"].dump();
  }

  if (!j.contains("T_values"))
    throw std::invalid_argument("config: missing T_values");
  for (const auto& t : j["T_values"]) cfg.grid.T_values.push_back(t.get<int>());

  if (!j.contains("designs"))
    throw std::invalid_argument("config: missing designs");
  const json& d = j["designs"];
  if (d.contains("l_values")) {
    for (const auto& l : d["l_values"])
      cfg.grid.l_values.push_back(l.get<int>());
    cfg.grid.b_fixed = d.value("b", 0);
  } else if (d.contains("b_values")) {
    for (const auto& b : d["b_values"])
      cfg.grid.b_values.push_back(b.get<int>());
    if (!d.contains("l_offset"))
      throw std::invalid_argument("config: b_values needs l_offset");
    cfg.grid.l_offset = d["l_offset"].get<int>();
  } else if (d.contains("pairs")) {
    for (const auto& p : d["pairs"]) {
      if (p.size() != 2)
        throw std::invalid_argument("config: pairs entries must be [l, b]");
      cfg.grid.pairs.emplace_back(p[0].get<int>(), p[1].get<int>());
    }
  } else {
    throw std::invalid_argument(
        "config: designs needs l_values, b_values, or pairs");
  }

  cfg.reps = j.value("reps", cfg.reps);
  cfg.master_seed = j.value("master_seed", cfg.master_seed);
  cfg.threads = j.value("threads", cfg.threads);
  cfg.strict_blocks = j.value("strict_blocks", cfg.strict_blocks);
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
  return load_config_json(read_text_file(path));
}

// --- CSV ----------------------------------------------------------------

std::string trajectory_csv(const Trajectory& traj) {
  std::string out = "t,w,s,y\n";
  for (int t = 1; t <= traj.horizon; ++t) {
    out += std::to_string(t);
    out += ',';
    out += std::to_string(traj.treatments[t - 1]);
    out += ',';
    out += std::to_string(traj.states[t - 1]);
    out += ',';
    out += format_double(traj.outcomes[t - 1]);
    out += '\n';
  }
  return out;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}

}  // namespace

Trajectory parse_trajectory_csv(const std::string& content) {
  std::istringstream in(content);
  std::string line;
  if (!std::getline(in, line) || split_line(line) !=
      std::vector<std::string>{"t", "w", "s", "y"})
    throw std::invalid_argument("trajectory csv: expected header t,w,s,y");
  Trajectory traj;
  int expected_t = 1;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto fields = split_line(line);
    if (fields.size() != 4)
      throw std::invalid_argument("trajectory csv: expected 4 fields per row");
    int t, w, s;
    double y;
    try {
      t = std::stoi(fields[0]);
      w = std::stoi(fields[1]);
      s = std::stoi(fields[2]);
      y = std::stod(fields[3]);
    } catch (const std::exception&) {
      throw std::invalid_argument("trajectory csv: malformed numeric field");
    }
    if (t != expected_t)
      throw std::invalid_argument("trajectory csv: non-contiguous times");
    traj.treatments.push_back(w);
    traj.states.push_back(s);
    traj.outcomes.push_back(y);
    ++expected_t;
  }
  traj.horizon = static_cast<int>(traj.treatments.size());
  if (traj.horizon == 0)
    throw std::invalid_argument("trajectory csv: no data rows");
  return traj;
}

std::string plan_blocks_csv(const AssignmentPlan& plan) {
  std::string out = "block,z\n";
  for (std::size_t i = 0; i < plan.block_treatments.size(); ++i)
    out += std::to_string(i + 1) + ',' +
           std::to_string(plan.block_treatments[i]) + '\n';
  return out;
}

std::string plan_periods_csv(const AssignmentPlan& plan) {
  std::string out = "t,w\n";
  for (std::size_t t = 0; t < plan.treatments.size(); ++t)
    out += std::to_string(t + 1) + ',' + std::to_string(plan.treatments[t]) +
           '\n';
  return out;
}

std::string tau_trace_csv(const EstimandReport& report) {
  std::string out = "t,tau_t\n";
  for (std::size_t t = 0; t < report.tau_t_trace.size(); ++t)
    out += std::to_string(t + 1) + ',' + format_double(report.tau_t_trace[t]) +
           '\n';
  return out;
}

std::string bound_curve_csv(const ModelBounds& mb,
                            const std::vector<SwitchbackDesign>& designs) {
  std::string out = "T,l,b,component,value\n";
  for (const auto& d : designs) {
    BoundsReport rep = mse_bound(mb, d);
    auto row = [&](const char* component, double value) {
      out += std::to_string(d.horizon()) + ',' +
             std::to_string(d.block_length()) + ',' +
             std::to_string(d.burn_in()) + ',' + component + ',' +
             format_double(value) + '\n';
    };
    row("mixing_bias", rep.mixing_bias);
    row("burnin_bias", rep.burnin_bias);
    row("var_clustering", rep.var_clustering);
    row("var_noise", rep.var_noise);
    row("var_carryover", rep.var_carryover);
    row("var_total", rep.var_total);
    row("mse_bound_gate", rep.mse_bound_gate);
    row("mse_bound_fate", rep.mse_bound_fate);
  }
  return out;
}

std::string grid_csv(const GridResult& grid) {
  std::string out =
      "target,T,l,b,reps,k,truth,mean_estimate,bias,variance,mse,"
      "mc_se_of_mse,degenerate_count\n";
  for (const auto& c : grid.cells) {
    out += std::string(target_name(grid.target)) + ',' + std::to_string(c.T) +
           ',' + std::to_string(c.l) + ',' + std::to_string(c.b) + ',' +
           std::to_string(c.reps) + ',' + std::to_string(c.k) + ',' +
           format_double(c.truth) + ',' + format_double(c.mean_estimate) +
           ',' + format_double(c.bias) + ',' + format_double(c.variance) +
           ',' + format_double(c.mse) + ',' + format_double(c.mc_se_of_mse) +
           ',' + std::to_string(c.degenerate_count) + '\n';
  }
  return out;
}

std::string envelope_csv(const GridResult& grid) {
  std::string out = "target,T,l,b,mse,mc_se\n";
  for (const auto& e : grid.envelope)
    out += std::string(target_name(grid.target)) + ',' + std::to_string(e.T) +
           ',' + std::to_string(e.l) + ',' + std::to_string(e.b) + ',' +
           format_double(e.mse) + ',' + format_double(e.mc_se) + '\n';
  return out;
}

std::string plot_data_csv(const GridResult& grid) {
  if (grid.cells.empty())
    throw std::invalid_argument("plot_data_csv: empty grid");
  std::string out = "series,target,T,l,b,mse,mc_se,slope\n";
  const std::string target = target_name(grid.target);

  for (const auto& c : grid.cells)
    out += "cell," + target + ',' + std::to_string(c.T) + ',' +
           std::to_string(c.l) + ',' + std::to_string(c.b) + ',' +
           format_double(c.mse) + ',' + format_double(c.mc_se_of_mse) + ",\n";

  const std::string env_slope =
      grid.envelope_fit ? format_double(grid.envelope_fit->slope) : "";
  for (const auto& e : grid.envelope)
    out += "envelope," + target + ',' + std::to_string(e.T) + ',' +
           std::to_string(e.l) + ',' + std::to_string(e.b) + ',' +
           format_double(e.mse) + ',' + format_double(e.mc_se) + ',' +
           env_slope + '\n';

  // Reference shapes anchored at the first envelope point.
  if (!grid.envelope.empty()) {
    const double T0 = grid.envelope.front().T;
    const double m0 = grid.envelope.front().mse;
    std::vector<RatePoint> p23, plog;
    for (const auto& e : grid.envelope) {
      double T = e.T;
      p23.push_back({T, m0 * std::pow(T / T0, -2.0 / 3.0)});
      plog.push_back({T, m0 * (std::log(T) / T) / (std::log(T0) / T0)});
    }
    auto emit_ref = [&](const char* name, const std::vector<RatePoint>& pts) {
      std::string slope =
          pts.size() >= 3 ? format_double(fit_rate(pts).slope) : "";
      for (const auto& p : pts)
        out += std::string(name) + ',' + target + ',' +
               std::to_string(static_cast<int>(p.T)) + ",,," +
               format_double(p.mse) + ",," + slope + '\n';
    };
    emit_ref("ref_t23", p23);
    emit_ref("ref_logt", plog);
  }
  return out;
}

// --- report JSON --------------------------------------------------------

std::string estimate_report_json(const EstimateReport& report) {
  json j;
  j["tau_hat"] = report.tau_hat;
  j["k1"] = report.k1;
  j["k0"] = report.k0;
  j["degenerate"] = report.degenerate;
  json blocks = json::array();
  for (const auto& bm : report.block_means)
    blocks.push_back({{"block", bm.block},
                      {"z", bm.treatment},
                      {"mean", bm.mean}});
  j["block_means"] = std::move(blocks);
  return j.dump(2);
}

std::string estimate_report_csv(const EstimateReport& report) {
  return "tau_hat,k1,k0,degenerate\n" + format_double(report.tau_hat) + ',' +
         std::to_string(report.k1) + ',' + std::to_string(report.k0) + ',' +
         std::to_string(report.degenerate ? 1 : 0) + '\n';
}

std::string estimand_report_json(const EstimandReport& report) {
  json j;
  j["tau_gate"] = report.tau_gate;
  j["tau_fate"] = report.tau_fate;
  j["psi_hat"] = report.psi_hat;
  j["horizon"] = report.tau_t_trace.size();
  j["filter_set_size"] = report.filter_set.size();
  j["tau_t_trace"] = report.tau_t_trace;
  j["filter_set"] = report.filter_set;
  return j.dump(2);
}

std::string bounds_report_json(const BoundsReport& report) {
  json j;
  j["mixing_bias"] = report.mixing_bias;
  j["burnin_bias"] = report.burnin_bias;
  j["var_clustering"] = report.var_clustering;
  j["var_noise"] = report.var_noise;
  j["var_carryover"] = report.var_carryover;
  j["var_total"] = report.var_total;
  j["mse_bound_gate"] = report.mse_bound_gate;
  j["mse_bound_fate"] = report.mse_bound_fate;
  j["excluded_terms"] = report.excluded_terms;
  return j.dump(2);
}

std::string clt_diagnostics_json(const CltDiagnostics& d) {
  json j;
  j["reps"] = d.reps;
  j["k"] = d.k;
  j["truth"] = d.truth;
  j["mean_estimate"] = d.mean_estimate;
  j["sd_estimate"] = d.sd_estimate;
  j["coverage90"] = d.coverage90;
  j["coverage95"] = d.coverage95;
  j["skewness"] = d.skewness;
  j["excess_kurtosis"] = d.excess_kurtosis;
  j["ks_distance"] = d.ks_distance;
  j["v_hat"] = d.v_hat;
  if (d.sigma_hat) j["sigma_hat"] = *d.sigma_hat;
  return j.dump(2);
}

std::string mixing_fit_json(const MixingFit& fit) {
  json j;
  j["t_mix"] = fit.t_mix;
  j["first_contracting_lag"] = fit.first_contracting_lag;
  j["profile0"] = fit.profile0;
  j["profile1"] = fit.profile1;
  return j.dump(2);
}

std::string contraction_profile_csv(const MixingFit& fit) {
  std::string out = "action,lag,delta\n";
  for (int w = 0; w < 2; ++w) {
    const auto& profile = w ? fit.profile1 : fit.profile0;
    for (std::size_t j = 0; j < profile.size(); ++j)
      out += std::to_string(w) + ',' + std::to_string(j + 1) + ',' +
             format_double(profile[j]) + '\n';
  }
  return out;
}

std::string design_choice_json(const DesignChoice& gate_choice,
                               const DesignChoice& fate_choice,
                               const ModelBounds& mb, int T) {
  json j;
  j["T"] = T;
  j["model_bounds"] = {{"Lambda", mb.Lambda},       {"Psi", mb.Psi},
                       {"sigma_sq", mb.sigma_sq},   {"t_mix", mb.t_mix},
                       {"sigma0_sq", mb.sigma0_sq}, {"Gamma0", mb.Gamma0},
                       {"C_star", mb.C_star}};
  j["gate"] = {{"l", gate_choice.block_length},
               {"b", gate_choice.burn_in},
               {"l_real", gate_choice.block_length_real},
               {"b_real", gate_choice.burn_in_real}};
  j["fate"] = {{"l", fate_choice.block_length},
               {"b", fate_choice.burn_in},
               {"l_real", fate_choice.block_length_real},
               {"b_real", fate_choice.burn_in_real}};
  return j.dump(2);
}

std::string error_json(const std::string& type, const std::string& message) {
  json j;
  j["error"] = {{"type", type}, {"message", message}};
  return j.dump();
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << content;
}

}  // namespace swb
