#include "driftless/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <sstream>

#include <json.hpp>

namespace driftless {

namespace {

using nlohmann::json;

[[noreturn]] void config_fail(const std::string& source, const std::string& message) {
  throw ConfigError(source + ": " + message);
}

void reject_unknown_keys(const json& obj, const std::vector<std::string>& allowed,
                         const std::string& source, const std::string& context) {
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      config_fail(source, "unknown key '" + key + "' in " + context);
  }
}

double require_number(const json& obj, const std::string& key, const std::string& source) {
  if (!obj.contains(key)) config_fail(source, "missing required key '" + key + "'");
  if (!obj[key].is_number()) config_fail(source, "key '" + key + "' must be a number");
  return obj[key].get<double>();
}

double optional_number(const json& obj, const std::string& key, double fallback,
                       const std::string& source) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number()) config_fail(source, "key '" + key + "' must be a number");
  return obj[key].get<double>();
}

Vec require_vector(const json& obj, const std::string& key, const std::string& source) {
  if (!obj.contains(key)) config_fail(source, "missing required key '" + key + "'");
  if (!obj[key].is_array() || obj[key].empty())
    config_fail(source, "key '" + key + "' must be a non-empty array of numbers");
  Vec out(static_cast<int>(obj[key].size()));
  int i = 0;
  for (const auto& entry : obj[key]) {
    if (!entry.is_number()) config_fail(source, "key '" + key + "' must contain numbers only");
    out[i++] = entry.get<double>();
  }
  return out;
}

RunKind parse_run_kind(const std::string& name, const std::string& source) {
  if (name == "closed_loop") return RunKind::closed_loop;
  if (name == "driftless") return RunKind::driftless;
  if (name == "baseline") return RunKind::baseline;
  if (name == "baseline_clamped") return RunKind::baseline_clamped;
  config_fail(source, "unknown run kind '" + name + "'");
}

}  // namespace

const char* run_kind_name(RunKind k) {
  switch (k) {
    case RunKind::closed_loop: return "closed_loop";
    case RunKind::driftless: return "driftless";
    case RunKind::baseline: return "baseline";
    case RunKind::baseline_clamped: return "baseline_clamped";
  }
  return "unknown";
}

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

SystemModel ExperimentConfig::make_model() const {
  if (model.name == "admire") return admire_model();
  if (model.name == "vdp") return vdp_model(model.mu);
  if (model.name == "wing_rock") return wing_rock_model();
  if (model.name == "two_link")
    return two_link_model(model.m1, model.m2, model.l1, model.l2, model.g_acc);
  throw ConfigError("unknown model '" + model.name + "'");
}

ProblemSpec ExperimentConfig::make_problem() const {
  ProblemSpec spec;
  spec.model = make_model();
  spec.x0 = x0;
  spec.xtg = xtg;
  spec.t_star = t_star;
  spec.schedule_kind = schedule_kind;
  spec.t_final = t_final;
  spec.ratio = ratio;
  spec.n_checkpoints = n_checkpoints;
  spec.h_max = h_max;
  spec.epsilon = epsilon;
  spec.validate();
  return spec;
}

ExperimentConfig parse_config_text(const std::string& text, const std::string& source_name) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    config_fail(source_name, std::string("malformed JSON: ") + e.what());
  }
  if (!root.is_object()) config_fail(source_name, "top level must be an object");
  reject_unknown_keys(root,
                      {"model", "x0", "xtg", "t_star", "schedule", "n_checkpoints", "h_max",
                       "epsilon", "runs", "out_dir"},
                      source_name, "top level");

  ExperimentConfig cfg;

  if (!root.contains("model")) config_fail(source_name, "missing required key 'model'");
  const json& model = root["model"];
  if (!model.is_object() || !model.contains("name") || !model["name"].is_string())
    config_fail(source_name, "'model' must be an object with a string 'name'");
  cfg.model.name = model["name"].get<std::string>();
  if (cfg.model.name == "vdp") {
    reject_unknown_keys(model, {"name", "mu"}, source_name, "'model'");
    cfg.model.mu = optional_number(model, "mu", cfg.model.mu, source_name);
  } else if (cfg.model.name == "two_link") {
    reject_unknown_keys(model, {"name", "m1", "m2", "l1", "l2", "g_acc"}, source_name, "'model'");
    cfg.model.m1 = optional_number(model, "m1", cfg.model.m1, source_name);
    cfg.model.m2 = optional_number(model, "m2", cfg.model.m2, source_name);
    cfg.model.l1 = optional_number(model, "l1", cfg.model.l1, source_name);
    cfg.model.l2 = optional_number(model, "l2", cfg.model.l2, source_name);
    cfg.model.g_acc = optional_number(model, "g_acc", cfg.model.g_acc, source_name);
  } else if (cfg.model.name == "admire" || cfg.model.name == "wing_rock") {
    reject_unknown_keys(model, {"name"}, source_name, "'model'");
  } else {
    config_fail(source_name, "unknown model '" + cfg.model.name + "'");
  }

  cfg.x0 = require_vector(root, "x0", source_name);
  cfg.xtg = require_vector(root, "xtg", source_name);

  if (root.contains("schedule")) {
    const json& sched = root["schedule"];
    if (!sched.is_object() || !sched.contains("kind") || !sched["kind"].is_string())
      config_fail(source_name, "'schedule' must be an object with a string 'kind'");
    const std::string kind = sched["kind"].get<std::string>();
    if (kind == "harmonic") {
      reject_unknown_keys(sched, {"kind"}, source_name, "'schedule'");
      cfg.schedule_kind = ScheduleKind::harmonic;
    } else if (kind == "geometric") {
      reject_unknown_keys(sched, {"kind", "t_f", "a"}, source_name, "'schedule'");
      cfg.schedule_kind = ScheduleKind::geometric;
      cfg.t_final = require_number(sched, "t_f", source_name);
      cfg.ratio = require_number(sched, "a", source_name);
    } else {
      config_fail(source_name, "schedule kind must be 'harmonic' or 'geometric'");
    }
  }

  if (cfg.schedule_kind == ScheduleKind::harmonic)
    cfg.t_star = require_number(root, "t_star", source_name);
  else
    cfg.t_star = optional_number(root, "t_star", 0.0, source_name);

  const double n_checkpoints = optional_number(root, "n_checkpoints", 200.0, source_name);
  if (n_checkpoints < 1.0 || n_checkpoints != std::floor(n_checkpoints))
    config_fail(source_name, "'n_checkpoints' must be a positive integer");
  cfg.n_checkpoints = static_cast<int>(n_checkpoints);
  cfg.h_max = optional_number(root, "h_max", 0.0, source_name);
  cfg.epsilon = optional_number(root, "epsilon", 0.05, source_name);

  if (root.contains("runs")) {
    if (!root["runs"].is_array()) config_fail(source_name, "'runs' must be an array of strings");
    cfg.runs.clear();
    for (const auto& entry : root["runs"]) {
      if (!entry.is_string()) config_fail(source_name, "'runs' must be an array of strings");
      cfg.runs.push_back(parse_run_kind(entry.get<std::string>(), source_name));
    }
    if (cfg.runs.empty()) config_fail(source_name, "'runs' must not be empty");
  }

  if (root.contains("out_dir")) {
    if (!root["out_dir"].is_string()) config_fail(source_name, "'out_dir' must be a string");
    cfg.out_dir = root["out_dir"].get<std::string>();
  }
  return cfg;
}

ExperimentConfig parse_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str(), std::filesystem::path(path).filename().string());
}

namespace {

std::ofstream open_artifact(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);  // LF line endings on all platforms
  if (!out) throw Error("cannot write artifact " + path.string());
  return out;
}

void write_trajectory_csv(const std::filesystem::path& path, const TrajectoryRecord& rec,
                          int state_dim, int input_dim) {
  auto out = open_artifact(path);
  out << "t";
  for (int i = 1; i <= state_dim; ++i) out << ",x_" << i;
  for (int i = 1; i <= input_dim; ++i) out << ",u_" << i;
  out << "\n";
  for (const DenseSample& s : rec.samples) {
    out << format_g17(s.t);
    for (int i = 0; i < state_dim; ++i) out << "," << format_g17(s.x[i]);
    for (int i = 0; i < input_dim; ++i) out << "," << format_g17(s.u[i]);
    out << "\n";
  }
}

void write_checkpoints_csv(const std::filesystem::path& path, const TrajectoryRecord& rec) {
  auto out = open_artifact(path);
  out << "n,t_n,dt_n,err_inf,vbar_n,u_inf_max_so_far\n";
  for (const CheckpointRecord& cp : rec.checkpoints) {
    out << cp.n << "," << format_g17(cp.t_n) << "," << format_g17(cp.dt_n) << ","
        << format_g17(cp.err_inf) << ",";
    if (cp.vbar_n) out << format_g17(*cp.vbar_n);
    out << "," << format_g17(cp.u_inf_max_so_far) << "\n";
  }
}

std::string format_vec(const Vec& v) {
  std::string out = "[";
  for (int i = 0; i < v.dim(); ++i) {
    if (i > 0) out += ", ";
    out += format_g17(v[i]);
  }
  return out + "]";
}

void write_feasibility_txt(const std::filesystem::path& path, const ExperimentConfig& cfg,
                           const ProblemSpec& spec) {
  auto out = open_artifact(path);
  const Mat g0 = spec.model.input_map(spec.x0);
  const Mat g0_pinv = pinv(g0);
  const bool rank_ok = numerical_rank(g0) == spec.model.state_dim;
  const Vec residual = rank_deficiency_residual(g0, g0_pinv, spec.x0, spec.xtg);
  const double t_lower = inf_norm(g0_pinv * (spec.xtg - spec.x0));
  // For geometric schedules the role of t_star is played by the first
  // interval length.
  const CheckpointSchedule sched = spec.make_schedule();
  const double design_time = interval_length(sched, 1);

  out << "model = " << cfg.model.name << "\n";
  if (spec.model.lipschitz) {
    const FeasibilityReport report = compute_constants(spec.model, spec.x0, spec.xtg);
    out << "c = " << format_g17(report.c) << "\n";
    out << "D_S = " << format_g17(report.d_s) << "\n";
    out << "c1 = " << format_g17(report.c1) << "\n";
    out << "t_lower = " << format_g17(report.t_lower) << "\n";
    out << "t_bar = " << (report.t_upper ? format_g17(*report.t_upper) : "none") << "\n";
    out << "verdict = " << to_string(check_t_star(report, design_time)) << "\n";
  } else {
    out << "c = unknown\n";
    out << "D_S = unknown\n";
    out << "c1 = unknown\n";
    out << "t_lower = " << format_g17(t_lower) << "\n";
    out << "t_bar = none\n";
    out << "verdict = " << (design_time >= t_lower ? "lower_only" : "infeasible") << "\n";
  }
  out << "rank_ok = " << (rank_ok ? "true" : "false") << "\n";
  out << "remark2_residual = " << format_vec(residual) << "\n";
}

struct RunResult {
  RunOutcome outcome;
  TrajectoryRecord record;
  std::string error_message;
};

RunResult execute_run(const ProblemSpec& spec, RunKind kind) {
  RunResult result;
  result.outcome.kind = kind;
  try {
    switch (kind) {
      case RunKind::closed_loop: result.record = run_closed_loop(spec); break;
      case RunKind::driftless: result.record = run_driftless(spec); break;
      case RunKind::baseline: result.record = run_baseline(spec, false); break;
      case RunKind::baseline_clamped: result.record = run_baseline(spec, true); break;
    }
    result.outcome.completed = true;
  } catch (const Diverged& d) {
    result.outcome.diverged = true;
    result.error_message = d.what();
    if (d.partial) result.record = *d.partial;
  } catch (const BaselineSynthesisFailed& b) {
    result.outcome.baseline_failed = true;
    result.error_message = b.what();
  }
  result.outcome.final_err_inf = result.record.final_err_inf();
  result.outcome.constraint_satisfied = result.record.constraint_satisfied;
  result.outcome.reached_epsilon =
      result.outcome.completed && result.outcome.final_err_inf < spec.epsilon;
  return result;
}

void write_summary_txt(const std::filesystem::path& path, const std::vector<RunResult>& results,
                       double epsilon) {
  auto out = open_artifact(path);
  out << "epsilon = " << format_g17(epsilon) << "\n";
  for (const RunResult& r : results) {
    out << "run = " << run_kind_name(r.outcome.kind);
    if (r.outcome.baseline_failed) {
      out << ": status = baseline_synthesis_failed\n";
      continue;
    }
    out << ": status = " << (r.outcome.diverged ? "diverged" : "ok");
    out << "; final_err_inf = " << format_g17(r.outcome.final_err_inf);
    out << "; constraint_satisfied = " << (r.outcome.constraint_satisfied ? "true" : "false");
    out << "; reached_epsilon = " << (r.outcome.reached_epsilon ? "true" : "false");
    out << "\n";
  }
}

}  // namespace

int run_feasibility(const ExperimentConfig& cfg) {
  const ProblemSpec spec = cfg.make_problem();
  std::filesystem::create_directories(cfg.out_dir);
  write_feasibility_txt(std::filesystem::path(cfg.out_dir) / "feasibility.txt", cfg, spec);
  return kExitOk;
}

int run_experiment(const ExperimentConfig& cfg, bool parallel) {
  const ProblemSpec spec = cfg.make_problem();
  std::filesystem::create_directories(cfg.out_dir);
  const std::filesystem::path out_dir(cfg.out_dir);

  write_feasibility_txt(out_dir / "feasibility.txt", cfg, spec);

  std::vector<RunResult> results(cfg.runs.size());
  if (parallel) {
    std::vector<std::future<RunResult>> futures;
    futures.reserve(cfg.runs.size());
    for (RunKind kind : cfg.runs)
      futures.push_back(std::async(std::launch::async, execute_run, std::cref(spec), kind));
    for (std::size_t i = 0; i < futures.size(); ++i) results[i] = futures[i].get();
  } else {
    for (std::size_t i = 0; i < cfg.runs.size(); ++i) results[i] = execute_run(spec, cfg.runs[i]);
  }

  for (const RunResult& r : results) {
    const std::string prefix = run_kind_name(r.outcome.kind);
    if (r.outcome.baseline_failed) continue;  // nothing to write for that run
    write_trajectory_csv(out_dir / (prefix + "_trajectory.csv"), r.record, spec.model.state_dim,
                         spec.model.input_dim);
    write_checkpoints_csv(out_dir / (prefix + "_checkpoints.csv"), r.record);
  }
  write_summary_txt(out_dir / "summary.txt", results, spec.epsilon);

  for (const RunResult& r : results)
    if (r.outcome.diverged) return kExitDiverged;
  for (const RunResult& r : results)
    if (r.outcome.baseline_failed) return kExitBaselineFailed;
  return kExitOk;
}

}  // namespace driftless
