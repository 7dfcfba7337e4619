// msflab: command-line front end for the multi-step forecasting laboratory.
//
// Subcommands
//   compose    symbolic h-step self-composition of a polynomial predictor
//   sweep      AR(2) Monte Carlo sweep: error decomposition vs theory
//   taskspace  bilinear task-space geometry study (distances + paired fits)
//   ettm1      recursive-vs-direct MLP study on a scalar series CSV
//
// Exit codes: 0 success, 2 configuration error, 3 data error,
// 4 numerical failure.
//
// Every file-writing run emits a manifest.json next to its outputs with the
// subcommand, seed, resolved configuration, input paths, output names, and
// failure counts. Outputs are deterministic for a fixed seed regardless of
// --jobs; only duration_seconds in the manifest may differ between reruns.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "nlohmann/json.hpp"

#include "msf/config.hpp"
#include "msf/csvio.hpp"
#include "msf/estimate.hpp"
#include "msf/mcharness.hpp"
#include "msf/mlpx.hpp"
#include "msf/mlpx_errors.hpp"
#include "msf/polypred.hpp"
#include "msf/taskspace.hpp"

namespace fs = std::filesystem;
using msf::Config;
using msf::ConfigError;
using msf::mlpx::DataError;

namespace {

constexpr const char* kVersion = "msflab 1.0.0";

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumerical = 4;

std::string lag_name(int var) {
  return var == 0 ? "y[t]" : "y[t-" + std::to_string(var) + "]";
}

std::string param_name(int var) { return "b" + std::to_string(var + 1); }

std::string join_doubles(const std::vector<double>& v) {
  std::string out;
  for (double x : v) {
    if (!out.empty()) out += ",";
    out += msf::format_double(x);
  }
  return out;
}

std::string join_ints(const std::vector<int>& v) {
  std::string out;
  for (int x : v) {
    if (!out.empty()) out += ",";
    out += std::to_string(x);
  }
  return out;
}

/// Writes content to path via a temporary file + rename so readers never
/// observe a partial file.
void write_text_atomic(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot open for writing: " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw DataError("write failed: " + tmp.string());
  }
  fs::rename(tmp, path);
}

struct OutputSink {
  fs::path dir;
  std::vector<std::string> names;

  explicit OutputSink(const std::string& out_dir) : dir(out_dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw DataError("cannot create output directory '" + out_dir +
                            "': " + ec.message());
  }

  void write(const std::string& name, const std::string& content) {
    write_text_atomic(dir / name, content);
    names.push_back(name);
  }
};

/// Fails (exit 2) on config keys in this subcommand's section that the run
/// never consumed -- almost always a typo. Keys under other sections are
/// left alone so one file can configure several subcommands.
void reject_unknown_keys(const Config& cfg, const std::string& section) {
  std::vector<std::string> offenders;
  const std::string prefix = section + ".";
  for (const std::string& k : cfg.unused_keys()) {
    if (k.rfind(prefix, 0) == 0) offenders.push_back(k);
  }
  if (offenders.empty()) return;
  std::string msg = "unknown config key(s) in section [" + section + "]:";
  for (const std::string& k : offenders) msg += " " + k;
  throw ConfigError(msg);
}

/// The manifest records everything needed to reproduce the run (resolved
/// config, not just the file contents) plus bookkeeping. duration_seconds
/// is the only field allowed to differ between identical reruns.
void write_manifest(OutputSink& sink, const std::string& subcommand,
                    std::uint64_t seed,
                    const std::map<std::string, std::string>& resolved,
                    const std::map<std::string, std::string>& inputs,
                    long n_failed, double duration_seconds) {
  nlohmann::json j;  // alphabetical keys: stable serialization
  j["subcommand"] = subcommand;
  j["version"] = kVersion;
  j["seed"] = seed;
  nlohmann::json jc = nlohmann::json::object();
  for (const auto& [k, v] : resolved) jc[k] = v;
  j["config"] = jc;
  nlohmann::json ji = nlohmann::json::object();
  for (const auto& [k, v] : inputs) ji[k] = v;
  j["inputs"] = ji;
  std::vector<std::string> outputs = sink.names;
  outputs.push_back("manifest.json");
  std::sort(outputs.begin(), outputs.end());
  j["outputs"] = outputs;
  j["n_failed"] = n_failed;
  j["duration_seconds"] = duration_seconds;
  sink.write("manifest.json", j.dump(2) + "\n");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_ =
      std::chrono::steady_clock::now();
};

std::vector<double> parse_vector_flag(const std::string& flag,
                                      const std::string& text) {
  std::vector<double> vals;
  std::stringstream ss(text);
  std::string piece;
  while (std::getline(ss, piece, ',')) {
    try {
      size_t used = 0;
      vals.push_back(std::stod(piece, &used));
      if (used != piece.size()) throw std::invalid_argument(piece);
    } catch (const std::exception&) {
      throw ConfigError(flag + ": cannot parse '" + piece + "' as a number");
    }
  }
  return vals;
}

// ---------------------------------------------------------------------------
// compose

int run_compose(const std::string& pred_path, int h, const std::string& at,
                const std::string& out_dir, std::uint64_t seed) {
  Timer timer;
  const msf::polypred::PolyPredictor one_step =
      msf::polypred::predictor_from_json(read_file(pred_path));
  const msf::polypred::CompositionResult comp =
      msf::polypred::compose(one_step, h);

  std::cout << "one-step predictor (p=" << comp.p
            << "): " << comp.one_step.terms.to_string(lag_name) << "\n";
  std::cout << "horizon h = " << comp.h << "\n";
  std::cout << "composed support (" << comp.n_alpha() << " terms):\n";
  for (int i = 0; i < comp.n_alpha(); ++i) {
    std::cout << "  alpha" << (i + 1) << " * "
              << comp.support[i].to_string(lag_name) << "   with alpha"
              << (i + 1) << " = " << comp.param_map[i].to_string(param_name)
              << "\n";
  }
  std::cout << "composed predictor: " << comp.composed.terms.to_string(lag_name)
            << "\n";

  Eigen::VectorXd b;
  if (!at.empty()) {
    std::vector<double> vals = parse_vector_flag("--at", at);
    if (static_cast<int>(vals.size()) != comp.n_params()) {
      throw ConfigError("--at: expected " + std::to_string(comp.n_params()) +
                        " values, got " + std::to_string(vals.size()));
    }
    b = Eigen::Map<Eigen::VectorXd>(vals.data(),
                                    static_cast<Eigen::Index>(vals.size()));
    const Eigen::VectorXd alpha = comp.alpha_at(b);
    const Eigen::MatrixXd jac = comp.jacobian_at(b);
    std::cout << "at b = (";
    for (int i = 0; i < b.size(); ++i)
      std::cout << (i ? ", " : "") << b[i];
    std::cout << "):\n  alpha = (";
    for (int i = 0; i < alpha.size(); ++i)
      std::cout << (i ? ", " : "") << alpha[i];
    std::cout << ")\n  J = [";
    for (int r = 0; r < jac.rows(); ++r) {
      std::cout << (r ? ", [" : "[");
      for (int c = 0; c < jac.cols(); ++c)
        std::cout << (c ? ", " : "") << jac(r, c);
      std::cout << "]";
    }
    std::cout << "]\n";
  }

  if (out_dir.empty()) return kExitOk;

  nlohmann::ordered_json j;
  j["p"] = comp.p;
  j["h"] = comp.h;
  j["one_step"] = nlohmann::ordered_json::parse(to_json(comp.one_step));
  nlohmann::ordered_json support = nlohmann::ordered_json::array();
  for (const auto& mono : comp.support)
    support.push_back(mono.to_string(lag_name));
  j["support"] = support;
  nlohmann::ordered_json pmap = nlohmann::ordered_json::array();
  for (size_t i = 0; i < comp.param_map.size(); ++i) {
    nlohmann::ordered_json row;
    row["alpha_index"] = i;
    row["monomial"] = comp.support[i].to_string(lag_name);
    row["poly"] = comp.param_map[i].to_string(param_name);
    pmap.push_back(row);
  }
  j["param_map"] = pmap;
  j["composed"] = nlohmann::ordered_json::parse(to_json(comp.composed));
  if (b.size() > 0) {
    const Eigen::VectorXd alpha = comp.alpha_at(b);
    const Eigen::MatrixXd jac = comp.jacobian_at(b);
    nlohmann::ordered_json ja = nlohmann::ordered_json::array();
    for (int i = 0; i < alpha.size(); ++i) ja.push_back(alpha[i]);
    j["alpha_at"] = ja;
    nlohmann::ordered_json jj = nlohmann::ordered_json::array();
    for (int r = 0; r < jac.rows(); ++r) {
      nlohmann::ordered_json row = nlohmann::ordered_json::array();
      for (int c = 0; c < jac.cols(); ++c) row.push_back(jac(r, c));
      jj.push_back(row);
    }
    j["jacobian_at"] = jj;
  }

  OutputSink sink(out_dir);
  sink.write("composition.json", j.dump(2) + "\n");
  std::map<std::string, std::string> resolved{
      {"compose.h", std::to_string(h)}};
  if (!at.empty()) resolved["compose.at"] = at;
  write_manifest(sink, "compose", seed, resolved, {{"pred", pred_path}}, 0,
                 timer.seconds());
  return kExitOk;
}

// ---------------------------------------------------------------------------
// sweep

msf::mcharness::SweepConfig sweep_config_from(const Config& cfg) {
  msf::mcharness::SweepConfig sc;
  sc.a_grid = cfg.get_double_list("sweep.a_grid", sc.a_grid);
  sc.gamma_grid = cfg.get_double_list("sweep.gamma_grid", sc.gamma_grid);
  sc.sigma_s_grid = cfg.get_double_list("sweep.sigma_s_grid", sc.sigma_s_grid);
  sc.sigma_e_grid = cfg.get_double_list("sweep.sigma_e_grid", sc.sigma_e_grid);
  sc.n_train = cfg.get_int("sweep.n_train", sc.n_train);
  sc.n_eval = cfg.get_int("sweep.n_eval", sc.n_eval);
  sc.n_seeds = cfg.get_int("sweep.n_seeds", sc.n_seeds);
  sc.horizon = cfg.get_int("sweep.horizon", sc.horizon);
  sc.burn_in = cfg.get_int("sweep.burn_in", sc.burn_in);
  sc.max_fail_frac = cfg.get_double("sweep.max_fail_frac", sc.max_fail_frac);
  return sc;
}

std::map<std::string, std::string> sweep_snapshot(
    const msf::mcharness::SweepConfig& sc) {
  return {{"sweep.a_grid", join_doubles(sc.a_grid)},
          {"sweep.gamma_grid", join_doubles(sc.gamma_grid)},
          {"sweep.sigma_s_grid", join_doubles(sc.sigma_s_grid)},
          {"sweep.sigma_e_grid", join_doubles(sc.sigma_e_grid)},
          {"sweep.n_train", std::to_string(sc.n_train)},
          {"sweep.n_eval", std::to_string(sc.n_eval)},
          {"sweep.n_seeds", std::to_string(sc.n_seeds)},
          {"sweep.horizon", std::to_string(sc.horizon)},
          {"sweep.burn_in", std::to_string(sc.burn_in)},
          {"sweep.max_fail_frac", msf::format_double(sc.max_fail_frac)}};
}

int run_sweep_cmd(const Config& cfg, const std::string& out_dir,
                  std::uint64_t seed, int jobs) {
  Timer timer;
  const msf::mcharness::SweepConfig sc = sweep_config_from(cfg);
  reject_unknown_keys(cfg, "sweep");
  sc.validate();
  const msf::mcharness::SweepResult result =
      msf::mcharness::run_sweep(sc, seed, jobs);

  OutputSink sink(out_dir);
  {
    std::ostringstream os;
    msf::mcharness::write_cells_csv(os, result);
    sink.write("cells.csv", os.str());
  }
  {
    std::ostringstream os;
    msf::mcharness::write_summary_json(os, result);
    sink.write("summary.json", os.str());
  }
  write_manifest(sink, "sweep", seed, sweep_snapshot(sc), {},
                 static_cast<long>(result.failures.size()), timer.seconds());
  std::cout << "sweep: " << result.cells.size() << " cells ("
            << result.failures.size() << " failed) -> " << out_dir << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// taskspace

msf::taskspace::TaskspaceConfig taskspace_config_from(const Config& cfg) {
  msf::taskspace::TaskspaceConfig tc;
  tc.n_box_samples = cfg.get_int("taskspace.n_box_samples", tc.n_box_samples);
  tc.b_bounds.lo = cfg.get_double("taskspace.b_min", tc.b_bounds.lo);
  tc.b_bounds.hi = cfg.get_double("taskspace.b_max", tc.b_bounds.hi);
  tc.n_tasks = cfg.get_int("taskspace.n_tasks", tc.n_tasks);
  tc.n_starts = cfg.get_int("taskspace.n_starts", tc.n_starts);
  tc.fit.n_train = cfg.get_int("taskspace.fit_n_train", tc.fit.n_train);
  tc.fit.n_eval = cfg.get_int("taskspace.fit_n_eval", tc.fit.n_eval);
  tc.fit.input_std =
      cfg.get_double("taskspace.fit_input_std", tc.fit.input_std);
  tc.fit.noise_std =
      cfg.get_double("taskspace.fit_noise_std", tc.fit.noise_std);
  tc.fit.n_starts = tc.n_starts;
  return tc;
}

std::map<std::string, std::string> taskspace_snapshot(
    const msf::taskspace::TaskspaceConfig& tc) {
  return {{"taskspace.n_box_samples", std::to_string(tc.n_box_samples)},
          {"taskspace.b_min", msf::format_double(tc.b_bounds.lo)},
          {"taskspace.b_max", msf::format_double(tc.b_bounds.hi)},
          {"taskspace.n_tasks", std::to_string(tc.n_tasks)},
          {"taskspace.n_starts", std::to_string(tc.n_starts)},
          {"taskspace.fit_n_train", std::to_string(tc.fit.n_train)},
          {"taskspace.fit_n_eval", std::to_string(tc.fit.n_eval)},
          {"taskspace.fit_input_std", msf::format_double(tc.fit.input_std)},
          {"taskspace.fit_noise_std", msf::format_double(tc.fit.noise_std)}};
}

int run_taskspace_cmd(const Config& cfg, const std::string& out_dir,
                      std::uint64_t seed, int jobs) {
  Timer timer;
  const msf::taskspace::TaskspaceConfig tc = taskspace_config_from(cfg);
  reject_unknown_keys(cfg, "taskspace");
  tc.validate();
  const msf::taskspace::TaskspaceResult result =
      msf::taskspace::run_taskspace(tc, seed, jobs);

  OutputSink sink(out_dir);
  {
    std::ostringstream os;
    msf::taskspace::write_tasks_csv(os, result);
    sink.write("tasks.csv", os.str());
  }
  std::vector<double> d_alpha;
  std::vector<double> d_c;
  for (const auto& t : result.outcomes) {
    if (t.skipped) continue;
    d_alpha.push_back(t.d_alpha);
    d_c.push_back(t.d_c);
  }
  {
    std::ostringstream os;
    msf::taskspace::write_ecdf_csv(os, msf::taskspace::ecdf(d_alpha));
    sink.write("ecdf_alpha.csv", os.str());
  }
  {
    std::ostringstream os;
    msf::taskspace::write_ecdf_csv(os, msf::taskspace::ecdf(d_c));
    sink.write("ecdf_c.csv", os.str());
  }
  {
    nlohmann::ordered_json j;
    nlohmann::ordered_json bounds = nlohmann::ordered_json::array();
    for (const auto& iv : result.box.alpha_bounds) {
      bounds.push_back({{"lo", iv.lo}, {"hi", iv.hi}});
    }
    j["alpha_bounds"] = bounds;
    j["theta6_bounds"] = {{"lo", result.box.theta6_bounds.lo},
                          {"hi", result.box.theta6_bounds.hi}};
    j["n_box_samples"] = result.cfg.n_box_samples;
    j["n_tasks"] = static_cast<int>(result.outcomes.size());
    j["n_skipped"] = result.n_skipped;
    sink.write("box.json", j.dump(2) + "\n");
  }
  write_manifest(sink, "taskspace", seed, taskspace_snapshot(tc), {},
                 result.n_skipped, timer.seconds());
  std::cout << "taskspace: " << result.outcomes.size() << " tasks ("
            << result.n_skipped << " skipped) -> " << out_dir << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// ettm1

msf::mlpx::StudyConfig study_config_from(const Config& cfg) {
  msf::mlpx::StudyConfig mc;
  mc.column = cfg.get_string("ettm1.column", mc.column);
  mc.p = cfg.get_int("ettm1.p", mc.p);
  mc.width = cfg.get_int("ettm1.width", mc.width);
  mc.lr = cfg.get_double("ettm1.lr", mc.lr);
  mc.epochs = cfg.get_int("ettm1.epochs", mc.epochs);
  mc.batch = cfg.get_int("ettm1.batch", mc.batch);
  mc.full_batch_threshold =
      cfg.get_int("ettm1.full_batch_threshold", mc.full_batch_threshold);
  mc.train_frac = cfg.get_double("ettm1.train_frac", mc.train_frac);
  mc.n_train_grid = cfg.get_int_list("ettm1.n_train_grid", mc.n_train_grid);
  mc.n_seeds = cfg.get_int("ettm1.n_seeds", mc.n_seeds);
  mc.max_fail_frac = cfg.get_double("ettm1.max_fail_frac", mc.max_fail_frac);
  const std::string mode = cfg.get_string("ettm1.loss_mode", "step_two");
  if (mode == "step_two") {
    mc.loss_mode = msf::mlpx::LossMode::step_two_only;
  } else if (mode == "average") {
    mc.loss_mode = msf::mlpx::LossMode::average_both_steps;
  } else {
    throw ConfigError(
        "config key 'ettm1.loss_mode': expected 'step_two' or 'average', "
        "got '" +
        mode + "'");
  }
  return mc;
}

std::map<std::string, std::string> study_snapshot(
    const msf::mlpx::StudyConfig& mc) {
  return {{"ettm1.column", mc.column},
          {"ettm1.p", std::to_string(mc.p)},
          {"ettm1.width", std::to_string(mc.width)},
          {"ettm1.lr", msf::format_double(mc.lr)},
          {"ettm1.epochs", std::to_string(mc.epochs)},
          {"ettm1.batch", std::to_string(mc.batch)},
          {"ettm1.full_batch_threshold",
           std::to_string(mc.full_batch_threshold)},
          {"ettm1.train_frac", msf::format_double(mc.train_frac)},
          {"ettm1.n_train_grid", join_ints(mc.n_train_grid)},
          {"ettm1.n_seeds", std::to_string(mc.n_seeds)},
          {"ettm1.loss_mode",
           mc.loss_mode == msf::mlpx::LossMode::step_two_only ? "step_two"
                                                              : "average"},
          {"ettm1.max_fail_frac", msf::format_double(mc.max_fail_frac)}};
}

int run_ettm1_cmd(const Config& cfg, const std::string& data_path,
                  const std::string& out_dir, std::uint64_t seed, int jobs) {
  Timer timer;
  const msf::mlpx::StudyConfig mc = study_config_from(cfg);
  reject_unknown_keys(cfg, "ettm1");
  mc.validate();
  const std::vector<double> series =
      msf::mlpx::load_series(data_path, mc.column);
  const msf::mlpx::StudyResult result =
      msf::mlpx::run_study(series, mc, seed, jobs);

  OutputSink sink(out_dir);
  {
    std::ostringstream os;
    msf::mlpx::write_runs_csv(os, result);
    sink.write("runs.csv", os.str());
  }
  {
    std::ostringstream os;
    msf::mlpx::write_ratios_csv(os, result.ratios);
    sink.write("ratios.csv", os.str());
  }
  // One representative training curve per (strategy, n_train): the first
  // record of each group in grid-major order. Dumping every curve would be
  // tens of megabytes.
  std::set<std::pair<int, int>> curve_groups;
  for (const auto& rec : result.records) {
    if (rec.failed || rec.curve.empty()) continue;
    const std::pair<int, int> group{static_cast<int>(rec.strategy),
                                    rec.n_train};
    if (!curve_groups.insert(group).second) continue;
    std::ostringstream os;
    msf::mlpx::write_curve_csv(os, rec);
    sink.write("curve_" + msf::mlpx::curve_file_key(rec) + ".csv", os.str());
  }
  write_manifest(sink, "ettm1", seed, study_snapshot(mc),
                 {{"data", data_path}}, result.n_failed, timer.seconds());
  std::cout << "ettm1: " << result.records.size() << " runs ("
            << result.n_failed << " failed) -> " << out_dir << "\n";
  for (const auto& row : result.ratios) {
    std::cout << "  n_train=" << row.n_train
              << "  rho_mse_test=" << row.rho_mse_test
              << "  rho_var=" << row.rho_var << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multi-step forecasting laboratory"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 1;
  int jobs = static_cast<int>(std::thread::hardware_concurrency());
  if (jobs <= 0) jobs = 1;

  auto add_common = [&](CLI::App* sub, bool with_config = true) {
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed, "base RNG seed")->capture_default_str();
    sub->add_option("--jobs", jobs, "worker threads")->capture_default_str();
    if (with_config) {
      sub->add_option("--config", config_path,
                      "config file (INI-style sections or a JSON object)");
    }
  };

  std::string pred_path;
  int horizon = 2;
  std::string at;
  CLI::App* compose = app.add_subcommand(
      "compose", "symbolic h-step self-composition of a predictor");
  compose->add_option("--pred", pred_path, "predictor JSON file")->required();
  compose->add_option("--horizon", horizon, "composition horizon (>= 1)")
      ->capture_default_str();
  compose->add_option("--at", at,
                      "comma-separated parameter vector at which to evaluate "
                      "alpha and the Jacobian");
  add_common(compose, /*with_config=*/false);

  CLI::App* sweep = app.add_subcommand(
      "sweep", "AR(2) Monte Carlo sweep: decomposition vs theory");
  add_common(sweep);

  CLI::App* taskspace =
      app.add_subcommand("taskspace", "bilinear task-space geometry study");
  add_common(taskspace);

  std::string data_path;
  CLI::App* ettm1 = app.add_subcommand(
      "ettm1", "recursive-vs-direct MLP study on a series CSV");
  ettm1->add_option("--data", data_path, "input CSV with the series")
      ->required();
  add_common(ettm1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
    app.exit(e);
    return kExitConfig;
  }

  try {
    Config cfg;
    if (!config_path.empty()) cfg = Config::from_file(config_path);

    if (compose->parsed()) {
      if (horizon < 1) throw ConfigError("--horizon must be >= 1");
      return run_compose(pred_path, horizon, at, out_dir, seed);
    }
    const std::string resolved_out = out_dir.empty() ? "out" : out_dir;
    if (sweep->parsed()) return run_sweep_cmd(cfg, resolved_out, seed, jobs);
    if (taskspace->parsed())
      return run_taskspace_cmd(cfg, resolved_out, seed, jobs);
    if (ettm1->parsed())
      return run_ettm1_cmd(cfg, data_path, resolved_out, seed, jobs);
    throw ConfigError("no subcommand selected");
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const msf::estimate::SingularFitError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  }
}
