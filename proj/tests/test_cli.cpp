#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "nlohmann/json.hpp"

namespace fs = std::filesystem;

namespace {

struct CmdResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE_MESSAGE(in.good(), "cannot open " << path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  out << contents;
}

/// Fresh scratch directory under the system temp root.
fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("msflab_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

CmdResult run_msflab(const std::string& args, const fs::path& dir) {
  const fs::path out = dir / "stdout.txt";
  const fs::path err = dir / "stderr.txt";
  const std::string cmd = std::string("\"") + MSFLAB_BIN + "\" " + args +
                          " > \"" + out.string() + "\" 2> \"" + err.string() +
                          "\"";
  const int raw = std::system(cmd.c_str());
  CmdResult res;
  res.exit_code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  res.out = slurp(out);
  res.err = slurp(err);
  return res;
}

std::string linear_one_one_predictor() {
  return R"({"p": 2, "terms": [{"exps": {"0": 1}, "coef": 1.0},)"
         R"( {"exps": {"1": 1}, "coef": 1.0}]})";
}

/// Deterministic nonlinear series in ETTm1-like CSV shape.
std::string synthetic_data_csv(int n) {
  std::ostringstream csv;
  csv << "date,HUFL,OT\n";
  double prev = 0.3, prev2 = 0.1;
  std::uint64_t state = 0x9e3779b97f4a7c15ull;
  char buf[64];
  for (int i = 0; i < n; ++i) {
    state = state * 6364136223846793005ull + 1442695040888963407ull;
    const double noise =
        (static_cast<double>(state >> 11) * 0x1.0p-53 - 0.5) * 0.3;
    const double next = 0.55 * prev - 0.35 * std::tanh(prev2 * prev2) +
                        0.4 * (i % 24 < 12 ? 1.0 : -1.0) + noise;
    std::snprintf(buf, sizeof(buf), "r%d,%.6f,%.6f\n", i, 0.5 * next, next);
    csv << buf;
    prev2 = prev;
    prev = next;
  }
  return csv.str();
}

std::string sweep_ini() {
  return "[sweep]\n"
         "a_grid = 0.5\n"
         "gamma_grid = 0.2\n"
         "sigma_s_grid = 1.0\n"
         "sigma_e_grid = 0.0, 1.0\n"
         "n_train = 300\n"
         "n_eval = 300\n"
         "n_seeds = 10\n"
         "burn_in = 100\n";
}

std::string taskspace_ini() {
  return "[taskspace]\n"
         "n_box_samples = 800\n"
         "n_tasks = 12\n"
         "n_starts = 6\n"
         "fit_n_train = 128\n"
         "fit_n_eval = 256\n";
}

std::string ettm1_ini() {
  return "[ettm1]\n"
         "column = OT\n"
         "p = 6\n"
         "width = 2\n"
         "lr = 0.003\n"
         "epochs = 10\n"
         "batch = 64\n"
         "train_frac = 0.6\n"
         "n_train_grid = 48, 96\n"
         "n_seeds = 2\n";
}

nlohmann::json manifest_sans_duration(const fs::path& dir) {
  nlohmann::json j = nlohmann::json::parse(slurp(dir / "manifest.json"));
  j.erase("duration_seconds");
  return j;
}

int count_with_prefix(const fs::path& dir, const std::string& prefix) {
  int n = 0;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.path().filename().string().rfind(prefix, 0) == 0) ++n;
  return n;
}

}  // namespace

TEST_CASE("cli: version, help, argument errors") {
  const fs::path dir = scratch("basics");
  CHECK(run_msflab("--version", dir).exit_code == 0);
  CHECK(run_msflab("--version", dir).out.find("msflab 1.0.0") !=
        std::string::npos);
  const CmdResult help = run_msflab("--help", dir);
  CHECK(help.exit_code == 0);
  CHECK(help.out.find("compose") != std::string::npos);
  CHECK(help.out.find("sweep") != std::string::npos);
  CHECK(help.out.find("taskspace") != std::string::npos);
  CHECK(help.out.find("ettm1") != std::string::npos);

  // No subcommand, unknown subcommand, unknown flag: all usage errors.
  CHECK(run_msflab("", dir).exit_code == 2);
  CHECK(run_msflab("frobnicate", dir).exit_code == 2);
  CHECK(run_msflab("compose --no-such-flag", dir).exit_code == 2);
}

TEST_CASE("cli compose: report fixture, h = 1 echo, output bundle") {
  const fs::path dir = scratch("compose");
  spit(dir / "lin.json", linear_one_one_predictor());

  const CmdResult res = run_msflab(
      "compose --pred \"" + (dir / "lin.json").string() +
          "\" --horizon 2 --at 1,1",
      dir);
  CHECK(res.exit_code == 0);
  CHECK(res.out.find("horizon h = 2") != std::string::npos);
  CHECK(res.out.find("alpha = (2, 1)") != std::string::npos);
  CHECK(res.out.find("J = [[2, 1], [1, 1]]") != std::string::npos);
  CHECK(res.out.find("y[t]") != std::string::npos);

  const CmdResult echo = run_msflab(
      "compose --pred \"" + (dir / "lin.json").string() + "\" --horizon 1",
      dir);
  CHECK(echo.exit_code == 0);
  CHECK(echo.out.find("horizon h = 1") != std::string::npos);
  CHECK(echo.out.find("with alpha1 = b1") != std::string::npos);
  CHECK(echo.out.find("with alpha2 = b2") != std::string::npos);

  // With --out the same run also persists a composition bundle.
  const fs::path out = dir / "bundle";
  const CmdResult saved = run_msflab(
      "compose --pred \"" + (dir / "lin.json").string() +
          "\" --horizon 2 --out \"" + out.string() + "\"",
      dir);
  CHECK(saved.exit_code == 0);
  CHECK(fs::exists(out / "composition.json"));
  CHECK(fs::exists(out / "manifest.json"));
  const nlohmann::json manifest =
      nlohmann::json::parse(slurp(out / "manifest.json"));
  CHECK(manifest.at("subcommand") == "compose");
  CHECK(manifest.at("version") == "msflab 1.0.0");
  const auto& outputs = manifest.at("outputs");
  CHECK(std::find(outputs.begin(), outputs.end(), "composition.json") !=
        outputs.end());
  const nlohmann::json comp =
      nlohmann::json::parse(slurp(out / "composition.json"));
  CHECK(comp.at("h") == 2);
  CHECK(comp.at("p") == 2);

  // Malformed predictor: usage/config error. Missing file: data error.
  spit(dir / "broken.json", "{\"p\": 2, \"terms\": [{\"exps\": ");
  const CmdResult broken = run_msflab(
      "compose --pred \"" + (dir / "broken.json").string() + "\"", dir);
  CHECK(broken.exit_code == 2);
  CHECK_FALSE(broken.err.empty());
  CHECK(run_msflab("compose --pred \"" + (dir / "missing.json").string() + "\"",
                   dir)
            .exit_code == 3);
}

TEST_CASE("cli sweep: artifacts, reruns, worker invariance, bad configs") {
  const fs::path dir = scratch("sweep");
  spit(dir / "sweep.ini", sweep_ini());
  const std::string cfg_flag = "--config \"" + (dir / "sweep.ini").string() + "\"";

  const fs::path out1 = dir / "run1";
  const CmdResult r1 = run_msflab(
      "sweep " + cfg_flag + " --seed 5 --out \"" + out1.string() + "\"", dir);
  CHECK(r1.exit_code == 0);
  REQUIRE(fs::exists(out1 / "cells.csv"));
  REQUIRE(fs::exists(out1 / "summary.json"));
  REQUIRE(fs::exists(out1 / "manifest.json"));

  const nlohmann::json summary =
      nlohmann::json::parse(slurp(out1 / "summary.json"));
  CHECK(summary.at("n_cells") == 2);
  CHECK(summary.at("base_seed") == 5);
  CHECK(summary.at("noise_configs").size() == 2);

  // Rerun and a different worker count: byte-identical data artifacts and
  // manifests equal up to the recorded duration.
  const fs::path out2 = dir / "run2";
  CHECK(run_msflab("sweep " + cfg_flag + " --seed 5 --out \"" + out2.string() +
                       "\" --jobs 3",
                   dir)
            .exit_code == 0);
  CHECK(slurp(out1 / "cells.csv") == slurp(out2 / "cells.csv"));
  CHECK(slurp(out1 / "summary.json") == slurp(out2 / "summary.json"));
  CHECK(manifest_sans_duration(out1) == manifest_sans_duration(out2));

  // A different seed changes the data.
  const fs::path out3 = dir / "run3";
  CHECK(run_msflab("sweep " + cfg_flag + " --seed 6 --out \"" + out3.string() +
                       "\"",
                   dir)
            .exit_code == 0);
  CHECK(slurp(out1 / "cells.csv") != slurp(out3 / "cells.csv"));

  // Keys belonging to other tools are ignored; typos inside [sweep] are not.
  spit(dir / "mixed.ini", sweep_ini() + "[taskspace]\nn_tasks = 3\n");
  CHECK(run_msflab("sweep --config \"" + (dir / "mixed.ini").string() +
                       "\" --out \"" + (dir / "run4").string() + "\"",
                   dir)
            .exit_code == 0);
  spit(dir / "typo.ini", sweep_ini() + "n_seedz = 10\n");
  const CmdResult typo = run_msflab(
      "sweep --config \"" + (dir / "typo.ini").string() + "\" --out \"" +
          (dir / "run5").string() + "\"",
      dir);
  CHECK(typo.exit_code == 2);
  CHECK(typo.err.find("n_seedz") != std::string::npos);

  spit(dir / "badval.ini", "[sweep]\nn_seeds = banana\n");
  CHECK(run_msflab("sweep --config \"" + (dir / "badval.ini").string() +
                       "\" --out \"" + (dir / "run6").string() + "\"",
                   dir)
            .exit_code == 2);

  spit(dir / "unstable.ini",
       "[sweep]\na_grid = 1.5\ngamma_grid = 0.6\nn_seeds = 10\n"
       "n_train = 300\nn_eval = 300\n");
  const CmdResult unstable = run_msflab(
      "sweep --config \"" + (dir / "unstable.ini").string() + "\" --out \"" +
          (dir / "run7").string() + "\"",
      dir);
  CHECK(unstable.exit_code == 2);
  CHECK(unstable.err.find("no stable cells") != std::string::npos);

  // A missing config file is a configuration error, not a data error.
  CHECK(run_msflab("sweep --config \"" + (dir / "nope.ini").string() +
                       "\" --out \"" + (dir / "run8").string() + "\"",
                   dir)
            .exit_code == 2);
}

TEST_CASE("cli taskspace: artifacts and determinism") {
  const fs::path dir = scratch("taskspace");
  spit(dir / "ts.ini", taskspace_ini());
  const std::string cfg_flag = "--config \"" + (dir / "ts.ini").string() + "\"";

  const fs::path out1 = dir / "run1";
  const CmdResult r1 = run_msflab(
      "taskspace " + cfg_flag + " --seed 9 --out \"" + out1.string() + "\"",
      dir);
  CHECK(r1.exit_code == 0);
  REQUIRE(fs::exists(out1 / "tasks.csv"));
  REQUIRE(fs::exists(out1 / "ecdf_alpha.csv"));
  REQUIRE(fs::exists(out1 / "ecdf_c.csv"));
  REQUIRE(fs::exists(out1 / "box.json"));
  REQUIRE(fs::exists(out1 / "manifest.json"));

  const nlohmann::json box = nlohmann::json::parse(slurp(out1 / "box.json"));
  CHECK(box.at("n_tasks") == 12);
  CHECK(box.at("n_box_samples") == 800);
  CHECK(box.at("alpha_bounds").size() == 5);

  const std::string tasks = slurp(out1 / "tasks.csv");
  CHECK(tasks.substr(0, tasks.find('\n')) ==
        "task_index,theta1,theta2,theta3,theta4,theta5,theta6,d_alpha,d_c,"
        "mse_alpha,mse_c,b1,b2,b3,skipped");
  CHECK(std::count(tasks.begin(), tasks.end(), '\n') == 13);

  const fs::path out2 = dir / "run2";
  CHECK(run_msflab("taskspace " + cfg_flag + " --seed 9 --out \"" +
                       out2.string() + "\" --jobs 2",
                   dir)
            .exit_code == 0);
  CHECK(slurp(out1 / "tasks.csv") == slurp(out2 / "tasks.csv"));
  CHECK(slurp(out1 / "ecdf_alpha.csv") == slurp(out2 / "ecdf_alpha.csv"));
  CHECK(slurp(out1 / "ecdf_c.csv") == slurp(out2 / "ecdf_c.csv"));
  CHECK(manifest_sans_duration(out1) == manifest_sans_duration(out2));

  spit(dir / "zero.ini", "[taskspace]\nn_tasks = 0\n");
  CHECK(run_msflab("taskspace --config \"" + (dir / "zero.ini").string() +
                       "\" --out \"" + (dir / "run3").string() + "\"",
                   dir)
            .exit_code == 2);
}

TEST_CASE("cli ettm1: artifacts, determinism, data errors") {
  const fs::path dir = scratch("ettm1");
  spit(dir / "study.ini", ettm1_ini());
  spit(dir / "data.csv", synthetic_data_csv(400));
  const std::string cfg_flag =
      "--config \"" + (dir / "study.ini").string() + "\"";
  const std::string data_flag =
      "--data \"" + (dir / "data.csv").string() + "\"";

  const fs::path out1 = dir / "run1";
  const CmdResult r1 = run_msflab(
      "ettm1 " + cfg_flag + " " + data_flag + " --seed 3 --out \"" +
          out1.string() + "\"",
      dir);
  CHECK(r1.exit_code == 0);
  REQUIRE(fs::exists(out1 / "runs.csv"));
  REQUIRE(fs::exists(out1 / "ratios.csv"));
  REQUIRE(fs::exists(out1 / "manifest.json"));
  // One representative training curve per (strategy, n_train) pair.
  CHECK(count_with_prefix(out1, "curve_recursive_n48") == 1);
  CHECK(count_with_prefix(out1, "curve_direct_n48") == 1);
  CHECK(count_with_prefix(out1, "curve_recursive_n96") == 1);
  CHECK(count_with_prefix(out1, "curve_direct_n96") == 1);
  CHECK(r1.out.find("n_train") != std::string::npos);

  const std::string ratios = slurp(out1 / "ratios.csv");
  CHECK(ratios.substr(0, ratios.find('\n')) ==
        "n_train,rho_mse_train,rho_mse_test,rho_var,n_rec,n_dir");
  CHECK(std::count(ratios.begin(), ratios.end(), '\n') == 3);

  const fs::path out2 = dir / "run2";
  CHECK(run_msflab("ettm1 " + cfg_flag + " " + data_flag +
                       " --seed 3 --out \"" + out2.string() + "\" --jobs 2",
                   dir)
            .exit_code == 0);
  CHECK(slurp(out1 / "runs.csv") == slurp(out2 / "runs.csv"));
  CHECK(slurp(out1 / "ratios.csv") == slurp(out2 / "ratios.csv"));
  CHECK(manifest_sans_duration(out1) == manifest_sans_duration(out2));
  const nlohmann::json manifest =
      nlohmann::json::parse(slurp(out1 / "manifest.json"));
  CHECK(manifest.at("subcommand") == "ettm1");
  CHECK(manifest.at("n_failed") == 0);
  CHECK(manifest.at("inputs").contains("data"));

  // Too-short data is a data error with a helpful message.
  spit(dir / "tiny.csv", "date,OT\nr0,1.0\nr1,2.0\nr2,3.0\n");
  const CmdResult tiny = run_msflab(
      "ettm1 " + cfg_flag + " --data \"" + (dir / "tiny.csv").string() +
          "\" --out \"" + (dir / "run3").string() + "\"",
      dir);
  CHECK(tiny.exit_code == 3);
  CHECK(tiny.err.find("too short") != std::string::npos);

  CHECK(run_msflab("ettm1 " + cfg_flag + " --data \"" +
                       (dir / "missing.csv").string() + "\" --out \"" +
                       (dir / "run4").string() + "\"",
                   dir)
            .exit_code == 3);

  // A column absent from the file is likewise a data error.
  spit(dir / "col.ini", "[ettm1]\ncolumn = NOPE\np = 6\nepochs = 5\n"
                        "n_train_grid = 48\nn_seeds = 2\n");
  const CmdResult col = run_msflab(
      "ettm1 --config \"" + (dir / "col.ini").string() + "\" " + data_flag +
          " --out \"" + (dir / "run5").string() + "\"",
      dir);
  CHECK(col.exit_code == 3);
  CHECK(col.err.find("NOPE") != std::string::npos);
}
