// Drives the installed CLI binary end to end: exit codes, run artifacts,
// sweep concatenation, report deltas and byte-level reproducibility.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

int failures = 0;

#define CHECK_MSG(cond, msg)                                              \
  do {                                                                    \
    if (!(cond)) {                                                        \
      std::cerr << "[FAIL] " << __FILE__ << ":" << __LINE__ << " " << msg \
                << "\n";                                                  \
      ++failures;                                                         \
    }                                                                     \
  } while (0)

int run_cli(const std::string& args, const std::string& log_file) {
  std::string cmd = std::string(CCIC_CLI_PATH) + " " + args + " >" + log_file + " 2>&1";
  int rc = std::system(cmd.c_str());
  if (rc == -1) return -1;
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kSmallCfg =
    "[topology]\n"
    "nodes = 12\n"
    "clusters = 2\n"
    "[run]\n"
    "seed = 11\n"
    "duration_s = 6\n"
    "[workload]\n"
    "interest_rate_per_s = 2\n"
    "query_rate_per_s = 0.5\n";

} // namespace

int main() {
  const fs::path base = fs::temp_directory_path() / "ccic_cli_test";
  fs::remove_all(base);
  fs::create_directories(base);
  const std::string cfg_path = (base / "small.cfg").string();
  std::ofstream(cfg_path) << kSmallCfg;

  // run: exit 0 and the full artifact set
  int rc = run_cli("run -c " + cfg_path + " -o " + (base / "r1").string(),
                   (base / "run1.log").string());
  CHECK_MSG(rc == 0, "run exit code " << rc);
  for (const char* f : {"events.csv", "proto.csv", "metrics.csv", "nodes.csv",
                        "tables.csv", "config.cfg"})
    CHECK_MSG(fs::exists(base / "r1" / f), "missing artifact " << f);

  // identical config + seed: byte-identical outputs
  rc = run_cli("run -c " + cfg_path + " -o " + (base / "r2").string(),
               (base / "run2.log").string());
  CHECK_MSG(rc == 0, "second run exit code " << rc);
  CHECK_MSG(slurp((base / "r1" / "events.csv").string()) ==
                slurp((base / "r2" / "events.csv").string()),
            "events.csv differs between identical runs");
  CHECK_MSG(slurp((base / "r1" / "metrics.csv").string()) ==
                slurp((base / "r2" / "metrics.csv").string()),
            "metrics.csv differs between identical runs");

  // config errors: named key with a line number, exit 2
  const std::string bad_cfg = (base / "bad.cfg").string();
  std::ofstream(bad_cfg) << "[topology]\nnodes = 12\nclusterz = 2\n";
  rc = run_cli("run -c " + bad_cfg, (base / "bad.log").string());
  CHECK_MSG(rc == 2, "bad config exit code " << rc);
  std::string log = slurp((base / "bad.log").string());
  CHECK_MSG(log.find("clusterz") != std::string::npos, "error does not name the key");
  CHECK_MSG(log.find(":3") != std::string::npos, "error does not name the line");

  // sweep: one metrics row per value per seed, stable order
  rc = run_cli("sweep -c " + cfg_path + " -p interest_rate -v 2,4 -s 11,12 -o " +
                   (base / "sw").string() + " --set run.duration_s=4",
               (base / "sweep.log").string());
  CHECK_MSG(rc == 0, "sweep exit code " << rc);
  std::string sweep = slurp((base / "sw" / "sweep.csv").string());
  CHECK_MSG(!sweep.empty(), "sweep.csv missing");
  int lines = 0;
  for (char c : sweep)
    if (c == '\n') ++lines;
  CHECK_MSG(lines == 5, "sweep.csv rows " << lines << " (want header + 4)");
  CHECK_MSG(sweep.find("interest_rate,2,11,") < sweep.find("interest_rate,2,12,") &&
                sweep.find("interest_rate,2,12,") < sweep.find("interest_rate,4,11,"),
            "sweep rows out of order");

  rc = run_cli("sweep -c " + cfg_path + " -p bogus -v 1", (base / "sweep_bad.log").string());
  CHECK_MSG(rc == 2, "unknown sweep parameter exit code " << rc);

  // report: identical run compared with itself gives 0% deltas
  rc = run_cli("report " + (base / "r1").string() + " " + (base / "r2").string() + " -o " +
                   (base / "report.csv").string(),
               (base / "report.log").string());
  CHECK_MSG(rc == 0, "report exit code " << rc);
  std::string report = slurp((base / "report.csv").string());
  CHECK_MSG(report.find("energy_total_j") != std::string::npos, "report misses metrics");
  CHECK_MSG(report.find("0.00") != std::string::npos, "self-comparison should show 0.00%");

  // report with a single run: mismatched-runs error, exit 3
  rc = run_cli("report " + (base / "r1").string(), (base / "report_one.log").string());
  CHECK_MSG(rc == 3, "single-run report exit code " << rc);

  // report across different seeds: mismatched runs
  const std::string other_cfg = (base / "other.cfg").string();
  std::ofstream(other_cfg) << kSmallCfg << "[run]\nseed = 99\n";
  rc = run_cli("run -c " + other_cfg + " -o " + (base / "r3").string(),
               (base / "run3.log").string());
  CHECK_MSG(rc == 0, "seed-99 run exit code " << rc);
  rc = run_cli("report " + (base / "r1").string() + " " + (base / "r3").string(),
               (base / "report_mismatch.log").string());
  CHECK_MSG(rc == 3, "mismatched report exit code " << rc);

  if (failures == 0) {
    std::puts("cli: all checks passed");
    return 0;
  }
  std::cerr << "cli: " << failures << " checks failed\n";
  return 1;
}
