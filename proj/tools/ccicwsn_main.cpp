// Command-line front end: single runs, parameter sweeps reproducing the
// evaluation curves, and run-to-run comparison reports.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "ccic/engine.hpp"

namespace fs = std::filesystem;
using namespace ccic;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

std::string out_root() {
  if (const char* env = std::getenv("CCICWSN_OUT_ROOT")) return env;
  return "runs";
}

std::vector<std::string> split_list(const std::string& csv) {
  std::vector<std::string> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
  RunConfig cfg = path.empty() ? RunConfig{} : parse_config_file(path);
  for (const auto& kv : overrides) apply_override(cfg, kv);
  cfg.validate();
  return cfg;
}

void apply_sweep_parameter(RunConfig& cfg, const std::string& parameter,
                           const std::string& value) {
  if (parameter == "interest_rate") {
    apply_override(cfg, "workload.interest_rate_per_s=" + value);
  } else if (parameter == "unique_objects") {
    apply_override(cfg, "workload.unique_objects=" + value);
  } else if (parameter == "node_count") {
    apply_override(cfg, "topology.nodes=" + value);
  } else if (parameter == "ch_in_range") {
    // Join-scale scenario: all cluster heads sit within the radio range of
    // every child, so a joining node hears <value> candidate CHs.
    apply_override(cfg, "topology.clusters=" + value);
    unsigned k = static_cast<unsigned>(std::stoul(value));
    apply_override(cfg, "topology.nodes=" + std::to_string(k * 6));
    apply_override(cfg, "topology.area_width_m=80");
    apply_override(cfg, "topology.area_height_m=80");
    apply_override(cfg, "topology.cluster_radius_m=10");
    apply_override(cfg, "topology.cn_range_m=120");
    apply_override(cfg, "topology.ch_range_m=200");
  } else {
    throw Error(Errc::UnknownParameter, "unknown sweep parameter '" + parameter + "'");
  }
}

int cmd_run(const std::string& config_path, std::string out_dir,
            const std::vector<std::string>& overrides) {
  RunConfig cfg = load_config(config_path, overrides);
  if (out_dir.empty())
    out_dir = out_root() + "/run-" + strategy_name(cfg.strategy) + "-seed" +
              std::to_string(cfg.seed);
  RunOutput out = run(cfg);
  write_outputs(out, cfg, out_dir);
  std::cout << out_dir << "\n";
  return kExitOk;
}

int cmd_sweep(const std::string& config_path, const std::string& parameter,
              const std::string& values_csv, const std::string& seeds_csv,
              std::string out_dir, const std::vector<std::string>& overrides) {
  RunConfig base = load_config(config_path, overrides);
  std::vector<std::string> values = split_list(values_csv);
  if (values.empty()) throw Error(Errc::BadConfig, "sweep needs at least one value");
  std::vector<std::string> seeds =
      seeds_csv.empty() ? std::vector<std::string>{std::to_string(base.seed)}
                        : split_list(seeds_csv);
  if (out_dir.empty()) out_dir = out_root() + "/sweep-" + parameter;
  fs::create_directories(out_dir);

  std::string sweep_csv = "parameter,value,seed,strategy," + metrics_csv_header() + "\n";
  for (const std::string& value : values) {
    for (const std::string& seed : seeds) {
      RunConfig cfg = base;
      apply_sweep_parameter(cfg, parameter, value);
      apply_override(cfg, "run.seed=" + seed);
      cfg.validate();
      RunOutput out = run(cfg);
      std::string dir = out_dir + "/" + parameter + "-" + value + "-seed" + seed + "-" +
                        strategy_name(cfg.strategy);
      write_outputs(out, cfg, dir);
      sweep_csv += parameter + "," + value + "," + seed + "," + strategy_name(cfg.strategy) +
                   "," + metrics_csv_row(out.metrics) + "\n";
    }
  }
  std::ofstream f(out_dir + "/sweep.csv", std::ios::binary);
  f << sweep_csv;
  std::cout << out_dir << "/sweep.csv\n";
  return kExitOk;
}

std::map<std::string, std::string> read_metrics_row(const std::string& dir) {
  std::ifstream in(dir + "/metrics.csv");
  if (!in.good()) throw Error(Errc::MismatchedRuns, "no metrics.csv under " + dir);
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  std::vector<std::string> keys = split_list(header);
  std::map<std::string, std::string> out;
  std::stringstream ss(row);
  std::string cell;
  for (const std::string& key : keys) {
    if (!std::getline(ss, cell, ',')) cell.clear();
    out[key] = cell;
  }
  return out;
}

int cmd_report(const std::vector<std::string>& dirs, const std::string& out_file) {
  if (dirs.size() < 2)
    throw Error(Errc::MismatchedRuns, "report needs at least two run directories");

  std::vector<RunConfig> cfgs;
  for (const auto& dir : dirs) {
    if (!fs::exists(dir + "/config.cfg"))
      throw Error(Errc::MismatchedRuns, "no config echo under " + dir);
    cfgs.push_back(parse_config_file(dir + "/config.cfg"));
  }
  // Comparable runs share their topology and seed; strategy may differ.
  auto topo_key = [](const RunConfig& c) {
    std::string key;
    for (const auto& [k, v] : config_entries(c))
      if (k.rfind("topology.", 0) == 0 || k == "run.seed") key += k + "=" + v + ";";
    return key;
  };
  for (std::size_t i = 1; i < cfgs.size(); ++i)
    if (topo_key(cfgs[i]) != topo_key(cfgs[0]))
      throw Error(Errc::MismatchedRuns,
                  "runs " + dirs[0] + " and " + dirs[i] + " use different topologies/seeds");

  std::vector<std::map<std::string, std::string>> rows;
  for (const auto& dir : dirs) rows.push_back(read_metrics_row(dir));

  std::vector<std::string> metric_names = split_list(metrics_csv_header());
  std::string csv = "metric";
  for (std::size_t i = 0; i < dirs.size(); ++i)
    csv += "," + std::string(strategy_name(cfgs[i].strategy)) + "_" + std::to_string(i);
  for (std::size_t i = 1; i < dirs.size(); ++i)
    csv += ",reduction_vs_" + std::to_string(i) + "_pct";
  csv += "\n";

  for (const std::string& metric : metric_names) {
    csv += metric;
    std::cout << metric << ":";
    for (std::size_t i = 0; i < rows.size(); ++i) {
      csv += "," + rows[i][metric];
      std::cout << " " << (rows[i][metric].empty() ? "-" : rows[i][metric]);
    }
    for (std::size_t i = 1; i < rows.size(); ++i) {
      std::string cell;
      try {
        double a = std::stod(rows[0][metric]);
        double b = std::stod(rows[i][metric]);
        if (b != 0.0) {
          char buf[32];
          std::snprintf(buf, sizeof(buf), "%.2f", (b - a) / b * 100.0);
          cell = buf;
        }
      } catch (const std::exception&) {
        // non-numeric or empty: leave the delta blank
      }
      csv += "," + cell;
      if (!cell.empty()) std::cout << " (" << cell << "% lower than run " << i << ")";
    }
    std::cout << "\n";
  }
  std::ofstream f(out_file, std::ios::binary);
  f << csv;
  return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"cluster-based information-centric WSN simulator"};
  app.require_subcommand(1);

  std::string config_path, out_dir, parameter, values_csv, seeds_csv;
  std::vector<std::string> overrides, report_dirs;
  std::string report_out = "report.csv";

  CLI::App* run_cmd = app.add_subcommand("run", "execute one simulation run");
  run_cmd->add_option("-c,--config", config_path, "config file (defaults apply if omitted)");
  run_cmd->add_option("-o,--out", out_dir, "output directory");
  run_cmd->add_option("--set", overrides, "override config keys (key=value)");

  CLI::App* sweep_cmd = app.add_subcommand("sweep", "run a parameter sweep");
  sweep_cmd->add_option("-c,--config", config_path, "config file");
  sweep_cmd->add_option("-p,--parameter", parameter,
                        "interest_rate | unique_objects | node_count | ch_in_range")
      ->required();
  sweep_cmd->add_option("-v,--values", values_csv, "comma-separated values")->required();
  sweep_cmd->add_option("-s,--seeds", seeds_csv, "comma-separated seeds");
  sweep_cmd->add_option("-o,--out", out_dir, "output root");
  sweep_cmd->add_option("--set", overrides, "override config keys (key=value)");

  CLI::App* report_cmd = app.add_subcommand("report", "compare runs (first vs the others)");
  report_cmd->add_option("dirs", report_dirs, "run directories")->expected(-1);
  report_cmd->add_option("-o,--out", report_out, "report CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (run_cmd->parsed()) return cmd_run(config_path, out_dir, overrides);
    if (sweep_cmd->parsed())
      return cmd_sweep(config_path, parameter, values_csv, seeds_csv, out_dir, overrides);
    if (report_cmd->parsed()) return cmd_report(report_dirs, report_out);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.code()) {
      case Errc::BadConfig:
      case Errc::UnknownParameter:
      case Errc::InfeasibleRange:
        return kExitConfig;
      default:
        return kExitRuntime;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}
