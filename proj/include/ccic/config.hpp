#ifndef CCIC_CONFIG_HPP
#define CCIC_CONFIG_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ccic/name.hpp"

namespace ccic {

enum class Strategy { CcicWsn, VanillaFlooding };
const char* strategy_name(Strategy s);

struct MoveCommand {
  double time_s = 0.0;
  std::string node_id;
  GeoCoord to;
};

// Every knob of a simulation run. Defaults reproduce the reference setup:
// 300x200 m, 100 nodes in 4 clusters, 0.5 uJ/bit, 4 s PIT timer, 48-byte
// Interests, 96-byte Data, 1800 s of simulated time.
struct RunConfig {
  // topology
  double area_width_m = 300.0;
  double area_height_m = 200.0;
  unsigned clusters = 4;
  unsigned nodes = 100;
  double cn_range_m = 40.0;
  double ch_range_m = 200.0;
  double cluster_radius_m = 35.0;
  unsigned consumers_per_cluster = 2;
  std::string cluster_type = "heterogeneous";

  Strategy strategy = Strategy::CcicWsn;

  // workload
  std::string arrival = "fixed"; // fixed | poisson inter-arrival times
  double interest_rate_per_s = 2.0;
  double query_rate_per_s = 0.2;
  unsigned unique_objects = 20;
  unsigned objects_per_query = 4;
  double warmup_s = 5.0;
  unsigned interest_retries = 3;
  double retry_timeout_s = 4.0;
  double sense_period_s = 10.0;
  // start with clusters already formed (the data-plane experiments assume an
  // established network; joins are their own experiment)
  bool preassociate = false;

  // timers
  double pit_lifetime_s = 4.0;
  double selection_window_s = 0.05;
  double assoc_timeout_s = 0.1;
  unsigned assoc_retries = 3;
  double pull_period_s = 10.0;
  double processing_delay_s = 0.001;
  double reply_jitter_max_s = 0.03;
  double join_backoff_s = 1.0;

  // packet
  unsigned interest_size_bytes = 48;
  unsigned data_size_bytes = 96;
  unsigned hop_limit = 8;

  // energy
  double energy_per_bit_j = 0.5e-6;

  // medium
  double datarate_bps = 250000.0;
  double propagation_mps = 3.0e8;
  bool csma = true;
  double csma_backoff_min_s = 0.0003;
  double csma_backoff_max_s = 0.0048;
  unsigned csma_max_retries = 64;
  double forward_jitter_max_s = 0.01;

  // features
  bool cn_members_enabled = false;
  bool sync_share = true;
  unsigned cs_capacity = 64;
  unsigned workload_threshold = 16;

  // run
  std::uint64_t seed = 1;
  double duration_s = 1800.0;
  std::string out_dir;
  std::uint64_t epoch_base = 1578391803;
  std::vector<double> checkpoints_s;
  std::vector<MoveCommand> moves;

  void validate() const; // throws Error(Errc::BadConfig)
};

RunConfig parse_config_text(std::string_view text, std::string_view origin = "<text>");
RunConfig parse_config_file(const std::string& path);
void apply_override(RunConfig& cfg, std::string_view key_value); // "key=value"

// Canonical echo of a config, parseable by parse_config_text. out_dir is
// omitted so run directories stay byte-comparable.
std::string render_config(const RunConfig& cfg);

// Flat (key, value) view of every scalar field, for coverage checks.
std::vector<std::pair<std::string, std::string>> config_entries(const RunConfig& cfg);

} // namespace ccic

#endif
