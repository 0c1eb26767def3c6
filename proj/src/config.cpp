#include "ccic/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include "ccic/errors.hpp"

namespace ccic {

namespace {

std::string fmt_double(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

double to_double(const std::string& s) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(Errc::BadConfig, "'" + s + "' is not a number");
  }
}

std::uint64_t to_u64(const std::string& s) {
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw Error(Errc::BadConfig, "'" + s + "' is not a non-negative integer");
  return v;
}

unsigned to_unsigned(const std::string& s) {
  std::uint64_t v = to_u64(s);
  if (v > 0xffffffffull) throw Error(Errc::BadConfig, "'" + s + "' is out of range");
  return static_cast<unsigned>(v);
}

bool to_bool(const std::string& s) {
  if (s == "true" || s == "1" || s == "on" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "off" || s == "no") return false;
  throw Error(Errc::BadConfig, "'" + s + "' is not a boolean");
}

struct FieldDef {
  const char* key;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
};

#define CCIC_FIELD_D(key, member) \
  {key, [](const RunConfig& c) { return fmt_double(c.member); }, \
   [](RunConfig& c, const std::string& v) { c.member = to_double(v); }}
#define CCIC_FIELD_U(key, member) \
  {key, [](const RunConfig& c) { return std::to_string(c.member); }, \
   [](RunConfig& c, const std::string& v) { c.member = to_unsigned(v); }}
#define CCIC_FIELD_U64(key, member) \
  {key, [](const RunConfig& c) { return std::to_string(c.member); }, \
   [](RunConfig& c, const std::string& v) { c.member = to_u64(v); }}
#define CCIC_FIELD_B(key, member) \
  {key, [](const RunConfig& c) { return std::string(c.member ? "true" : "false"); }, \
   [](RunConfig& c, const std::string& v) { c.member = to_bool(v); }}
#define CCIC_FIELD_S(key, member) \
  {key, [](const RunConfig& c) { return c.member; }, \
   [](RunConfig& c, const std::string& v) { c.member = v; }}

const std::vector<FieldDef>& fields() {
  static const std::vector<FieldDef> defs = {
      CCIC_FIELD_D("topology.area_width_m", area_width_m),
      CCIC_FIELD_D("topology.area_height_m", area_height_m),
      CCIC_FIELD_U("topology.clusters", clusters),
      CCIC_FIELD_U("topology.nodes", nodes),
      CCIC_FIELD_D("topology.cn_range_m", cn_range_m),
      CCIC_FIELD_D("topology.ch_range_m", ch_range_m),
      CCIC_FIELD_D("topology.cluster_radius_m", cluster_radius_m),
      CCIC_FIELD_U("topology.consumers_per_cluster", consumers_per_cluster),
      CCIC_FIELD_S("topology.cluster_type", cluster_type),
      {"strategy.strategy",
       [](const RunConfig& c) { return std::string(strategy_name(c.strategy)); },
       [](RunConfig& c, const std::string& v) {
         if (v == "ccic")
           c.strategy = Strategy::CcicWsn;
         else if (v == "vanilla")
           c.strategy = Strategy::VanillaFlooding;
         else
           throw Error(Errc::BadConfig, "strategy must be 'ccic' or 'vanilla'");
       }},
      CCIC_FIELD_S("workload.arrival", arrival),
      CCIC_FIELD_D("workload.interest_rate_per_s", interest_rate_per_s),
      CCIC_FIELD_D("workload.query_rate_per_s", query_rate_per_s),
      CCIC_FIELD_U("workload.unique_objects", unique_objects),
      CCIC_FIELD_U("workload.objects_per_query", objects_per_query),
      CCIC_FIELD_D("workload.warmup_s", warmup_s),
      CCIC_FIELD_U("workload.interest_retries", interest_retries),
      CCIC_FIELD_D("workload.retry_timeout_s", retry_timeout_s),
      CCIC_FIELD_D("workload.sense_period_s", sense_period_s),
      CCIC_FIELD_B("workload.preassociate", preassociate),
      CCIC_FIELD_D("timers.pit_lifetime_s", pit_lifetime_s),
      CCIC_FIELD_D("timers.selection_window_s", selection_window_s),
      CCIC_FIELD_D("timers.assoc_timeout_s", assoc_timeout_s),
      CCIC_FIELD_U("timers.assoc_retries", assoc_retries),
      CCIC_FIELD_D("timers.pull_period_s", pull_period_s),
      CCIC_FIELD_D("timers.processing_delay_s", processing_delay_s),
      CCIC_FIELD_D("timers.reply_jitter_max_s", reply_jitter_max_s),
      CCIC_FIELD_D("timers.join_backoff_s", join_backoff_s),
      CCIC_FIELD_U("packet.interest_size_bytes", interest_size_bytes),
      CCIC_FIELD_U("packet.data_size_bytes", data_size_bytes),
      CCIC_FIELD_U("packet.hop_limit", hop_limit),
      CCIC_FIELD_D("energy.energy_per_bit_j", energy_per_bit_j),
      CCIC_FIELD_D("medium.datarate_bps", datarate_bps),
      CCIC_FIELD_D("medium.propagation_mps", propagation_mps),
      CCIC_FIELD_B("medium.csma", csma),
      CCIC_FIELD_D("medium.csma_backoff_min_s", csma_backoff_min_s),
      CCIC_FIELD_D("medium.csma_backoff_max_s", csma_backoff_max_s),
      CCIC_FIELD_U("medium.csma_max_retries", csma_max_retries),
      CCIC_FIELD_D("medium.forward_jitter_max_s", forward_jitter_max_s),
      CCIC_FIELD_B("features.cn_members_enabled", cn_members_enabled),
      CCIC_FIELD_B("features.sync_share", sync_share),
      CCIC_FIELD_U("features.cs_capacity", cs_capacity),
      CCIC_FIELD_U("features.workload_threshold", workload_threshold),
      CCIC_FIELD_U64("run.seed", seed),
      CCIC_FIELD_D("run.duration_s", duration_s),
      CCIC_FIELD_U64("run.epoch_base", epoch_base),
  };
  return defs;
}

#undef CCIC_FIELD_D
#undef CCIC_FIELD_U
#undef CCIC_FIELD_U64
#undef CCIC_FIELD_B
#undef CCIC_FIELD_S

std::string trim(std::string_view s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  std::size_t e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

void set_key(RunConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "mobility.move") {
    std::istringstream in(value);
    MoveCommand mv;
    if (!(in >> mv.time_s >> mv.node_id >> mv.to.lat >> mv.to.lon))
      throw Error(Errc::BadConfig, "move needs '<time> <node> <x> <y>'");
    cfg.moves.push_back(std::move(mv));
    return;
  }
  if (key == "run.checkpoints") {
    cfg.checkpoints_s.clear();
    std::istringstream in(value);
    double t = 0.0;
    while (in >> t) cfg.checkpoints_s.push_back(t);
    return;
  }
  for (const auto& field : fields()) {
    if (key == field.key) {
      field.set(cfg, value);
      return;
    }
  }
  throw Error(Errc::BadConfig, "unknown key '" + key + "'");
}

} // namespace

const char* strategy_name(Strategy s) {
  return s == Strategy::CcicWsn ? "ccic" : "vanilla";
}

RunConfig parse_config_text(std::string_view text, std::string_view origin) {
  RunConfig cfg;
  std::string section;
  std::size_t line_no = 0;
  std::size_t begin = 0;
  while (begin <= text.size()) {
    std::size_t end = text.find('\n', begin);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    std::string line = trim(text.substr(begin, end - begin));
    begin = end + 1;
    if (end == text.size() && line.empty()) break;
    if (line.empty() || line[0] == '#') continue;

    auto fail = [&](const std::string& msg) -> void {
      throw Error(Errc::BadConfig,
                  std::string(origin) + ":" + std::to_string(line_no) + ": " + msg);
    };
    if (line.front() == '[') {
      if (line.back() != ']') fail("unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) fail("empty section name");
      continue;
    }
    std::size_t eq = line.find('=');
    if (eq == std::string::npos) fail("expected 'key = value'");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) fail("empty key");
    if (key.find('.') == std::string::npos && !section.empty()) key = section + "." + key;
    try {
      set_key(cfg, key, value);
    } catch (const Error& e) {
      fail(e.what());
    }
  }
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in.good()) throw Error(Errc::BadConfig, "cannot read config '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path);
}

void apply_override(RunConfig& cfg, std::string_view key_value) {
  std::size_t eq = key_value.find('=');
  if (eq == std::string_view::npos)
    throw Error(Errc::BadConfig, "override must be key=value");
  std::string key = trim(key_value.substr(0, eq));
  std::string value = trim(key_value.substr(eq + 1));
  set_key(cfg, key, value);
}

std::string render_config(const RunConfig& cfg) {
  std::string out;
  std::string section;
  for (const auto& field : fields()) {
    std::string key = field.key;
    std::size_t dot = key.find('.');
    std::string sec = key.substr(0, dot);
    if (sec != section) {
      if (!out.empty()) out += "\n";
      out += "[" + sec + "]\n";
      section = sec;
    }
    out += key.substr(dot + 1) + " = " + field.get(cfg) + "\n";
  }
  if (!cfg.checkpoints_s.empty()) {
    // still inside [run]: the run.* fields are listed last
    out += "checkpoints =";
    for (double t : cfg.checkpoints_s) out += " " + fmt_double(t);
    out += "\n";
  }
  if (!cfg.moves.empty()) {
    out += "\n[mobility]\n";
    for (const auto& mv : cfg.moves)
      out += "move = " + fmt_double(mv.time_s) + " " + mv.node_id + " " +
             fmt_double(mv.to.lat) + " " + fmt_double(mv.to.lon) + "\n";
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> config_entries(const RunConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& field : fields()) out.emplace_back(field.key, field.get(cfg));
  return out;
}

void RunConfig::validate() const {
  auto bad = [](const std::string& msg) { throw Error(Errc::BadConfig, msg); };
  if (clusters < 1) bad("topology.clusters must be at least 1");
  if (nodes <= clusters) bad("topology.nodes must exceed the cluster count");
  if (area_width_m <= 0 || area_height_m <= 0) bad("topology area must be positive");
  if (cluster_radius_m <= 0) bad("topology.cluster_radius_m must be positive");
  if (cn_range_m < 0 || ch_range_m <= 0) bad("transmission ranges must be positive");
  if (interest_size_bytes < kInterestHeaderBytes || interest_size_bytes > kMtuBytes)
    bad("packet.interest_size_bytes must lie between the header size and the MTU");
  if (data_size_bytes < kDataHeaderBytes || data_size_bytes > kMtuBytes)
    bad("packet.data_size_bytes must lie between the header size and the MTU");
  if (hop_limit < 1 || hop_limit > 255) bad("packet.hop_limit must be 1..255");
  if (energy_per_bit_j < 0) bad("energy.energy_per_bit_j must be non-negative");
  if (datarate_bps <= 0) bad("medium.datarate_bps must be positive");
  if (propagation_mps <= 0) bad("medium.propagation_mps must be positive");
  if (csma_backoff_min_s < 0 || csma_backoff_max_s < csma_backoff_min_s)
    bad("medium backoff window is inverted");
  if (forward_jitter_max_s < 0) bad("medium.forward_jitter_max_s must be non-negative");
  if (pit_lifetime_s <= 0) bad("timers.pit_lifetime_s must be positive");
  if (selection_window_s <= 0) bad("timers.selection_window_s must be positive");
  if (assoc_timeout_s <= 0) bad("timers.assoc_timeout_s must be positive");
  if (processing_delay_s < 0) bad("timers.processing_delay_s must be non-negative");
  if (reply_jitter_max_s < 0) bad("timers.reply_jitter_max_s must be non-negative");
  if (join_backoff_s <= 0) bad("timers.join_backoff_s must be positive");
  if (interest_rate_per_s < 0 || query_rate_per_s < 0) bad("workload rates must be non-negative");
  if (arrival != "fixed" && arrival != "poisson")
    bad("workload.arrival must be 'fixed' or 'poisson'");
  if (unique_objects < 1) bad("workload.unique_objects must be at least 1");
  if (objects_per_query < 1) bad("workload.objects_per_query must be at least 1");
  if (retry_timeout_s <= 0) bad("workload.retry_timeout_s must be positive");
  if (warmup_s < 0) bad("workload.warmup_s must be non-negative");
  if (duration_s < 0) bad("run.duration_s must be non-negative");
  for (const auto& mv : moves)
    if (mv.time_s < 0 || mv.node_id.empty()) bad("mobility.move entries need a time and node");
}

} // namespace ccic
