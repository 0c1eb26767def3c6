#include "ccic/metrics.hpp"

#include <cstdio>
#include <map>

namespace ccic {

namespace {

std::string fmt_time(double t) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9f", t);
  return buf;
}

std::string fmt_value(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string fmt_opt(const std::optional<double>& v) {
  return v ? fmt_value(*v) : std::string();
}

std::optional<double> mean_of(const std::vector<double>& xs) {
  if (xs.empty()) return std::nullopt;
  double acc = 0.0;
  for (double x : xs) acc += x;
  return acc / static_cast<double>(xs.size());
}

} // namespace

std::string proto_row_csv(const ProtoRow& row) {
  return fmt_time(row.time) + "," + row.node + "," + row.event + "," + row.name + "," +
         fmt_value(row.value);
}

std::pair<double, double> compute_energy(const std::vector<LogRow>& events,
                                         double joules_per_bit) {
  double interest_j = 0.0;
  double data_j = 0.0;
  for (const LogRow& row : events) {
    if (row.receiver != "*" || row.outcome != "delivered") continue;
    double joules = tx_energy(row.bytes, joules_per_bit);
    if (row.kind == PacketKind::Interest)
      interest_j += joules;
    else
      data_j += joules;
  }
  return {interest_j, data_j};
}

DelayStats compute_delays(const std::vector<ProtoRow>& proto) {
  struct Request {
    double sent_at = 0.0;
    bool query = false;
    bool satisfied = false;
    double satisfied_at = 0.0;
    double objects = 0.0;
  };
  std::map<std::string, Request> requests; // keyed consumer|name
  DelayStats stats;

  for (const ProtoRow& row : proto) {
    if (row.event == "request_sent") {
      Request r;
      r.sent_at = row.time;
      r.query = row.value != 0.0;
      requests.emplace(row.node + "|" + row.name, r);
    } else if (row.event == "request_satisfied") {
      auto it = requests.find(row.node + "|" + row.name);
      if (it == requests.end()) {
        ++stats.unmatched_data; // logged and excluded
        continue;
      }
      if (!it->second.satisfied) {
        it->second.satisfied = true;
        it->second.satisfied_at = row.time;
        it->second.objects = row.value;
      }
    }
  }

  for (const auto& [key, r] : requests) {
    if (r.query) {
      ++stats.queries_sent;
      if (r.satisfied) {
        ++stats.queries_satisfied;
        stats.objects_delivered += static_cast<std::uint64_t>(r.objects);
        stats.qsd_samples.push_back(r.satisfied_at - r.sent_at);
      }
    } else {
      ++stats.interests_sent;
      if (r.satisfied) {
        ++stats.data_delivered;
        stats.objects_delivered += static_cast<std::uint64_t>(r.objects);
        stats.isd_samples.push_back(r.satisfied_at - r.sent_at);
      }
    }
  }
  return stats;
}

AssocSyncStats compute_assoc_sync(const std::vector<ProtoRow>& proto) {
  std::vector<double> join_times;
  std::map<std::string, double> sync_origin;    // sync name -> origin time
  std::map<std::string, double> sync_last_recv; // sync name -> last storage
  for (const ProtoRow& row : proto) {
    if (row.event == "join_complete") {
      join_times.push_back(row.value);
    } else if (row.event == "sync_origin") {
      sync_origin.emplace(row.name, row.time);
    } else if (row.event == "sync_recv") {
      auto& last = sync_last_recv[row.name];
      if (row.time > last) last = row.time;
    }
  }
  std::vector<double> sync_times;
  for (const auto& [name, origin] : sync_origin) {
    auto it = sync_last_recv.find(name);
    if (it != sync_last_recv.end()) sync_times.push_back(it->second - origin);
  }
  AssocSyncStats stats;
  stats.assoc_time_mean_s = mean_of(join_times);
  stats.sync_time_mean_s = mean_of(sync_times);
  stats.joins = join_times.size();
  stats.syncs = sync_times.size();
  return stats;
}

MetricsReport compute_metrics(const std::vector<LogRow>& events,
                              const std::vector<ProtoRow>& proto, double joules_per_bit) {
  MetricsReport m;
  auto [interest_j, data_j] = compute_energy(events, joules_per_bit);
  m.energy_interest_j = interest_j;
  m.energy_data_j = data_j;
  m.energy_total_j = interest_j + data_j;
  for (const LogRow& row : events)
    if (row.receiver != "*" && row.outcome == "collided") ++m.collisions;

  DelayStats delays = compute_delays(proto);
  m.interests_sent = delays.interests_sent;
  m.data_delivered = delays.data_delivered;
  m.queries_sent = delays.queries_sent;
  m.queries_satisfied = delays.queries_satisfied;
  m.objects_delivered = delays.objects_delivered;
  m.unmatched_data = delays.unmatched_data;
  if (m.interests_sent > 0)
    m.isr = static_cast<double>(m.data_delivered) / static_cast<double>(m.interests_sent);
  if (m.queries_sent > 0)
    m.qsr = static_cast<double>(m.queries_satisfied) / static_cast<double>(m.queries_sent);
  m.isd_mean_s = mean_of(delays.isd_samples);
  m.qsd_mean_s = mean_of(delays.qsd_samples);

  AssocSyncStats assoc = compute_assoc_sync(proto);
  m.assoc_time_mean_s = assoc.assoc_time_mean_s;
  m.sync_time_mean_s = assoc.sync_time_mean_s;
  return m;
}

std::string metrics_csv_header() {
  return "energy_interest_j,energy_data_j,energy_total_j,isr,qsr,isd_mean_s,qsd_mean_s,"
         "assoc_time_mean_s,sync_time_mean_s,interests_sent,data_delivered,queries_sent,"
         "queries_satisfied,objects_delivered,collisions";
}

std::string metrics_csv_row(const MetricsReport& m) {
  std::string out;
  out += fmt_value(m.energy_interest_j);
  out += ',';
  out += fmt_value(m.energy_data_j);
  out += ',';
  out += fmt_value(m.energy_total_j);
  out += ',';
  out += fmt_opt(m.isr);
  out += ',';
  out += fmt_opt(m.qsr);
  out += ',';
  out += fmt_opt(m.isd_mean_s);
  out += ',';
  out += fmt_opt(m.qsd_mean_s);
  out += ',';
  out += fmt_opt(m.assoc_time_mean_s);
  out += ',';
  out += fmt_opt(m.sync_time_mean_s);
  out += ',';
  out += std::to_string(m.interests_sent);
  out += ',';
  out += std::to_string(m.data_delivered);
  out += ',';
  out += std::to_string(m.queries_sent);
  out += ',';
  out += std::to_string(m.queries_satisfied);
  out += ',';
  out += std::to_string(m.objects_delivered);
  out += ',';
  out += std::to_string(m.collisions);
  return out;
}

} // namespace ccic
