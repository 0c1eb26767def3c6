#ifndef CCIC_METRICS_HPP
#define CCIC_METRICS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ccic/medium.hpp"

namespace ccic {

// Protocol trace row: join/sync/membership/request events tagged by the
// nodes and the workload driver. Written as proto.csv next to events.csv.
struct ProtoRow {
  double time = 0.0;
  std::string node;
  std::string event;
  std::string name;
  double value = 0.0;
};

std::string proto_row_csv(const ProtoRow& row);
inline constexpr std::string_view kProtoCsvHeader = "time,node,event,name,value";

struct MetricsReport {
  double energy_interest_j = 0.0;
  double energy_data_j = 0.0;
  double energy_total_j = 0.0;
  std::optional<double> isr;
  std::optional<double> qsr;
  std::optional<double> isd_mean_s;
  std::optional<double> qsd_mean_s;
  std::optional<double> assoc_time_mean_s;
  std::optional<double> sync_time_mean_s;
  std::uint64_t interests_sent = 0;   // distinct consumer fetches
  std::uint64_t data_delivered = 0;   // distinct fetches satisfied
  std::uint64_t queries_sent = 0;     // distinct lite-query requests
  std::uint64_t queries_satisfied = 0;
  std::uint64_t objects_delivered = 0; // content objects received by consumers
  std::uint64_t collisions = 0;
  std::uint64_t unmatched_data = 0;   // satisfactions without a matching request
};

// Transmission energy split by packet kind, summed over the rows that put a
// frame on the air (receiver "*", outcome "delivered"), in log order so the
// result is bit-identical to the medium's ledger.
std::pair<double, double> compute_energy(const std::vector<LogRow>& events,
                                         double joules_per_bit);

// Per-exchange satisfaction delays, consumer send to consumer receive, with
// retransmissions keyed to the first send. Data without a matching request
// is counted as unmatched and excluded.
struct DelayStats {
  std::vector<double> isd_samples;
  std::vector<double> qsd_samples;
  std::uint64_t interests_sent = 0;
  std::uint64_t data_delivered = 0;
  std::uint64_t queries_sent = 0;
  std::uint64_t queries_satisfied = 0;
  std::uint64_t objects_delivered = 0;
  std::uint64_t unmatched_data = 0;
};
DelayStats compute_delays(const std::vector<ProtoRow>& proto);

// Mean association (join) time and mean sync fan-out time from the tagged
// trace: a sync sample spans the origin broadcast to the last receiver.
struct AssocSyncStats {
  std::optional<double> assoc_time_mean_s;
  std::optional<double> sync_time_mean_s;
  std::size_t joins = 0;
  std::size_t syncs = 0;
};
AssocSyncStats compute_assoc_sync(const std::vector<ProtoRow>& proto);

MetricsReport compute_metrics(const std::vector<LogRow>& events,
                              const std::vector<ProtoRow>& proto, double joules_per_bit);

std::string metrics_csv_header();
std::string metrics_csv_row(const MetricsReport& m);

} // namespace ccic

#endif
