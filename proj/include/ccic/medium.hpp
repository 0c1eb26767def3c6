#ifndef CCIC_MEDIUM_HPP
#define CCIC_MEDIUM_HPP

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "ccic/scheduler.hpp"
#include "ccic/wire.hpp"

namespace ccic {

struct MediumConfig {
  double datarate_bps = 250000.0;   // IEEE 802.15.4 nominal
  double propagation_mps = 3.0e8;   // constant-speed propagation
  double energy_per_bit_j = 0.5e-6;
  bool csma = true;
  double csma_backoff_min_s = 0.0003;
  double csma_backoff_max_s = 0.0048;
  unsigned csma_max_retries = 64;
  WireLimits limits;
};

// One events.csv row. A row with receiver "*" is the transmission itself:
// outcome "delivered" means the frame went on the air (and was billed),
// "dropped" means CSMA gave up before transmitting. Rows with a node id as
// receiver record the per-receiver reception outcome.
struct LogRow {
  double time = 0.0;
  PacketKind kind = PacketKind::Interest;
  std::string sender;
  std::string receiver;
  std::string name;
  std::size_t bytes = 0;
  std::string outcome;
};

std::string log_row_csv(const LogRow& row);
inline constexpr std::string_view kEventsCsvHeader =
    "time,kind,sender,receiver,name,bytes,outcome";

struct EnergySplit {
  double interest_j = 0.0;
  double data_j = 0.0;
  double total() const { return interest_j + data_j; }
};

struct EnergyLedger {
  std::map<std::string, EnergySplit> per_node;
  EnergySplit network;

  void bill(const std::string& node, PacketKind kind, double joules) {
    auto& split = per_node[node];
    if (kind == PacketKind::Interest) {
      split.interest_j += joules;
      network.interest_j += joules;
    } else {
      split.data_j += joules;
      network.data_j += joules;
    }
  }
};

// Single-channel broadcast medium: range-limited delivery, transmission and
// propagation timing, per-receiver collision resolution and the sender-side
// energy ledger. Senders pay for every transmitted frame, collided or not.
class Medium {
public:
  using DeliveryHandler =
      std::function<void(const std::string& receiver, const std::string& sender, const Packet&)>;

  Medium(Scheduler& sched, MediumConfig cfg, std::uint64_t seed);

  void register_site(const std::string& id, GeoCoord position, double range_m);
  void move_site(const std::string& id, GeoCoord position);
  void set_delivery_handler(DeliveryHandler handler) { handler_ = std::move(handler); }

  // CSMA (when enabled) then broadcast. The frame is encoded immediately, so
  // oversize packets fail here, before touching the channel.
  void submit(const std::string& sender, const Packet& p);

  double frame_duration_s(std::size_t bytes) const {
    return static_cast<double>(bytes) * 8.0 / cfg_.datarate_bps;
  }
  double propagation_s(double meters) const { return meters / cfg_.propagation_mps; }

  const std::vector<LogRow>& log() const { return log_; }
  const EnergyLedger& ledger() const { return ledger_; }
  std::uint64_t collisions() const { return collisions_; }
  std::uint64_t csma_drops() const { return csma_drops_; }
  const MediumConfig& config() const { return cfg_; }

private:
  struct Site {
    GeoCoord position;
    double range_m = 0.0;
  };

  struct Tx {
    std::uint64_t id = 0;
    std::string sender;
    double start = 0.0;
    double end = 0.0;
    GeoCoord origin;
    double range_m = 0.0;
    std::shared_ptr<const Packet> packet;
    std::shared_ptr<const std::vector<std::uint8_t>> frame;
  };

  void attempt(const std::string& sender, std::shared_ptr<const Packet> packet,
               std::shared_ptr<const std::vector<std::uint8_t>> frame, unsigned tries);
  void start_tx(const std::string& sender, std::shared_ptr<const Packet> packet,
                std::shared_ptr<const std::vector<std::uint8_t>> frame);
  bool channel_busy(const std::string& sender, double now) const;
  void deliver(std::uint64_t tx_id, const std::string& receiver);
  void prune(double now);

  Scheduler& sched_;
  MediumConfig cfg_;
  std::mt19937_64 rng_;
  std::map<std::string, Site> sites_;
  std::deque<Tx> txs_; // active and recently finished, pruned by time
  DeliveryHandler handler_;
  std::vector<LogRow> log_;
  EnergyLedger ledger_;
  std::uint64_t next_tx_id_ = 1;
  std::uint64_t collisions_ = 0;
  std::uint64_t csma_drops_ = 0;
};

double geo_distance_m(const GeoCoord& a, const GeoCoord& b);

} // namespace ccic

#endif
