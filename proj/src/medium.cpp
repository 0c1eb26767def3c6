#include "ccic/medium.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace ccic {

// Simulation coordinates are planar meters; GeoCoord doubles as (x, y).
double geo_distance_m(const GeoCoord& a, const GeoCoord& b) {
  double dx = a.lat - b.lat;
  double dy = a.lon - b.lon;
  return std::sqrt(dx * dx + dy * dy);
}

std::string log_row_csv(const LogRow& row) {
  char head[64];
  std::snprintf(head, sizeof(head), "%.9f", row.time);
  std::string out = head;
  out += row.kind == PacketKind::Interest ? ",interest," : ",data,";
  out += row.sender;
  out += ',';
  out += row.receiver;
  out += ',';
  out += row.name;
  out += ',';
  out += std::to_string(row.bytes);
  out += ',';
  out += row.outcome;
  return out;
}

Medium::Medium(Scheduler& sched, MediumConfig cfg, std::uint64_t seed)
    : sched_(sched), cfg_(cfg), rng_(seed) {}

void Medium::register_site(const std::string& id, GeoCoord position, double range_m) {
  sites_[id] = Site{position, range_m};
}

void Medium::move_site(const std::string& id, GeoCoord position) {
  sites_.at(id).position = position;
}

void Medium::submit(const std::string& sender, const Packet& p) {
  auto frame = std::make_shared<std::vector<std::uint8_t>>(encode(p, cfg_.limits));
  auto packet = std::make_shared<Packet>(p);
  packet->size_bytes = frame->size();
  attempt(sender, std::move(packet), std::move(frame), 0);
}

bool Medium::channel_busy(const std::string& sender, double now) const {
  const Site& site = sites_.at(sender);
  for (const auto& tx : txs_) {
    if (tx.start > now || now >= tx.end) continue;
    if (tx.sender == sender) return true; // half duplex
    if (geo_distance_m(tx.origin, site.position) <= tx.range_m) return true;
  }
  return false;
}

void Medium::attempt(const std::string& sender, std::shared_ptr<const Packet> packet,
                     std::shared_ptr<const std::vector<std::uint8_t>> frame, unsigned tries) {
  const double now = sched_.now();
  prune(now);

  // A node transmits one frame at a time, CSMA or not.
  double own_end = -1.0;
  for (const auto& tx : txs_)
    if (tx.sender == sender && tx.start <= now && now < tx.end) own_end = std::max(own_end, tx.end);
  if (own_end > now) {
    sched_.schedule_at(own_end, [this, sender, packet = std::move(packet),
                                 frame = std::move(frame), tries]() mutable {
      attempt(sender, std::move(packet), std::move(frame), tries);
    });
    return;
  }

  if (cfg_.csma && channel_busy(sender, now)) {
    if (tries >= cfg_.csma_max_retries) {
      ++csma_drops_;
      log_.push_back(LogRow{now, packet->kind, sender, "*", render_name(packet->name),
                            frame->size(), "dropped"});
      return;
    }
    std::uniform_real_distribution<double> backoff(cfg_.csma_backoff_min_s,
                                                   cfg_.csma_backoff_max_s);
    sched_.schedule_in(backoff(rng_), [this, sender, packet = std::move(packet),
                                       frame = std::move(frame), tries]() mutable {
      attempt(sender, std::move(packet), std::move(frame), tries + 1);
    });
    return;
  }

  start_tx(sender, std::move(packet), std::move(frame));
}

void Medium::start_tx(const std::string& sender, std::shared_ptr<const Packet> packet,
                      std::shared_ptr<const std::vector<std::uint8_t>> frame) {
  const double now = sched_.now();
  const Site& site = sites_.at(sender);

  Tx tx;
  tx.id = next_tx_id_++;
  tx.sender = sender;
  tx.start = now;
  tx.end = now + frame_duration_s(frame->size());
  tx.origin = site.position;
  tx.range_m = site.range_m;
  tx.packet = packet;
  tx.frame = frame;

  ledger_.bill(sender, packet->kind, tx_energy(frame->size(), cfg_.energy_per_bit_j));
  log_.push_back(LogRow{now, packet->kind, sender, "*", render_name(packet->name),
                        frame->size(), "delivered"});

  for (const auto& [id, other] : sites_) {
    if (id == sender) continue;
    double dist = geo_distance_m(tx.origin, other.position);
    if (dist > tx.range_m) continue; // never delivered beyond range
    double arrival = tx.end + propagation_s(dist);
    std::uint64_t tx_id = tx.id;
    sched_.schedule_at(arrival, [this, tx_id, receiver = id]() { deliver(tx_id, receiver); });
  }

  txs_.push_back(std::move(tx));
}

void Medium::deliver(std::uint64_t tx_id, const std::string& receiver) {
  const Tx* tx = nullptr;
  for (const auto& t : txs_)
    if (t.id == tx_id) {
      tx = &t;
      break;
    }
  if (!tx) return;

  const Site& site = sites_.at(receiver);
  bool collided = false;
  for (const auto& other : txs_) {
    if (other.id == tx->id) continue;
    if (other.start >= tx->end || tx->start >= other.end) continue; // no overlap
    if (other.sender == receiver ||
        geo_distance_m(other.origin, site.position) <= other.range_m) {
      collided = true;
      break;
    }
  }

  log_.push_back(LogRow{sched_.now(), tx->packet->kind, tx->sender, receiver,
                        render_name(tx->packet->name), tx->frame->size(),
                        collided ? "collided" : "delivered"});
  if (collided) {
    ++collisions_;
    return;
  }
  if (handler_) {
    Packet decoded = decode(*tx->frame);
    handler_(receiver, tx->sender, decoded);
  }
}

void Medium::prune(double now) {
  const double horizon = frame_duration_s(kMtuBytes) + 0.002;
  while (!txs_.empty() && txs_.front().end + horizon < now) txs_.pop_front();
}

} // namespace ccic
