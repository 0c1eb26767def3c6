#include "ccic/tables.hpp"

#include <algorithm>

namespace ccic {

PitInsert Pit::insert_or_aggregate(const Name& name, std::uint32_t nonce,
                                   const std::string& face, double now) {
  const std::string key = render_name(name);
  auto it = entries_.find(key);
  if (it != entries_.end() && now >= it->second.expiry) {
    entries_.erase(it);
    it = entries_.end();
  }
  if (it == entries_.end()) {
    PitEntry e;
    e.name = name;
    e.nonces.insert(nonce);
    e.faces.insert(face);
    e.created = now;
    e.expiry = now + lifetime_;
    entries_.emplace(key, std::move(e));
    return PitInsert::New;
  }
  if (it->second.nonces.count(nonce)) return PitInsert::DuplicateNonce;
  it->second.nonces.insert(nonce);
  it->second.faces.insert(face);
  return PitInsert::Aggregated;
}

std::set<std::string> Pit::consume(const Name& name, double now) {
  const std::string key = render_name(name);
  auto it = entries_.find(key);
  if (it == entries_.end()) return {};
  if (now >= it->second.expiry) {
    entries_.erase(it);
    return {};
  }
  std::set<std::string> faces = std::move(it->second.faces);
  entries_.erase(it);
  return faces;
}

bool Pit::contains(const Name& name, double now) const {
  auto it = entries_.find(render_name(name));
  return it != entries_.end() && now < it->second.expiry;
}

void Pit::sweep(double now) {
  for (auto it = entries_.begin(); it != entries_.end();) {
    if (it->second.expiry <= now)
      it = entries_.erase(it);
    else
      ++it;
  }
}

void Fib::add_route(const std::string& prefix, const std::string& next_hop) {
  routes_[prefix].insert(next_hop);
}

std::set<std::string> Fib::next_hops(const Name& name) const {
  if (name.components.empty()) return {};
  auto it = routes_.find(name.components.front());
  if (it == routes_.end()) return {};
  return it->second;
}

void ContentStore::insert(const Name& name, std::vector<std::uint8_t> payload, double now) {
  if (capacity_ == 0) return;
  const std::string key = render_name(name);
  auto it = entries_.find(key);
  if (it != entries_.end()) {
    it->second.payload = std::move(payload); // keeps its FIFO position
    return;
  }
  while (entries_.size() >= capacity_) {
    entries_.erase(fifo_.front());
    fifo_.pop_front();
  }
  entries_.emplace(key, CsEntry{std::move(payload), now});
  fifo_.push_back(key);
}

std::optional<std::vector<std::uint8_t>> ContentStore::lookup(const Name& name) const {
  auto it = entries_.find(render_name(name));
  if (it == entries_.end()) return std::nullopt;
  return it->second.payload;
}

MemberUpsert MembersCollection::upsert(const MemberRecord& rec) {
  auto it = records_.find(rec.cn_id);
  if (it == records_.end()) {
    records_.emplace(rec.cn_id, rec);
    return MemberUpsert::Inserted;
  }
  if (it->second == rec) return MemberUpsert::Unchanged;
  bool same_ch = it->second.ch_name == rec.ch_name;
  it->second = rec;
  return same_ch ? MemberUpsert::Unchanged : MemberUpsert::Replaced;
}

bool MembersCollection::remove(const std::string& cn_id) {
  return records_.erase(cn_id) != 0;
}

std::optional<MemberRecord> MembersCollection::lookup(const std::string& cn_id) const {
  auto it = records_.find(cn_id);
  if (it == records_.end()) return std::nullopt;
  return it->second;
}

} // namespace ccic
