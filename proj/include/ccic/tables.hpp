#ifndef CCIC_TABLES_HPP
#define CCIC_TABLES_HPP

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ccic/name.hpp"

namespace ccic {

// Face id used when the node itself originated the Interest.
inline constexpr std::string_view kAppFace = "@app";

inline constexpr double kDefaultPitLifetimeS = 4.0;

enum class PitInsert { New, Aggregated, DuplicateNonce };

struct PitEntry {
  Name name;
  std::set<std::uint32_t> nonces;
  std::set<std::string> faces;
  double created = 0.0;
  double expiry = 0.0;
};

// Pending Interest Table with lazy expiry: entries past their lifetime act
// as absent on every access.
class Pit {
public:
  explicit Pit(double lifetime_s = kDefaultPitLifetimeS) : lifetime_(lifetime_s) {}

  PitInsert insert_or_aggregate(const Name& name, std::uint32_t nonce,
                                const std::string& face, double now);
  std::set<std::string> consume(const Name& name, double now);
  bool contains(const Name& name, double now) const;
  void sweep(double now);
  std::size_t size() const { return entries_.size(); }
  double lifetime() const { return lifetime_; }
  const std::map<std::string, PitEntry>& entries() const { return entries_; }

private:
  double lifetime_;
  std::map<std::string, PitEntry> entries_;
};

// First-component prefix routes.
class Fib {
public:
  void add_route(const std::string& prefix, const std::string& next_hop);
  std::set<std::string> next_hops(const Name& name) const;
  bool has_route(const std::string& prefix) const { return routes_.count(prefix) != 0; }
  std::size_t size() const { return routes_.size(); }
  const std::map<std::string, std::set<std::string>>& routes() const { return routes_; }

private:
  std::map<std::string, std::set<std::string>> routes_;
};

struct CsEntry {
  std::vector<std::uint8_t> payload;
  double stored_at = 0.0;
};

// Exact-name content store with FIFO replacement. Child nodes get capacity
// zero, so inserts on them are no-ops.
class ContentStore {
public:
  explicit ContentStore(std::size_t capacity = 0) : capacity_(capacity) {}

  void insert(const Name& name, std::vector<std::uint8_t> payload, double now);
  std::optional<std::vector<std::uint8_t>> lookup(const Name& name) const;
  std::size_t size() const { return entries_.size(); }
  std::size_t capacity() const { return capacity_; }
  void set_capacity(std::size_t c) { capacity_ = c; }
  const std::map<std::string, CsEntry>& entries() const { return entries_; }

private:
  std::size_t capacity_;
  std::map<std::string, CsEntry> entries_;
  std::deque<std::string> fifo_;
};

struct MemberRecord {
  std::string cn_id;
  std::string ch_name;
  GeoCoord location;
  std::string data_type;
  double joined_at = 0.0;

  bool operator==(const MemberRecord&) const = default;
};

enum class MemberUpsert { Inserted, Replaced, Unchanged };

// Keyed by cn_id; an upsert with a different ch_name replaces the record
// (mobility handover).
class MembersCollection {
public:
  MemberUpsert upsert(const MemberRecord& rec);
  bool remove(const std::string& cn_id);
  std::optional<MemberRecord> lookup(const std::string& cn_id) const;
  std::size_t size() const { return records_.size(); }
  const std::map<std::string, MemberRecord>& records() const { return records_; }

private:
  std::map<std::string, MemberRecord> records_;
};

} // namespace ccic

#endif
