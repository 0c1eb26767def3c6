#ifndef CCIC_NAME_HPP
#define CCIC_NAME_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ccic/errors.hpp"

namespace ccic {

// Frame budget for an IEEE 802.15.4 payload. Every encoded packet must fit
// kMtuBytes; the Interest header (kind, hop limit, nonce, two length fields)
// is the largest fixed overhead, which caps the rendered name length.
inline constexpr std::size_t kMtuBytes = 127;
inline constexpr std::size_t kInterestHeaderBytes = 10; // kind+hop+nonce+2x u16 len
inline constexpr std::size_t kDataHeaderBytes = 6;      // kind+hop+2x u16 len
inline constexpr std::size_t kNameBudgetBytes = kMtuBytes - kInterestHeaderBytes;

inline constexpr std::size_t kMaxIdBytes = 8;

inline constexpr char kNameSeparator = '/';
inline constexpr std::string_view kChInfoMarker = "CH_Info";
inline constexpr std::string_view kChAssociationMarker = "CH_Association";
inline constexpr std::string_view kSyncMarker = "Node_Sync_Message";
inline constexpr std::string_view kHeterogeneousCluster = "heterogeneous";

// Hierarchical name. `open` records a trailing separator in display form;
// a content Interest with an open tail asks for the most recent sample.
struct Name {
  std::vector<std::string> components;
  bool open = false;

  bool operator==(const Name&) const = default;

  std::size_t encoded_len() const;
  const std::string& at(std::size_t i) const { return components.at(i); }
  std::size_t size() const { return components.size(); }
};

enum class NamespaceKind {
  CnContent,
  ChContent,
  ChInfo,
  ChAssociation,
  Sync,
  Other,
};

const char* namespace_kind_name(NamespaceKind k);

Name parse_name(std::string_view text);
std::string render_name(const Name& name);
NamespaceKind classify(const Name& name);

// Latitude/longitude pair. Display form joins the two with "-" and writes a
// leading "m" in place of a minus sign so the separator stays unambiguous.
struct GeoCoord {
  double lat = 0.0;
  double lon = 0.0;

  bool operator==(const GeoCoord&) const = default;

  std::string render(int lat_precision = 3, int lon_precision = 6) const;
  static GeoCoord parse(std::string_view text);
};

// Sensed-data record name of a child node: CN-ID / CH-name / location / type
// / epoch time. An absent epoch renders as an open name (trailing separator)
// and means "most recent sample". ch_name stays empty until association.
struct CnName {
  std::string cn_id;
  std::string ch_name;
  GeoCoord location;
  std::string data_type;
  std::optional<std::uint64_t> epoch_time;

  Name to_name() const;
  static std::optional<CnName> from_name(const Name& name);
};

// Query string in canonical lite-query form, carried verbatim as the last
// component of a cluster-head name.
struct QueryTail {
  std::string query;
  bool operator==(const QueryTail&) const = default;
};

// Cluster-head name: prefix / sink distance / cluster type / tail. The tail
// is either a lite-query or the full name of a child node to fetch from.
struct ChName {
  std::string ch_prefix;
  unsigned sink_distance = 0;
  std::string cluster_type;
  std::variant<QueryTail, CnName> tail;

  Name to_name() const;
  static std::optional<ChName> from_name(const Name& name);
};

// CH selection request: CH_Info / node id / location / type / access time.
struct ChInfoName {
  std::string node_id;
  GeoCoord location;
  std::string data_type;
  std::uint64_t access_time = 0;

  Name to_name() const;
  static std::optional<ChInfoName> from_name(const Name& name);
};

// CH association request: CH_Association / CH unique name / node id /
// location / type / access time.
struct ChAssocName {
  std::string ch_unique_name;
  std::string node_id;
  GeoCoord location;
  std::string data_type;
  std::uint64_t access_time = 0;

  Name to_name() const;
  static std::optional<ChAssocName> from_name(const Name& name);
};

// New-member synchronization: Node_Sync_Message followed by the member's
// complete CnName (including the accepting CH as its second component).
struct SyncName {
  CnName member;

  Name to_name() const;
  static std::optional<SyncName> from_name(const Name& name);
};

// Node ids and CH prefixes: printable, no '/' or '|', at most kMaxIdBytes.
void validate_identifier(std::string_view id);

} // namespace ccic

#endif
