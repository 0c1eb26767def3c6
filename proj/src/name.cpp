#include "ccic/name.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cinttypes>
#include <cmath>
#include <cstdio>

namespace ccic {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(),
                     [](unsigned char c) { return std::isdigit(c) != 0; });
}

std::uint64_t parse_u64(std::string_view s, Errc errc, const char* what) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw Error(errc, std::string(what) + " '" + std::string(s) + "'");
  return v;
}

std::string fixed_decimal(double v, int precision) {
  char buf[64];
  if (v < 0.0) {
    std::snprintf(buf, sizeof(buf), "m%.*f", precision, -v);
  } else {
    std::snprintf(buf, sizeof(buf), "%.*f", precision, v);
  }
  return buf;
}

double parse_coord_part(std::string_view s) {
  bool neg = false;
  if (!s.empty() && s.front() == 'm') {
    neg = true;
    s.remove_prefix(1);
  }
  if (s.empty()) throw Error(Errc::EmptyComponent, "empty coordinate");
  double v = 0.0;
  try {
    v = std::stod(std::string(s));
  } catch (const std::exception&) {
    throw Error(Errc::BadIdentifier, "bad coordinate '" + std::string(s) + "'");
  }
  return neg ? -v : v;
}

} // namespace

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::EmptyComponent: return "EmptyComponent";
    case Errc::OversizeName: return "OversizeName";
    case Errc::BadIdentifier: return "BadIdentifier";
    case Errc::BadTaskLength: return "BadTaskLength";
    case Errc::BadFieldLength: return "BadFieldLength";
    case Errc::UnknownComparator: return "UnknownComparator";
    case Errc::MissingOperand: return "MissingOperand";
    case Errc::ConflictingModifiers: return "ConflictingModifiers";
    case Errc::UnknownKeyword: return "UnknownKeyword";
    case Errc::Oversize: return "Oversize";
    case Errc::Truncated: return "Truncated";
    case Errc::BadKindTag: return "BadKindTag";
    case Errc::BadLength: return "BadLength";
    case Errc::NoCandidates: return "NoCandidates";
    case Errc::RoleMismatch: return "RoleMismatch";
    case Errc::NotAssociated: return "NotAssociated";
    case Errc::ChannelSaturated: return "ChannelSaturated";
    case Errc::InfeasibleRange: return "InfeasibleRange";
    case Errc::UnknownParameter: return "UnknownParameter";
    case Errc::MismatchedRuns: return "MismatchedRuns";
    case Errc::BadConfig: return "BadConfig";
  }
  return "Error";
}

const char* namespace_kind_name(NamespaceKind k) {
  switch (k) {
    case NamespaceKind::CnContent: return "CnContent";
    case NamespaceKind::ChContent: return "ChContent";
    case NamespaceKind::ChInfo: return "ChInfo";
    case NamespaceKind::ChAssociation: return "ChAssociation";
    case NamespaceKind::Sync: return "Sync";
    case NamespaceKind::Other: return "Other";
  }
  return "Other";
}

std::size_t Name::encoded_len() const {
  std::size_t n = open ? 1 : 0;
  for (const auto& c : components) n += c.size();
  if (!components.empty()) n += components.size() - 1;
  return n;
}

Name parse_name(std::string_view text) {
  if (text.empty()) throw Error(Errc::EmptyComponent, "empty name");
  Name name;
  std::size_t begin = 0;
  while (begin <= text.size()) {
    std::size_t end = text.find(kNameSeparator, begin);
    if (end == std::string_view::npos) end = text.size();
    std::string_view comp = text.substr(begin, end - begin);
    bool last = end == text.size();
    if (comp.empty()) {
      // Only a single trailing separator is legal; it marks an open name.
      if (last && !name.components.empty() && !name.open) {
        name.open = true;
      } else {
        throw Error(Errc::EmptyComponent, "empty component in '" + std::string(text) + "'");
      }
    } else {
      name.components.emplace_back(comp);
    }
    if (last) break;
    begin = end + 1;
  }
  if (name.components.empty())
    throw Error(Errc::EmptyComponent, "name has no components");
  if (name.encoded_len() > kNameBudgetBytes)
    throw Error(Errc::OversizeName, "name of " + std::to_string(name.encoded_len()) +
                                        " bytes exceeds the frame budget");
  return name;
}

std::string render_name(const Name& name) {
  std::string out;
  out.reserve(name.encoded_len());
  for (std::size_t i = 0; i < name.components.size(); ++i) {
    if (i) out.push_back(kNameSeparator);
    out += name.components[i];
  }
  if (name.open) out.push_back(kNameSeparator);
  return out;
}

NamespaceKind classify(const Name& name) {
  if (name.components.empty()) return NamespaceKind::Other;
  const std::string& head = name.components.front();
  if (head == kChInfoMarker) return NamespaceKind::ChInfo;
  if (head == kChAssociationMarker) return NamespaceKind::ChAssociation;
  if (head == kSyncMarker) return NamespaceKind::Sync;
  if (name.size() >= 4 && all_digits(name.at(1))) return NamespaceKind::ChContent;
  if (name.size() == 5 && !name.open) return NamespaceKind::CnContent;
  if (name.size() == 4 && name.open) return NamespaceKind::CnContent;
  return NamespaceKind::Other;
}

std::string GeoCoord::render(int lat_precision, int lon_precision) const {
  return fixed_decimal(lat, lat_precision) + "-" + fixed_decimal(lon, lon_precision);
}

GeoCoord GeoCoord::parse(std::string_view text) {
  // The first '-' past position zero separates latitude from longitude;
  // negatives are spelled with 'm', so no other '-' can occur.
  std::size_t sep = text.find('-');
  if (sep == std::string_view::npos || sep == 0 || sep + 1 >= text.size())
    throw Error(Errc::BadIdentifier, "bad coordinate pair '" + std::string(text) + "'");
  GeoCoord g;
  g.lat = parse_coord_part(text.substr(0, sep));
  g.lon = parse_coord_part(text.substr(sep + 1));
  return g;
}

void validate_identifier(std::string_view id) {
  if (id.empty()) throw Error(Errc::EmptyComponent, "empty identifier");
  if (id.size() > kMaxIdBytes)
    throw Error(Errc::BadIdentifier, "identifier '" + std::string(id) + "' exceeds " +
                                         std::to_string(kMaxIdBytes) + " bytes");
  for (unsigned char c : id) {
    if (!std::isprint(c) || c == '/' || c == '|')
      throw Error(Errc::BadIdentifier, "identifier '" + std::string(id) + "' has a bad character");
  }
}

Name CnName::to_name() const {
  validate_identifier(cn_id);
  validate_identifier(ch_name); // complete only after association
  if (data_type.empty()) throw Error(Errc::EmptyComponent, "CN name has no data type");
  Name n;
  n.components.push_back(cn_id);
  n.components.push_back(ch_name);
  n.components.push_back(location.render());
  n.components.push_back(data_type);
  if (epoch_time) {
    n.components.push_back(std::to_string(*epoch_time));
  } else {
    n.open = true;
  }
  if (n.encoded_len() > kNameBudgetBytes)
    throw Error(Errc::OversizeName, "CN name exceeds the frame budget");
  return n;
}

std::optional<CnName> CnName::from_name(const Name& name) {
  bool openForm = name.size() == 4 && name.open;
  if (!openForm && name.size() != 5) return std::nullopt;
  CnName cn;
  cn.cn_id = name.at(0);
  cn.ch_name = name.at(1);
  try {
    cn.location = GeoCoord::parse(name.at(2));
  } catch (const Error&) {
    return std::nullopt;
  }
  cn.data_type = name.at(3);
  if (!openForm) {
    if (!all_digits(name.at(4))) return std::nullopt;
    cn.epoch_time = parse_u64(name.at(4), Errc::BadIdentifier, "bad epoch time");
  }
  return cn;
}

Name ChName::to_name() const {
  validate_identifier(ch_prefix);
  Name n;
  n.components.push_back(ch_prefix);
  n.components.push_back(std::to_string(sink_distance));
  n.components.push_back(cluster_type);
  if (const auto* q = std::get_if<QueryTail>(&tail)) {
    n.components.push_back(q->query);
  } else {
    Name inner = std::get<CnName>(tail).to_name();
    for (auto& c : inner.components) n.components.push_back(std::move(c));
    n.open = inner.open;
  }
  if (n.encoded_len() > kNameBudgetBytes)
    throw Error(Errc::OversizeName, "CH name exceeds the frame budget");
  return n;
}

std::optional<ChName> ChName::from_name(const Name& name) {
  if (classify(name) != NamespaceKind::ChContent) return std::nullopt;
  ChName ch;
  ch.ch_prefix = name.at(0);
  ch.sink_distance = static_cast<unsigned>(parse_u64(name.at(1), Errc::BadIdentifier, "bad sink distance"));
  ch.cluster_type = name.at(2);
  if (name.size() == 4 && !name.open) {
    ch.tail = QueryTail{name.at(3)};
    return ch;
  }
  Name inner;
  inner.components.assign(name.components.begin() + 3, name.components.end());
  inner.open = name.open;
  auto cn = CnName::from_name(inner);
  if (!cn) return std::nullopt;
  ch.tail = *cn;
  return ch;
}

Name ChInfoName::to_name() const {
  validate_identifier(node_id);
  Name n;
  n.components.emplace_back(kChInfoMarker);
  n.components.push_back(node_id);
  n.components.push_back(location.render());
  n.components.push_back(data_type);
  n.components.push_back(std::to_string(access_time));
  return n;
}

std::optional<ChInfoName> ChInfoName::from_name(const Name& name) {
  if (name.size() != 5 || name.open || name.at(0) != kChInfoMarker) return std::nullopt;
  ChInfoName info;
  info.node_id = name.at(1);
  try {
    info.location = GeoCoord::parse(name.at(2));
  } catch (const Error&) {
    return std::nullopt;
  }
  info.data_type = name.at(3);
  if (!all_digits(name.at(4))) return std::nullopt;
  info.access_time = parse_u64(name.at(4), Errc::BadIdentifier, "bad access time");
  return info;
}

Name ChAssocName::to_name() const {
  validate_identifier(ch_unique_name);
  validate_identifier(node_id);
  Name n;
  n.components.emplace_back(kChAssociationMarker);
  n.components.push_back(ch_unique_name);
  n.components.push_back(node_id);
  n.components.push_back(location.render());
  n.components.push_back(data_type);
  n.components.push_back(std::to_string(access_time));
  return n;
}

std::optional<ChAssocName> ChAssocName::from_name(const Name& name) {
  if (name.size() != 6 || name.open || name.at(0) != kChAssociationMarker) return std::nullopt;
  ChAssocName assoc;
  assoc.ch_unique_name = name.at(1);
  assoc.node_id = name.at(2);
  try {
    assoc.location = GeoCoord::parse(name.at(3));
  } catch (const Error&) {
    return std::nullopt;
  }
  assoc.data_type = name.at(4);
  if (!all_digits(name.at(5))) return std::nullopt;
  assoc.access_time = parse_u64(name.at(5), Errc::BadIdentifier, "bad access time");
  return assoc;
}

Name SyncName::to_name() const {
  Name inner = member.to_name();
  if (inner.open)
    throw Error(Errc::EmptyComponent, "sync name needs the member's epoch time");
  Name n;
  n.components.emplace_back(kSyncMarker);
  for (auto& c : inner.components) n.components.push_back(std::move(c));
  if (n.encoded_len() > kNameBudgetBytes)
    throw Error(Errc::OversizeName, "sync name exceeds the frame budget");
  return n;
}

std::optional<SyncName> SyncName::from_name(const Name& name) {
  if (name.size() != 6 || name.open || name.at(0) != kSyncMarker) return std::nullopt;
  Name inner;
  inner.components.assign(name.components.begin() + 1, name.components.end());
  auto cn = CnName::from_name(inner);
  if (!cn) return std::nullopt;
  return SyncName{*cn};
}

} // namespace ccic
