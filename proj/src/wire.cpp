#include "ccic/wire.hpp"

#include <bit>
#include <cstring>

namespace ccic {

namespace {

std::uint16_t read_u16(std::span<const std::uint8_t> b, std::size_t off) {
  return static_cast<std::uint16_t>((b[off] << 8) | b[off + 1]);
}

std::uint32_t read_u32(std::span<const std::uint8_t> b, std::size_t off) {
  return (static_cast<std::uint32_t>(b[off]) << 24) |
         (static_cast<std::uint32_t>(b[off + 1]) << 16) |
         (static_cast<std::uint32_t>(b[off + 2]) << 8) |
         static_cast<std::uint32_t>(b[off + 3]);
}

double read_f64(std::span<const std::uint8_t> b, std::size_t off) {
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits = (bits << 8) | b[off + i];
  return std::bit_cast<double>(bits);
}

void need(std::span<const std::uint8_t> b, std::size_t off, std::size_t n, Errc errc) {
  if (off + n > b.size()) throw Error(errc, "frame ends inside a field");
}

} // namespace

std::vector<std::uint8_t> encode(const Packet& p, const WireLimits& limits) {
  const std::string name = render_name(p.name);
  const bool interest = p.kind == PacketKind::Interest;
  const std::size_t header = interest ? kInterestHeaderBytes : kDataHeaderBytes;
  const std::size_t content = header + name.size() + p.payload.size();
  if (content > kMtuBytes)
    throw Error(Errc::Oversize, "frame of " + std::to_string(content) + " bytes exceeds the " +
                                    std::to_string(kMtuBytes) + "-byte MTU");
  const std::size_t target = interest ? limits.interest_target : limits.data_target;
  const std::size_t total = std::max(content, target);
  if (total > kMtuBytes)
    throw Error(Errc::Oversize, "frame target exceeds the MTU");

  std::vector<std::uint8_t> out;
  out.reserve(total);
  out.push_back(static_cast<std::uint8_t>(p.kind));
  out.push_back(p.hop_limit);
  if (interest) wire::append_u32(out, p.nonce);
  wire::append_u16(out, static_cast<std::uint16_t>(name.size()));
  out.insert(out.end(), name.begin(), name.end());
  wire::append_u16(out, static_cast<std::uint16_t>(p.payload.size()));
  out.insert(out.end(), p.payload.begin(), p.payload.end());
  out.resize(total, 0);
  return out;
}

Packet decode(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2) throw Error(Errc::Truncated, "frame shorter than its fixed header");
  Packet p;
  if (bytes[0] != static_cast<std::uint8_t>(PacketKind::Interest) &&
      bytes[0] != static_cast<std::uint8_t>(PacketKind::Data))
    throw Error(Errc::BadKindTag, "kind tag " + std::to_string(bytes[0]));
  p.kind = static_cast<PacketKind>(bytes[0]);
  p.hop_limit = bytes[1];
  std::size_t off = 2;
  if (p.kind == PacketKind::Interest) {
    need(bytes, off, 4, Errc::Truncated);
    p.nonce = read_u32(bytes, off);
    off += 4;
  }
  need(bytes, off, 2, Errc::Truncated);
  const std::size_t name_len = read_u16(bytes, off);
  off += 2;
  need(bytes, off, name_len, Errc::BadLength);
  std::string name_text(reinterpret_cast<const char*>(bytes.data() + off), name_len);
  off += name_len;
  try {
    p.name = parse_name(name_text);
  } catch (const Error& e) {
    throw Error(Errc::BadLength, std::string("undecodable name: ") + e.what());
  }
  need(bytes, off, 2, Errc::BadLength);
  const std::size_t payload_len = read_u16(bytes, off);
  off += 2;
  need(bytes, off, payload_len, Errc::BadLength);
  p.payload.assign(bytes.begin() + off, bytes.begin() + off + payload_len);
  p.size_bytes = bytes.size();
  return p;
}

double tx_energy(std::size_t size_bytes, double joules_per_bit) {
  return static_cast<double>(size_bytes) * 8.0 * joules_per_bit;
}

double tx_energy(const Packet& p, double joules_per_bit) {
  return tx_energy(p.size_bytes, joules_per_bit);
}

namespace wire {

void append_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

void append_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

void append_f64(std::vector<std::uint8_t>& out, double v) {
  std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 7; i >= 0; --i) out.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
}

std::size_t sample_row_size(const Sample& s) {
  return 14 + s.nid.size() + s.task.size();
}

void append_sample_row(std::vector<std::uint8_t>& out, const Sample& s) {
  out.push_back(static_cast<std::uint8_t>(s.nid.size()));
  out.insert(out.end(), s.nid.begin(), s.nid.end());
  out.push_back(static_cast<std::uint8_t>(s.task.size()));
  out.insert(out.end(), s.task.begin(), s.task.end());
  append_u32(out, static_cast<std::uint32_t>(s.epoch_time));
  append_f64(out, s.value);
}

Sample RowReader::next() {
  Sample s;
  need(bytes, offset, 1, Errc::Truncated);
  std::size_t n = bytes[offset++];
  need(bytes, offset, n, Errc::Truncated);
  s.nid.assign(reinterpret_cast<const char*>(bytes.data() + offset), n);
  offset += n;
  need(bytes, offset, 1, Errc::Truncated);
  n = bytes[offset++];
  need(bytes, offset, n, Errc::Truncated);
  s.task.assign(reinterpret_cast<const char*>(bytes.data() + offset), n);
  offset += n;
  need(bytes, offset, 12, Errc::Truncated);
  s.epoch_time = read_u32(bytes, offset);
  offset += 4;
  s.value = read_f64(bytes, offset);
  offset += 8;
  return s;
}

std::vector<std::uint8_t> encode_ch_info(const ChInfoPayload& p) {
  std::vector<std::uint8_t> out;
  out.push_back(static_cast<std::uint8_t>(p.ch_unique_name.size()));
  out.insert(out.end(), p.ch_unique_name.begin(), p.ch_unique_name.end());
  out.push_back(p.sink_distance);
  append_u16(out, p.member_count);
  append_u16(out, p.load);
  out.push_back(static_cast<std::uint8_t>(p.cluster_type.size()));
  out.insert(out.end(), p.cluster_type.begin(), p.cluster_type.end());
  return out;
}

ChInfoPayload decode_ch_info(std::span<const std::uint8_t> bytes) {
  ChInfoPayload p;
  std::size_t off = 0;
  need(bytes, off, 1, Errc::Truncated);
  std::size_t n = bytes[off++];
  need(bytes, off, n, Errc::Truncated);
  p.ch_unique_name.assign(reinterpret_cast<const char*>(bytes.data() + off), n);
  off += n;
  need(bytes, off, 5, Errc::Truncated);
  p.sink_distance = bytes[off++];
  p.member_count = read_u16(bytes, off);
  off += 2;
  p.load = read_u16(bytes, off);
  off += 2;
  need(bytes, off, 1, Errc::Truncated);
  n = bytes[off++];
  need(bytes, off, n, Errc::Truncated);
  p.cluster_type.assign(reinterpret_cast<const char*>(bytes.data() + off), n);
  return p;
}

UnpackedResult unpack_result(std::span<const std::uint8_t> payload) {
  UnpackedResult r;
  if (payload.empty()) throw Error(Errc::Truncated, "empty result payload");
  r.tag = payload[0];
  switch (r.tag) {
    case kResultRows: {
      need(payload, 1, 1, Errc::Truncated);
      std::size_t count = payload[1];
      RowReader reader{payload.subspan(2)};
      for (std::size_t i = 0; i < count; ++i) r.rows.push_back(reader.next());
      r.object_count = r.rows.size();
      return r;
    }
    case kResultScalar:
      need(payload, 1, 8, Errc::Truncated);
      r.scalar = read_f64(payload, 1);
      r.object_count = 1;
      return r;
    case kResultBoolean:
      need(payload, 1, 1, Errc::Truncated);
      r.boolean = payload[1] != 0;
      r.object_count = 1;
      return r;
    case kResultEmptyScalar:
      return r;
    default:
      throw Error(Errc::BadKindTag, "result tag " + std::to_string(r.tag));
  }
}

} // namespace wire

} // namespace ccic
