#ifndef CCIC_WIRE_HPP
#define CCIC_WIRE_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ccic/litequery.hpp"
#include "ccic/name.hpp"

namespace ccic {

enum class PacketKind : std::uint8_t { Interest = 1, Data = 2 };

inline constexpr std::uint8_t kDefaultHopLimit = 8;

// One Interest or Data frame. Interests carry a nonce; a push Interest also
// carries a payload. size_bytes is the encoded (padded) length and is what
// the energy model bills.
struct Packet {
  PacketKind kind = PacketKind::Interest;
  Name name;
  std::uint32_t nonce = 0; // Interest only
  std::vector<std::uint8_t> payload;
  std::uint8_t hop_limit = kDefaultHopLimit;
  std::size_t size_bytes = 0;

  friend bool operator==(const Packet& a, const Packet& b) {
    if (a.kind != b.kind || a.name != b.name || a.payload != b.payload ||
        a.hop_limit != b.hop_limit)
      return false;
    return a.kind == PacketKind::Data || a.nonce == b.nonce;
  }
};

// Frames shorter than the target are zero-padded up to it; frames that need
// more room grow past the target but never past kMtuBytes.
struct WireLimits {
  std::size_t interest_target = 48;
  std::size_t data_target = 96;
};

std::vector<std::uint8_t> encode(const Packet& p, const WireLimits& limits = {});
Packet decode(std::span<const std::uint8_t> bytes);

double tx_energy(std::size_t size_bytes, double joules_per_bit);
double tx_energy(const Packet& p, double joules_per_bit);

namespace wire {

// Query-result payload tags.
inline constexpr std::uint8_t kResultRows = 1;
inline constexpr std::uint8_t kResultScalar = 2;
inline constexpr std::uint8_t kResultBoolean = 3;
inline constexpr std::uint8_t kResultEmptyScalar = 4;

void append_u16(std::vector<std::uint8_t>& out, std::uint16_t v);
void append_u32(std::vector<std::uint8_t>& out, std::uint32_t v);
void append_f64(std::vector<std::uint8_t>& out, double v);

// A sample row is len-prefixed nid and task, a 32-bit epoch and the value:
// 14 bytes plus the two identifiers. The location is carried by names, not
// rows, which keeps several rows inside one Data payload.
std::size_t sample_row_size(const Sample& s);
void append_sample_row(std::vector<std::uint8_t>& out, const Sample& s);

struct RowReader {
  std::span<const std::uint8_t> bytes;
  std::size_t offset = 0;
  Sample next();
  bool done() const { return offset >= bytes.size(); }
};

// Payload of a CH information Data packet: the responder's unique name,
// distance to the sink, current member count, load and cluster type.
struct ChInfoPayload {
  std::string ch_unique_name;
  std::uint8_t sink_distance = 0;
  std::uint16_t member_count = 0;
  std::uint16_t load = 0;
  std::string cluster_type;

  bool operator==(const ChInfoPayload&) const = default;
};

std::vector<std::uint8_t> encode_ch_info(const ChInfoPayload& p);
ChInfoPayload decode_ch_info(std::span<const std::uint8_t> bytes);

// Decoded view of a packed query result.
struct UnpackedResult {
  std::uint8_t tag = kResultEmptyScalar;
  std::size_t object_count = 0;
  std::vector<Sample> rows;
  double scalar = 0.0;
  bool boolean = false;
};

UnpackedResult unpack_result(std::span<const std::uint8_t> payload);

} // namespace wire

} // namespace ccic

#endif
