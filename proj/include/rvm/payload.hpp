// MBLK mobile-block container: the bit-exact unit stored in the catalog,
// served over the wire and mapped on the client heap.
//
// Layout (little-endian): magic "MBLK", version u16, block_id u32,
// version_id u64, group_id u32, entry_fid u32, param_count u8, code_len u32,
// code bytes, nsections u16, then per section sid u32, len u32, bytes.
// The payload hash is fnv1a64 over the entire container.
#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace rvm {

struct MobileBlockPayload {
  uint32_t block_id = 0;
  uint64_t version_id = 0;
  uint32_t group_id = 0;
  uint32_t entry_fid = 0;
  uint8_t param_count = 0;
  std::vector<uint8_t> code;
  std::vector<std::pair<uint32_t, std::vector<uint8_t>>> owned_sections;

  bool operator==(const MobileBlockPayload&) const = default;
};

class PayloadFormatError : public std::runtime_error {
 public:
  explicit PayloadFormatError(const std::string& what) : std::runtime_error(what) {}
};

std::vector<uint8_t> payload_pack(const MobileBlockPayload& p);
MobileBlockPayload payload_unpack(std::span<const uint8_t> bytes);

// Byte offset of the version_id field inside the container; the catalog
// patches it when assigning ids to version-0 payloads.
inline constexpr size_t kPayloadVersionIdOffset = 10;

uint64_t payload_hash(std::span<const uint8_t> packed);

}  // namespace rvm
