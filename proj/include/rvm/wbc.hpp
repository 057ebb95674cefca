// Table-composed 16-bit toy cipher and its white-box table generation. The
// key lives only in the tables; serving fresh tables renews the key. With
// internal encodings, pairwise-cancelling random 16-bit permutations are
// interposed between rounds so equal keys still yield different tables.
#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "rvm/image.hpp"
#include "rvm/payload.hpp"

namespace rvm {

struct WbcKey {
  std::array<uint16_t, 5> words{};

  bool operator==(const WbcKey&) const = default;
};

inline uint16_t rotl16(uint16_t v, int k) {
  return static_cast<uint16_t>((v << k) | (v >> (16 - k)));
}
inline uint16_t rotr16(uint16_t v, int k) {
  return static_cast<uint16_t>((v >> k) | (v << (16 - k)));
}

// The AES S-box (public constant) applied per byte.
extern const std::array<uint8_t, 256> kSbox;
uint16_t sbox2(uint16_t v);
uint16_t inv_sbox2(uint16_t v);

// Four keyed substitution-rotation rounds plus a final whitening word.
uint16_t wbc_reference_encrypt(const WbcKey& key, uint16_t pt);
uint16_t wbc_reference_decrypt(const WbcKey& key, uint16_t ct);

struct WhiteBoxTables {
  std::array<std::vector<uint16_t>, 5> tables;  // 65,536 entries each
  bool encoded = false;
  uint64_t key_fingerprint = 0;  // fnv1a64 of the key words; server-side only
};

WhiteBoxTables wbc_generate(const WbcKey& key, uint64_t seed, bool with_encodings);

// Chained lookup through all five tables (the host-side mirror of what the
// emitted evaluator block computes).
uint16_t wbc_tables_eval(const WhiteBoxTables& t, uint16_t pt);

// Little-endian serialization of one table (131,072 bytes).
std::vector<uint8_t> wbc_table_bytes(const WhiteBoxTables& t, size_t r);

// Evaluator function: five chained byte-pair lookups, one LEA per table
// section; contains no key material.
FunctionDef make_wbc_evaluator(uint32_t fid, const std::array<uint32_t, 5>& table_sids);

// New payload version from a template block (the originally extracted
// evaluator): same identity, code and sids, fresh table bytes.
MobileBlockPayload wbc_emit_block(const WhiteBoxTables& t, const MobileBlockPayload& tmpl);

uint64_t wbc_key_fingerprint(const WbcKey& key);

}  // namespace rvm
