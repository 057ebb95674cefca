#include "rvm/wbc.hpp"

#include <stdexcept>

#include "rvm/hash.hpp"
#include "rvm/rng.hpp"

namespace rvm {

const std::array<uint8_t, 256> kSbox = {
    0x63, 0x7c, 0x77, 0x7b, 0xf2, 0x6b, 0x6f, 0xc5, 0x30, 0x01, 0x67, 0x2b, 0xfe, 0xd7, 0xab, 0x76,
    0xca, 0x82, 0xc9, 0x7d, 0xfa, 0x59, 0x47, 0xf0, 0xad, 0xd4, 0xa2, 0xaf, 0x9c, 0xa4, 0x72, 0xc0,
    0xb7, 0xfd, 0x93, 0x26, 0x36, 0x3f, 0xf7, 0xcc, 0x34, 0xa5, 0xe5, 0xf1, 0x71, 0xd8, 0x31, 0x15,
    0x04, 0xc7, 0x23, 0xc3, 0x18, 0x96, 0x05, 0x9a, 0x07, 0x12, 0x80, 0xe2, 0xeb, 0x27, 0xb2, 0x75,
    0x09, 0x83, 0x2c, 0x1a, 0x1b, 0x6e, 0x5a, 0xa0, 0x52, 0x3b, 0xd6, 0xb3, 0x29, 0xe3, 0x2f, 0x84,
    0x53, 0xd1, 0x00, 0xed, 0x20, 0xfc, 0xb1, 0x5b, 0x6a, 0xcb, 0xbe, 0x39, 0x4a, 0x4c, 0x58, 0xcf,
    0xd0, 0xef, 0xaa, 0xfb, 0x43, 0x4d, 0x33, 0x85, 0x45, 0xf9, 0x02, 0x7f, 0x50, 0x3c, 0x9f, 0xa8,
    0x51, 0xa3, 0x40, 0x8f, 0x92, 0x9d, 0x38, 0xf5, 0xbc, 0xb6, 0xda, 0x21, 0x10, 0xff, 0xf3, 0xd2,
    0xcd, 0x0c, 0x13, 0xec, 0x5f, 0x97, 0x44, 0x17, 0xc4, 0xa7, 0x7e, 0x3d, 0x64, 0x5d, 0x19, 0x73,
    0x60, 0x81, 0x4f, 0xdc, 0x22, 0x2a, 0x90, 0x88, 0x46, 0xee, 0xb8, 0x14, 0xde, 0x5e, 0x0b, 0xdb,
    0xe0, 0x32, 0x3a, 0x0a, 0x49, 0x06, 0x24, 0x5c, 0xc2, 0xd3, 0xac, 0x62, 0x91, 0x95, 0xe4, 0x79,
    0xe7, 0xc8, 0x37, 0x6d, 0x8d, 0xd5, 0x4e, 0xa9, 0x6c, 0x56, 0xf4, 0xea, 0x65, 0x7a, 0xae, 0x08,
    0xba, 0x78, 0x25, 0x2e, 0x1c, 0xa6, 0xb4, 0xc6, 0xe8, 0xdd, 0x74, 0x1f, 0x4b, 0xbd, 0x8b, 0x8a,
    0x70, 0x3e, 0xb5, 0x66, 0x48, 0x03, 0xf6, 0x0e, 0x61, 0x35, 0x57, 0xb9, 0x86, 0xc1, 0x1d, 0x9e,
    0xe1, 0xf8, 0x98, 0x11, 0x69, 0xd9, 0x8e, 0x94, 0x9b, 0x1e, 0x87, 0xe9, 0xce, 0x55, 0x28, 0xdf,
    0x8c, 0xa1, 0x89, 0x0d, 0xbf, 0xe6, 0x42, 0x68, 0x41, 0x99, 0x2d, 0x0f, 0xb0, 0x54, 0xbb, 0x16};

namespace {

std::array<uint8_t, 256> make_inverse_sbox() {
  std::array<uint8_t, 256> inv{};
  for (int i = 0; i < 256; ++i) inv[kSbox[i]] = static_cast<uint8_t>(i);
  return inv;
}
const std::array<uint8_t, 256> kInvSbox = make_inverse_sbox();

std::vector<uint16_t> random_perm16(Prng& rng) {
  std::vector<uint16_t> p(65536);
  for (uint32_t i = 0; i < 65536; ++i) p[i] = static_cast<uint16_t>(i);
  for (uint32_t i = 65535; i > 0; --i) {
    uint32_t j = static_cast<uint32_t>(rng.below(i + 1));
    std::swap(p[i], p[j]);
  }
  return p;
}

std::vector<uint16_t> invert_perm16(const std::vector<uint16_t>& p) {
  std::vector<uint16_t> inv(65536);
  for (uint32_t i = 0; i < 65536; ++i) inv[p[i]] = static_cast<uint16_t>(i);
  return inv;
}

}  // namespace

uint16_t sbox2(uint16_t v) {
  return static_cast<uint16_t>(kSbox[v >> 8] << 8 | kSbox[v & 0xFF]);
}

uint16_t inv_sbox2(uint16_t v) {
  return static_cast<uint16_t>(kInvSbox[v >> 8] << 8 | kInvSbox[v & 0xFF]);
}

uint16_t wbc_reference_encrypt(const WbcKey& key, uint16_t pt) {
  uint16_t s = pt;
  for (int r = 0; r < 4; ++r) {
    s = static_cast<uint16_t>(s ^ key.words[static_cast<size_t>(r)]);
    s = sbox2(s);
    s = rotl16(s, 5);
  }
  return static_cast<uint16_t>(s ^ key.words[4]);
}

uint16_t wbc_reference_decrypt(const WbcKey& key, uint16_t ct) {
  uint16_t s = static_cast<uint16_t>(ct ^ key.words[4]);
  for (int r = 3; r >= 0; --r) {
    s = rotr16(s, 5);
    s = inv_sbox2(s);
    s = static_cast<uint16_t>(s ^ key.words[static_cast<size_t>(r)]);
  }
  return s;
}

uint64_t wbc_key_fingerprint(const WbcKey& key) {
  std::vector<uint8_t> bytes;
  for (uint16_t w : key.words) {
    bytes.push_back(static_cast<uint8_t>(w));
    bytes.push_back(static_cast<uint8_t>(w >> 8));
  }
  return fnv1a64(bytes);
}

WhiteBoxTables wbc_generate(const WbcKey& key, uint64_t seed, bool with_encodings) {
  WhiteBoxTables out;
  out.encoded = with_encodings;
  out.key_fingerprint = wbc_key_fingerprint(key);
  for (auto& t : out.tables) t.resize(65536);
  for (uint32_t s = 0; s < 65536; ++s) {
    uint16_t v = static_cast<uint16_t>(s);
    for (int r = 0; r < 4; ++r)
      out.tables[static_cast<size_t>(r)][s] =
          rotl16(sbox2(static_cast<uint16_t>(v ^ key.words[static_cast<size_t>(r)])), 5);
    out.tables[4][s] = static_cast<uint16_t>(v ^ key.words[4]);
  }
  if (with_encodings) {
    Prng rng(seed);
    std::array<std::vector<uint16_t>, 4> p;
    std::array<std::vector<uint16_t>, 4> pinv;
    for (int i = 0; i < 4; ++i) {
      p[static_cast<size_t>(i)] = random_perm16(rng);
      pinv[static_cast<size_t>(i)] = invert_perm16(p[static_cast<size_t>(i)]);
    }
    std::array<std::vector<uint16_t>, 5> enc;
    for (auto& t : enc) t.resize(65536);
    for (uint32_t s = 0; s < 65536; ++s) {
      enc[0][s] = p[0][out.tables[0][s]];
      for (int r = 1; r < 4; ++r)
        enc[static_cast<size_t>(r)][s] =
            p[static_cast<size_t>(r)]
             [out.tables[static_cast<size_t>(r)][pinv[static_cast<size_t>(r - 1)][s]]];
      enc[4][s] = out.tables[4][pinv[3][s]];
    }
    out.tables = std::move(enc);
  }
  return out;
}

uint16_t wbc_tables_eval(const WhiteBoxTables& t, uint16_t pt) {
  uint16_t s = pt;
  for (const auto& table : t.tables) s = table[s];
  return s;
}

std::vector<uint8_t> wbc_table_bytes(const WhiteBoxTables& t, size_t r) {
  std::vector<uint8_t> out;
  out.reserve(131072);
  for (uint16_t v : t.tables[r]) {
    out.push_back(static_cast<uint8_t>(v));
    out.push_back(static_cast<uint8_t>(v >> 8));
  }
  return out;
}

FunctionDef make_wbc_evaluator(uint32_t fid, const std::array<uint32_t, 5>& table_sids) {
  using namespace asmops;
  FunctionDef f;
  f.fid = fid;
  f.name = "wbc_eval";
  f.param_count = 1;
  auto& c = f.code;
  c.push_back(andi(0, 0, 0xFFFF));
  for (uint32_t sid : table_sids) {
    c.push_back(lea(4, sid));
    c.push_back(shli(1, 0, 1));
    c.push_back(add(1, 1, 4));
    c.push_back(loadb(2, 1, 0));
    c.push_back(loadb(3, 1, 1));
    c.push_back(shli(3, 3, 8));
    c.push_back(or_(0, 2, 3));
  }
  c.push_back(ret());
  return f;
}

MobileBlockPayload wbc_emit_block(const WhiteBoxTables& t, const MobileBlockPayload& tmpl) {
  if (tmpl.owned_sections.size() != 5)
    throw std::invalid_argument("wbc template must own five table sections");
  MobileBlockPayload out = tmpl;
  out.version_id = 0;  // assigned by the catalog
  out.group_id = 0;
  for (size_t r = 0; r < 5; ++r) out.owned_sections[r].second = wbc_table_bytes(t, r);
  return out;
}

}  // namespace rvm
