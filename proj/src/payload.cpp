#include "rvm/payload.hpp"

#include <cstring>

#include "rvm/hash.hpp"

namespace rvm {

namespace {

void put_u16(std::vector<uint8_t>& out, uint16_t v) {
  out.push_back(static_cast<uint8_t>(v));
  out.push_back(static_cast<uint8_t>(v >> 8));
}
void put_u32(std::vector<uint8_t>& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}
void put_u64(std::vector<uint8_t>& out, uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

class Cursor {
 public:
  explicit Cursor(std::span<const uint8_t> b) : b_(b) {}
  uint8_t u8() { return take(1)[0]; }
  uint16_t u16() {
    auto s = take(2);
    return static_cast<uint16_t>(s[0] | s[1] << 8);
  }
  uint32_t u32() {
    auto s = take(4);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(s[i]) << (8 * i);
    return v;
  }
  uint64_t u64() {
    auto s = take(8);
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(s[i]) << (8 * i);
    return v;
  }
  std::vector<uint8_t> bytes(size_t n) {
    auto s = take(n);
    return std::vector<uint8_t>(s.begin(), s.end());
  }
  bool done() const { return pos_ == b_.size(); }

 private:
  std::span<const uint8_t> take(size_t n) {
    if (pos_ + n > b_.size()) throw PayloadFormatError("mblk: truncated");
    auto s = b_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  std::span<const uint8_t> b_;
  size_t pos_ = 0;
};

}  // namespace

std::vector<uint8_t> payload_pack(const MobileBlockPayload& p) {
  std::vector<uint8_t> out;
  out.insert(out.end(), {'M', 'B', 'L', 'K'});
  put_u16(out, 1);
  put_u32(out, p.block_id);
  put_u64(out, p.version_id);
  put_u32(out, p.group_id);
  put_u32(out, p.entry_fid);
  out.push_back(p.param_count);
  put_u32(out, static_cast<uint32_t>(p.code.size()));
  out.insert(out.end(), p.code.begin(), p.code.end());
  put_u16(out, static_cast<uint16_t>(p.owned_sections.size()));
  for (const auto& [sid, bytes] : p.owned_sections) {
    put_u32(out, sid);
    put_u32(out, static_cast<uint32_t>(bytes.size()));
    out.insert(out.end(), bytes.begin(), bytes.end());
  }
  return out;
}

MobileBlockPayload payload_unpack(std::span<const uint8_t> bytes) {
  Cursor c(bytes);
  auto magic = c.bytes(4);
  if (std::memcmp(magic.data(), "MBLK", 4) != 0) throw PayloadFormatError("mblk: bad magic");
  if (c.u16() != 1) throw PayloadFormatError("mblk: unsupported version");
  MobileBlockPayload p;
  p.block_id = c.u32();
  p.version_id = c.u64();
  p.group_id = c.u32();
  p.entry_fid = c.u32();
  p.param_count = c.u8();
  uint32_t code_len = c.u32();
  if (code_len % 8 != 0) throw PayloadFormatError("mblk: code length not instruction aligned");
  p.code = c.bytes(code_len);
  uint16_t ns = c.u16();
  for (uint16_t i = 0; i < ns; ++i) {
    uint32_t sid = c.u32();
    uint32_t len = c.u32();
    p.owned_sections.emplace_back(sid, c.bytes(len));
  }
  if (!c.done()) throw PayloadFormatError("mblk: trailing bytes");
  return p;
}

uint64_t payload_hash(std::span<const uint8_t> packed) { return fnv1a64(packed); }

}  // namespace rvm
