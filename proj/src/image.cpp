#include "rvm/image.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <set>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace rvm {

namespace {

void fail(const std::string& msg) { throw std::invalid_argument("image: " + msg); }

class Writer {
 public:
  std::vector<uint8_t> out;
  void u8(uint8_t v) { out.push_back(v); }
  void u16(uint16_t v) {
    out.push_back(static_cast<uint8_t>(v));
    out.push_back(static_cast<uint8_t>(v >> 8));
  }
  void u32(uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
  }
  void bytes(std::span<const uint8_t> b) { out.insert(out.end(), b.begin(), b.end()); }
  void str(const std::string& s) {
    u32(static_cast<uint32_t>(s.size()));
    out.insert(out.end(), s.begin(), s.end());
  }
};

class Reader {
 public:
  explicit Reader(std::span<const uint8_t> b) : b_(b) {}
  uint8_t u8() {
    need(1);
    return b_[pos_++];
  }
  uint16_t u16() {
    need(2);
    uint16_t v = static_cast<uint16_t>(b_[pos_] | b_[pos_ + 1] << 8);
    pos_ += 2;
    return v;
  }
  uint32_t u32() {
    need(4);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(b_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }
  std::vector<uint8_t> bytes(size_t n) {
    need(n);
    std::vector<uint8_t> v(b_.begin() + pos_, b_.begin() + pos_ + n);
    pos_ += n;
    return v;
  }
  std::string str() {
    uint32_t n = u32();
    if (n > (1u << 20)) fail("name too long");
    auto v = bytes(n);
    return std::string(v.begin(), v.end());
  }
  bool eof() const { return pos_ == b_.size(); }

 private:
  void need(size_t n) {
    if (pos_ + n > b_.size()) fail("truncated container");
  }
  std::span<const uint8_t> b_;
  size_t pos_ = 0;
};

}  // namespace

const FunctionDef* ProgramImage::find_function(uint32_t fid) const {
  for (const auto& f : functions)
    if (f.fid == fid) return &f;
  return nullptr;
}
FunctionDef* ProgramImage::find_function(uint32_t fid) {
  for (auto& f : functions)
    if (f.fid == fid) return &f;
  return nullptr;
}
const DataSection* ProgramImage::find_section(uint32_t sid) const {
  for (const auto& s : sections)
    if (s.sid == sid) return &s;
  return nullptr;
}
DataSection* ProgramImage::find_section(uint32_t sid) {
  for (auto& s : sections)
    if (s.sid == sid) return &s;
  return nullptr;
}
uint32_t ProgramImage::max_fid() const {
  uint32_t m = 0;
  for (const auto& f : functions) m = std::max(m, f.fid);
  return m;
}
uint32_t ProgramImage::max_sid() const {
  uint32_t m = 0;
  for (const auto& s : sections) m = std::max(m, s.sid);
  return m;
}

std::vector<uint8_t> encode_function(const FunctionDef& f) {
  std::vector<uint8_t> out;
  out.reserve(f.code.size() * kInstrBytes);
  for (const auto& in : f.code) encode_instruction(in, out);
  return out;
}

std::vector<Instruction> decode_code(std::span<const uint8_t> bytes) {
  if (bytes.size() % kInstrBytes != 0) fail("code length not a multiple of 8");
  std::vector<Instruction> code;
  code.reserve(bytes.size() / kInstrBytes);
  for (size_t i = 0; i < bytes.size(); i += kInstrBytes)
    code.push_back(decode_instruction(bytes.subspan(i, kInstrBytes)));
  return code;
}

namespace {

// Reachability walk over one function's instructions; checks that every
// reachable path ends in RET or HALT and jump targets stay in bounds.
void check_terminators(const FunctionDef& f) {
  const size_t n = f.code.size();
  std::vector<bool> seen(n, false);
  std::vector<size_t> work{0};
  while (!work.empty()) {
    size_t i = work.back();
    work.pop_back();
    if (i >= n) fail("function " + f.name + ": control flow escapes the body");
    if (seen[i]) continue;
    seen[i] = true;
    const Instruction& in = f.code[i];
    auto target = [&](size_t from) {
      int64_t t = static_cast<int64_t>(from) + 1 + f.code[from].simm();
      if (t < 0 || t > static_cast<int64_t>(n)) fail("function " + f.name + ": jump out of bounds");
      return static_cast<size_t>(t);
    };
    switch (in.op) {
      case Op::Halt:
      case Op::Ret:
        break;
      case Op::Jmp:
        work.push_back(target(i));
        break;
      case Op::Jz:
      case Op::Jnz:
        work.push_back(target(i));
        work.push_back(i + 1);
        break;
      case Op::Sys:
        if (in.imm == kSysExit) break;
        work.push_back(i + 1);
        break;
      default:
        work.push_back(i + 1);
        break;
    }
  }
}

}  // namespace

void validate_image(const ProgramImage& img) {
  std::unordered_map<uint32_t, const FunctionDef*> fids;
  for (const auto& f : img.functions) {
    if (!fids.emplace(f.fid, &f).second) fail("duplicate fid");
    if (f.fid >= kIntrinsicFidBase) fail("fid collides with intrinsic range");
    if (f.param_count > 4) fail("function " + f.name + ": more than 4 params");
    // Empty code marks a mobile stub in extracted static images.
    if (!f.code.empty()) check_terminators(f);
  }
  std::unordered_map<uint32_t, const DataSection*> sids;
  for (const auto& s : img.sections) {
    if (!sids.emplace(s.sid, &s).second) fail("duplicate sid");
    if (s.bytes.size() > kMaxSectionBytes) fail("section " + s.name + " too large");
    if (s.mobile_owned && !s.bytes.empty()) fail("mobile-owned placeholder carries bytes");
  }
  if (!fids.count(img.entry_fid)) fail("entry fid missing");

  // LEA <-> CodeReloc bijection and reference existence.
  std::set<std::pair<uint32_t, uint32_t>> lea_sites;
  for (const auto& f : img.functions)
    for (size_t i = 0; i < f.code.size(); ++i)
      if (f.code[i].op == Op::Lea) lea_sites.insert({f.fid, static_cast<uint32_t>(i)});

  std::set<std::pair<uint32_t, uint32_t>> reloc_sites;
  for (const auto& r : img.relocations) {
    if (r.kind == RelocationRecord::Kind::Code) {
      const auto& c = r.code;
      auto it = fids.find(c.fid);
      if (it == fids.end()) fail("code reloc: unknown fid");
      if (c.instr_index >= it->second->code.size()) fail("code reloc: index out of range");
      const Instruction& in = it->second->code[c.instr_index];
      if (in.op != Op::Lea) fail("code reloc: target is not LEA");
      if (in.imm != c.sid) fail("code reloc: sid does not match LEA immediate");
      if (!sids.count(c.sid)) fail("code reloc: unknown sid");
      if (!reloc_sites.insert({c.fid, c.instr_index}).second) fail("duplicate code reloc");
    } else {
      const auto& d = r.data;
      auto it = sids.find(d.sid);
      if (it == sids.end()) fail("data reloc: unknown sid");
      if (!sids.count(d.target_sid)) fail("data reloc: unknown target sid");
      if (d.byte_offset % 4 != 0) fail("data reloc: unaligned offset");
      size_t len = it->second->mobile_owned ? kMaxSectionBytes : it->second->bytes.size();
      if (d.byte_offset + 4 > len) fail("data reloc: offset out of bounds");
    }
  }
  if (lea_sites != reloc_sites) fail("LEA instructions and code relocs are not in bijection");

  // CALL immediates must resolve (intrinsic range is always callable).
  for (const auto& f : img.functions)
    for (const auto& in : f.code)
      if (in.op == Op::Call && in.imm < kIntrinsicFidBase && !fids.count(in.imm))
        fail("CALL to unknown fid in " + f.name);

  std::unordered_map<uint32_t, const LayoutTable*> lids;
  for (const auto& l : img.layouts)
    if (!lids.emplace(l.layout_id, &l).second) fail("duplicate layout id");
  for (const auto& a : img.layout_accesses) {
    auto it = lids.find(a.layout_id);
    if (it == lids.end()) fail("layout access: unknown layout");
    if (a.field_index >= it->second->field_offsets.size()) fail("layout access: bad field");
    auto fit = fids.find(a.fid);
    if (fit == fids.end()) fail("layout access: unknown fid");
    if (a.instr_index >= fit->second->code.size()) fail("layout access: bad index");
    const Instruction& in = fit->second->code[a.instr_index];
    if (in.op != Op::Load && in.op != Op::Store && in.op != Op::LoadB && in.op != Op::StoreB)
      fail("layout access: instruction is not a memory access");
    if (in.imm != it->second->field_offsets[a.field_index])
      fail("layout access: immediate does not match layout offset");
  }
}

void regenerate_code_relocs(ProgramImage& img) {
  std::erase_if(img.relocations, [](const RelocationRecord& r) {
    return r.kind == RelocationRecord::Kind::Code;
  });
  for (const auto& f : img.functions)
    for (size_t i = 0; i < f.code.size(); ++i)
      if (f.code[i].op == Op::Lea)
        img.relocations.push_back(
            RelocationRecord::of(CodeReloc{f.fid, static_cast<uint32_t>(i), f.code[i].imm}));
}

std::vector<uint8_t> image_save(const ProgramImage& img) {
  Writer w;
  w.bytes(std::span<const uint8_t>(reinterpret_cast<const uint8_t*>("RVMI"), 4));
  w.u16(1);
  w.u32(static_cast<uint32_t>(img.functions.size()));
  for (const auto& f : img.functions) {
    w.u32(f.fid);
    w.str(f.name);
    w.u8(f.param_count);
    auto code = encode_function(f);
    w.u32(static_cast<uint32_t>(code.size()));
    w.bytes(code);
  }
  w.u32(static_cast<uint32_t>(img.sections.size()));
  for (const auto& s : img.sections) {
    w.u32(s.sid);
    w.str(s.name);
    uint8_t flags = (s.exported ? 1 : 0) | (s.writable ? 2 : 0) | (s.mobile_owned ? 4 : 0);
    w.u8(flags);
    w.u32(static_cast<uint32_t>(s.bytes.size()));
    w.bytes(s.bytes);
  }
  w.u32(static_cast<uint32_t>(img.relocations.size()));
  for (const auto& r : img.relocations) {
    w.u8(static_cast<uint8_t>(r.kind));
    if (r.kind == RelocationRecord::Kind::Code) {
      w.u32(r.code.fid);
      w.u32(r.code.instr_index);
      w.u32(r.code.sid);
    } else {
      w.u32(r.data.sid);
      w.u32(r.data.byte_offset);
      w.u32(r.data.target_sid);
    }
  }
  w.u32(img.entry_fid);
  // Layout metadata trailer (readers of the base records may stop before it).
  w.u32(static_cast<uint32_t>(img.layouts.size()));
  for (const auto& l : img.layouts) {
    w.u32(l.layout_id);
    w.u32(static_cast<uint32_t>(l.field_offsets.size()));
    for (uint32_t off : l.field_offsets) w.u32(off);
  }
  w.u32(static_cast<uint32_t>(img.layout_accesses.size()));
  for (const auto& a : img.layout_accesses) {
    w.u32(a.fid);
    w.u32(a.instr_index);
    w.u32(a.layout_id);
    w.u32(a.field_index);
  }
  return std::move(w.out);
}

ProgramImage image_load(std::span<const uint8_t> bytes) {
  Reader r(bytes);
  auto magic = r.bytes(4);
  if (std::memcmp(magic.data(), "RVMI", 4) != 0) fail("bad magic");
  if (r.u16() != 1) fail("unsupported format version");
  ProgramImage img;
  uint32_t nf = r.u32();
  for (uint32_t i = 0; i < nf; ++i) {
    FunctionDef f;
    f.fid = r.u32();
    f.name = r.str();
    f.param_count = r.u8();
    uint32_t code_len = r.u32();
    f.code = decode_code(r.bytes(code_len));
    img.functions.push_back(std::move(f));
  }
  uint32_t ns = r.u32();
  for (uint32_t i = 0; i < ns; ++i) {
    DataSection s;
    s.sid = r.u32();
    s.name = r.str();
    uint8_t flags = r.u8();
    s.exported = flags & 1;
    s.writable = flags & 2;
    s.mobile_owned = flags & 4;
    uint32_t len = r.u32();
    s.bytes = r.bytes(len);
    img.sections.push_back(std::move(s));
  }
  uint32_t nr = r.u32();
  for (uint32_t i = 0; i < nr; ++i) {
    uint8_t kind = r.u8();
    if (kind == 0) {
      CodeReloc c{r.u32(), r.u32(), r.u32()};
      img.relocations.push_back(RelocationRecord::of(c));
    } else if (kind == 1) {
      DataReloc d{r.u32(), r.u32(), r.u32()};
      img.relocations.push_back(RelocationRecord::of(d));
    } else {
      fail("bad relocation kind");
    }
  }
  img.entry_fid = r.u32();
  if (!r.eof()) {
    uint32_t nl = r.u32();
    for (uint32_t i = 0; i < nl; ++i) {
      LayoutTable l;
      l.layout_id = r.u32();
      uint32_t nfld = r.u32();
      for (uint32_t j = 0; j < nfld; ++j) l.field_offsets.push_back(r.u32());
      img.layouts.push_back(std::move(l));
    }
    uint32_t na = r.u32();
    for (uint32_t i = 0; i < na; ++i)
      img.layout_accesses.push_back({r.u32(), r.u32(), r.u32(), r.u32()});
  }
  if (!r.eof()) fail("trailing bytes");
  return img;
}

void image_save_file(const ProgramImage& img, const std::string& path) {
  auto bytes = image_save(img);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) fail("cannot open " + path);
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) fail("write failed: " + path);
}

ProgramImage image_load_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail("cannot open " + path);
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return image_load(bytes);
}

}  // namespace rvm
