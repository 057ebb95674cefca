#include "rvm/isr.hpp"

#include <stdexcept>

#include "rvm/rng.hpp"

namespace rvm {

namespace {
using namespace asmops;
}

IsrBundle isr_translate_with(const FunctionDef& f, const std::array<uint8_t, kOpcodeCount>& pi,
                             uint32_t mask, uint32_t bytecode_sid, uint32_t opmap_sid) {
  std::array<bool, kOpcodeCount> seen{};
  for (uint8_t v : pi) {
    if (v >= kOpcodeCount || seen[v]) throw std::invalid_argument("isr: not a permutation");
    seen[v] = true;
  }
  IsrBundle b;
  b.pi = pi;
  b.mask = mask;
  b.bytecode_sid = bytecode_sid;
  b.opmap_sid = opmap_sid;
  auto plain = encode_function(f);
  b.bytecode = plain;
  for (size_t i = 0; i < b.bytecode.size(); i += kInstrBytes) {
    b.bytecode[i] = pi[b.bytecode[i]];
    uint32_t imm = static_cast<uint32_t>(b.bytecode[i + 4]) |
                   static_cast<uint32_t>(b.bytecode[i + 5]) << 8 |
                   static_cast<uint32_t>(b.bytecode[i + 6]) << 16 |
                   static_cast<uint32_t>(b.bytecode[i + 7]) << 24;
    imm ^= mask;
    for (int k = 0; k < 4; ++k) b.bytecode[i + 4 + k] = static_cast<uint8_t>(imm >> (8 * k));
  }
  b.opmap.assign(40, 0);
  for (uint8_t op = 0; op < kOpcodeCount; ++op) b.opmap[op] = pi[op];
  uint64_t m = mask;  // stored as u64, low half masks the immediates
  for (int k = 0; k < 8; ++k) b.opmap[32 + static_cast<size_t>(k)] = static_cast<uint8_t>(m >> (8 * k));

  b.stub.fid = f.fid;
  b.stub.name = f.name + "_stub";
  b.stub.param_count = f.param_count;
  b.stub.code = {lea(4, bytecode_sid), lea(5, opmap_sid), call(kIntrinsicIsrExec), ret()};
  return b;
}

IsrBundle isr_translate(const FunctionDef& f, uint64_t seed, uint32_t bytecode_sid,
                        uint32_t opmap_sid) {
  Prng rng(seed);
  std::array<uint8_t, kOpcodeCount> pi{};
  for (uint8_t i = 0; i < kOpcodeCount; ++i) pi[i] = i;
  for (size_t i = kOpcodeCount - 1; i > 0; --i) {
    size_t j = rng.below(i + 1);
    std::swap(pi[i], pi[j]);
  }
  uint32_t mask = static_cast<uint32_t>(rng.next());
  return isr_translate_with(f, pi, mask, bytecode_sid, opmap_sid);
}

IsrApplied isr_apply(const ProgramImage& img, uint32_t fid, uint64_t seed) {
  const FunctionDef* f = img.find_function(fid);
  if (!f) throw std::invalid_argument("isr: unknown fid");
  IsrApplied out;
  out.img = img;
  out.bytecode_sid = img.max_sid() + 1;
  out.opmap_sid = img.max_sid() + 2;
  IsrBundle b = isr_translate(*f, seed, out.bytecode_sid, out.opmap_sid);
  *out.img.find_function(fid) = b.stub;
  DataSection bc;
  bc.sid = b.bytecode_sid;
  bc.name = f->name + "_bytecode";
  bc.bytes = b.bytecode;
  out.img.sections.push_back(std::move(bc));
  DataSection om;
  om.sid = b.opmap_sid;
  om.name = f->name + "_opmap";
  om.bytes = b.opmap;
  out.img.sections.push_back(std::move(om));
  regenerate_code_relocs(out.img);
  validate_image(out.img);
  return out;
}

}  // namespace rvm
