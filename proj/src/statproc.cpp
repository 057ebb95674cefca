#include "rvm/statproc.hpp"

#include <map>
#include <stdexcept>

#include "rvm/cfg.hpp"
#include "rvm/rng.hpp"

namespace rvm {

namespace {
using namespace asmops;
}

StatProcResult static_to_procedural(const ProgramImage& img, uint32_t sid, uint32_t owner_fid,
                                    uint64_t seed) {
  const DataSection* sec = img.find_section(sid);
  if (!sec) throw std::invalid_argument("statproc: unknown section");
  if (sec->writable) throw std::invalid_argument("statproc: section is writable");
  if (sec->exported) throw std::invalid_argument("statproc: section is exported");
  if (sec->bytes.size() > 4096) throw std::invalid_argument("statproc: section too large");
  if (!img.find_function(owner_fid)) throw std::invalid_argument("statproc: unknown owner");
  for (const auto& r : img.relocations) {
    if (r.kind == RelocationRecord::Kind::Code && r.code.sid == sid && r.code.fid != owner_fid)
      throw std::invalid_argument("statproc: section referenced outside the owner");
    if (r.kind == RelocationRecord::Kind::Data &&
        (r.data.sid == sid || r.data.target_sid == sid))
      throw std::invalid_argument("statproc: section participates in data relocations");
  }

  StatProcResult res;
  res.img = img;
  res.scratch_sid = img.max_sid() + 1;
  res.generator_fid = img.max_fid() + 1;
  const uint32_t len = static_cast<uint32_t>(sec->bytes.size());
  const uint32_t words = (len + 3) / 4;

  // The generator fills the scratch section word by word, each value split
  // into a PRNG pair combined with XOR or ADD, and returns the base in R0.
  Prng rng(seed);
  FunctionDef gen;
  gen.fid = res.generator_fid;
  gen.name = "gen_s" + std::to_string(sid);
  gen.param_count = 0;
  auto& code = gen.code;
  code.push_back(subi(kSp, kSp, 8));
  code.push_back(store(1, kSp, 0));
  code.push_back(store(2, kSp, 4));
  code.push_back(lea(0, res.scratch_sid));
  for (uint32_t w = 0; w < words; ++w) {
    uint32_t v = 0;
    for (uint32_t b = 0; b < 4; ++b) {
      uint32_t idx = 4 * w + b;
      if (idx < len) v |= static_cast<uint32_t>(sec->bytes[idx]) << (8 * b);
    }
    uint32_t a = static_cast<uint32_t>(rng.next());
    if (rng.chance(0.5)) {
      code.push_back(loadi(1, a));
      code.push_back(loadi(2, v ^ a));
      code.push_back(xor_(1, 1, 2));
    } else {
      code.push_back(loadi(1, a));
      code.push_back(loadi(2, v - a));
      code.push_back(add(1, 1, 2));
    }
    code.push_back(store(1, 0, 4 * w));
  }
  code.push_back(load(1, kSp, 0));
  code.push_back(load(2, kSp, 4));
  code.push_back(addi(kSp, kSp, 8));
  code.push_back(ret());

  // Rewrite every LEA of the section inside the owner into a generator
  // call. R0 is preserved around the call unless it is the destination.
  FunctionDef* owner = res.img.find_function(owner_fid);
  Cfg cfg = Cfg::build(owner->code);
  bool rewrote = false;
  for (auto& bb : cfg.blocks) {
    std::vector<TaggedInstr> out;
    for (auto& ti : bb.insns) {
      if (ti.in.op == Op::Lea && ti.in.imm == sid) {
        rewrote = true;
        uint8_t rd = ti.in.ra;
        if (rd == 0) {
          out.push_back({call(res.generator_fid), -1});
        } else {
          out.push_back({subi(kSp, kSp, 4), -1});
          out.push_back({store(0, kSp, 0), -1});
          out.push_back({call(res.generator_fid), -1});
          out.push_back({mov(rd, 0), -1});
          out.push_back({load(0, kSp, 0), -1});
          out.push_back({addi(kSp, kSp, 4), -1});
        }
      } else {
        out.push_back(ti);
      }
    }
    bb.insns = std::move(out);
  }
  auto lin = cfg.linearize_identity(owner->code.size());
  owner->code = lin.code;
  for (auto& a : res.img.layout_accesses) {
    if (a.fid != owner_fid) continue;
    int ni = lin.index_map[a.instr_index];
    if (ni < 0) throw std::logic_error("layout access lost in statproc rewrite");
    a.instr_index = static_cast<uint32_t>(ni);
  }
  if (!rewrote) throw std::invalid_argument("statproc: owner has no LEA of the section");

  std::erase_if(res.img.sections, [&](const DataSection& s) { return s.sid == sid; });
  DataSection scratch;
  scratch.sid = res.scratch_sid;
  scratch.name = "scratch_s" + std::to_string(sid);
  scratch.bytes.assign(4 * words, 0);
  scratch.writable = true;
  res.img.sections.push_back(std::move(scratch));
  res.img.functions.push_back(std::move(gen));
  regenerate_code_relocs(res.img);
  validate_image(res.img);
  return res;
}

}  // namespace rvm
