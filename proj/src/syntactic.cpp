#include "rvm/syntactic.hpp"

#include <algorithm>

#include "rvm/cfg.hpp"
#include "rvm/rng.hpp"

namespace rvm {

namespace {

using namespace asmops;

// Registers R0..R7 that are overwritten later in the block before being
// read; conservative (everything is live at the block end).
std::array<bool, 8> dead_at(const std::vector<TaggedInstr>& insns, size_t point) {
  std::array<bool, 8> dead{};
  std::array<bool, 8> decided{};
  for (size_t i = point; i < insns.size(); ++i) {
    const RegUse use = reg_use(insns[i].in);
    for (uint8_t r : use.reads)
      if (r < 8 && !decided[r]) {
        decided[r] = true;
        dead[r] = false;
      }
    if (use.def_ra && insns[i].in.ra < 8 && !decided[insns[i].in.ra]) {
      decided[insns[i].in.ra] = true;
      dead[insns[i].in.ra] = true;
    }
  }
  // Branch terminators read their test register; treat it as live always
  // (handled by callers passing the full body only).
  return dead;
}

Instruction junk_store(Prng& rng) {
  // Dead store into the scratch slots below SP; never read by anything.
  uint8_t rs = static_cast<uint8_t>(rng.below(8));
  uint32_t slot = static_cast<uint32_t>(-4 - 4 * static_cast<int32_t>(rng.below(4)));
  return store(rs, kSp, slot);
}

}  // namespace

FunctionDef syntactic_diversify(const FunctionDef& f, const DiversificationKnobs& knobs) {
  Prng rng(knobs.seed);
  Cfg cfg = Cfg::build(f.code);
  const size_t nblocks = cfg.blocks.size();

  // Instruction substitutions, in place.
  if (knobs.subst_rate > 0) {
    for (auto& bb : cfg.blocks) {
      for (auto& ti : bb.insns) {
        Instruction& in = ti.in;
        if (!rng.chance(knobs.subst_rate)) continue;
        if (in.op == Op::AddI) {
          in.op = Op::SubI;
          in.imm = static_cast<uint32_t>(-static_cast<int64_t>(in.imm));
        } else if (in.op == Op::SubI) {
          in.op = Op::AddI;
          in.imm = static_cast<uint32_t>(-static_cast<int64_t>(in.imm));
        } else if (in.op == Op::Xor && in.ra == in.rb && in.rb == in.rc) {
          in = loadi(in.ra, 0);
        } else if (in.op == Op::LoadI && in.imm == 0) {
          in = xor_(in.ra, in.ra, in.ra);
        }
      }
    }
  }

  // Dead stores at random points.
  if (knobs.junk_rate > 0) {
    for (auto& bb : cfg.blocks) {
      std::vector<TaggedInstr> out;
      out.reserve(bb.insns.size());
      for (auto& ti : bb.insns) {
        if (rng.chance(knobs.junk_rate)) out.push_back({junk_store(rng), -1});
        out.push_back(ti);
      }
      bb.insns = std::move(out);
    }
  }

  // Opaque-false predicates branching to junk blocks. Appended blocks jump
  // back to a split continuation, so even a hypothetically taken branch
  // would be harmless; the predicate register must be dead at the point.
  if (knobs.opaque_pred_rate > 0) {
    size_t original_blocks = cfg.blocks.size();
    for (size_t bi = 0; bi < original_blocks; ++bi) {
      if (!rng.chance(knobs.opaque_pred_rate)) continue;
      auto& bb = cfg.blocks[bi];
      if (bb.insns.empty()) continue;
      size_t point = rng.below(bb.insns.size() + 1);
      auto dead = dead_at(bb.insns, point);
      if (bb.term == BasicBlock::Term::Branch) dead[bb.branch_reg & 7] = false;
      std::vector<uint8_t> cand;
      for (uint8_t r = 0; r < 8; ++r)
        if (dead[r]) cand.push_back(r);
      if (cand.empty()) continue;
      uint8_t r = cand[rng.below(cand.size())];
      uint32_t x = static_cast<uint32_t>(rng.next()) | 1;

      // Split the block: bb keeps [0, point) plus the predicate, a new
      // continuation block receives the tail and the old terminator.
      BasicBlock cont;
      cont.insns.assign(bb.insns.begin() + static_cast<long>(point), bb.insns.end());
      cont.term = bb.term;
      cont.branch_op = bb.branch_op;
      cont.branch_reg = bb.branch_reg;
      cont.branch_src = bb.branch_src;
      cont.target = bb.target;
      cont.next = bb.next;
      int cont_idx = static_cast<int>(cfg.blocks.size());
      cfg.blocks.push_back(std::move(cont));

      BasicBlock junk;
      size_t njunk = 1 + rng.below(3);
      for (size_t j = 0; j < njunk; ++j) junk.insns.push_back({junk_store(rng), -1});
      junk.term = BasicBlock::Term::Jump;
      junk.target = cont_idx;
      int junk_idx = static_cast<int>(cfg.blocks.size());
      cfg.blocks.push_back(std::move(junk));

      auto& head = cfg.blocks[bi];  // re-fetch, vector may have reallocated
      head.insns.resize(point);
      head.insns.push_back({loadi(r, x), -1});
      head.insns.push_back({mul(r, r, r), -1});
      head.insns.push_back({andi(r, r, 1), -1});
      head.insns.push_back({xori(r, r, x & 1), -1});
      head.term = BasicBlock::Term::Branch;
      head.branch_op = Op::Jnz;
      head.branch_reg = r;
      head.branch_src = -1;
      head.target = junk_idx;
      head.next = cont_idx;
    }
  }

  // Layout shuffle: entry block stays first.
  std::vector<size_t> order(cfg.blocks.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  if (knobs.shuffle && cfg.blocks.size() > 2) {
    for (size_t i = order.size() - 1; i > 1; --i)
      std::swap(order[i], order[1 + rng.below(i)]);
  }
  (void)nblocks;

  auto lin = cfg.linearize(order, f.code.size());
  FunctionDef out = f;
  out.code = std::move(lin.code);
  return out;
}

MobileBlockPayload diversify_payload(const MobileBlockPayload& payload,
                                     const DiversificationKnobs& knobs) {
  FunctionDef f;
  f.fid = payload.entry_fid;
  f.name = "block" + std::to_string(payload.block_id);
  f.param_count = payload.param_count;
  f.code = decode_code(payload.code);
  FunctionDef g = syntactic_diversify(f, knobs);
  MobileBlockPayload out = payload;
  out.code = encode_function(g);
  return out;
}

}  // namespace rvm
