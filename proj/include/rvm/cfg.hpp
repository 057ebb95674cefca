// Basic-block decomposition and re-linearization for code transforms.
// Blocks hold instructions with symbolic branch targets; linearize() lays
// blocks out in a chosen order, recomputes relative offsets and inserts
// explicit jumps where a fall-through edge is no longer adjacent.
#pragma once

#include <cstdint>
#include <vector>

#include "rvm/image.hpp"

namespace rvm {

struct TaggedInstr {
  Instruction in;
  int src = -1;  // original instruction index, -1 for synthesized code

  bool operator==(const TaggedInstr&) const = default;
};

struct BasicBlock {
  enum class Term : uint8_t {
    None,         // last instruction ends the function (RET/HALT/SYS exit)
    FallThrough,  // control continues in `next`
    Jump,         // unconditional jump to `target`
    Branch,       // conditional branch to `target`, else `next`
  };
  std::vector<TaggedInstr> insns;  // body without the branch terminator
  Term term = Term::None;
  Op branch_op = Op::Jmp;  // Jz/Jnz for Branch
  uint8_t branch_reg = 0;
  int branch_src = -1;  // original index of the branch instruction
  int target = -1;
  int next = -1;
};

struct Cfg {
  std::vector<BasicBlock> blocks;  // blocks[0] is the entry

  static Cfg build(const std::vector<Instruction>& code);

  struct Linearized {
    std::vector<Instruction> code;
    std::vector<int> index_map;  // original index -> new index (-1: dropped)
  };
  // `order` must contain every block exactly once, entry first.
  Linearized linearize(const std::vector<size_t>& order, size_t original_size) const;
  Linearized linearize_identity(size_t original_size) const;
};

}  // namespace rvm
