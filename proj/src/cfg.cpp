#include "rvm/cfg.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace rvm {

namespace {

bool is_branch(Op op) { return op == Op::Jmp || op == Op::Jz || op == Op::Jnz; }
bool ends_flow(const Instruction& in) {
  return in.op == Op::Ret || in.op == Op::Halt || (in.op == Op::Sys && in.imm == kSysExit);
}

}  // namespace

Cfg Cfg::build(const std::vector<Instruction>& code) {
  const size_t n = code.size();
  if (n == 0) throw std::invalid_argument("cfg: empty code");
  std::vector<bool> leader(n + 1, false);
  leader[0] = true;
  for (size_t i = 0; i < n; ++i) {
    const Instruction& in = code[i];
    if (is_branch(in.op)) {
      int64_t t = static_cast<int64_t>(i) + 1 + in.simm();
      if (t < 0 || t > static_cast<int64_t>(n)) throw std::invalid_argument("cfg: jump oob");
      if (t < static_cast<int64_t>(n)) leader[static_cast<size_t>(t)] = true;
      if (i + 1 < n) leader[i + 1] = true;
    } else if (ends_flow(in) && i + 1 < n) {
      leader[i + 1] = true;
    }
  }
  std::map<size_t, int> block_of_index;
  Cfg cfg;
  for (size_t i = 0; i < n; ++i) {
    if (leader[i]) {
      block_of_index[i] = static_cast<int>(cfg.blocks.size());
      cfg.blocks.emplace_back();
    }
  }
  // Fill bodies and classify terminators.
  size_t i = 0;
  for (auto it = block_of_index.begin(); it != block_of_index.end(); ++it) {
    size_t start = it->first;
    auto nx = std::next(it);
    size_t end = nx == block_of_index.end() ? n : nx->first;
    BasicBlock& bb = cfg.blocks[static_cast<size_t>(it->second)];
    int next_block = nx == block_of_index.end() ? -1 : nx->second;
    for (i = start; i < end; ++i) {
      const Instruction& in = code[i];
      if (is_branch(in.op) && i + 1 == end) {
        int64_t t = static_cast<int64_t>(i) + 1 + in.simm();
        int tb = t == static_cast<int64_t>(n) ? -1 : block_of_index.at(static_cast<size_t>(t));
        if (tb < 0) throw std::invalid_argument("cfg: jump to end of function");
        if (in.op == Op::Jmp) {
          bb.term = BasicBlock::Term::Jump;
        } else {
          bb.term = BasicBlock::Term::Branch;
          bb.branch_op = in.op;
          bb.branch_reg = in.ra;
          if (next_block < 0)
            throw std::invalid_argument("cfg: conditional branch falls off the end");
          bb.next = next_block;
        }
        bb.branch_src = static_cast<int>(i);
        bb.target = tb;
      } else {
        bb.insns.push_back({in, static_cast<int>(i)});
        if (i + 1 == end) {
          if (ends_flow(in)) {
            bb.term = BasicBlock::Term::None;
          } else {
            if (next_block < 0) throw std::invalid_argument("cfg: control falls off the end");
            bb.term = BasicBlock::Term::FallThrough;
            bb.next = next_block;
          }
        }
      }
    }
  }
  return cfg;
}

Cfg::Linearized Cfg::linearize(const std::vector<size_t>& order, size_t original_size) const {
  if (order.size() != blocks.size() || order.empty() || order[0] != 0)
    throw std::invalid_argument("cfg: bad layout order");
  // First pass: emitted size of each block in layout order.
  std::vector<size_t> start(blocks.size(), 0);
  size_t pos = 0;
  std::vector<size_t> layout_pos(blocks.size(), 0);
  for (size_t k = 0; k < order.size(); ++k) layout_pos[order[k]] = k;
  for (size_t k = 0; k < order.size(); ++k) {
    const BasicBlock& bb = blocks[order[k]];
    start[order[k]] = pos;
    pos += bb.insns.size();
    switch (bb.term) {
      case BasicBlock::Term::None:
        break;
      case BasicBlock::Term::Jump:
        pos += 1;
        break;
      case BasicBlock::Term::FallThrough:
        if (k + 1 >= order.size() || static_cast<int>(order[k + 1]) != bb.next) pos += 1;
        break;
      case BasicBlock::Term::Branch:
        pos += 1;
        if (k + 1 >= order.size() || static_cast<int>(order[k + 1]) != bb.next) pos += 1;
        break;
    }
  }
  Linearized out;
  out.code.reserve(pos);
  out.index_map.assign(original_size, -1);
  auto note = [&out](int src) {
    if (src >= 0 && src < static_cast<int>(out.index_map.size()))
      out.index_map[static_cast<size_t>(src)] = static_cast<int>(out.code.size());
  };
  for (size_t k = 0; k < order.size(); ++k) {
    const BasicBlock& bb = blocks[order[k]];
    for (const auto& ti : bb.insns) {
      note(ti.src);
      out.code.push_back(ti.in);
    }
    auto rel = [&](int block) {
      return static_cast<int32_t>(static_cast<int64_t>(start[static_cast<size_t>(block)]) -
                                  (static_cast<int64_t>(out.code.size()) + 1));
    };
    switch (bb.term) {
      case BasicBlock::Term::None:
        break;
      case BasicBlock::Term::Jump:
        note(bb.branch_src);
        out.code.push_back(asmops::jmp(rel(bb.target)));
        break;
      case BasicBlock::Term::FallThrough:
        if (k + 1 >= order.size() || static_cast<int>(order[k + 1]) != bb.next)
          out.code.push_back(asmops::jmp(rel(bb.next)));
        break;
      case BasicBlock::Term::Branch: {
        note(bb.branch_src);
        Instruction br{bb.branch_op, bb.branch_reg, 0, 0, 0};
        br.imm = static_cast<uint32_t>(rel(bb.target));
        out.code.push_back(br);
        if (k + 1 >= order.size() || static_cast<int>(order[k + 1]) != bb.next)
          out.code.push_back(asmops::jmp(rel(bb.next)));
        break;
      }
    }
  }
  return out;
}

Cfg::Linearized Cfg::linearize_identity(size_t original_size) const {
  std::vector<size_t> order(blocks.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  return linearize(order, original_size);
}

}  // namespace rvm
