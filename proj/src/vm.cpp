#include "rvm/vm.hpp"

#include <algorithm>
#include <chrono>

#include "rvm/rng.hpp"

namespace rvm {

const char* fault_name(VmFault f) {
  switch (f) {
    case VmFault::MobileBlockUnavailable: return "MobileBlockUnavailable";
    case VmFault::DownloadBeforeUse: return "DownloadBeforeUseViolation";
    case VmFault::MemoryFault: return "MemoryFault";
    case VmFault::InvalidOpcode: return "InvalidOpcode";
    case VmFault::InvalidSyscall: return "InvalidSyscall";
    case VmFault::BudgetExhausted: return "BudgetExhausted";
    case VmFault::UnknownFunction: return "UnknownFunction";
    case VmFault::HeapExhausted: return "HeapExhausted";
    case VmFault::BlockAlreadyLoaded: return "BlockAlreadyLoaded";
    case VmFault::MalformedPayload: return "MalformedPayload";
    case VmFault::StackError: return "StackError";
    case VmFault::ResolverFailed: return "ResolverFailed";
    case VmFault::AddressSpaceExhausted: return "AddressSpaceExhausted";
  }
  return "?";
}

namespace {
[[noreturn]] void fault(VmFault f, const std::string& msg) { throw VmError(f, msg); }

uint32_t page_round(uint32_t len) { return (len + kPageBytes - 1) & ~(kPageBytes - 1); }

uint32_t branch_target(uint32_t pc, int32_t off) {
  return static_cast<uint32_t>(static_cast<int64_t>(pc) + 8 + static_cast<int64_t>(off) * 8);
}

std::string hex32(uint32_t v) {
  char buf[16];
  snprintf(buf, sizeof buf, "0x%08x", v);
  return buf;
}
}  // namespace

ProcessState::ProcessState() {
  regs[kSp] = kStackTop;
  map_fixed(kStackLimit, kStackTop - kStackLimit + 16);
}

uint8_t* ProcessState::page_slot(uint32_t addr) const {
  uint32_t page = addr / kPageBytes;
  auto it = pages_.find(page);
  if (it == pages_.end()) it = pages_.emplace(page, std::make_unique<Page>()).first;
  return it->second->data.data() + addr % kPageBytes;
}

void ProcessState::check_mapped(uint32_t addr, uint32_t len) const {
  if (len == 0) return;
  // Interval containing addr must cover [addr, addr+len).
  auto it = ranges_.upper_bound(addr);
  if (it == ranges_.begin()) fault(VmFault::MemoryFault, "access to unmapped address " + hex32(addr));
  --it;
  uint64_t end = static_cast<uint64_t>(addr) + len;
  if (addr < it->first || end > it->second)
    fault(VmFault::MemoryFault, "access to unmapped address " + hex32(addr));
}

bool ProcessState::range_mapped(uint32_t addr, uint32_t len) const {
  auto it = ranges_.upper_bound(addr);
  if (it == ranges_.begin()) return false;
  --it;
  return addr >= it->first && static_cast<uint64_t>(addr) + len <= it->second;
}

uint8_t ProcessState::read8(uint32_t addr) const {
  check_mapped(addr, 1);
  return *page_slot(addr);
}

uint32_t ProcessState::read32(uint32_t addr) const {
  if (addr % 4 != 0) fault(VmFault::MemoryFault, "unaligned 32-bit read at " + hex32(addr));
  check_mapped(addr, 4);
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(*page_slot(addr + i)) << (8 * i);
  return v;
}

void ProcessState::write8(uint32_t addr, uint8_t v) {
  check_mapped(addr, 1);
  *page_slot(addr) = v;
}

void ProcessState::write32(uint32_t addr, uint32_t v) {
  if (addr % 4 != 0) fault(VmFault::MemoryFault, "unaligned 32-bit write at " + hex32(addr));
  check_mapped(addr, 4);
  for (int i = 0; i < 4; ++i) *page_slot(addr + i) = static_cast<uint8_t>(v >> (8 * i));
}

std::vector<uint8_t> ProcessState::read_bytes(uint32_t addr, uint32_t len) const {
  check_mapped(addr, len);
  std::vector<uint8_t> out(len);
  for (uint32_t i = 0; i < len; ++i) out[i] = *page_slot(addr + i);
  return out;
}

void ProcessState::write_bytes(uint32_t addr, std::span<const uint8_t> bytes) {
  check_mapped(addr, static_cast<uint32_t>(bytes.size()));
  for (size_t i = 0; i < bytes.size(); ++i) *page_slot(addr + static_cast<uint32_t>(i)) = bytes[i];
}

void ProcessState::map_fixed(uint32_t addr, uint32_t len) {
  if (len == 0) return;
  uint64_t end = static_cast<uint64_t>(addr) + len;
  // Reject overlap with an existing range.
  auto it = ranges_.upper_bound(addr);
  if (it != ranges_.begin()) {
    auto prev = std::prev(it);
    if (prev->second > addr) fault(VmFault::MemoryFault, "map overlap at " + hex32(addr));
  }
  if (it != ranges_.end() && it->first < end) fault(VmFault::MemoryFault, "map overlap");
  ranges_[addr] = static_cast<uint32_t>(end);
}

void ProcessState::unmap(uint32_t addr, uint32_t len) {
  auto it = ranges_.find(addr);
  if (it == ranges_.end() || it->second != addr + len)
    fault(VmFault::MemoryFault, "unmap of unknown range " + hex32(addr));
  ranges_.erase(it);
  for (uint32_t p = addr / kPageBytes; p <= (addr + len - 1) / kPageBytes; ++p) pages_.erase(p);
}

uint64_t ProcessState::prng_draw() {
  auto r = xorshift64star(prng_state);
  prng_state = r.state;
  return r.output;
}

uint32_t ProcessState::alloc_heap(uint32_t len) {
  uint32_t size = page_round(len == 0 ? 1 : len);
  if (size > kHeapEnd - kHeapBase) fault(VmFault::HeapExhausted, "allocation larger than heap");
  const uint32_t span = (kHeapEnd - kHeapBase - size) / kPageBytes + 1;
  for (int attempt = 0; attempt < 4096; ++attempt) {
    uint32_t addr = kHeapBase + static_cast<uint32_t>(prng_draw() % span) * kPageBytes;
    if (!range_mapped(addr, 1)) {
      // Cheap overlap probe, then authoritative map_fixed.
      bool clear = true;
      for (uint32_t off = 0; off < size; off += kPageBytes)
        if (range_mapped(addr + off, 1)) {
          clear = false;
          break;
        }
      if (!clear) continue;
      map_fixed(addr, size);
      return addr;
    }
  }
  fault(VmFault::HeapExhausted, "no free heap range found");
}

bool ProcessState::block_on_stack(uint32_t block_id) const {
  for (const auto& fr : call_stack)
    if (fr.mobile && fr.block_id == block_id) return true;
  return false;
}

ProcessState load_image(const ProgramImage& img, uint64_t seed) {
  validate_image(img);
  ProcessState st;
  st.prng_state = seed ? seed : 0x9E3779B97F4A7C15ULL;

  uint32_t next_section = kSectionBase;
  for (const auto& s : img.sections) {
    if (s.mobile_owned) {
      st.section_table[s.sid] = SectionEntry{false, 0, 0};
      continue;
    }
    uint32_t size = page_round(static_cast<uint32_t>(std::max<size_t>(s.bytes.size(), 1)));
    if (next_section + size > kCodeBase)
      fault(VmFault::AddressSpaceExhausted, "static data exceeds section region");
    st.map_fixed(next_section, size);
    st.write_bytes(next_section, s.bytes);
    st.section_table[s.sid] = SectionEntry{true, next_section, static_cast<uint32_t>(s.bytes.size())};
    next_section += size;
  }

  uint32_t next_code = kCodeBase;
  std::vector<std::pair<uint32_t, std::vector<uint8_t>>> code_bytes;
  for (const auto& f : img.functions) {
    auto bytes = encode_function(f);
    FuncEntry fe;
    fe.param_count = f.param_count;
    // A stub record (no code) marks a mobile function; block id = fid.
    if (bytes.empty()) {
      fe.kind = FuncEntry::Kind::MobileStub;
      fe.block_id = f.fid;
      st.gmrt.entries[f.fid] = GmrtEntry{};
    } else {
      fe.kind = FuncEntry::Kind::StaticCode;
      fe.address = next_code;
      code_bytes.emplace_back(next_code, std::move(bytes));
      next_code += static_cast<uint32_t>(code_bytes.back().second.size());
      next_code = (next_code + 15) & ~15u;  // 16-byte align the next function
    }
    st.function_table[f.fid] = fe;
  }
  if (next_code > kHeapBase) fault(VmFault::AddressSpaceExhausted, "static code exceeds code region");
  if (next_code > kCodeBase) {
    st.map_fixed(kCodeBase, page_round(next_code - kCodeBase));
    for (const auto& [addr, bytes] : code_bytes) st.write_bytes(addr, bytes);
  }

  st.function_table[kIntrinsicIsrExec] = FuncEntry{FuncEntry::Kind::Intrinsic, 0, 0, 0};

  // Patch data relocations: the stored word becomes the target address.
  for (const auto& r : img.relocations) {
    if (r.kind != RelocationRecord::Kind::Data) continue;
    st.section_relocs[r.data.sid].emplace_back(r.data.byte_offset, r.data.target_sid);
    const auto& src = st.section_table.at(r.data.sid);
    const auto& dst = st.section_table.at(r.data.target_sid);
    if (!src.mapped) continue;  // mobile-owned source: patched at map time
    if (!dst.mapped)
      fault(VmFault::DownloadBeforeUse, "data reloc targets unmapped section");
    st.write32(src.address + r.data.byte_offset, dst.address);
  }

  st.entry_fid = img.entry_fid;
  return st;
}

uint32_t map_block(ProcessState& st, uint32_t block_id, const MobileBlockPayload& payload) {
  auto git = st.gmrt.entries.find(block_id);
  if (git == st.gmrt.entries.end()) fault(VmFault::UnknownFunction, "map of unknown block id");
  GmrtEntry& entry = git->second;
  if (entry.state == GmrtEntry::State::Loaded)
    fault(VmFault::BlockAlreadyLoaded, "block already loaded");
  if (payload.block_id != block_id) fault(VmFault::MalformedPayload, "payload block id mismatch");
  if (payload.code.empty() || payload.code.size() % 8 != 0)
    fault(VmFault::MalformedPayload, "payload code malformed");

  // A stale copy still executing keeps its memory until its frames return.
  if (entry.state == GmrtEntry::State::Stale) {
    auto mit = st.block_mappings.find(block_id);
    if (mit != st.block_mappings.end()) {
      ProcessState::PendingUnmap pu{block_id, mit->second.code_base, {}};
      pu.ranges.emplace_back(mit->second.code_base, page_round(mit->second.code_len));
      for (const auto& [sid, range] : mit->second.sections) {
        (void)sid;
        pu.ranges.emplace_back(range.first, page_round(std::max(range.second, 1u)));
      }
      st.pending_unmaps.push_back(std::move(pu));
      st.block_mappings.erase(mit);
    }
  }

  BlockMapping bm;
  bm.code_len = static_cast<uint32_t>(payload.code.size());
  bm.version_id = payload.version_id;
  bm.code_base = st.alloc_heap(bm.code_len);
  st.write_bytes(bm.code_base, payload.code);
  for (const auto& [sid, bytes] : payload.owned_sections) {
    auto sit = st.section_table.find(sid);
    if (sit == st.section_table.end()) fault(VmFault::MalformedPayload, "payload owns unknown sid");
    uint32_t addr = st.alloc_heap(static_cast<uint32_t>(std::max<size_t>(bytes.size(), 1)));
    st.write_bytes(addr, bytes);
    sit->second = SectionEntry{true, addr, static_cast<uint32_t>(bytes.size())};
    bm.sections.emplace_back(sid, std::make_pair(addr, static_cast<uint32_t>(bytes.size())));
  }
  // Patch data relocations sourced in the freshly mapped sections.
  for (const auto& [sid, range] : bm.sections) {
    auto rit = st.section_relocs.find(sid);
    if (rit == st.section_relocs.end()) continue;
    for (auto [off, target] : rit->second) {
      auto dit = st.section_table.find(target);
      if (dit == st.section_table.end() || !dit->second.mapped)
        fault(VmFault::DownloadBeforeUse, "mapped section points at unmapped section");
      if (off + 4 > std::max(range.second, 1u))
        fault(VmFault::MalformedPayload, "data reloc outside mapped section");
      st.write32(range.first + off, dit->second.address);
    }
  }
  st.block_mappings[block_id] = bm;
  entry = GmrtEntry{GmrtEntry::State::Loaded, bm.code_base, payload.version_id};
  return bm.code_base;
}

namespace {

void unmap_mapping(ProcessState& st, const BlockMapping& bm) {
  st.unmap(bm.code_base, page_round(bm.code_len));
  for (const auto& [sid, range] : bm.sections) {
    st.unmap(range.first, page_round(std::max(range.second, 1u)));
    st.section_table[sid] = SectionEntry{false, 0, 0};
  }
}

}  // namespace

FlushOutcome flush_block(ProcessState& st, uint32_t block_id) {
  auto git = st.gmrt.entries.find(block_id);
  if (git == st.gmrt.entries.end()) fault(VmFault::UnknownFunction, "flush of unknown block id");
  GmrtEntry& entry = git->second;
  switch (entry.state) {
    case GmrtEntry::State::NotLoaded:
      return FlushOutcome::Flushed;  // no-op
    case GmrtEntry::State::Stale:
      return FlushOutcome::Deferred;
    case GmrtEntry::State::Loaded:
      break;
  }
  if (st.block_on_stack(block_id)) {
    entry.state = GmrtEntry::State::Stale;
    return FlushOutcome::Deferred;
  }
  auto mit = st.block_mappings.find(block_id);
  if (mit != st.block_mappings.end()) {
    unmap_mapping(st, mit->second);
    st.block_mappings.erase(mit);
  }
  entry = GmrtEntry{};
  return FlushOutcome::Flushed;
}

namespace {

struct ExitSignal {
  uint32_t code;
};

class Interp {
 public:
  Interp(ProcessState& st, const RunOptions& opts) : st_(st), opts_(&opts) {}

  RunResult go(uint32_t entry_fid) {
    st_.input = opts_->input;
    st_.input_pos = 0;
    st_.instruction_budget = opts_->budget;
    enter_function(entry_fid, /*return_pc=*/0);
    st_.profile.per_fid[entry_fid].call_count++;
    try {
      loop();
    } catch (ExitSignal& e) {
      return finish(e.code);
    }
    // RET from the outermost frame exits with R0.
    return finish(st_.regs[0]);
  }

 private:
  ProcessState& st_;
  const RunOptions* opts_;
  uint32_t pc_ = 0;
  bool done_ = false;

  RunResult finish(uint32_t code) {
    RunResult r;
    r.output = st_.output;
    r.exit_code = code;
    st_.profile.total_instructions = st_.instructions_executed;
    r.profile = st_.profile;
    return r;
  }

  Frame& frame() { return st_.call_stack.back(); }

  void drain_mailbox() {
    if (opts_->mailbox) opts_->mailbox(st_);
  }

  void enter_function(uint32_t fid, uint32_t return_pc) {
    auto it = st_.function_table.find(fid);
    if (it == st_.function_table.end()) fault(VmFault::UnknownFunction, "CALL to unknown fid");
    const FuncEntry& fe = it->second;
    Frame fr;
    fr.fid = fid;
    fr.return_pc = return_pc;
    switch (fe.kind) {
      case FuncEntry::Kind::StaticCode:
        fr.entry_base = fe.address;
        pc_ = fe.address;
        break;
      case FuncEntry::Kind::MobileStub: {
        fr.mobile = true;
        fr.block_id = fe.block_id;
        auto& entry = st_.gmrt.entries[fe.block_id];
        if (entry.state != GmrtEntry::State::Loaded) {
          if (!opts_->resolver)
            fault(VmFault::MobileBlockUnavailable,
                  "mobile block " + std::to_string(fe.block_id) + " with null resolver");
          auto t0 = std::chrono::steady_clock::now();
          uint32_t base;
          try {
            base = opts_->resolver(st_, fe.block_id);
          } catch (VmError&) {
            throw;
          } catch (std::exception& e) {
            fault(VmFault::ResolverFailed, std::string("resolver: ") + e.what());
          }
          auto t1 = std::chrono::steady_clock::now();
          st_.resolver_wait_ms += static_cast<uint64_t>(
              std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count());
          if (entry.state != GmrtEntry::State::Loaded || entry.base != base)
            fault(VmFault::ResolverFailed, "resolver did not load the block");
        }
        fr.entry_base = entry.base;
        pc_ = entry.base;
        break;
      }
      case FuncEntry::Kind::Intrinsic:
        run_intrinsic(fid, fr, return_pc);
        return;
    }
    st_.call_stack.push_back(fr);
  }

  // ISR interpreter intrinsic: R4 = bytecode section address, R5 = opmap
  // section address (27-byte opcode permutation padded to 32, then u64 imm
  // mask). Pushes a frame whose fetches decode through the inverse map.
  void run_intrinsic(uint32_t fid, Frame fr, uint32_t return_pc) {
    if (fid != kIntrinsicIsrExec) fault(VmFault::UnknownFunction, "unknown intrinsic");
    uint32_t bytecode = st_.regs[4];
    uint32_t opmap = st_.regs[5];
    auto isr = std::make_shared<IsrDecode>();
    std::array<bool, kOpcodeCount> seen{};
    for (uint8_t op = 0; op < kOpcodeCount; ++op) {
      uint8_t mapped = st_.read8(opmap + op);
      if (mapped >= kOpcodeCount || seen[mapped])
        fault(VmFault::MalformedPayload, "opmap is not a permutation");
      seen[mapped] = true;
      isr->inverse_opmap[mapped] = op;
    }
    uint64_t mask = 0;
    for (int i = 0; i < 8; ++i)
      mask |= static_cast<uint64_t>(st_.read8(opmap + 32 + i)) << (8 * i);
    isr->imm_mask = static_cast<uint32_t>(mask);
    fr.mobile = false;
    fr.fid = st_.call_stack.empty() ? fid : frame().fid;  // attribute to the stub
    fr.return_pc = return_pc;
    fr.entry_base = bytecode;
    fr.isr = isr;
    st_.call_stack.push_back(fr);
    pc_ = bytecode;
  }

  Instruction fetch() {
    uint8_t raw[kInstrBytes];
    for (size_t i = 0; i < kInstrBytes; ++i) raw[i] = st_.read8(pc_ + static_cast<uint32_t>(i));
    const auto& isr = frame().isr;
    if (isr) {
      if (raw[0] >= kOpcodeCount) fault(VmFault::InvalidOpcode, "bad bytecode opcode");
      raw[0] = isr->inverse_opmap[raw[0]];
      uint32_t imm = static_cast<uint32_t>(raw[4]) | static_cast<uint32_t>(raw[5]) << 8 |
                     static_cast<uint32_t>(raw[6]) << 16 | static_cast<uint32_t>(raw[7]) << 24;
      imm ^= isr->imm_mask;
      for (int i = 0; i < 4; ++i) raw[4 + i] = static_cast<uint8_t>(imm >> (8 * i));
    }
    if (!op_valid(raw[0])) fault(VmFault::InvalidOpcode, "invalid opcode at " + hex32(pc_));
    try {
      return decode_instruction(std::span<const uint8_t>(raw, kInstrBytes));
    } catch (std::invalid_argument& e) {
      fault(VmFault::InvalidOpcode, e.what());
    }
  }

  void do_ret() {
    drain_mailbox();
    Frame leaving = frame();
    st_.call_stack.pop_back();
    // Deferred unmap: last stale frame of a block leaves the stack.
    if (leaving.mobile) {
      auto git = st_.gmrt.entries.find(leaving.block_id);
      bool still_used = false;
      for (const auto& f : st_.call_stack)
        if (f.mobile && f.block_id == leaving.block_id && f.entry_base == leaving.entry_base)
          still_used = true;
      if (!still_used) {
        if (git != st_.gmrt.entries.end() && git->second.state == GmrtEntry::State::Stale &&
            git->second.base == leaving.entry_base) {
          auto mit = st_.block_mappings.find(leaving.block_id);
          if (mit != st_.block_mappings.end() && mit->second.code_base == leaving.entry_base) {
            unmap_mapping(st_, mit->second);
            st_.block_mappings.erase(mit);
          }
          git->second = GmrtEntry{};
        }
        // Old copy superseded while stale; unmap its remembered ranges.
        for (auto it = st_.pending_unmaps.begin(); it != st_.pending_unmaps.end();) {
          if (it->block_id == leaving.block_id && it->base == leaving.entry_base) {
            for (auto [a, l] : it->ranges) st_.unmap(a, l);
            it = st_.pending_unmaps.erase(it);
          } else {
            ++it;
          }
        }
      }
    }
    if (st_.call_stack.empty()) {
      done_ = true;
      return;
    }
    pc_ = leaving.return_pc;
  }

  void loop() {
    using enum Op;
    auto& regs = st_.regs;
    while (!done_) {
      if (st_.instructions_executed >= st_.instruction_budget)
        fault(VmFault::BudgetExhausted, "instruction budget exhausted");
      Instruction in = fetch();
      st_.instructions_executed++;
      st_.profile.per_fid[frame().fid].instruction_count++;
      uint32_t next = pc_ + kInstrBytes;
      switch (in.op) {
        case Halt:
          throw ExitSignal{0};
        case LoadI: regs[in.ra] = in.imm; break;
        case Mov: regs[in.ra] = regs[in.rb]; break;
        case Add: regs[in.ra] = regs[in.rb] + regs[in.rc]; break;
        case Sub: regs[in.ra] = regs[in.rb] - regs[in.rc]; break;
        case Mul: regs[in.ra] = regs[in.rb] * regs[in.rc]; break;
        case And: regs[in.ra] = regs[in.rb] & regs[in.rc]; break;
        case Or: regs[in.ra] = regs[in.rb] | regs[in.rc]; break;
        case Xor: regs[in.ra] = regs[in.rb] ^ regs[in.rc]; break;
        case AddI: regs[in.ra] = regs[in.rb] + in.imm; break;
        case SubI: regs[in.ra] = regs[in.rb] - in.imm; break;
        case AndI: regs[in.ra] = regs[in.rb] & in.imm; break;
        case XorI: regs[in.ra] = regs[in.rb] ^ in.imm; break;
        case ShlI: regs[in.ra] = regs[in.rb] << (in.imm & 31); break;
        case ShrI: regs[in.ra] = regs[in.rb] >> (in.imm & 31); break;
        case Load: regs[in.ra] = st_.read32(regs[in.rb] + in.imm); break;
        case Store: st_.write32(regs[in.rb] + in.imm, regs[in.ra]); break;
        case LoadB: regs[in.ra] = st_.read8(regs[in.rb] + in.imm); break;
        case StoreB: st_.write8(regs[in.rb] + in.imm, static_cast<uint8_t>(regs[in.ra])); break;
        case Lea: {
          auto it = st_.section_table.find(in.imm);
          if (it == st_.section_table.end())
            fault(VmFault::MemoryFault, "LEA of unknown section " + std::to_string(in.imm));
          if (!it->second.mapped)
            fault(VmFault::DownloadBeforeUse,
                  "LEA of unmapped mobile-owned section " + std::to_string(in.imm));
          regs[in.ra] = it->second.address;
          break;
        }
        case Jmp: next = branch_target(pc_, in.simm()); break;
        case Jz:
          if (regs[in.ra] == 0) next = branch_target(pc_, in.simm());
          break;
        case Jnz:
          if (regs[in.ra] != 0) next = branch_target(pc_, in.simm());
          break;
        case Call:
        case CallR: {
          uint32_t fid = in.op == Call ? in.imm : regs[in.ra];
          drain_mailbox();
          st_.profile.per_fid[fid].call_count++;
          enter_function(fid, next);
          continue;  // pc_ set by enter_function
        }
        case Sys:
          switch (in.imm) {
            case kSysEmit:
              st_.output.push_back(static_cast<uint8_t>(regs[0]));
              break;
            case kSysClock:
              regs[0] = static_cast<uint32_t>(st_.clock_ms());
              break;
            case kSysRead:
              regs[0] = st_.input_pos < st_.input.size() ? st_.input[st_.input_pos++] : 0xFFFFFFFFu;
              break;
            case kSysExit:
              throw ExitSignal{regs[0]};
            default:
              fault(VmFault::InvalidSyscall, "SYS " + std::to_string(in.imm));
          }
          break;
        case Ret:
          do_ret();
          continue;  // pc_ set by do_ret
      }
      pc_ = next;
    }
  }
};

}  // namespace

RunResult run(ProcessState& st, const RunOptions& opts) {
  Interp interp(st, opts);
  return interp.go(st.entry_fid);
}

}  // namespace rvm
