// Deterministic interpreter with mobile-block stub interception.
//
// Address space layout: static data sections are mapped 4-KiB aligned from
// 0x0001_0000 in image order, static code 16-byte aligned from 0x0100_0000,
// mobile blocks at PRNG-chosen 4-KiB-aligned heap addresses >= 0x4000_0000,
// the stack is a fixed 1-MiB region topping out at 0x7FFF_FFF0.
//
// A CALL to a function marked mobile consults the GMRT: Loaded enters the
// block directly, NotLoaded (or Stale) invokes the block resolver, which is
// expected to download, verify and map the block, then return its base.
#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "rvm/image.hpp"
#include "rvm/payload.hpp"

namespace rvm {

inline constexpr uint32_t kSectionBase = 0x00010000u;
inline constexpr uint32_t kCodeBase = 0x01000000u;
inline constexpr uint32_t kHeapBase = 0x40000000u;
inline constexpr uint32_t kHeapEnd = 0x70000000u;
inline constexpr uint32_t kStackLimit = 0x7FF00000u;
inline constexpr uint32_t kStackTop = 0x7FFFFFF0u;
inline constexpr uint32_t kPageBytes = 4096;
inline constexpr uint64_t kDefaultBudget = 1000000000ull;
// Virtual clock: one millisecond per this many interpreted instructions.
inline constexpr uint64_t kInstrPerMs = 10000;

enum class VmFault {
  MobileBlockUnavailable,
  DownloadBeforeUse,
  MemoryFault,
  InvalidOpcode,
  InvalidSyscall,
  BudgetExhausted,
  UnknownFunction,
  HeapExhausted,
  BlockAlreadyLoaded,
  MalformedPayload,
  StackError,
  ResolverFailed,
  AddressSpaceExhausted,
};

const char* fault_name(VmFault f);

class VmError : public std::runtime_error {
 public:
  VmError(VmFault fault, const std::string& what)
      : std::runtime_error(what), fault_(fault) {}
  VmFault fault() const { return fault_; }

 private:
  VmFault fault_;
};

struct GmrtEntry {
  enum class State : uint8_t { NotLoaded, Loaded, Stale };
  State state = State::NotLoaded;
  uint32_t base = 0;
  uint64_t version_id = 0;
};

struct Gmrt {
  std::map<uint32_t, GmrtEntry> entries;  // block id -> entry
};

struct FuncEntry {
  enum class Kind : uint8_t { StaticCode, MobileStub, Intrinsic };
  Kind kind = Kind::StaticCode;
  uint32_t address = 0;   // StaticCode
  uint32_t block_id = 0;  // MobileStub
  uint8_t param_count = 0;
};

struct SectionEntry {
  bool mapped = false;
  uint32_t address = 0;
  uint32_t length = 0;
};

struct ProfileReport {
  struct PerFid {
    uint64_t call_count = 0;
    uint64_t instruction_count = 0;
  };
  std::map<uint32_t, PerFid> per_fid;
  uint64_t total_instructions = 0;
};

// ISR execution context attached to a call frame: fetched instructions are
// decoded through the inverse opcode permutation and the immediate mask.
struct IsrDecode {
  std::array<uint8_t, kOpcodeCount> inverse_opmap{};
  uint32_t imm_mask = 0;
};

struct Frame {
  uint32_t fid = 0;           // function the frame executes (stub fid for ISR)
  uint32_t return_pc = 0;     // byte address to resume after RET
  uint32_t entry_base = 0;    // code base the frame entered (mobile blocks)
  uint32_t block_id = 0;      // nonzero when executing a mobile block
  bool mobile = false;
  std::shared_ptr<IsrDecode> isr;  // set while interpreting ISR bytecode
};

// Record of one mapped mobile block so flushes can unmap exactly what the
// map operation created.
struct BlockMapping {
  uint32_t code_base = 0;
  uint32_t code_len = 0;
  uint64_t version_id = 0;
  std::vector<std::pair<uint32_t, std::pair<uint32_t, uint32_t>>> sections;  // sid -> (base,len)
};

enum class FlushOutcome { Flushed, Deferred };

class ProcessState;

// Resolver contract: download/verify/map the block (map_block) and return
// the mapped code base. Errors are reported by throwing.
using BlockResolver = std::function<uint32_t(ProcessState&, uint32_t block_id)>;

// Drained before every CALL and RET; the client uses it to apply flush
// commands and answer attestation challenges at instruction boundaries.
using MailboxHook = std::function<void(ProcessState&)>;

struct RunResult {
  std::vector<uint8_t> output;
  uint32_t exit_code = 0;
  ProfileReport profile;
};

class ProcessState {
 public:
  ProcessState();

  std::array<uint32_t, kRegCount> regs{};  // R0..R7, SP

  // --- memory ---
  uint8_t read8(uint32_t addr) const;
  uint32_t read32(uint32_t addr) const;  // enforces 4-byte alignment
  void write8(uint32_t addr, uint8_t v);
  void write32(uint32_t addr, uint32_t v);
  std::vector<uint8_t> read_bytes(uint32_t addr, uint32_t len) const;
  void write_bytes(uint32_t addr, std::span<const uint8_t> bytes);
  bool range_mapped(uint32_t addr, uint32_t len) const;

  // --- tables ---
  std::unordered_map<uint32_t, SectionEntry> section_table;
  std::unordered_map<uint32_t, FuncEntry> function_table;
  Gmrt gmrt;
  std::unordered_map<uint32_t, BlockMapping> block_mappings;
  // Data relocations by source sid, patched at load time for static
  // sections and at map time for mobile-owned ones.
  std::unordered_map<uint32_t, std::vector<std::pair<uint32_t, uint32_t>>> section_relocs;

  // --- execution bookkeeping ---
  std::vector<Frame> call_stack;
  uint64_t instruction_budget = kDefaultBudget;
  uint64_t instructions_executed = 0;
  uint64_t prng_state = 1;
  uint64_t resolver_wait_ms = 0;
  ProfileReport profile;
  std::vector<uint8_t> output;
  std::vector<uint8_t> input;
  size_t input_pos = 0;

  uint32_t entry_fid = 0;

  uint64_t clock_ms() const { return instructions_executed / kInstrPerMs + resolver_wait_ms; }

  // True when any frame on the call stack runs inside the given block.
  bool block_on_stack(uint32_t block_id) const;

  uint64_t prng_draw();

  // Heap allocation at a PRNG-chosen 4-KiB-aligned address (redrawn on
  // collision); registers the range as mapped.
  uint32_t alloc_heap(uint32_t len);

  void map_fixed(uint32_t addr, uint32_t len);
  void unmap(uint32_t addr, uint32_t len);

  // Deferred unmaps for stale block copies still on the call stack.
  struct PendingUnmap {
    uint32_t block_id;
    uint32_t base;
    std::vector<std::pair<uint32_t, uint32_t>> ranges;
  };
  std::vector<PendingUnmap> pending_unmaps;

 private:
  struct Page {
    std::array<uint8_t, kPageBytes> data{};
  };
  mutable std::unordered_map<uint32_t, std::unique_ptr<Page>> pages_;
  std::map<uint32_t, uint32_t> ranges_;  // mapped intervals: start -> end

  uint8_t* page_slot(uint32_t addr) const;
  void check_mapped(uint32_t addr, uint32_t len) const;
};

// Builds the process: maps static sections and code, installs stubs for
// mobile functions (code_len 0 in the image), seeds the PRNG.
ProcessState load_image(const ProgramImage& img, uint64_t seed);

// Maps a payload's code and owned sections; entry must be NotLoaded (or
// Stale, in which case the old copy is kept until its frames return).
uint32_t map_block(ProcessState& st, uint32_t block_id, const MobileBlockPayload& payload);

FlushOutcome flush_block(ProcessState& st, uint32_t block_id);

struct RunOptions {
  BlockResolver resolver;   // may be empty: mobile calls fail
  MailboxHook mailbox;      // optional, drained before CALL/RET
  std::vector<uint8_t> input;
  uint64_t budget = kDefaultBudget;
};

RunResult run(ProcessState& st, const RunOptions& opts);

}  // namespace rvm
