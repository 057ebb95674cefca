// Instruction-set randomization: re-encodes a function into bytecode under
// a PRNG opcode permutation and immediate mask. The stub LEAs the bytecode
// and opcode-map sections and calls the host interpreter intrinsic, so both
// sections travel as mobile data attached to the mobile stub.
#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "rvm/image.hpp"

namespace rvm {

struct IsrBundle {
  FunctionDef stub;                 // LEA R4 bytecode; LEA R5 opmap; CALL intrinsic; RET
  std::vector<uint8_t> bytecode;    // permuted opcodes, masked immediates
  std::vector<uint8_t> opmap;       // 32-byte permutation table plus u64 mask
  uint32_t bytecode_sid = 0;
  uint32_t opmap_sid = 0;
  std::array<uint8_t, kOpcodeCount> pi{};
  uint32_t mask = 0;
};

IsrBundle isr_translate(const FunctionDef& f, uint64_t seed, uint32_t bytecode_sid,
                        uint32_t opmap_sid);

// Deterministic variant with explicit permutation and mask (identity/zero
// reproduces the plain encoding).
IsrBundle isr_translate_with(const FunctionDef& f, const std::array<uint8_t, kOpcodeCount>& pi,
                             uint32_t mask, uint32_t bytecode_sid, uint32_t opmap_sid);

// Replaces fid's body with the stub and adds the two bundle sections to the
// image. Annotating the stub mobile with data mobility makes both sections
// travel with it.
struct IsrApplied {
  ProgramImage img;
  uint32_t bytecode_sid = 0;
  uint32_t opmap_sid = 0;
};
IsrApplied isr_apply(const ProgramImage& img, uint32_t fid, uint64_t seed);

}  // namespace rvm
