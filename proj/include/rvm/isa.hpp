// Instruction set of the toy register machine: 27 opcodes, nine registers
// (R0..R7 plus SP), fixed 8-byte encoding [opcode][ra][rb][rc][imm32 LE].
//
// Calling convention: arguments in R0..R3 (at most four), result in R0,
// R4/R5 caller-saved scratch, R6/R7 callee-saved, SP grows down and stays
// 4-byte aligned. Jump offsets are signed and counted in instructions,
// relative to the instruction after the jump.
#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rvm {

enum class Op : uint8_t {
  Halt = 0x00,   // stop, exit code 0
  LoadI = 0x01,  // ra := imm
  Mov = 0x02,    // ra := rb
  Add = 0x03,    // ra := rb + rc
  Sub = 0x04,    // ra := rb - rc
  Mul = 0x05,    // ra := rb * rc
  And = 0x06,    // ra := rb & rc
  Or = 0x07,     // ra := rb | rc
  Xor = 0x08,    // ra := rb ^ rc
  AddI = 0x09,   // ra := rb + imm
  SubI = 0x0A,   // ra := rb - imm
  AndI = 0x0B,   // ra := rb & imm
  XorI = 0x0C,   // ra := rb ^ imm
  ShlI = 0x0D,   // ra := rb << (imm & 31)
  ShrI = 0x0E,   // ra := rb >> (imm & 31), logical
  Load = 0x0F,   // ra := mem32[rb + imm]
  Store = 0x10,  // mem32[rb + imm] := ra
  LoadB = 0x11,  // ra := zx(mem8[rb + imm])
  StoreB = 0x12, // mem8[rb + imm] := ra & 0xFF
  Lea = 0x13,    // ra := address of section imm
  Jmp = 0x14,    // pc += 1 + (int32)imm, in instruction units
  Jz = 0x15,     // if ra == 0 jump
  Jnz = 0x16,    // if ra != 0 jump
  Call = 0x17,   // call function imm
  CallR = 0x18,  // call function id held in ra
  Sys = 0x19,    // imm=0 emit R0 byte, 1 R0:=clock ms, 2 R0:=input byte, 3 exit R0
  Ret = 0x1A,
};

inline constexpr uint8_t kOpcodeCount = 0x1B;
inline constexpr uint8_t kRegCount = 9;  // R0..R7, SP
inline constexpr uint8_t kSp = 8;
inline constexpr size_t kInstrBytes = 8;

// System call numbers (the Sys immediate).
inline constexpr uint32_t kSysEmit = 0;
inline constexpr uint32_t kSysClock = 1;
inline constexpr uint32_t kSysRead = 2;
inline constexpr uint32_t kSysExit = 3;

struct Instruction {
  Op op = Op::Halt;
  uint8_t ra = 0;
  uint8_t rb = 0;
  uint8_t rc = 0;
  uint32_t imm = 0;

  bool operator==(const Instruction&) const = default;

  int32_t simm() const { return static_cast<int32_t>(imm); }
};

const char* op_name(Op op);
bool op_valid(uint8_t code);

// True when the instruction reads/writes its register fields; used by the
// encoder to validate register indices and by liveness scans.
struct RegUse {
  bool def_ra;            // ra is written
  uint8_t reads[3];       // register indices read (kRegCount terminated)
};
RegUse reg_use(const Instruction& in);

void encode_instruction(const Instruction& in, std::vector<uint8_t>& out);
Instruction decode_instruction(std::span<const uint8_t> bytes);  // needs 8 bytes

// Short constructors so program-construction code reads like an assembler.
// (builder.hpp layers labels on top of these.)
namespace asmops {
inline Instruction halt() { return {Op::Halt, 0, 0, 0, 0}; }
inline Instruction loadi(uint8_t rd, uint32_t v) { return {Op::LoadI, rd, 0, 0, v}; }
inline Instruction mov(uint8_t rd, uint8_t rs) { return {Op::Mov, rd, rs, 0, 0}; }
inline Instruction add(uint8_t rd, uint8_t a, uint8_t b) { return {Op::Add, rd, a, b, 0}; }
inline Instruction sub(uint8_t rd, uint8_t a, uint8_t b) { return {Op::Sub, rd, a, b, 0}; }
inline Instruction mul(uint8_t rd, uint8_t a, uint8_t b) { return {Op::Mul, rd, a, b, 0}; }
inline Instruction and_(uint8_t rd, uint8_t a, uint8_t b) { return {Op::And, rd, a, b, 0}; }
inline Instruction or_(uint8_t rd, uint8_t a, uint8_t b) { return {Op::Or, rd, a, b, 0}; }
inline Instruction xor_(uint8_t rd, uint8_t a, uint8_t b) { return {Op::Xor, rd, a, b, 0}; }
inline Instruction addi(uint8_t rd, uint8_t a, uint32_t v) { return {Op::AddI, rd, a, 0, v}; }
inline Instruction subi(uint8_t rd, uint8_t a, uint32_t v) { return {Op::SubI, rd, a, 0, v}; }
inline Instruction andi(uint8_t rd, uint8_t a, uint32_t v) { return {Op::AndI, rd, a, 0, v}; }
inline Instruction xori(uint8_t rd, uint8_t a, uint32_t v) { return {Op::XorI, rd, a, 0, v}; }
inline Instruction shli(uint8_t rd, uint8_t a, uint32_t v) { return {Op::ShlI, rd, a, 0, v}; }
inline Instruction shri(uint8_t rd, uint8_t a, uint32_t v) { return {Op::ShrI, rd, a, 0, v}; }
inline Instruction load(uint8_t rd, uint8_t base, uint32_t off) { return {Op::Load, rd, base, 0, off}; }
inline Instruction store(uint8_t rs, uint8_t base, uint32_t off) { return {Op::Store, rs, base, 0, off}; }
inline Instruction loadb(uint8_t rd, uint8_t base, uint32_t off) { return {Op::LoadB, rd, base, 0, off}; }
inline Instruction storeb(uint8_t rs, uint8_t base, uint32_t off) { return {Op::StoreB, rs, base, 0, off}; }
inline Instruction lea(uint8_t rd, uint32_t sid) { return {Op::Lea, rd, 0, 0, sid}; }
inline Instruction jmp(int32_t off) { return {Op::Jmp, 0, 0, 0, static_cast<uint32_t>(off)}; }
inline Instruction jz(uint8_t r, int32_t off) { return {Op::Jz, r, 0, 0, static_cast<uint32_t>(off)}; }
inline Instruction jnz(uint8_t r, int32_t off) { return {Op::Jnz, r, 0, 0, static_cast<uint32_t>(off)}; }
inline Instruction call(uint32_t fid) { return {Op::Call, 0, 0, 0, fid}; }
inline Instruction callr(uint8_t r) { return {Op::CallR, r, 0, 0, 0}; }
inline Instruction sys(uint32_t n) { return {Op::Sys, 0, 0, 0, n}; }
inline Instruction ret() { return {Op::Ret, 0, 0, 0, 0}; }
}  // namespace asmops

}  // namespace rvm
