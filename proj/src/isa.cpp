#include "rvm/isa.hpp"

namespace rvm {

const char* op_name(Op op) {
  switch (op) {
    case Op::Halt: return "HALT";
    case Op::LoadI: return "LOADI";
    case Op::Mov: return "MOV";
    case Op::Add: return "ADD";
    case Op::Sub: return "SUB";
    case Op::Mul: return "MUL";
    case Op::And: return "AND";
    case Op::Or: return "OR";
    case Op::Xor: return "XOR";
    case Op::AddI: return "ADDI";
    case Op::SubI: return "SUBI";
    case Op::AndI: return "ANDI";
    case Op::XorI: return "XORI";
    case Op::ShlI: return "SHLI";
    case Op::ShrI: return "SHRI";
    case Op::Load: return "LOAD";
    case Op::Store: return "STORE";
    case Op::LoadB: return "LOADB";
    case Op::StoreB: return "STOREB";
    case Op::Lea: return "LEA";
    case Op::Jmp: return "JMP";
    case Op::Jz: return "JZ";
    case Op::Jnz: return "JNZ";
    case Op::Call: return "CALL";
    case Op::CallR: return "CALLR";
    case Op::Sys: return "SYS";
    case Op::Ret: return "RET";
  }
  return "?";
}

bool op_valid(uint8_t code) { return code < kOpcodeCount; }

RegUse reg_use(const Instruction& in) {
  RegUse u{false, {kRegCount, kRegCount, kRegCount}};
  auto reads = [&u](uint8_t a, uint8_t b = kRegCount, uint8_t c = kRegCount) {
    u.reads[0] = a;
    u.reads[1] = b;
    u.reads[2] = c;
  };
  switch (in.op) {
    case Op::Halt:
    case Op::Jmp:
    case Op::Call:
    case Op::Ret:
      break;
    case Op::Sys:
      // emit/exit read R0; clock/read write R0 (ra is 0 in encoded form)
      if (in.imm == kSysEmit || in.imm == kSysExit) reads(0);
      else u.def_ra = true;
      break;
    case Op::LoadI:
    case Op::Lea:
      u.def_ra = true;
      break;
    case Op::Mov:
      u.def_ra = true;
      reads(in.rb);
      break;
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::And:
    case Op::Or:
    case Op::Xor:
      u.def_ra = true;
      reads(in.rb, in.rc);
      break;
    case Op::AddI:
    case Op::SubI:
    case Op::AndI:
    case Op::XorI:
    case Op::ShlI:
    case Op::ShrI:
      u.def_ra = true;
      reads(in.rb);
      break;
    case Op::Load:
    case Op::LoadB:
      u.def_ra = true;
      reads(in.rb);
      break;
    case Op::Store:
    case Op::StoreB:
      reads(in.ra, in.rb);
      break;
    case Op::Jz:
    case Op::Jnz:
    case Op::CallR:
      reads(in.ra);
      break;
  }
  return u;
}

void encode_instruction(const Instruction& in, std::vector<uint8_t>& out) {
  uint8_t code = static_cast<uint8_t>(in.op);
  if (!op_valid(code)) throw std::invalid_argument("encode: bad opcode");
  if (in.ra >= kRegCount || in.rb >= kRegCount || in.rc >= kRegCount)
    throw std::invalid_argument("encode: register index out of range");
  out.push_back(code);
  out.push_back(in.ra);
  out.push_back(in.rb);
  out.push_back(in.rc);
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<uint8_t>(in.imm >> (8 * i)));
}

Instruction decode_instruction(std::span<const uint8_t> bytes) {
  if (bytes.size() < kInstrBytes) throw std::invalid_argument("decode: truncated instruction");
  if (!op_valid(bytes[0])) throw std::invalid_argument("decode: bad opcode");
  Instruction in;
  in.op = static_cast<Op>(bytes[0]);
  in.ra = bytes[1];
  in.rb = bytes[2];
  in.rc = bytes[3];
  if (in.ra >= kRegCount || in.rb >= kRegCount || in.rc >= kRegCount)
    throw std::invalid_argument("decode: register index out of range");
  in.imm = static_cast<uint32_t>(bytes[4]) | static_cast<uint32_t>(bytes[5]) << 8 |
           static_cast<uint32_t>(bytes[6]) << 16 | static_cast<uint32_t>(bytes[7]) << 24;
  return in;
}

}  // namespace rvm
