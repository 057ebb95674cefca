// Program image model: functions, data sections, relocation records and the
// layout metadata used by semantic diversification. Includes the RVMI binary
// container (load/save) and whole-image validation.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rvm/isa.hpp"

namespace rvm {

inline constexpr uint32_t kMaxSectionBytes = 1u << 20;

// Function ids at or above this value are VM host intrinsics; they may be
// CALLed without a FunctionDef existing in the image.
inline constexpr uint32_t kIntrinsicFidBase = 0xFFFF0000u;
inline constexpr uint32_t kIntrinsicIsrExec = 0xFFFF0001u;

struct FunctionDef {
  uint32_t fid = 0;
  std::string name;
  uint8_t param_count = 0;  // <= 4, args in R0..R3
  std::vector<Instruction> code;

  bool operator==(const FunctionDef&) const = default;
};

struct DataSection {
  uint32_t sid = 0;
  std::string name;
  std::vector<uint8_t> bytes;
  bool exported = false;
  bool writable = false;
  // Set on extracted static images: the section's bytes travel inside a
  // mobile block; the loader keeps its section-table entry unmapped.
  bool mobile_owned = false;

  bool operator==(const DataSection&) const = default;
};

// LEA at (fid, instr_index) produces the address of section sid.
struct CodeReloc {
  uint32_t fid = 0;
  uint32_t instr_index = 0;
  uint32_t sid = 0;
  bool operator==(const CodeReloc&) const = default;
};

// The 4-byte word at byte_offset inside section sid holds the address of
// target_sid (patched by the loader).
struct DataReloc {
  uint32_t sid = 0;
  uint32_t byte_offset = 0;
  uint32_t target_sid = 0;
  bool operator==(const DataReloc&) const = default;
};

struct RelocationRecord {
  enum class Kind : uint8_t { Code = 0, Data = 1 };
  Kind kind = Kind::Code;
  CodeReloc code;
  DataReloc data;

  static RelocationRecord of(CodeReloc c) { return {Kind::Code, c, {}}; }
  static RelocationRecord of(DataReloc d) { return {Kind::Data, {}, d}; }
  bool operator==(const RelocationRecord&) const = default;
};

// Field-offset table for one logical record type ("struct"). Accesses to
// fields are LOAD/STORE instructions whose immediates the semantic
// diversifier rewrites when it permutes the layout.
struct LayoutTable {
  uint32_t layout_id = 0;
  std::vector<uint32_t> field_offsets;  // byte offsets, index = field
  bool operator==(const LayoutTable&) const = default;
};

// (fid, instr_index) accesses field field_index of layout layout_id.
struct LayoutAccess {
  uint32_t fid = 0;
  uint32_t instr_index = 0;
  uint32_t layout_id = 0;
  uint32_t field_index = 0;
  bool operator==(const LayoutAccess&) const = default;
};

struct ProgramImage {
  std::vector<FunctionDef> functions;
  std::vector<DataSection> sections;
  std::vector<RelocationRecord> relocations;
  uint32_t entry_fid = 0;
  std::vector<LayoutTable> layouts;
  std::vector<LayoutAccess> layout_accesses;

  const FunctionDef* find_function(uint32_t fid) const;
  FunctionDef* find_function(uint32_t fid);
  const DataSection* find_section(uint32_t sid) const;
  DataSection* find_section(uint32_t sid);
  uint32_t max_fid() const;
  uint32_t max_sid() const;

  bool operator==(const ProgramImage&) const = default;
};

// Canonical byte encoding of one function's body (8 bytes per instruction,
// in order). This is what diffing, payload containers and attestation hash.
std::vector<uint8_t> encode_function(const FunctionDef& f);
std::vector<Instruction> decode_code(std::span<const uint8_t> bytes);

// Checks every structural invariant: id uniqueness, reference existence,
// LEA<->CodeReloc bijection, DataReloc alignment/bounds, terminator rule.
// Throws std::invalid_argument describing the first violation.
void validate_image(const ProgramImage& img);

// Drops all code relocations and regenerates them by scanning for LEA
// instructions (the LEA immediate is the sid). Used after code transforms.
void regenerate_code_relocs(ProgramImage& img);

// RVMI container.
std::vector<uint8_t> image_save(const ProgramImage& img);
ProgramImage image_load(std::span<const uint8_t> bytes);
void image_save_file(const ProgramImage& img, const std::string& path);
ProgramImage image_load_file(const std::string& path);

}  // namespace rvm
