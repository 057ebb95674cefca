// Small assembler for constructing program images in tests, the sample
// programs and the engines: label-based branches, automatic relocation
// records for LEA, layout-table bookkeeping.
#pragma once

#include <deque>
#include <string>
#include <unordered_map>
#include <vector>

#include "rvm/image.hpp"

namespace rvm {

class FunctionBuilder {
 public:
  FunctionBuilder(uint32_t fid, std::string name, uint8_t param_count)
      : fid_(fid), name_(std::move(name)), params_(param_count) {}

  uint32_t fid() const { return fid_; }
  size_t size() const { return code_.size(); }

  FunctionBuilder& emit(Instruction in);
  // Branch to a label resolved at finish time.
  FunctionBuilder& jmp(const std::string& label);
  FunctionBuilder& jz(uint8_t r, const std::string& label);
  FunctionBuilder& jnz(uint8_t r, const std::string& label);
  FunctionBuilder& label(const std::string& name);
  // LEA that records a code relocation against the enclosing image.
  FunctionBuilder& lea(uint8_t rd, uint32_t sid);
  // Memory access registered against a layout table field.
  FunctionBuilder& field_load(uint8_t rd, uint8_t base, uint32_t layout_id, uint32_t field);
  FunctionBuilder& field_store(uint8_t rs, uint8_t base, uint32_t layout_id, uint32_t field);

  friend class ImageBuilder;

 private:
  struct Fixup {
    size_t index;
    std::string label;
  };
  struct FieldRef {
    size_t index;
    uint32_t layout_id;
    uint32_t field_index;
  };
  uint32_t fid_;
  std::string name_;
  uint8_t params_;
  std::vector<Instruction> code_;
  std::vector<Fixup> fixups_;
  std::unordered_map<std::string, size_t> labels_;
  std::vector<size_t> lea_sites_;
  std::vector<FieldRef> field_refs_;
};

class ImageBuilder {
 public:
  FunctionBuilder& function(uint32_t fid, std::string name, uint8_t param_count);
  ImageBuilder& section(uint32_t sid, std::string name, std::vector<uint8_t> bytes,
                        bool exported = false, bool writable = false);
  ImageBuilder& data_reloc(uint32_t sid, uint32_t byte_offset, uint32_t target_sid);
  ImageBuilder& layout(uint32_t layout_id, std::vector<uint32_t> field_offsets);
  ImageBuilder& entry(uint32_t fid);

  // Resolves labels, materializes relocation records and layout accesses,
  // validates and returns the image.
  ProgramImage build();

 private:
  std::deque<FunctionBuilder> functions_;  // deque: references stay valid
  ProgramImage img_;
};

}  // namespace rvm
