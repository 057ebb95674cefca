#include "rvm/builder.hpp"

#include <stdexcept>

#include "rvm/isa.hpp"

namespace rvm {

using namespace asmops;

FunctionBuilder& FunctionBuilder::emit(Instruction in) {
  code_.push_back(in);
  return *this;
}

FunctionBuilder& FunctionBuilder::jmp(const std::string& l) {
  fixups_.push_back({code_.size(), l});
  code_.push_back(asmops::jmp(0));
  return *this;
}

FunctionBuilder& FunctionBuilder::jz(uint8_t r, const std::string& l) {
  fixups_.push_back({code_.size(), l});
  code_.push_back(asmops::jz(r, 0));
  return *this;
}

FunctionBuilder& FunctionBuilder::jnz(uint8_t r, const std::string& l) {
  fixups_.push_back({code_.size(), l});
  code_.push_back(asmops::jnz(r, 0));
  return *this;
}

FunctionBuilder& FunctionBuilder::label(const std::string& name) {
  if (!labels_.emplace(name, code_.size()).second)
    throw std::invalid_argument("duplicate label " + name);
  return *this;
}

FunctionBuilder& FunctionBuilder::lea(uint8_t rd, uint32_t sid) {
  lea_sites_.push_back(code_.size());
  code_.push_back(asmops::lea(rd, sid));
  return *this;
}

FunctionBuilder& FunctionBuilder::field_load(uint8_t rd, uint8_t base, uint32_t layout_id,
                                             uint32_t field) {
  field_refs_.push_back({code_.size(), layout_id, field});
  code_.push_back(asmops::load(rd, base, 0));
  return *this;
}

FunctionBuilder& FunctionBuilder::field_store(uint8_t rs, uint8_t base, uint32_t layout_id,
                                              uint32_t field) {
  field_refs_.push_back({code_.size(), layout_id, field});
  code_.push_back(asmops::store(rs, base, 0));
  return *this;
}

FunctionBuilder& ImageBuilder::function(uint32_t fid, std::string name, uint8_t param_count) {
  functions_.emplace_back(fid, std::move(name), param_count);
  return functions_.back();
}

ImageBuilder& ImageBuilder::section(uint32_t sid, std::string name, std::vector<uint8_t> bytes,
                                    bool exported, bool writable) {
  DataSection s;
  s.sid = sid;
  s.name = std::move(name);
  s.bytes = std::move(bytes);
  s.exported = exported;
  s.writable = writable;
  img_.sections.push_back(std::move(s));
  return *this;
}

ImageBuilder& ImageBuilder::data_reloc(uint32_t sid, uint32_t off, uint32_t target) {
  img_.relocations.push_back(RelocationRecord::of(DataReloc{sid, off, target}));
  return *this;
}

ImageBuilder& ImageBuilder::layout(uint32_t layout_id, std::vector<uint32_t> offsets) {
  img_.layouts.push_back({layout_id, std::move(offsets)});
  return *this;
}

ImageBuilder& ImageBuilder::entry(uint32_t fid) {
  img_.entry_fid = fid;
  return *this;
}

ProgramImage ImageBuilder::build() {
  for (auto& fb : functions_) {
    for (const auto& fx : fb.fixups_) {
      auto it = fb.labels_.find(fx.label);
      if (it == fb.labels_.end())
        throw std::invalid_argument("unresolved label " + fx.label + " in " + fb.name_);
      int64_t off = static_cast<int64_t>(it->second) - (static_cast<int64_t>(fx.index) + 1);
      fb.code_[fx.index].imm = static_cast<uint32_t>(static_cast<int32_t>(off));
    }
    FunctionDef f;
    f.fid = fb.fid_;
    f.name = fb.name_;
    f.param_count = fb.params_;
    f.code = fb.code_;
    img_.functions.push_back(std::move(f));
    for (size_t site : fb.lea_sites_) {
      img_.relocations.push_back(RelocationRecord::of(
          CodeReloc{fb.fid_, static_cast<uint32_t>(site), fb.code_[site].imm}));
    }
    for (const auto& fr : fb.field_refs_) {
      const LayoutTable* lt = nullptr;
      for (const auto& l : img_.layouts)
        if (l.layout_id == fr.layout_id) lt = &l;
      if (!lt || fr.field_index >= lt->field_offsets.size())
        throw std::invalid_argument("bad layout reference in " + fb.name_);
      img_.functions.back().code[fr.index].imm = lt->field_offsets[fr.field_index];
      img_.layout_accesses.push_back(
          {fb.fid_, static_cast<uint32_t>(fr.index), fr.layout_id, fr.field_index});
    }
  }
  functions_.clear();
  validate_image(img_);
  return std::move(img_);
}

}  // namespace rvm
