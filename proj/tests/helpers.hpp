// Shared fixtures for the test suites: tiny hand-built images with mobile
// blocks, and a resolver serving payloads from memory.
#pragma once

#include <functional>
#include <map>
#include <vector>

#include "rvm/builder.hpp"
#include "rvm/image.hpp"
#include "rvm/payload.hpp"
#include "rvm/vm.hpp"

namespace rvmtest {

using namespace rvm;

// Resolver that maps payloads from an in-memory table and counts requests.
struct TableResolver {
  std::map<uint32_t, MobileBlockPayload> blocks;
  int requests = 0;

  BlockResolver fn() {
    return [this](ProcessState& st, uint32_t block_id) -> uint32_t {
      ++requests;
      auto it = blocks.find(block_id);
      if (it == blocks.end()) throw std::runtime_error("no such block");
      return map_block(st, block_id, it->second);
    };
  }
};

inline MobileBlockPayload make_payload(uint32_t block_id, const FunctionDef& f,
                                       std::vector<std::pair<uint32_t, std::vector<uint8_t>>>
                                           sections = {}) {
  MobileBlockPayload p;
  p.block_id = block_id;
  p.version_id = 1;
  p.group_id = 0;
  p.entry_fid = f.fid;
  p.param_count = f.param_count;
  p.code = encode_function(f);
  p.owned_sections = std::move(sections);
  return p;
}

// Marks a function of the image as a mobile stub (empty code) and a section
// as a mobile-owned placeholder, the shape the extractor produces.
inline void stub_out(ProgramImage& img, uint32_t fid) {
  auto* f = img.find_function(fid);
  f->code.clear();
  std::erase_if(img.relocations, [&](const RelocationRecord& r) {
    return r.kind == RelocationRecord::Kind::Code && r.code.fid == fid;
  });
}

inline void own_section(ProgramImage& img, uint32_t sid) {
  auto* s = img.find_section(sid);
  s->bytes.clear();
  s->mobile_owned = true;
}

}  // namespace rvmtest
