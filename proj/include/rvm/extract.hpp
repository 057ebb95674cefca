// Link-time extraction: data-accessibility analysis, ownership assignment
// and the split of a program image into a static image plus mobile block
// payloads.
#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "rvm/image.hpp"
#include "rvm/payload.hpp"

namespace rvm {

struct Annotation {
  uint32_t fid = 0;
  bool make_mobile = false;
  bool data_mobility = false;
  std::optional<std::string> engine_hint;
};

// Sections reachable by static code or the loader: exported sections,
// sections LEA'd from non-mobile code, closed under data relocations.
std::set<uint32_t> accessible_sections(const ProgramImage& img,
                                       const std::set<uint32_t>& mobile_fids);

// Assigns non-accessible sections to the single mobile function that can
// produce their address. A section LEA'd from two mobile functions (or
// reachable from sections owned by different functions) stays static.
std::map<uint32_t, std::vector<uint32_t>> compute_owned_sections(
    const ProgramImage& img, const std::set<uint32_t>& mobile_fids);

struct ExtractionResult {
  ProgramImage static_image;
  std::vector<MobileBlockPayload> blocks;
  std::map<uint32_t, std::vector<uint32_t>> ownership;  // block id -> sids
  std::vector<std::string> warnings;
};

ExtractionResult extract(const ProgramImage& img, const std::vector<Annotation>& annotations);

}  // namespace rvm
