// Static-to-procedural conversion: replaces a read-only data section with a
// generator function that materializes the bytes into a writable scratch
// section at run time, using seed-varied arithmetic encodings.
#pragma once

#include <cstdint>

#include "rvm/image.hpp"

namespace rvm {

struct StatProcResult {
  ProgramImage img;
  uint32_t generator_fid = 0;
  uint32_t scratch_sid = 0;
};

// Preconditions: sid is read-only, not exported, at most 4 KiB, has no data
// relocations touching it, and owner_fid (the single mobile function whose
// LEAs produce its address) exists. Every LEA of sid inside the owner is
// rewritten into a call of the generator.
StatProcResult static_to_procedural(const ProgramImage& img, uint32_t sid, uint32_t owner_fid,
                                    uint64_t seed);

}  // namespace rvm
