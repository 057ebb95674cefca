// Syntactic diversification: semantics-preserving code variation through
// opaque-false predicates guarding junk, instruction substitution, dead
// stores and basic-block layout shuffling.
#pragma once

#include <cstdint>

#include "rvm/image.hpp"
#include "rvm/payload.hpp"

namespace rvm {

struct DiversificationKnobs {
  double opaque_pred_rate = 0.0;  // per eligible program point
  double subst_rate = 0.0;        // per substitutable instruction
  double junk_rate = 0.0;         // per program point
  bool shuffle = false;
  uint64_t seed = 1;
};

// Returns a function with identical I/O behavior and the same interface.
// All-zero rates with shuffle=false reproduce the input exactly.
FunctionDef syntactic_diversify(const FunctionDef& f, const DiversificationKnobs& knobs);

// Convenience for renewable-block generation: diversifies the code inside a
// payload, leaving identity, sections and interface untouched.
MobileBlockPayload diversify_payload(const MobileBlockPayload& payload,
                                     const DiversificationKnobs& knobs);

}  // namespace rvm
