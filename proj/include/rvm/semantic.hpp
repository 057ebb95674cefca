// Semantic diversification: whole-program variants produced by function
// parameter reordering or layout-table (struct field) reordering, plus the
// binary diffing that identifies the functions a variant set touches.
#pragma once

#include <cstdint>
#include <set>
#include <vector>

#include "rvm/image.hpp"

namespace rvm {

enum class SemanticTransform { ParamReorder, FieldReorder };

struct VariantSet {
  SemanticTransform transform = SemanticTransform::ParamReorder;
  std::vector<ProgramImage> variants;
  std::vector<uint64_t> seeds;
  std::set<uint32_t> differing_fids;  // filled by diff_variants
};

// n >= 2 whole-program variants, each one applying the transform to a
// PRNG-chosen target (a function with 2..4 parameters, or a layout table).
// Every variant is I/O-equivalent to the input program.
VariantSet generate_semantic_variants(const ProgramImage& img, SemanticTransform transform,
                                      size_t n, uint64_t seed);

// Functions whose canonical encoding differs across any pair of variants.
std::set<uint32_t> diff_variants(VariantSet& vs);

}  // namespace rvm
