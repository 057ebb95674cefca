// Renewable code guards: hash a mapped code region either front to back or
// along a seeded pseudo-random walk, mixed with a per-challenge nonce.
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rvm/hash.hpp"

namespace rvm {

enum class GuardVariant : uint8_t { FnvForward = 0, FnvWalk = 1 };

const char* guard_variant_name(GuardVariant v);
GuardVariant guard_variant_from(const std::string& name);

struct GuardSpec {
  uint32_t block_id = 0;
  uint64_t walk_seed = 0;
  uint32_t sample_count = 0;  // m >= 1, m <= region length
  GuardVariant variant = GuardVariant::FnvForward;
};

GuardSpec guard_generate(uint32_t block_id, uint64_t seed, uint32_t m, GuardVariant variant);

// Byte indices visited by the walk variant, in draw order (duplicates
// allowed); exposed so tests can compare walks directly.
std::vector<size_t> guard_walk_indices(const GuardSpec& spec, uint64_t nonce, size_t region_len);

uint64_t guard_eval(std::span<const uint8_t> region, const GuardSpec& spec, uint64_t nonce);

}  // namespace rvm
