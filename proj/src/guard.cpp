#include "rvm/guard.hpp"

#include <stdexcept>

#include "rvm/rng.hpp"

namespace rvm {

const char* guard_variant_name(GuardVariant v) {
  return v == GuardVariant::FnvForward ? "fnv_forward" : "fnv_walk";
}

GuardVariant guard_variant_from(const std::string& name) {
  if (name == "fnv_forward") return GuardVariant::FnvForward;
  if (name == "fnv_walk") return GuardVariant::FnvWalk;
  throw std::invalid_argument("unknown guard variant: " + name);
}

GuardSpec guard_generate(uint32_t block_id, uint64_t seed, uint32_t m, GuardVariant variant) {
  if (m == 0) throw std::invalid_argument("guard: sample count must be positive");
  GuardSpec s;
  s.block_id = block_id;
  s.walk_seed = xorshift64star(seed ? seed : 0x9E3779B97F4A7C15ULL).output;
  s.sample_count = m;
  s.variant = variant;
  return s;
}

std::vector<size_t> guard_walk_indices(const GuardSpec& spec, uint64_t nonce, size_t region_len) {
  if (region_len == 0) throw std::invalid_argument("guard: empty region");
  uint64_t state = spec.walk_seed ^ nonce;
  if (state == 0) state = 0x9E3779B97F4A7C15ULL;  // xorshift cannot start at zero
  std::vector<size_t> idx;
  idx.reserve(spec.sample_count);
  for (uint32_t i = 0; i < spec.sample_count; ++i) {
    auto r = xorshift64star(state);
    state = r.state;
    idx.push_back(static_cast<size_t>(r.output % region_len));
  }
  return idx;
}

uint64_t guard_eval(std::span<const uint8_t> region, const GuardSpec& spec, uint64_t nonce) {
  if (spec.sample_count == 0 || spec.sample_count > region.size())
    throw std::invalid_argument("guard: sample count out of range");
  Fnv1a64 h;
  h.update_u64le(nonce);
  if (spec.variant == GuardVariant::FnvForward) {
    h.update(region.subspan(0, spec.sample_count));
  } else {
    for (size_t i : guard_walk_indices(spec, nonce, region.size())) {
      uint8_t b = region[i];
      h.update(&b, 1);
    }
  }
  return h.digest();
}

}  // namespace rvm
