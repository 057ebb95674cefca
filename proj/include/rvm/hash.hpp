// FNV-1a 64-bit, used for payload integrity hashes and attestation guards.
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

namespace rvm {

inline constexpr uint64_t kFnvOffsetBasis = 14695981039346656037ULL;
inline constexpr uint64_t kFnvPrime = 1099511628211ULL;

class Fnv1a64 {
 public:
  void update(const uint8_t* data, size_t len) {
    for (size_t i = 0; i < len; ++i) {
      h_ = (h_ ^ data[i]) * kFnvPrime;
    }
  }
  void update(std::span<const uint8_t> bytes) { update(bytes.data(), bytes.size()); }
  void update_u64le(uint64_t v) {
    uint8_t b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<uint8_t>(v >> (8 * i));
    update(b, 8);
  }
  uint64_t digest() const { return h_; }

 private:
  uint64_t h_ = kFnvOffsetBasis;
};

inline uint64_t fnv1a64(std::span<const uint8_t> bytes) {
  Fnv1a64 h;
  h.update(bytes);
  return h.digest();
}

inline uint64_t fnv1a64(const uint8_t* data, size_t len) {
  Fnv1a64 h;
  h.update(data, len);
  return h.digest();
}

}  // namespace rvm
