#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <string>

#include "qarg/types.hpp"

namespace qarg {

using Digest = std::array<uint8_t, 32>;

Digest sha256(const uint8_t* data, size_t len);
inline Digest sha256(const Bytes& b) { return sha256(b.data(), b.size()); }

// Keyed digest over an abstract 256-bit hash. `truncate_bytes` lets tests
// swap in a deliberately weak hash (collisions findable) without changing
// any caller; production paths keep the full 32 bytes.
struct HashSpec {
  Bytes key;
  int truncate_bytes = 32;

  Bytes digest(const Bytes& data) const;
  Bytes digest2(uint8_t domain, const Bytes& a, const Bytes& b) const;
};

std::string digest_hex(const Bytes& d);

}  // namespace qarg
