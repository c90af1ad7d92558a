#pragma once

#include <optional>

#include "qarg/types.hpp"

namespace qarg {

// Systematic Reed-Solomon over GF(256), 255-byte codewords carrying 128
// data bytes (rate ~1/2, minimum distance 128). Decoding corrects e errors
// and f erasures whenever 2e + f <= 127.
namespace rs {

inline constexpr int kN = 255;
inline constexpr int kK = 128;
inline constexpr int kParity = kN - kK;

// one codeword from exactly kK data bytes
std::array<uint8_t, kN> encode_block(const std::array<uint8_t, kK>& data);

// errata decoding; erasure positions index into the codeword
std::optional<std::array<uint8_t, kK>> decode_block(
    const std::array<uint8_t, kN>& received,
    const std::vector<int>& erasures);

// whole-message coding: a 4-byte length header plus zero padding to a
// multiple of kK, then block-wise encoding
Bytes encode(const Bytes& data);
std::optional<Bytes> decode(const Bytes& code);

size_t encoded_size(size_t data_size);

}  // namespace rs

}  // namespace qarg
