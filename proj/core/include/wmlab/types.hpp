#pragma once

#include <cstdint>
#include <vector>

namespace wmlab {

/// Dense token id. Ids 0 and 1 are reserved (see Vocabulary).
using TokenId = std::uint32_t;

/// Ordered token-id sequence; the universal text representation for
/// watermark embedding, attacks, and detection.
using TokenSequence = std::vector<TokenId>;

inline constexpr TokenId kBosId = 0;
inline constexpr TokenId kUnkId = 1;

}  // namespace wmlab
