#pragma once

/**
 * Round-trip-translation attack surrogates: a deterministic synthetic
 * paraphrase channel (substitute / delete / insert / locally reorder)
 * for desk-scale runs, plus named severity presets. The translator-backed
 * real RTT path lives in remote.hpp.
 */

#include "wmlab/numeric.hpp"
#include "wmlab/types.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace wmlab {

struct ChannelParams {
  double p_sub = 0.0;   // per-token substitution probability
  double p_del = 0.0;   // per-token deletion probability
  double p_ins = 0.0;   // per-token insertion probability (after the token)
  std::uint32_t reorder_window = 1;  // disjoint local-shuffle span
  std::uint64_t seed = 0;
};

/// Applies the channel. Substitutions are drawn from `unigram` (a
/// probability vector over the vocabulary) excluding the original token,
/// so a substituted position never keeps its value. Fully deterministic
/// given (tokens, params). Throws std::invalid_argument on invalid rates
/// (p outside [0,1], p_sub + p_del > 1, reorder_window == 0) or an empty
/// unigram table.
TokenSequence synthetic_rtt(std::span<const TokenId> tokens,
                            const ChannelParams& params,
                            std::span<const double> unigram);

struct SeverityPreset {
  std::string name;
  ChannelParams params;
};

/// Fixed severity table: null, mild, rtt-like, severe.
const std::vector<SeverityPreset>& severity_presets();

/// Preset lookup by name; throws std::invalid_argument on unknown names.
ChannelParams preset_by_name(std::string_view name);

}  // namespace wmlab
