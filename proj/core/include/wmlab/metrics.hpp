#pragma once

/**
 * Evaluation metrics: ROUGE-1/2/L over token sequences, detection
 * accuracy / false-positive rate, and score-distribution histograms with
 * an overlap coefficient for separability analysis.
 */

#include "wmlab/types.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace wmlab {

struct RougeScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Clipped n-gram overlap F1 (beta = 1). Sequences shorter than n
/// contribute no n-grams. Throws std::invalid_argument on n == 0.
RougeScore rouge_n(std::span<const TokenId> reference,
                   std::span<const TokenId> hypothesis, std::size_t n);

/// Longest-common-subsequence ROUGE.
RougeScore rouge_l(std::span<const TokenId> reference,
                   std::span<const TokenId> hypothesis);

struct DetectionOutcome {
  bool detected = false;
  bool watermarked = false;  // ground truth
};

/// Fraction of truly watermarked rows flagged. Throws on empty input or
/// when no watermarked rows are present.
double detection_accuracy(std::span<const DetectionOutcome> results);

/// Fraction of truly unwatermarked rows flagged.
double false_positive_rate(std::span<const DetectionOutcome> results);

struct HistogramTags {
  std::string method;
  std::string condition;
  bool watermarked = false;
};

struct ScoreHistogram {
  std::vector<double> edges;          // bins + 1 entries
  std::vector<std::uint64_t> counts;  // bins entries
  HistogramTags tags;
};

/// Equal-width bins over [min, max] of the scores; every bin is
/// right-closed (value x lands in the smallest bin whose right edge is
/// >= x), so {0, 0.5, 1} with 2 bins gives counts [2, 1].
ScoreHistogram histogram(std::span<const double> scores, std::size_t bins,
                         const HistogramTags& tags);

/// Same, over an explicit [lo, hi] range (values clamp to the end bins);
/// lets two score sets share edges for overlap comparison.
ScoreHistogram histogram_range(std::span<const double> scores,
                               std::size_t bins, double lo, double hi,
                               const HistogramTags& tags);

/// Sum of min over normalized bins; 1 for identical histograms, 0 for
/// disjoint supports. Requires identical edges.
double overlap_coefficient(const ScoreHistogram& a, const ScoreHistogram& b);

}  // namespace wmlab
