#include "wmlab/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace wmlab {

namespace {

RougeScore from_counts(double overlap, double hyp_total, double ref_total) {
  RougeScore s;
  s.precision = hyp_total > 0.0 ? overlap / hyp_total : 0.0;
  s.recall = ref_total > 0.0 ? overlap / ref_total : 0.0;
  const double denom = s.precision + s.recall;
  s.f1 = denom > 0.0 ? 2.0 * s.precision * s.recall / denom : 0.0;
  return s;
}

std::map<std::vector<TokenId>, std::uint64_t> ngram_counts(
    std::span<const TokenId> seq, std::size_t n) {
  std::map<std::vector<TokenId>, std::uint64_t> counts;
  if (seq.size() < n) return counts;
  for (std::size_t i = 0; i + n <= seq.size(); ++i) {
    std::vector<TokenId> gram(seq.begin() + static_cast<long>(i),
                              seq.begin() + static_cast<long>(i + n));
    ++counts[std::move(gram)];
  }
  return counts;
}

}  // namespace

RougeScore rouge_n(std::span<const TokenId> reference,
                   std::span<const TokenId> hypothesis, std::size_t n) {
  if (n == 0) throw std::invalid_argument("rouge_n: n must be >= 1");
  const auto ref = ngram_counts(reference, n);
  const auto hyp = ngram_counts(hypothesis, n);
  double ref_total = 0.0, hyp_total = 0.0, overlap = 0.0;
  for (const auto& [gram, c] : ref) ref_total += static_cast<double>(c);
  for (const auto& [gram, c] : hyp) {
    hyp_total += static_cast<double>(c);
    auto it = ref.find(gram);
    if (it != ref.end()) {
      overlap += static_cast<double>(std::min(c, it->second));
    }
  }
  return from_counts(overlap, hyp_total, ref_total);
}

RougeScore rouge_l(std::span<const TokenId> reference,
                   std::span<const TokenId> hypothesis) {
  const std::size_t nr = reference.size();
  const std::size_t nh = hypothesis.size();
  if (nr == 0 || nh == 0) return from_counts(0.0, double(nh), double(nr));
  std::vector<std::uint32_t> prev(nh + 1, 0), cur(nh + 1, 0);
  for (std::size_t i = 1; i <= nr; ++i) {
    for (std::size_t j = 1; j <= nh; ++j) {
      if (reference[i - 1] == hypothesis[j - 1]) {
        cur[j] = prev[j - 1] + 1;
      } else {
        cur[j] = std::max(prev[j], cur[j - 1]);
      }
    }
    std::swap(prev, cur);
  }
  const double lcs = static_cast<double>(prev[nh]);
  return from_counts(lcs, static_cast<double>(nh), static_cast<double>(nr));
}

double detection_accuracy(std::span<const DetectionOutcome> results) {
  if (results.empty()) {
    throw std::invalid_argument("detection_accuracy: empty input");
  }
  std::uint64_t watermarked = 0, hit = 0;
  for (const auto& r : results) {
    if (r.watermarked) {
      ++watermarked;
      if (r.detected) ++hit;
    }
  }
  if (watermarked == 0) {
    throw std::invalid_argument("detection_accuracy: no watermarked rows");
  }
  return static_cast<double>(hit) / static_cast<double>(watermarked);
}

double false_positive_rate(std::span<const DetectionOutcome> results) {
  if (results.empty()) {
    throw std::invalid_argument("false_positive_rate: empty input");
  }
  std::uint64_t clean = 0, flagged = 0;
  for (const auto& r : results) {
    if (!r.watermarked) {
      ++clean;
      if (r.detected) ++flagged;
    }
  }
  if (clean == 0) {
    throw std::invalid_argument("false_positive_rate: no unwatermarked rows");
  }
  return static_cast<double>(flagged) / static_cast<double>(clean);
}

ScoreHistogram histogram_range(std::span<const double> scores,
                               std::size_t bins, double lo, double hi,
                               const HistogramTags& tags) {
  if (bins == 0) throw std::invalid_argument("histogram: bins must be >= 1");
  if (scores.empty()) throw std::invalid_argument("histogram: empty scores");
  if (!(hi >= lo)) throw std::invalid_argument("histogram: hi < lo");

  ScoreHistogram h;
  h.tags = tags;
  h.edges.resize(bins + 1);
  const double width = (hi - lo) / static_cast<double>(bins);
  for (std::size_t i = 0; i <= bins; ++i) {
    h.edges[i] = lo + width * static_cast<double>(i);
  }
  h.edges.back() = hi;
  h.counts.assign(bins, 0);
  for (const double x : scores) {
    std::size_t idx = 0;
    if (width > 0.0) {
      // Right-closed bins: smallest i with x <= edges[i+1].
      const double pos = std::ceil((x - lo) / width) - 1.0;
      if (pos > 0.0) idx = static_cast<std::size_t>(pos);
      if (idx >= bins) idx = bins - 1;
    }
    ++h.counts[idx];
  }
  return h;
}

ScoreHistogram histogram(std::span<const double> scores, std::size_t bins,
                         const HistogramTags& tags) {
  if (scores.empty()) throw std::invalid_argument("histogram: empty scores");
  const auto [lo, hi] = std::minmax_element(scores.begin(), scores.end());
  return histogram_range(scores, bins, *lo, *hi, tags);
}

double overlap_coefficient(const ScoreHistogram& a, const ScoreHistogram& b) {
  if (a.edges != b.edges) {
    throw std::invalid_argument("overlap_coefficient: mismatched bin edges");
  }
  double total_a = 0.0, total_b = 0.0;
  for (const auto c : a.counts) total_a += static_cast<double>(c);
  for (const auto c : b.counts) total_b += static_cast<double>(c);
  if (total_a == 0.0 || total_b == 0.0) {
    throw std::invalid_argument("overlap_coefficient: empty histogram");
  }
  double overlap = 0.0;
  for (std::size_t i = 0; i < a.counts.size(); ++i) {
    overlap += std::min(static_cast<double>(a.counts[i]) / total_a,
                        static_cast<double>(b.counts[i]) / total_b);
  }
  return overlap;
}

}  // namespace wmlab
