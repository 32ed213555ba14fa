#pragma once

/**
 * Experiment orchestration: expands a config into a deterministic row
 * plan (method x length x prompt), executes rows concurrently with
 * per-row seeds derived from (run seed, row index), and writes the
 * record CSV plus summary/histogram exports.
 *
 * Per-row failures are recorded in the row's ext_error column and never
 * disturb other rows; runs report how many rows failed.
 */

#include "wmlab/config.hpp"
#include "wmlab/metrics.hpp"
#include "wmlab/record.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace wmlab {

struct RunResult {
  std::string row_file;
  std::size_t rows_written = 0;
  std::size_t rows_failed = 0;
};

/// Watermarked/unwatermarked pairs per prompt, no channel (condition
/// "benign").
RunResult run_benign(const ExperimentConfig& config);

/// Same pairs, with the configured channel (synthetic preset or
/// translator round trip) applied before the second detection.
RunResult run_attack(const ExperimentConfig& config);

/// Primary watermark -> layered rewrite -> channel -> OR-rule detection
/// (primary detector or q >= q_floor).
RunResult run_layered(const ExperimentConfig& config);

/// Three arms per prompt: primary-only, secondary-only (waterfall),
/// layered; each row carries both the benign and the post-channel
/// decision.
RunResult run_ablation(const ExperimentConfig& config);

struct SummaryCell {
  std::string method;
  std::uint64_t length = 0;
  std::string condition;
  std::string arm;
  std::size_t wm_rows = 0;
  std::size_t baseline_rows = 0;
  std::size_t failed_rows = 0;
  std::optional<double> accuracy;          // rtt_detected over wm rows
  std::optional<double> benign_accuracy;   // benign_detected over wm rows
  std::optional<double> fpr;               // rtt_detected over baseline rows
  std::optional<double> benign_fpr;
  std::optional<double> mean_rouge1, mean_rouge2, mean_rougel;
  std::optional<double> mean_ppl_wm, mean_ppl_plain;
  std::optional<double> mean_q, mean_sts;
};

struct OverlapEntry {
  std::string method;
  std::string condition;
  double overlap = 0.0;
};

struct RunSummary {
  std::vector<SummaryCell> cells;  // sorted by (method, length, condition, arm)
  std::vector<OverlapEntry> overlaps;
  std::vector<std::string> histogram_files;
  std::size_t total_rows = 0;
  std::size_t failed_rows = 0;
};

/// Aggregates a row file; writes summary.csv, overlaps.csv, and
/// per-(method, condition, watermarked) histogram CSVs into out_dir.
/// Throws std::runtime_error (with row numbers) on schema violations and
/// on files with no data rows.
RunSummary report(const std::string& row_file, const std::string& out_dir);

/// Prompt lines (non-empty). Throws ConfigError when the file is missing
/// or contains no prompts.
std::vector<std::string> load_prompts(const std::string& path);

}  // namespace wmlab
