#pragma once

/**
 * One experiment record. The first six columns are the stable cross-tool
 * schema (input, primary_wm, secondary_wm, q_score, sts_score,
 * rtt_detected); everything the pipeline adds is prefixed ext_.
 *
 * Unwatermarked baseline rows reuse primary_wm for the unwatermarked
 * sample and carry ext_watermarked=false.
 */

#include "wmlab/csv.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace wmlab {

struct RecordRow {
  // Paper-schema columns, in order.
  std::string input;
  std::string primary_wm;
  std::string secondary_wm;                // empty when not layered
  std::optional<double> q_score;           // post-channel verification q
  std::optional<double> sts_score;         // similarity of selected rewrite
  bool rtt_detected = false;               // decision after the run's channel

  // Extension columns.
  std::string method;                      // kgw | exp | waterfall
  std::uint64_t length = 0;
  std::string condition;                   // benign | preset name | translator
  std::string arm;                         // primary | secondary | layered
  bool watermarked = true;
  std::optional<double> z;                 // post-channel statistic
  std::optional<double> p;
  std::optional<bool> benign_detected;     // pre-channel decision
  std::optional<double> rouge1, rouge2, rougel;
  std::optional<double> ppl_wm, ppl_plain;
  std::uint64_t seed = 0;
  std::string error;                       // per-row failure marker
};

/// Column names, in file order.
const std::vector<std::string>& record_header();

std::vector<std::string> record_to_fields(const RecordRow& row);

/// Throws std::runtime_error naming the (1-based) row on any mismatch.
RecordRow record_from_fields(const std::vector<std::string>& fields,
                             std::size_t row_number);

void write_record_header(std::ostream& out);
void write_record(std::ostream& out, const RecordRow& row);

/// Reads a full row file (header + rows); validates the header and every
/// row, reporting row numbers in errors.
std::vector<RecordRow> read_records(std::istream& in);

}  // namespace wmlab
