#include "wmlab/record.hpp"

#include <istream>
#include <ostream>
#include <stdexcept>

namespace wmlab {

const std::vector<std::string>& record_header() {
  static const std::vector<std::string> header = {
      "input",          "primary_wm",  "secondary_wm", "q_score",
      "sts_score",      "rtt_detected", "ext_method",  "ext_length",
      "ext_condition",  "ext_arm",     "ext_watermarked", "ext_z",
      "ext_p",          "ext_benign_detected", "ext_rouge1", "ext_rouge2",
      "ext_rougel",     "ext_ppl_wm",  "ext_ppl_plain", "ext_seed",
      "ext_error",
  };
  return header;
}

std::vector<std::string> record_to_fields(const RecordRow& r) {
  return {
      r.input,
      r.primary_wm,
      r.secondary_wm,
      format_optional_double(r.q_score),
      format_optional_double(r.sts_score),
      format_bool(r.rtt_detected),
      r.method,
      std::to_string(r.length),
      r.condition,
      r.arm,
      format_bool(r.watermarked),
      format_optional_double(r.z),
      format_optional_double(r.p),
      format_optional_bool(r.benign_detected),
      format_optional_double(r.rouge1),
      format_optional_double(r.rouge2),
      format_optional_double(r.rougel),
      format_optional_double(r.ppl_wm),
      format_optional_double(r.ppl_plain),
      std::to_string(r.seed),
      r.error,
  };
}

RecordRow record_from_fields(const std::vector<std::string>& fields,
                             std::size_t row_number) {
  const auto& header = record_header();
  if (fields.size() != header.size()) {
    throw std::runtime_error("row " + std::to_string(row_number) + ": has " +
                             std::to_string(fields.size()) + " columns, want " +
                             std::to_string(header.size()));
  }
  try {
    RecordRow r;
    std::size_t i = 0;
    r.input = fields[i++];
    r.primary_wm = fields[i++];
    r.secondary_wm = fields[i++];
    r.q_score = parse_optional_double(fields[i++]);
    r.sts_score = parse_optional_double(fields[i++]);
    r.rtt_detected = parse_bool(fields[i++]);
    r.method = fields[i++];
    r.length = std::stoull(fields[i++]);
    r.condition = fields[i++];
    r.arm = fields[i++];
    r.watermarked = parse_bool(fields[i++]);
    r.z = parse_optional_double(fields[i++]);
    r.p = parse_optional_double(fields[i++]);
    r.benign_detected = parse_optional_bool(fields[i++]);
    r.rouge1 = parse_optional_double(fields[i++]);
    r.rouge2 = parse_optional_double(fields[i++]);
    r.rougel = parse_optional_double(fields[i++]);
    r.ppl_wm = parse_optional_double(fields[i++]);
    r.ppl_plain = parse_optional_double(fields[i++]);
    r.seed = std::stoull(fields[i++]);
    r.error = fields[i++];
    return r;
  } catch (const std::exception& e) {
    throw std::runtime_error("row " + std::to_string(row_number) + ": " +
                             e.what());
  }
}

void write_record_header(std::ostream& out) {
  write_csv_row(out, record_header());
}

void write_record(std::ostream& out, const RecordRow& row) {
  write_csv_row(out, record_to_fields(row));
}

std::vector<RecordRow> read_records(std::istream& in) {
  const auto rows = read_csv(in);
  if (rows.empty()) {
    throw std::runtime_error("row file is empty (no header)");
  }
  if (rows[0] != record_header()) {
    throw std::runtime_error("row 1: unexpected header");
  }
  if (rows.size() == 1) {
    throw std::runtime_error("row file has a header but no data rows");
  }
  std::vector<RecordRow> records;
  records.reserve(rows.size() - 1);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    records.push_back(record_from_fields(rows[i], i + 1));
  }
  return records;
}

}  // namespace wmlab
