#include "wmlab/pipeline.hpp"

#include "wmlab/attack.hpp"
#include "wmlab/exp.hpp"
#include "wmlab/kgw.hpp"
#include "wmlab/layered.hpp"
#include "wmlab/parallel.hpp"
#include "wmlab/remote.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <map>
#include <tuple>

namespace wmlab {

namespace {

namespace fs = std::filesystem;

enum class RunKind { benign, attack, layered, ablation };
enum class Arm { primary, secondary, layered };

std::string arm_name(Arm arm) {
  switch (arm) {
    case Arm::primary: return "primary";
    case Arm::secondary: return "secondary";
    case Arm::layered: return "layered";
  }
  return {};
}

struct RowTask {
  std::size_t index = 0;  // row-pair index; seeds derive from this
  std::string method;     // kgw | exp (generation method for the arm)
  std::uint64_t length = 0;
  std::string prompt;
  Arm arm = Arm::primary;
};

// Everything immutable shared across row tasks.
struct Workbench {
  const ExperimentConfig* cfg = nullptr;
  RunKind kind = RunKind::benign;
  std::string condition;
  Vocabulary vocab;
  std::optional<NgramLm> lm;
  std::vector<double> unigram;
  std::optional<ChannelParams> channel;  // nullopt => translator or none
};

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open file: " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

Workbench make_workbench(const ExperimentConfig& cfg, RunKind kind) {
  Workbench wb;
  wb.cfg = &cfg;
  wb.kind = kind;

  if (cfg.lm_source == LmSource::remote) {
    if (!cfg.vocab_file) {
      throw ConfigError("lm.remote requires vocab.file for detection");
    }
  }
  if (cfg.vocab_file) {
    std::ifstream in(*cfg.vocab_file);
    if (!in) throw ConfigError("cannot open vocab file: " + *cfg.vocab_file);
    wb.vocab = load_vocab(in);
  } else {
    const auto corpus = read_lines(cfg.lm_corpus_path);
    wb.vocab = build_vocab(corpus, cfg.vocab_max_size);
  }

  switch (cfg.lm_source) {
    case LmSource::toy_corpus: {
      const auto corpus = read_lines(cfg.lm_corpus_path);
      wb.lm = train_ngram(corpus, wb.vocab, cfg.lm_order, cfg.lm_alpha);
      break;
    }
    case LmSource::model_file: {
      std::ifstream in(cfg.lm_model_path);
      if (!in) throw ConfigError("cannot open model file: " + cfg.lm_model_path);
      wb.lm = NgramLm::load(in);
      if (wb.lm->vocab_size() != wb.vocab.size()) {
        throw ConfigError("model vocab size does not match the vocabulary");
      }
      break;
    }
    case LmSource::remote:
      break;
  }
  if (wb.lm) wb.unigram = wb.lm->unigram_probs();

  const bool wants_channel = kind != RunKind::benign;
  if (!wants_channel) {
    wb.channel = preset_by_name("null");
    wb.condition = "benign";
  } else if (cfg.translators) {
    wb.channel = std::nullopt;
    wb.condition = "translator";
  } else {
    wb.channel = *cfg.attack_channel;
    wb.condition = cfg.attack_preset;
    if (!wb.lm) {
      throw ConfigError("the synthetic channel requires a local toy model");
    }
  }
  return wb;
}

struct PrimaryDetection {
  std::optional<double> z;
  std::optional<double> p;
  bool detected = false;
};

PrimaryDetection detect_primary(const std::string& method,
                                std::span<const TokenId> tokens,
                                const Workbench& wb) {
  PrimaryDetection out;
  if (method == "kgw") {
    const auto d = detect_kgw(tokens, wb.cfg->kgw, wb.vocab.size());
    if (!d.abstained) {
      out.z = d.z;
      out.p = d.p;
    }
    out.detected = d.detected;
  } else {
    const auto d = exp_detect(tokens, wb.cfg->exp);
    if (!d.abstained) out.p = d.p;
    out.detected = d.detected;
  }
  return out;
}

TokenSequence generate_primary(const std::string& method, const Workbench& wb,
                               const TokenSequence& prompt,
                               const GenerationParams& gen) {
  if (method == "kgw") return generate_kgw(*wb.lm, prompt, wb.cfg->kgw, gen);
  return generate_exp(*wb.lm, prompt, wb.cfg->exp, gen);
}

// Sub-seed lanes per row.
enum : std::uint64_t {
  kLaneGenerate = 0,
  kLanePlain = 1,
  kLaneChannel = 2,
  kLaneSecondary = 3,
};

std::uint64_t row_seed(const ExperimentConfig& cfg, std::size_t task_index) {
  return prng_word(PrefixSeed{cfg.seed}, task_index);
}

std::uint64_t lane_seed(std::uint64_t row, std::uint64_t lane) {
  return prng_word(PrefixSeed{row}, lane);
}

TokenSequence apply_channel(const Workbench& wb, std::span<const TokenId> toks,
                            std::uint64_t seed) {
  if (wb.channel) {
    ChannelParams ch = *wb.channel;
    ch.seed = seed;
    return synthetic_rtt(toks, ch, wb.unigram);
  }
  // Translator round trip happens at text level; re-tokenize the result
  // with the detector-side vocabulary.
  const auto& endpoints = *wb.cfg->translators;
  TranslatorClient fwd{endpoints.forward_url, "bn", "en"};
  TranslatorClient back{endpoints.backward_url, "en", "bn"};
  const std::string text = decode(TokenSequence(toks.begin(), toks.end()),
                                  wb.vocab);
  return encode(rtt_via_translator(text, fwd, back), wb.vocab);
}

// The two rows (watermarked + paired baseline) for one task.
std::vector<RecordRow> execute_task(const Workbench& wb, const RowTask& task) {
  const ExperimentConfig& cfg = *wb.cfg;
  const std::uint64_t rseed = row_seed(cfg, task.index);

  RecordRow wm_row;
  wm_row.input = task.prompt;
  wm_row.method = task.arm == Arm::secondary ? "waterfall" : task.method;
  wm_row.length = task.length;
  wm_row.condition = wb.condition;
  wm_row.arm = arm_name(task.arm);
  wm_row.watermarked = true;
  wm_row.seed = rseed;
  RecordRow base_row = wm_row;
  base_row.watermarked = false;

  GenerationParams gen;
  gen.length = task.length;
  gen.temperature = cfg.temperature;
  gen.seed = lane_seed(rseed, kLaneGenerate);
  GenerationParams plain_gen = gen;
  plain_gen.seed = lane_seed(rseed, kLanePlain);

  // --- Remote generation path: detection only, no local pairing. ---
  if (cfg.lm_source == LmSource::remote) {
    RemoteLmConfig remote{cfg.lm_remote_url};
    const std::string text = remote_generate(remote, task.prompt, gen);
    wm_row.primary_wm = text;
    const TokenSequence toks = encode(text, wb.vocab);
    const auto benign = detect_primary(task.method, toks, wb);
    wm_row.benign_detected = benign.detected;
    const TokenSequence attacked =
        apply_channel(wb, toks, lane_seed(rseed, kLaneChannel));
    const auto post = detect_primary(task.method, attacked, wb);
    wm_row.z = post.z;
    wm_row.p = post.p;
    wm_row.rtt_detected = post.detected;
    return {wm_row};
  }

  // --- Local toy-model path. ---
  const TokenSequence prompt_toks = encode(task.prompt, wb.vocab);
  const TokenSequence plain_full = sample_plain(*wb.lm, prompt_toks, plain_gen);
  const TokenSequence plain(plain_full.begin() + prompt_toks.size(),
                            plain_full.end());

  TokenSequence watermarked;
  {
    const TokenSequence full =
        generate_primary(task.method, wb, prompt_toks, gen);
    watermarked.assign(full.begin() + prompt_toks.size(), full.end());
  }

  const std::uint64_t channel_seed = lane_seed(rseed, kLaneChannel);
  const SecondaryParams& sec = cfg.secondary;

  auto fill_pair_metrics = [&](const TokenSequence& wm_text) {
    const auto r1 = rouge_n(plain, wm_text, 1);
    const auto r2 = rouge_n(plain, wm_text, 2);
    const auto rl = rouge_l(plain, wm_text);
    wm_row.rouge1 = r1.f1;
    wm_row.rouge2 = r2.f1;
    wm_row.rougel = rl.f1;
    wm_row.ppl_wm = sequence_perplexity(*wb.lm, wm_text);
    wm_row.ppl_plain = sequence_perplexity(*wb.lm, plain);
  };

  switch (task.arm) {
    case Arm::primary: {
      wm_row.primary_wm = decode(watermarked, wb.vocab);
      base_row.primary_wm = decode(plain, wb.vocab);
      fill_pair_metrics(watermarked);

      wm_row.benign_detected =
          detect_primary(task.method, watermarked, wb).detected;
      base_row.benign_detected =
          detect_primary(task.method, plain, wb).detected;

      const auto wm_attacked = apply_channel(wb, watermarked, channel_seed);
      const auto base_attacked = apply_channel(wb, plain, channel_seed + 1);
      const auto wm_post = detect_primary(task.method, wm_attacked, wb);
      const auto base_post = detect_primary(task.method, base_attacked, wb);
      wm_row.z = wm_post.z;
      wm_row.p = wm_post.p;
      wm_row.rtt_detected = wm_post.detected;
      base_row.z = base_post.z;
      base_row.p = base_post.p;
      base_row.rtt_detected = base_post.detected;
      break;
    }

    case Arm::secondary: {
      // Waterfall alone: rewrite an unwatermarked generation.
      GenerationParams rw;
      rw.temperature = cfg.temperature;
      rw.seed = lane_seed(rseed, kLaneSecondary);
      const TokenSequence rewritten = rewatermark(plain, *wb.lm, sec, rw);
      wm_row.primary_wm = decode(plain, wb.vocab);
      wm_row.secondary_wm = decode(rewritten, wb.vocab);
      wm_row.sts_score = semantic_similarity(plain, rewritten);
      base_row.primary_wm = decode(plain, wb.vocab);

      const auto q_benign = verify_q(rewritten, sec, wb.vocab.size());
      wm_row.benign_detected = !q_benign.abstained && q_benign.q >= sec.q_floor;
      const auto q_base_benign = verify_q(plain, sec, wb.vocab.size());
      base_row.benign_detected =
          !q_base_benign.abstained && q_base_benign.q >= sec.q_floor;

      const auto attacked = apply_channel(wb, rewritten, channel_seed);
      const auto base_attacked = apply_channel(wb, plain, channel_seed + 1);
      const auto q_post = verify_q(attacked, sec, wb.vocab.size());
      const auto q_base_post = verify_q(base_attacked, sec, wb.vocab.size());
      wm_row.q_score = q_post.q;
      wm_row.rtt_detected = !q_post.abstained && q_post.q >= sec.q_floor;
      base_row.q_score = q_base_post.q;
      base_row.rtt_detected =
          !q_base_post.abstained && q_base_post.q >= sec.q_floor;
      break;
    }

    case Arm::layered: {
      LayeredParams lp;
      lp.n_candidates = cfg.layered_candidates;
      lp.lambda = cfg.layered_lambda;
      lp.secondary = sec;
      GenerationParams rw;
      rw.temperature = cfg.temperature;
      rw.seed = lane_seed(rseed, kLaneSecondary);
      const Candidate cand = layered_watermark(watermarked, *wb.lm, lp, rw);

      wm_row.primary_wm = decode(watermarked, wb.vocab);
      wm_row.secondary_wm = decode(cand.text, wb.vocab);
      wm_row.sts_score = cand.similarity;
      base_row.primary_wm = decode(plain, wb.vocab);
      fill_pair_metrics(watermarked);

      auto layered_rule = [&](std::span<const TokenId> toks)
          -> std::tuple<PrimaryDetection, QScore, bool> {
        const auto prim = detect_primary(task.method, toks, wb);
        const auto q = verify_q(toks, sec, wb.vocab.size());
        const bool hit =
            prim.detected || (!q.abstained && q.q >= sec.q_floor);
        return {prim, q, hit};
      };

      wm_row.benign_detected = std::get<2>(layered_rule(cand.text));
      base_row.benign_detected = std::get<2>(layered_rule(plain));
      const auto attacked = apply_channel(wb, cand.text, channel_seed);
      const auto base_attacked = apply_channel(wb, plain, channel_seed + 1);
      {
        const auto [prim, q, hit] = layered_rule(attacked);
        wm_row.z = prim.z;
        wm_row.p = prim.p;
        wm_row.q_score = q.q;
        wm_row.rtt_detected = hit;
      }
      {
        const auto [prim, q, hit] = layered_rule(base_attacked);
        base_row.z = prim.z;
        base_row.p = prim.p;
        base_row.q_score = q.q;
        base_row.rtt_detected = hit;
      }
      break;
    }
  }
  return {wm_row, base_row};
}

RecordRow failure_row(const Workbench& wb, const RowTask& task,
                      const std::string& message) {
  RecordRow row;
  row.input = task.prompt;
  row.method = task.arm == Arm::secondary ? "waterfall" : task.method;
  row.length = task.length;
  row.condition = wb.condition;
  row.arm = arm_name(task.arm);
  row.watermarked = true;
  row.seed = row_seed(*wb.cfg, task.index);
  row.error = message;
  return row;
}

RunResult run_tasks(const ExperimentConfig& cfg, RunKind kind) {
  const Workbench wb = make_workbench(cfg, kind);
  const auto prompts = load_prompts(cfg.prompts_path);

  std::vector<RowTask> tasks;
  std::size_t index = 0;
  const std::vector<Arm> arms =
      kind == RunKind::layered
          ? std::vector<Arm>{Arm::layered}
          : kind == RunKind::ablation
                ? std::vector<Arm>{Arm::primary, Arm::secondary, Arm::layered}
                : std::vector<Arm>{Arm::primary};
  for (const auto& method : cfg.methods) {
    for (const auto length : cfg.lengths) {
      for (const auto& prompt : prompts) {
        for (const Arm arm : arms) {
          // The secondary arm does not depend on the primary method; emit
          // it once per prompt, under the first configured method.
          if (arm == Arm::secondary && method != cfg.methods.front()) continue;
          tasks.push_back(RowTask{index++, method, length, prompt, arm});
        }
      }
    }
  }

  std::vector<std::vector<RecordRow>> results(tasks.size());
  std::atomic<std::size_t> failed{0};
  parallel_for(tasks.size(), cfg.threads, [&](std::size_t i) {
    try {
      results[i] = execute_task(wb, tasks[i]);
    } catch (const std::exception& e) {
      results[i] = {failure_row(wb, tasks[i], e.what())};
      failed.fetch_add(1);
    }
  });

  fs::create_directories(cfg.out_dir);
  const std::string row_file = (fs::path(cfg.out_dir) / "rows.csv").string();
  std::ofstream out(row_file, std::ios::binary);
  if (!out) throw ConfigError("cannot write row file: " + row_file);
  write_record_header(out);
  RunResult result;
  result.row_file = row_file;
  for (const auto& rows : results) {
    for (const auto& row : rows) {
      write_record(out, row);
      ++result.rows_written;
    }
  }
  out.flush();
  result.rows_failed = failed.load();

  if (result.rows_written > result.rows_failed) {
    report(row_file, cfg.out_dir);
  }
  return result;
}

template <typename T>
std::optional<double> mean_of(const std::vector<T>& values) {
  if (values.empty()) return std::nullopt;
  double sum = 0.0;
  for (const auto v : values) sum += static_cast<double>(v);
  return sum / static_cast<double>(values.size());
}

std::string sanitize(std::string name) {
  for (char& c : name) {
    if (!std::isalnum(static_cast<unsigned char>(c))) c = '-';
  }
  return name;
}

}  // namespace

std::vector<std::string> load_prompts(const std::string& path) {
  std::vector<std::string> prompts;
  for (auto& line : read_lines(path)) {
    if (!line.empty()) prompts.push_back(std::move(line));
  }
  if (prompts.empty()) {
    throw ConfigError("prompt file has no prompts: " + path);
  }
  return prompts;
}

RunResult run_benign(const ExperimentConfig& config) {
  return run_tasks(config, RunKind::benign);
}
RunResult run_attack(const ExperimentConfig& config) {
  return run_tasks(config, RunKind::attack);
}
RunResult run_layered(const ExperimentConfig& config) {
  return run_tasks(config, RunKind::layered);
}
RunResult run_ablation(const ExperimentConfig& config) {
  return run_tasks(config, RunKind::ablation);
}

RunSummary report(const std::string& row_file, const std::string& out_dir) {
  std::ifstream in(row_file, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open row file: " + row_file);
  const auto records = read_records(in);

  RunSummary summary;
  summary.total_rows = records.size();

  struct CellAccum {
    std::size_t wm = 0, base = 0, failed = 0;
    std::size_t wm_hits = 0, base_hits = 0;
    std::size_t wm_benign_n = 0, wm_benign_hits = 0;
    std::size_t base_benign_n = 0, base_benign_hits = 0;
    std::vector<double> rouge1, rouge2, rougel, ppl_wm, ppl_plain, q, sts;
  };
  using CellKey =
      std::tuple<std::string, std::uint64_t, std::string, std::string>;
  std::map<CellKey, CellAccum> cells;

  struct HistAccum {
    std::vector<double> wm, base;
  };
  std::map<std::pair<std::string, std::string>, HistAccum> hists;

  for (const auto& r : records) {
    CellAccum& cell = cells[{r.method, r.length, r.condition, r.arm}];
    if (!r.error.empty()) {
      ++cell.failed;
      ++summary.failed_rows;
      continue;
    }
    if (r.watermarked) {
      ++cell.wm;
      if (r.rtt_detected) ++cell.wm_hits;
      if (r.benign_detected.has_value()) {
        ++cell.wm_benign_n;
        if (*r.benign_detected) ++cell.wm_benign_hits;
      }
      if (r.rouge1) cell.rouge1.push_back(*r.rouge1);
      if (r.rouge2) cell.rouge2.push_back(*r.rouge2);
      if (r.rougel) cell.rougel.push_back(*r.rougel);
      if (r.ppl_wm) cell.ppl_wm.push_back(*r.ppl_wm);
      if (r.ppl_plain) cell.ppl_plain.push_back(*r.ppl_plain);
      if (r.q_score) cell.q.push_back(*r.q_score);
      if (r.sts_score) cell.sts.push_back(*r.sts_score);
    } else {
      ++cell.base;
      if (r.rtt_detected) ++cell.base_hits;
      if (r.benign_detected.has_value()) {
        ++cell.base_benign_n;
        if (*r.benign_detected) ++cell.base_benign_hits;
      }
    }

    // Score histograms: z for kgw rows, p for exp rows.
    std::optional<double> score;
    if (r.method == "kgw") {
      score = r.z;
    } else if (r.method == "exp") {
      score = r.p;
    }
    if (score) {
      HistAccum& h = hists[{r.method, r.condition}];
      (r.watermarked ? h.wm : h.base).push_back(*score);
    }
  }

  for (const auto& [key, acc] : cells) {
    SummaryCell cell;
    std::tie(cell.method, cell.length, cell.condition, cell.arm) = key;
    cell.wm_rows = acc.wm;
    cell.baseline_rows = acc.base;
    cell.failed_rows = acc.failed;
    if (acc.wm > 0) {
      cell.accuracy = double(acc.wm_hits) / double(acc.wm);
    }
    if (acc.wm_benign_n > 0) {
      cell.benign_accuracy = double(acc.wm_benign_hits) / double(acc.wm_benign_n);
    }
    if (acc.base > 0) {
      cell.fpr = double(acc.base_hits) / double(acc.base);
    }
    if (acc.base_benign_n > 0) {
      cell.benign_fpr = double(acc.base_benign_hits) / double(acc.base_benign_n);
    }
    cell.mean_rouge1 = mean_of(acc.rouge1);
    cell.mean_rouge2 = mean_of(acc.rouge2);
    cell.mean_rougel = mean_of(acc.rougel);
    cell.mean_ppl_wm = mean_of(acc.ppl_wm);
    cell.mean_ppl_plain = mean_of(acc.ppl_plain);
    cell.mean_q = mean_of(acc.q);
    cell.mean_sts = mean_of(acc.sts);
    summary.cells.push_back(std::move(cell));
  }

  fs::create_directories(out_dir);

  for (const auto& [key, h] : hists) {
    if (h.wm.empty() || h.base.empty()) continue;
    double lo = h.wm.front(), hi = h.wm.front();
    for (const double v : h.wm) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    for (const double v : h.base) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    const auto& [method, condition] = key;
    const auto wm_hist = histogram_range(h.wm, 20, lo, hi,
                                         {method, condition, true});
    const auto base_hist = histogram_range(h.base, 20, lo, hi,
                                           {method, condition, false});
    summary.overlaps.push_back(
        {method, condition, overlap_coefficient(wm_hist, base_hist)});

    for (const auto* hist : {&wm_hist, &base_hist}) {
      const std::string name = "hist_" + sanitize(method) + "_" +
                               sanitize(condition) + "_" +
                               (hist->tags.watermarked ? "wm" : "plain") +
                               ".csv";
      const std::string path = (fs::path(out_dir) / name).string();
      std::ofstream out(path, std::ios::binary);
      const std::vector<std::string> header = {"bin_left",  "bin_right",
                                               "count",     "method",
                                               "condition", "watermarked"};
      write_csv_row(out, header);
      for (std::size_t i = 0; i < hist->counts.size(); ++i) {
        const std::vector<std::string> fields = {
            format_double(hist->edges[i]),
            format_double(hist->edges[i + 1]),
            std::to_string(hist->counts[i]),
            hist->tags.method,
            hist->tags.condition,
            format_bool(hist->tags.watermarked),
        };
        write_csv_row(out, fields);
      }
      summary.histogram_files.push_back(path);
    }
  }

  {
    const std::string path = (fs::path(out_dir) / "summary.csv").string();
    std::ofstream out(path, std::ios::binary);
    const std::vector<std::string> header = {
        "method",      "length",        "condition",    "arm",
        "wm_rows",     "baseline_rows", "failed_rows",  "accuracy",
        "benign_accuracy", "fpr",       "benign_fpr",   "mean_rouge1",
        "mean_rouge2", "mean_rougel",   "mean_ppl_wm",  "mean_ppl_plain",
        "mean_q",      "mean_sts",
    };
    write_csv_row(out, header);
    for (const auto& c : summary.cells) {
      const std::vector<std::string> fields = {
          c.method,
          std::to_string(c.length),
          c.condition,
          c.arm,
          std::to_string(c.wm_rows),
          std::to_string(c.baseline_rows),
          std::to_string(c.failed_rows),
          format_optional_double(c.accuracy),
          format_optional_double(c.benign_accuracy),
          format_optional_double(c.fpr),
          format_optional_double(c.benign_fpr),
          format_optional_double(c.mean_rouge1),
          format_optional_double(c.mean_rouge2),
          format_optional_double(c.mean_rougel),
          format_optional_double(c.mean_ppl_wm),
          format_optional_double(c.mean_ppl_plain),
          format_optional_double(c.mean_q),
          format_optional_double(c.mean_sts),
      };
      write_csv_row(out, fields);
    }
  }
  {
    const std::string path = (fs::path(out_dir) / "overlaps.csv").string();
    std::ofstream out(path, std::ios::binary);
    const std::vector<std::string> header = {"method", "condition", "overlap"};
    write_csv_row(out, header);
    for (const auto& o : summary.overlaps) {
      const std::vector<std::string> fields = {o.method, o.condition,
                                               format_double(o.overlap)};
      write_csv_row(out, fields);
    }
  }
  return summary;
}

}  // namespace wmlab
