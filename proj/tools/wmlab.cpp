// wmlab — batch watermarking experiments and single-text detection.
//
// Subcommands: generate, attack, layered, ablate, report, detect.
// Exit codes: 0 success, 1 configuration error, 2 run finished but some
// rows failed.

#include <CLI11.hpp>

#include "wmlab/config.hpp"
#include "wmlab/exp.hpp"
#include "wmlab/kgw.hpp"
#include "wmlab/pipeline.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

struct CommonFlags {
  std::string config_path;
  std::string method;
  std::uint64_t length = 0;
  std::string attack;
  std::int64_t seed = -1;
  std::string out;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "Config file (key=value)")
      ->required();
  cmd->add_option("--method", flags.method, "Override: kgw or exp");
  cmd->add_option("--length", flags.length, "Override: generation length");
  cmd->add_option("--attack", flags.attack,
                  "Override: attack preset (null|mild|rtt-like|severe)");
  cmd->add_option("--seed", flags.seed, "Override: run seed");
  cmd->add_option("--out", flags.out, "Override: output directory");
}

wmlab::ExperimentConfig resolve(const CommonFlags& flags) {
  wmlab::Config cfg = wmlab::Config::load_file(flags.config_path);
  if (!flags.method.empty()) cfg.set("method", flags.method);
  if (flags.length > 0) cfg.set("lengths", std::to_string(flags.length));
  if (!flags.attack.empty()) cfg.set("attack.preset", flags.attack);
  if (flags.seed >= 0) cfg.set("seed", std::to_string(flags.seed));
  if (!flags.out.empty()) cfg.set("out", flags.out);
  return wmlab::experiment_config(cfg);
}

int finish_run(const wmlab::RunResult& result) {
  std::cout << "rows: " << result.rows_written
            << "  failed: " << result.rows_failed << "  -> "
            << result.row_file << "\n";
  return result.rows_failed > 0 ? 2 : 0;
}

int run_detect(const CommonFlags& flags) {
  const auto cfg = resolve(flags);
  const std::string method =
      flags.method.empty() ? cfg.methods.front() : flags.method;

  // Detection needs the vocabulary only; build it the same way the
  // pipeline does.
  wmlab::Vocabulary vocab;
  if (cfg.vocab_file) {
    std::ifstream in(*cfg.vocab_file);
    if (!in) throw wmlab::ConfigError("cannot open vocab file");
    vocab = wmlab::load_vocab(in);
  } else if (!cfg.lm_corpus_path.empty()) {
    std::ifstream in(cfg.lm_corpus_path);
    if (!in) throw wmlab::ConfigError("cannot open corpus file");
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    vocab = wmlab::build_vocab(lines, cfg.vocab_max_size);
  } else {
    throw wmlab::ConfigError("detect needs vocab.file or lm.corpus");
  }

  std::ostringstream buf;
  buf << std::cin.rdbuf();
  const wmlab::TokenSequence tokens = wmlab::encode(buf.str(), vocab);

  if (method == "kgw") {
    const auto d = wmlab::detect_kgw(tokens, cfg.kgw, vocab.size());
    std::cout << "method=kgw T=" << d.scored << " G=" << d.green
              << " z=" << d.z << " p=" << d.p
              << (d.abstained ? " abstained"
                              : (d.detected ? " DETECTED" : " not-detected"))
              << "\n";
  } else {
    const auto d = wmlab::exp_detect(tokens, cfg.exp);
    std::cout << "method=exp T=" << d.scored << " S=" << d.score_sum
              << " p=" << d.p
              << (d.abstained ? " abstained"
                              : (d.detected ? " DETECTED" : " not-detected"))
              << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"watermark experiment toolkit"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::string report_rows;
  std::string report_out = "out";

  auto* generate = app.add_subcommand("generate", "benign pairs, no channel");
  add_common(generate, flags);
  auto* attack = app.add_subcommand("attack", "pairs through the channel");
  add_common(attack, flags);
  auto* layered = app.add_subcommand("layered", "layered watermarking run");
  add_common(layered, flags);
  auto* ablate = app.add_subcommand("ablate", "primary/secondary/layered arms");
  add_common(ablate, flags);
  auto* detect = app.add_subcommand("detect", "detect watermark on stdin text");
  add_common(detect, flags);
  auto* report = app.add_subcommand("report", "aggregate an existing row file");
  report->add_option("rows", report_rows, "rows.csv produced by a run")
      ->required();
  report->add_option("--out", report_out, "output directory for summaries");

  CLI11_PARSE(app, argc, argv);

  try {
    if (generate->parsed()) return finish_run(wmlab::run_benign(resolve(flags)));
    if (attack->parsed()) return finish_run(wmlab::run_attack(resolve(flags)));
    if (layered->parsed()) return finish_run(wmlab::run_layered(resolve(flags)));
    if (ablate->parsed()) return finish_run(wmlab::run_ablation(resolve(flags)));
    if (detect->parsed()) return run_detect(flags);
    if (report->parsed()) {
      const auto summary = wmlab::report(report_rows, report_out);
      std::cout << "rows: " << summary.total_rows
                << "  failed: " << summary.failed_rows << "  cells: "
                << summary.cells.size() << "  -> " << report_out << "\n";
      return 0;
    }
  } catch (const wmlab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
