// Command-line front end: corpus generation and validation, the primitive
// parser, rewriting policy studies, evaluation, training and serving.

#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "httplib.h"
#include "json.hpp"
#include "seqtab/corpus_io.hpp"
#include "seqtab/evaluation.hpp"
#include "seqtab/model.hpp"
#include "seqtab/parser.hpp"
#include "seqtab/rewriting.hpp"
#include "seqtab/service.hpp"
#include "seqtab/synthetic.hpp"
#include "seqtab/trainer.hpp"

namespace fs = std::filesystem;
using namespace seqtab;

namespace {

nlohmann::json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open " + path.string());
  return nlohmann::json::parse(in);
}

void write_text(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw LoadError("cannot write " + path.string());
  out << content;
}

int cmd_gen(const fs::path& spec_path, const fs::path& out_dir) {
  const SyntheticSpec spec = spec_path.empty() ? SyntheticSpec{} : SyntheticSpec::from_json(read_json(spec_path));
  const SyntheticCorpus syn = generate_synthetic(spec);
  fs::create_directories(out_dir);
  save_corpus(syn.corpus, out_dir / "corpus.tsv", out_dir);
  write_text(out_dir / "provenance.tsv", format_provenance(syn));
  write_text(out_dir / "spec.json", spec.to_json().dump(2) + "\n");
  std::cout << "wrote " << syn.corpus.sequences.size() << " sequences, " << syn.corpus.n_questions()
            << " questions, " << syn.corpus.tables.size() << " tables to " << out_dir.string() << "\n";
  return 0;
}

int cmd_validate(const fs::path& corpus, const fs::path& tables) {
  const CorpusSplit split = load_corpus(corpus, tables);
  const ClassDistribution dist = class_distribution(split.sequences, split.tables);
  std::cout << "sequences\t" << split.sequences.size() << "\n";
  std::cout << "questions\t" << split.n_questions() << "\n";
  std::cout << "tables\t" << split.tables.size() << "\n";
  for (QuestionClass qc : kAllClasses) std::cout << to_string(qc) << "\t" << dist.fraction(qc) << "\n";
  if (!dist.per_position.empty()) {
    std::cout << "SELECT_COLUMN at position 1\t" << dist.fraction_at(1, QuestionClass::kSelectColumn) << "\n";
  }
  return 0;
}

int cmd_parse(const std::string& question, const fs::path& table_path, const std::string& prev, size_t beam,
              int cap) {
  const Table table = load_table_csv(table_path, table_path.filename().string());
  std::optional<AnswerCoordinates> previous;
  if (!prev.empty()) {
    previous = parse_coordinates(prev);
    table.check_bounds(*previous);
  }
  const CandidateSet set = generate_candidates(question, table, previous ? &*previous : nullptr, beam,
                                               cap > 0 ? std::optional<size_t>(static_cast<size_t>(cap)) : std::nullopt);
  int rank = 1;
  for (const auto& c : set.candidates) {
    std::printf("%3d  %.4f  %-32s  %s\n", rank++, c.score, to_string(c.form).c_str(),
                c.denotation ? format_coordinates(*c.denotation).c_str() : "(empty)");
  }
  const ParseResult best = parse(set, question, table);
  std::cout << "answer\t" << to_string(best.form) << "\t" << format_coordinates(best.answer) << "\n";
  return 0;
}

int cmd_policy_study(const fs::path& corpus, const fs::path& tables, const std::string& policy, const fs::path& report,
                     size_t beam, int cap) {
  const CorpusSplit split = load_corpus(corpus, tables, "dev");
  const TableParser parser =
      primitive_parser(beam, cap > 0 ? std::optional<size_t>(static_cast<size_t>(cap)) : std::nullopt);
  std::vector<RewritePolicy> policies;
  if (policy == "all") {
    policies.assign(kAllPolicies.begin(), kAllPolicies.end());
  } else {
    policies.push_back(rewrite_policy_from_string(policy));
  }
  nlohmann::json out = nlohmann::json::object();
  for (RewritePolicy p : policies) {
    const PolicyResult r = run_policy(split, parser, p, true);
    out[to_string(p)] = to_json(r);
    std::printf("%-12s accuracy %.4f  oracle %.4f  rewritten %zu/%zu\n", to_string(p).c_str(), r.accuracy, r.oracle,
                r.n_rewritten, r.n_questions);
  }
  if (!report.empty()) write_text(report, out.dump(2) + "\n");
  return 0;
}

int cmd_eval(const fs::path& pred, const fs::path& corpus, const fs::path& tables, const fs::path& out,
             const fs::path& tsv) {
  const CorpusSplit split = load_corpus(corpus, tables, "test");
  const EvalReport r = score(load_predictions(pred), split);
  std::cout << format_report_tsv(r);
  if (!out.empty()) write_text(out, to_json(r).dump(2) + "\n");
  if (!tsv.empty()) write_text(tsv, format_report_tsv(r));
  return 0;
}

int cmd_train(const fs::path& corpus, const fs::path& tables, const fs::path& config_path, const fs::path& out) {
  const CorpusSplit split = load_corpus(corpus, tables);
  TrainConfig config = config_path.empty() ? TrainConfig{} : TrainConfig::from_json(read_json(config_path));
  config.checkpoint_dir = out;
  const TrainResult r = train(split, config, [](const EpochRecord& e) {
    std::printf("epoch %3d  loss %.5f  dev %.4f  (%.1fs)\n", e.epoch, e.train_loss, e.dev_accuracy, e.seconds);
    std::fflush(stdout);
  });
  std::cout << "best epoch " << r.best_epoch << " dev accuracy " << r.best_dev_accuracy << "; checkpoint "
            << (out / "best.ckpt").string() << "\n";
  return 0;
}

int cmd_predict(const fs::path& corpus, const fs::path& tables, const fs::path& checkpoint, const fs::path& out) {
  const CorpusSplit split = load_corpus(corpus, tables, "test");
  ModelParams<float> params = ModelParams<float>::load(checkpoint);
  const PredictionMap preds = to_prediction_map(predict_corpus(split, params), split);
  const std::string tsv = format_predictions_tsv(preds, split);
  if (out.empty()) {
    std::cout << tsv;
  } else {
    write_text(out, tsv);
  }
  const EvalReport r = score(preds, split);
  std::cerr << "accuracy " << r.overall_accuracy << " over " << r.n_questions << " questions\n";
  return 0;
}

httplib::Server* g_server = nullptr;

int cmd_serve(const fs::path& tables, const fs::path& checkpoint, const std::string& host, int port,
              const fs::path& static_dir, const fs::path& transcript) {
  ServiceOptions options;
  options.default_checkpoint = checkpoint;
  options.transcript = transcript;
  QaService service(load_tables_dir(tables), options);
  httplib::Server server;
  service.mount(server, static_dir);
  g_server = &server;
  std::signal(SIGINT, [](int) {
    if (g_server) g_server->stop();
  });
  std::cout << "listening on http://" << host << ":" << port << "\n" << std::flush;
  if (!server.listen(host, port)) {
    std::cerr << "error: cannot listen on " << host << ":" << port << "\n";
    return 1;
  }
  return 0;
}

int cmd_replay(const fs::path& tables, const fs::path& checkpoint, const fs::path& transcript) {
  ServiceOptions options;
  options.default_checkpoint = checkpoint;
  QaService service(load_tables_dir(tables), options);
  const ReplayReport r = replay_transcript(service, read_transcript(transcript));
  for (const auto& m : r.mismatches) std::cout << "mismatch: " << m << "\n";
  std::cout << r.n_asks << " answers replayed, " << r.n_mismatches << " mismatches\n";
  return r.n_mismatches == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sequential question answering over tables"};
  app.require_subcommand(1);

  fs::path spec, out_dir;
  auto* gen = app.add_subcommand("gen", "Generate a synthetic corpus");
  gen->add_option("--spec", spec, "Synthetic spec JSON");
  gen->add_option("--out", out_dir, "Output directory")->required();

  fs::path corpus, tables;
  auto* validate = app.add_subcommand("validate", "Load and validate a corpus");
  validate->add_option("--corpus", corpus, "Corpus TSV")->required();
  validate->add_option("--tables", tables, "Tables directory")->required();

  std::string question, prev;
  fs::path table_path;
  size_t beam = kDefaultBeam;
  int cap = 0;
  auto* parse_cmd = app.add_subcommand("parse", "Rank candidate logical forms for one question");
  parse_cmd->add_option("--question", question, "Question text")->required();
  parse_cmd->add_option("--table", table_path, "Table CSV")->required();
  parse_cmd->add_option("--prev", prev, "Previous answer coordinates, e.g. \"['(0, 1)']\"");
  parse_cmd->add_option("--beam", beam, "Beam size");
  parse_cmd->add_option("--cap", cap, "Denotation size cap (0 = none)");

  std::string policy = "all";
  fs::path report;
  auto* study = app.add_subcommand("policy-study", "Compare table rewriting policies with the primitive parser");
  study->add_option("--corpus", corpus, "Corpus TSV")->required();
  study->add_option("--tables", tables, "Tables directory")->required();
  study->add_option("--policy", policy, "never|always|row_subset|reference|upper_bound|all");
  study->add_option("--report", report, "JSON report path");
  study->add_option("--beam", beam, "Beam size");
  study->add_option("--cap", cap, "Denotation size cap (0 = none)");

  fs::path pred, tsv_out;
  auto* eval = app.add_subcommand("eval", "Score predictions against a corpus");
  eval->add_option("--pred", pred, "Prediction TSV")->required();
  eval->add_option("--corpus", corpus, "Corpus TSV")->required();
  eval->add_option("--tables", tables, "Tables directory")->required();
  eval->add_option("--out", out_dir, "JSON report path");
  eval->add_option("--tsv", tsv_out, "TSV report path");

  fs::path config;
  auto* train_cmd = app.add_subcommand("train", "Train the neural model");
  train_cmd->add_option("--corpus", corpus, "Corpus TSV")->required();
  train_cmd->add_option("--tables", tables, "Tables directory")->required();
  train_cmd->add_option("--config", config, "Training config JSON");
  train_cmd->add_option("--out", out_dir, "Checkpoint directory")->required();

  fs::path checkpoint;
  auto* predict_cmd = app.add_subcommand("predict", "Answer a corpus with a trained checkpoint");
  predict_cmd->add_option("--corpus", corpus, "Corpus TSV")->required();
  predict_cmd->add_option("--tables", tables, "Tables directory")->required();
  predict_cmd->add_option("--checkpoint", checkpoint, "Checkpoint file")->required();
  predict_cmd->add_option("--out", out_dir, "Prediction TSV (default stdout)");

  std::string host = "127.0.0.1";
  int port = 8080;
  fs::path static_dir, transcript;
  auto* serve = app.add_subcommand("serve", "Run the HTTP session service");
  serve->add_option("--tables", tables, "Tables directory")->required();
  serve->add_option("--checkpoint", checkpoint, "Checkpoint for neural sessions");
  serve->add_option("--host", host, "Bind address");
  serve->add_option("--port", port, "Port");
  serve->add_option("--static", static_dir, "UI bundle directory served at /");
  serve->add_option("--transcript", transcript, "Append a JSON-lines transcript here");

  auto* replay = app.add_subcommand("replay", "Replay a transcript against a fresh service");
  replay->add_option("--tables", tables, "Tables directory")->required();
  replay->add_option("--checkpoint", checkpoint, "Checkpoint for neural sessions");
  replay->add_option("--transcript", transcript, "Transcript JSON lines")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) return cmd_gen(spec, out_dir);
    if (*validate) return cmd_validate(corpus, tables);
    if (*parse_cmd) return cmd_parse(question, table_path, prev, beam, cap);
    if (*study) return cmd_policy_study(corpus, tables, policy, report, beam, cap);
    if (*eval) return cmd_eval(pred, corpus, tables, out_dir, tsv_out);
    if (*train_cmd) return cmd_train(corpus, tables, config, out_dir);
    if (*predict_cmd) return cmd_predict(corpus, tables, checkpoint, out_dir);
    if (*serve) return cmd_serve(tables, checkpoint, host, port, static_dir, transcript);
    if (*replay) return cmd_replay(tables, checkpoint, transcript);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
