#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "seqtab/adam.hpp"
#include "seqtab/corpus_io.hpp"
#include "seqtab/model.hpp"

namespace seqtab {

struct TrainConfig {
  int epochs = 100;
  ModelConfig model;
  AdamConfig adam;
  uint64_t seed = 1;
  bool teacher_forcing = true;
  double dev_fraction = 0.2;
  std::filesystem::path checkpoint_dir;  // empty: keep the best model in memory only
  bool clip_gradients = false;
  double clip_norm = 5.0;

  // Throws std::invalid_argument describing the first bad field.
  void validate() const;
  static TrainConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0;
  double dev_accuracy = 0;
  double seconds = 0;
  nlohmann::json to_json() const;
};

struct TrainResult {
  ModelParams<float> best;
  int best_epoch = 0;
  double best_dev_accuracy = -1;
  std::vector<EpochRecord> log;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

// Splits dev off by table, then trains. The corpus needs >= 2 tables.
TrainResult train(const CorpusSplit& corpus, const TrainConfig& config, const EpochCallback& on_epoch = {});
// Trains on train, selects on dev. With a checkpoint_dir, writes best.ckpt
// there on every improvement and appends JSON lines to train_log.jsonl.
TrainResult train(const CorpusSplit& train, const CorpusSplit& dev, const TrainConfig& config,
                  const EpochCallback& on_epoch = {});

// Mean loss of one pass of per-sequence updates; the sequences are visited
// in the given order.
double train_epoch(const CorpusSplit& corpus, const std::vector<size_t>& order, ModelParams<float>& params,
                   AdamState<float>& adam, const TrainConfig& config, int epoch);

double dev_accuracy(const CorpusSplit& dev, ModelParams<float>& params);

struct OverfitReport {
  std::vector<double> losses;  // mean loss per epoch, measured before the epoch's updates
  double final_loss = 0;
  bool decreasing_tail = false;  // non-increasing over the trailing 10 epochs
  bool passed = false;
  std::string message;
};

// Trains on a slice of at most 5 sequences with no dev split.
OverfitReport overfit_check(const CorpusSplit& slice, const TrainConfig& config, double target_loss = 0.05);

}  // namespace seqtab
