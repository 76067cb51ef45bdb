#include "seqtab/trainer.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>

#include "seqtab/evaluation.hpp"

namespace seqtab {

void TrainConfig::validate() const {
  if (epochs < 1) throw std::invalid_argument("epochs must be >= 1, got " + std::to_string(epochs));
  if (!(dev_fraction > 0.0 && dev_fraction < 1.0)) {
    throw std::invalid_argument("dev_fraction must be in (0, 1), got " + std::to_string(dev_fraction));
  }
  if (model.d < 1 || model.char_dim < 1 || model.max_chars < 1) {
    throw std::invalid_argument("model dimensions must be positive");
  }
  if (adam.alpha < 0 || adam.beta1 < 0 || adam.beta1 >= 1 || adam.beta2 < 0 || adam.beta2 >= 1 ||
      adam.epsilon <= 0) {
    throw std::invalid_argument("invalid Adam hyperparameters");
  }
  if (clip_gradients && !(clip_norm > 0)) throw std::invalid_argument("clip_norm must be positive");
}

TrainConfig TrainConfig::from_json(const nlohmann::json& j) {
  TrainConfig c;
  c.epochs = j.value("epochs", c.epochs);
  c.model.d = j.value("d", c.model.d);
  c.model.char_dim = j.value("char_dim", c.model.char_dim);
  c.model.max_chars = j.value("max_chars", c.model.max_chars);
  c.model.init_scale = j.value("init_scale", c.model.init_scale);
  c.adam.alpha = j.value("alpha", c.adam.alpha);
  c.adam.beta1 = j.value("beta1", c.adam.beta1);
  c.adam.beta2 = j.value("beta2", c.adam.beta2);
  c.adam.epsilon = j.value("epsilon", c.adam.epsilon);
  c.seed = j.value("seed", c.seed);
  c.model.seed = c.seed;
  c.teacher_forcing = j.value("teacher_forcing", c.teacher_forcing);
  c.dev_fraction = j.value("dev_fraction", c.dev_fraction);
  c.checkpoint_dir = j.value("checkpoint_dir", std::string());
  c.clip_gradients = j.value("clip_gradients", c.clip_gradients);
  c.clip_norm = j.value("clip_norm", c.clip_norm);
  c.validate();
  return c;
}

nlohmann::json TrainConfig::to_json() const {
  return {{"epochs", epochs},
          {"d", model.d},
          {"char_dim", model.char_dim},
          {"max_chars", model.max_chars},
          {"init_scale", model.init_scale},
          {"alpha", adam.alpha},
          {"beta1", adam.beta1},
          {"beta2", adam.beta2},
          {"epsilon", adam.epsilon},
          {"seed", seed},
          {"teacher_forcing", teacher_forcing},
          {"dev_fraction", dev_fraction},
          {"checkpoint_dir", checkpoint_dir.string()},
          {"clip_gradients", clip_gradients},
          {"clip_norm", clip_norm}};
}

nlohmann::json EpochRecord::to_json() const {
  return {{"epoch", epoch}, {"train_loss", train_loss}, {"dev_accuracy", dev_accuracy}, {"seconds", seconds}};
}

namespace {

std::vector<size_t> shuffled_order(size_t n, uint64_t seed, int epoch) {
  std::vector<size_t> order(n);
  for (size_t i = 0; i < n; ++i) order[i] = i;
  std::mt19937_64 rng(seed * 1000003ULL + static_cast<uint64_t>(epoch));
  for (size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng() % i]);
  return order;
}

void zero_grads(ModelParams<float>& params) {
  for (auto* p : params.list()) p->zero_grad();
}

}  // namespace

double train_epoch(const CorpusSplit& corpus, const std::vector<size_t>& order, ModelParams<float>& params,
                   AdamState<float>& adam, const TrainConfig& config, int epoch) {
  double total = 0;
  const auto plist = params.list();
  for (size_t idx : order) {
    const QuestionSequence& seq = corpus.sequences.at(idx);
    zero_grads(params);
    Graph<float> g;
    Var<float> loss = sequence_loss(g, seq, corpus.table_for(seq), params, config.teacher_forcing);
    const double value = loss.value().item();
    if (!std::isfinite(value)) {
      throw NonFiniteError("non-finite loss at epoch " + std::to_string(epoch) + ", sequence " + seq.key());
    }
    total += value;
    g.backward(loss);
    if (config.clip_gradients) clip_grad_norm(plist, config.clip_norm);
    try {
      adam_step(plist, adam);
    } catch (const NonFiniteError& e) {
      throw NonFiniteError(std::string(e.what()) + " at epoch " + std::to_string(epoch) + ", sequence " + seq.key());
    }
  }
  return order.empty() ? 0.0 : total / static_cast<double>(order.size());
}

double dev_accuracy(const CorpusSplit& dev, ModelParams<float>& params) {
  return score(predict_corpus(dev, params), dev).overall_accuracy;
}

TrainResult train(const CorpusSplit& corpus, const TrainConfig& config, const EpochCallback& on_epoch) {
  config.validate();
  auto [train_split, dev_split] = split_dev(corpus, config.dev_fraction, config.seed);
  return train(train_split, dev_split, config, on_epoch);
}

TrainResult train(const CorpusSplit& train_split, const CorpusSplit& dev, const TrainConfig& config,
                  const EpochCallback& on_epoch) {
  config.validate();
  if (train_split.sequences.empty()) throw std::invalid_argument("training split has no sequences");
  ModelConfig mc = config.model;
  mc.seed = config.seed;
  ModelParams<float> params = ModelParams<float>::create(mc, Vocabulary::from_corpus(train_split));
  AdamState<float> adam;
  adam.config = config.adam;

  std::ofstream log_file;
  if (!config.checkpoint_dir.empty()) {
    std::filesystem::create_directories(config.checkpoint_dir);
    log_file.open(config.checkpoint_dir / "train_log.jsonl", std::ios::trunc);
    std::ofstream(config.checkpoint_dir / "train_config.json") << config.to_json().dump(2) << "\n";
  }

  TrainResult result;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss =
        train_epoch(train_split, shuffled_order(train_split.sequences.size(), config.seed, epoch), params, adam, config,
                    epoch);
    rec.dev_accuracy = dev.sequences.empty() ? 0.0 : dev_accuracy(dev, params);
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (rec.dev_accuracy > result.best_dev_accuracy) {
      result.best_dev_accuracy = rec.dev_accuracy;
      result.best_epoch = epoch;
      result.best = params;
      if (!config.checkpoint_dir.empty()) params.save(config.checkpoint_dir / "best.ckpt");
    }
    result.log.push_back(rec);
    if (log_file.is_open()) log_file << rec.to_json().dump() << "\n" << std::flush;
    if (on_epoch) on_epoch(rec);
  }
  return result;
}

OverfitReport overfit_check(const CorpusSplit& slice, const TrainConfig& config, double target_loss) {
  config.validate();
  if (slice.sequences.empty() || slice.sequences.size() > 5) {
    throw std::invalid_argument("overfit_check expects 1 to 5 sequences, got " + std::to_string(slice.sequences.size()));
  }
  ModelConfig mc = config.model;
  mc.seed = config.seed;
  ModelParams<float> params = ModelParams<float>::create(mc, Vocabulary::from_corpus(slice));
  AdamState<float> adam;
  adam.config = config.adam;
  OverfitReport report;
  std::vector<size_t> order(slice.sequences.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  try {
    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
      report.losses.push_back(train_epoch(slice, order, params, adam, config, epoch));
    }
  } catch (const NonFiniteError& e) {
    report.message = std::string("diverged: ") + e.what();
    return report;
  }
  // Loss of the final parameters.
  double final_loss = 0;
  for (const auto& seq : slice.sequences) {
    Graph<float> g;
    final_loss += sequence_loss(g, seq, slice.table_for(seq), params, config.teacher_forcing).value().item();
  }
  report.final_loss = final_loss / static_cast<double>(slice.sequences.size());
  const size_t n = report.losses.size();
  const size_t window = std::min<size_t>(10, n);
  report.decreasing_tail = true;
  for (size_t i = n - window + 1; i < n; ++i) {
    if (report.losses[i] > report.losses[i - 1]) report.decreasing_tail = false;
  }
  report.passed = report.decreasing_tail && report.final_loss < target_loss;
  report.message = "final loss " + std::to_string(report.final_loss) +
                   (report.decreasing_tail ? ", decreasing over the last " : ", not decreasing over the last ") +
                   std::to_string(window) + " epochs";
  return report;
}

}  // namespace seqtab
