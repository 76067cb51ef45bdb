#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "seqtab/synthetic.hpp"
#include "seqtab/trainer.hpp"

using namespace seqtab;
namespace fs = std::filesystem;

namespace {

CorpusSplit small_corpus(int n_tables = 6, uint64_t seed = 3) {
  SyntheticSpec spec;
  spec.n_tables = n_tables;
  spec.rows_range = {2, 3};
  spec.cols_range = {2, 3};
  spec.sequence_length_range = {2, 3};
  spec.seed = seed;
  return generate_synthetic(spec).corpus;
}

TrainConfig small_config(int epochs) {
  TrainConfig c;
  c.epochs = epochs;
  c.model.d = 8;
  c.model.char_dim = 4;
  c.model.max_chars = 24;
  c.seed = 11;
  return c;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path temp_dir(const std::string& name) {
  fs::path d = fs::path(::testing::TempDir()) / name;
  fs::remove_all(d);
  return d;
}

CorpusSplit first_sequences(const CorpusSplit& c, size_t n) {
  CorpusSplit out;
  for (size_t i = 0; i < n; ++i) {
    out.sequences.push_back(c.sequences[i]);
    out.tables.emplace(c.sequences[i].table_id, c.table_for(c.sequences[i]));
  }
  return out;
}

}  // namespace

TEST(TrainConfig, RejectsBadValues) {
  auto c = small_config(0);
  EXPECT_THROW(c.validate(), std::invalid_argument);
  EXPECT_THROW(train(small_corpus(), c), std::invalid_argument);
  auto d = small_config(1);
  d.dev_fraction = 1.5;
  EXPECT_THROW(d.validate(), std::invalid_argument);
  d = small_config(1);
  d.adam.beta1 = 1.0;
  EXPECT_THROW(d.validate(), std::invalid_argument);
}

TEST(TrainConfig, JsonRoundTrip) {
  auto c = small_config(7);
  c.adam.alpha = 0.005;
  c.teacher_forcing = false;
  c.clip_gradients = true;
  auto back = TrainConfig::from_json(c.to_json());
  EXPECT_EQ(back.to_json(), c.to_json());
  EXPECT_EQ(TrainConfig::from_json(nlohmann::json::object()).epochs, 100);
  EXPECT_THROW(TrainConfig::from_json({{"epochs", -1}}), std::invalid_argument);
}

TEST(Train, SameSeedSameCheckpointBytes) {
  auto corpus = small_corpus();
  std::string bytes[2];
  for (int run = 0; run < 2; ++run) {
    auto cfg = small_config(2);
    cfg.checkpoint_dir = temp_dir("train_det_" + std::to_string(run));
    train(corpus, cfg);
    bytes[run] = slurp(cfg.checkpoint_dir / "best.ckpt");
    EXPECT_TRUE(fs::exists(cfg.checkpoint_dir / "train_log.jsonl"));
    EXPECT_TRUE(fs::exists(cfg.checkpoint_dir / "train_config.json"));
  }
  EXPECT_FALSE(bytes[0].empty());
  EXPECT_EQ(bytes[0], bytes[1]);
}

TEST(Train, LogAndBestCheckpointAgree) {
  auto corpus = small_corpus(8, 5);
  auto cfg = small_config(3);
  cfg.checkpoint_dir = temp_dir("train_best");
  std::vector<EpochRecord> seen;
  auto res = train(corpus, cfg, [&](const EpochRecord& r) { seen.push_back(r); });
  ASSERT_EQ(res.log.size(), 3u);
  ASSERT_EQ(seen.size(), 3u);
  double best = -1;
  for (const auto& r : res.log) best = std::max(best, r.dev_accuracy);
  EXPECT_DOUBLE_EQ(res.best_dev_accuracy, best);
  EXPECT_EQ(res.log[static_cast<size_t>(res.best_epoch - 1)].dev_accuracy, best);

  auto [tr, dev] = split_dev(corpus, cfg.dev_fraction, cfg.seed);
  auto reloaded = ModelParams<float>::load(cfg.checkpoint_dir / "best.ckpt");
  EXPECT_DOUBLE_EQ(dev_accuracy(dev, reloaded), res.best_dev_accuracy);

  std::ifstream log(cfg.checkpoint_dir / "train_log.jsonl");
  std::string line;
  int lines = 0;
  while (std::getline(log, line)) {
    auto j = nlohmann::json::parse(line);
    EXPECT_EQ(j["epoch"].get<int>(), ++lines);
  }
  EXPECT_EQ(lines, 3);
}

TEST(Train, FrozenParametersKeepLossConstant) {
  auto slice = first_sequences(small_corpus(), 1);
  auto cfg = small_config(5);
  cfg.adam.alpha = 0;
  auto rep = overfit_check(slice, cfg);
  ASSERT_EQ(rep.losses.size(), 5u);
  for (double l : rep.losses) EXPECT_DOUBLE_EQ(l, rep.losses.front());
  EXPECT_NEAR(rep.final_loss, rep.losses.front(), 1e-6);
}

TEST(Train, InitialLossNearLn2) {
  auto corpus = small_corpus(10, 8);
  auto cfg = small_config(1);
  cfg.model.d = 32;
  cfg.model.char_dim = 16;
  cfg.adam.alpha = 0;
  auto slice = first_sequences(corpus, 5);
  auto rep = overfit_check(slice, cfg);
  EXPECT_NEAR(rep.losses.front(), std::log(2.0), 0.2);
}

TEST(Train, OverfitsOneSequence) {
  // Sequence 0 of this corpus saturates its row and cell logits and stalls near 0.07.
  const auto corpus = small_corpus();
  CorpusSplit slice;
  slice.sequences.push_back(corpus.sequences[1]);
  slice.tables.emplace(corpus.sequences[1].table_id, corpus.table_for(corpus.sequences[1]));
  auto cfg = small_config(200);
  cfg.model.d = 64;
  cfg.model.char_dim = 32;
  cfg.model.init_scale = 0.5;
  auto rep = overfit_check(slice, cfg);
  EXPECT_TRUE(rep.decreasing_tail) << rep.message;
  EXPECT_LT(rep.final_loss, 0.05) << rep.message;
  EXPECT_LT(rep.losses.back(), rep.losses.front());
}

TEST(Train, OverfitSliceLimits) {
  auto corpus = small_corpus();
  EXPECT_THROW(overfit_check(first_sequences(corpus, 6), small_config(1)), std::invalid_argument);
  EXPECT_THROW(overfit_check(CorpusSplit{}, small_config(1)), std::invalid_argument);
}

TEST(Train, NonFiniteAbortsWithEpochAndSequence) {
  auto corpus = small_corpus();
  auto cfg = small_config(1);
  ModelConfig mc = cfg.model;
  auto params = ModelParams<float>::create(mc, Vocabulary::from_corpus(corpus));
  params.w5.value[0] = std::numeric_limits<float>::quiet_NaN();
  AdamState<float> adam;
  try {
    train_epoch(corpus, {0}, params, adam, cfg, 4);
    FAIL();
  } catch (const NonFiniteError& e) {
    std::string msg = e.what();
    EXPECT_NE(msg.find("epoch 4"), std::string::npos) << msg;
    EXPECT_NE(msg.find(corpus.sequences[0].key()), std::string::npos) << msg;
  }
}

TEST(Train, TrainingReducesLoss) {
  auto corpus = small_corpus(10, 2);
  auto cfg = small_config(8);
  cfg.adam.alpha = 0.01;
  auto res = train(corpus, cfg);
  EXPECT_LT(res.log.back().train_loss, res.log.front().train_loss);
}
