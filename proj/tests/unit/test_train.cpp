#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

#include "vividet/model/model_check.hpp"
#include "vividet/model/vivit.hpp"
#include "vividet/train/loss.hpp"
#include "vividet/train/optimizer.hpp"
#include "vividet/train/report_io.hpp"
#include "vividet/train/trainer.hpp"

using namespace vividet;
namespace fs = std::filesystem;

namespace {

std::vector<VideoClip> random_dataset(const ModelConfig& cfg, std::size_t per_class, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<VideoClip> clips;
  for (std::size_t i = 0; i < 2 * per_class; ++i) {
    clips.push_back(random_clip(cfg.input, i % 2 ? Label::NonViolent : Label::Violent, rng));
    clips.back().source_id = "c" + std::to_string(i);
  }
  return clips;
}

double batch_loss(const ModelParams<float>& p, const ModelConfig& cfg, const std::vector<VideoClip>& clips,
                  GradMap<float>* grads = nullptr) {
  Tape<float> tape;
  const auto vars = bind_params(tape, p, grads != nullptr);
  std::vector<Var<float>> logits;
  std::vector<std::size_t> labels;
  for (const auto& c : clips) {
    logits.push_back(forward_logits(tape, c, vars, cfg));
    labels.push_back(class_index(c.label));
  }
  const auto loss = ad::cross_entropy(ad::concat_rows<float>(logits), std::span<const std::size_t>(labels));
  if (grads) {
    const auto g = backward(tape, loss);
    const auto leaves = vars.leaves();
    std::size_t i = 0;
    p.visit([&](const std::string& name, const Tensor<float>&) { (*grads)[name] = g[leaves[i++]]; });
  }
  return loss.value().item();
}

TrainConfig quiet_config() {
  TrainConfig c;
  c.batch_size = 2;
  c.epochs = 3;
  c.augment = false;
  c.seed = 5;
  return c;
}

}  // namespace

TEST(CrossEntropy, MatchesDirectFormula) {
  const auto logits = Tensor<double>::from_rows({{2.0, -1.0}, {0.3, 0.3}, {-50.0, 50.0}});
  const std::size_t labels[] = {0, 1, 0};
  double expected = 0;
  for (std::size_t r = 0; r < 3; ++r) {
    const double a = logits.at(r, 0), b = logits.at(r, 1);
    const double m = std::max(a, b);
    expected += m + std::log(std::exp(a - m) + std::exp(b - m)) - logits.at(r, labels[r]);
  }
  EXPECT_NEAR(cross_entropy(logits, std::span<const std::size_t>(labels)), expected / 3, 1e-12);
  const std::size_t bad[] = {0, 2, 0};
  EXPECT_THROW(cross_entropy(logits, std::span<const std::size_t>(bad)), std::out_of_range);
}

TEST(AdamW, FirstStepMovesByLearningRate) {
  const ModelConfig cfg = tiny_model_config();
  ModelParams<float> p = zero_params<float>(cfg);
  p.visit([](const std::string&, Tensor<float>& t) { std::fill(t.data().begin(), t.data().end(), 1.0f); });
  GradMap<float> g = zero_grads(p);
  for (auto& [name, t] : g) std::fill(t.data().begin(), t.data().end(), 1.0f);
  AdamW<float> opt({.learning_rate = 0.1, .weight_decay = 0.0});
  opt.step(p, g);
  EXPECT_EQ(opt.step_count(), 1u);
  const float expected = static_cast<float>(1.0 - 0.1 / (1.0 + 1e-8));
  p.visit([&](const std::string& n, const Tensor<float>& t) {
    for (float v : t.data()) ASSERT_FLOAT_EQ(v, expected) << n;
  });
}

TEST(AdamW, DecoupledDecayShrinks) {
  const ModelConfig cfg = tiny_model_config();
  ModelParams<float> p = init_params<float>(cfg, 3);
  const ModelParams<float> before = p;
  AdamW<float> opt({.learning_rate = 0.01, .weight_decay = 0.5});
  opt.step(p, zero_grads(p));
  for (std::size_t i = 0; i < p.embed.weight.numel(); ++i)
    EXPECT_FLOAT_EQ(p.embed.weight[i], static_cast<float>(before.embed.weight[i] * (1.0 - 0.005)));
}

TEST(AdamW, ScheduleAndValidation) {
  const ModelConfig cfg = tiny_model_config();
  ModelParams<float> p = zero_params<float>(cfg);
  GradMap<float> g = zero_grads(p);
  for (auto& [name, t] : g) std::fill(t.data().begin(), t.data().end(), 1.0f);
  AdamW<float> frozen({.learning_rate = 0.1, .weight_decay = 0.0}, [](std::size_t, double) { return 0.0; });
  frozen.step(p, g);
  EXPECT_EQ(p.embed.bias[0], 0.0f);

  g.erase("pos_embed");
  EXPECT_THROW(frozen.step(p, g), std::invalid_argument);
  g = zero_grads(p);
  g["cls_token"] = Tensor<float>(Shape{2});
  EXPECT_THROW(frozen.step(p, g), std::invalid_argument);
  EXPECT_THROW(AdamW<float>({.learning_rate = 0.0}), std::invalid_argument);
  EXPECT_THROW(AdamW<float>({.learning_rate = 1e-3, .weight_decay = -1.0}), std::invalid_argument);
}

TEST(Trainer, OneStepDecreasesLoss) {
  const ModelConfig cfg = tiny_model_config();
  ModelParams<float> p = init_params<float>(cfg, 9);
  const auto clips = random_dataset(cfg, 2, 4);
  GradMap<float> g;
  const double before = batch_loss(p, cfg, clips, &g);
  AdamW<float> opt({.learning_rate = 1e-4, .weight_decay = 1e-5});
  opt.step(p, g);
  EXPECT_LT(batch_loss(p, cfg, clips), before);
}

TEST(Trainer, ZeroHeadLossIsLnTwo) {
  const ModelConfig cfg = tiny_model_config();
  ModelParams<float> p = init_params<float>(cfg, 9);
  std::fill(p.head_out.weight.data().begin(), p.head_out.weight.data().end(), 0.0f);
  const auto clips = random_dataset(cfg, 2, 4);
  EXPECT_NEAR(batch_loss(p, cfg, clips), std::log(2.0), 1e-6);
  const auto m = measure(p, cfg, clips);
  EXPECT_NEAR(m.loss, std::log(2.0), 1e-6);
  EXPECT_EQ(m.accuracy, 0.5);  // ties predict Violent, half the clips
}

TEST(Split, StratifiedWithinOneSample) {
  const ModelConfig cfg = tiny_model_config();
  Rng rng(1);
  std::vector<VideoClip> clips;
  for (std::size_t i = 0; i < 37; ++i) clips.push_back(random_clip(cfg.input, i < 23 ? Label::Violent : Label::NonViolent, rng));
  for (const double f : {0.6, 0.5, 0.3}) {
    const auto s = stratified_split(clips, f, 7);
    EXPECT_EQ(s.train.size() + s.val.size(), clips.size());
    std::size_t violent = 0;
    for (auto i : s.train) violent += clips[i].label == Label::Violent;
    EXPECT_LE(std::abs(static_cast<double>(violent) - f * 23), 1.0);
    EXPECT_LE(std::abs(static_cast<double>(s.train.size() - violent) - f * 14), 1.0);
    EXPECT_TRUE(std::is_sorted(s.train.begin(), s.train.end()));
  }
  EXPECT_EQ(stratified_split(clips, 0.6, 7).train, stratified_split(clips, 0.6, 7).train);
  EXPECT_THROW(stratified_split(clips, 1.0, 7), std::invalid_argument);
  clips[0].label = Label::Unlabeled;
  EXPECT_THROW(stratified_split(clips, 0.6, 7), std::invalid_argument);
}

TEST(Trainer, ZeroEpochsReturnsInitialParams) {
  const ModelConfig cfg = tiny_model_config();
  const auto init = init_params<float>(cfg, 2);
  TrainConfig tc = quiet_config();
  tc.epochs = 0;
  const auto r = train(cfg, init, random_dataset(cfg, 3, 1), tc);
  EXPECT_TRUE(r.history.empty());
  EXPECT_FALSE(r.best.has_value());
  EXPECT_EQ(r.final_params.embed.weight, init.embed.weight);
}

TEST(Trainer, MemorizesSingleClip) {
  const ModelConfig cfg = tiny_model_config();
  Rng rng(17);
  const std::vector<VideoClip> one{random_clip(cfg.input, Label::NonViolent, rng)};
  TrainConfig tc = quiet_config();
  tc.batch_size = 1;
  tc.epochs = 50;
  const auto r = train(cfg, init_params<float>(cfg, 1), one, one, tc);
  ASSERT_EQ(r.history.size(), 50u);
  EXPECT_EQ(r.history.back().train_acc, 1.0);
  EXPECT_LT(r.history.back().train_loss, r.history.front().train_loss);
  EXPECT_EQ(evaluate(r.final_params, cfg, one).accuracy, 1.0);
}

TEST(Trainer, DeterministicForAnyWorkerCount) {
  const ModelConfig cfg = tiny_model_config();
  const auto data = random_dataset(cfg, 4, 3);
  TrainConfig tc = quiet_config();
  tc.augment = true;
  std::vector<std::size_t> epochs_seen;
  TrainCallbacks cb;
  cb.on_epoch = [&](const EpochRecord& r) { epochs_seen.push_back(r.epoch); };
  const auto a = train(cfg, init_params<float>(cfg, 1), data, tc, cb);
  tc.workers = 3;
  const auto b = train(cfg, init_params<float>(cfg, 1), data, tc);
  EXPECT_EQ(a.history, b.history);
  EXPECT_EQ(history_csv(a.history), history_csv(b.history));
  EXPECT_EQ(a.final_params.pos_embed, b.final_params.pos_embed);
  EXPECT_EQ(epochs_seen, (std::vector<std::size_t>{1, 2, 3}));
  ASSERT_TRUE(a.best.has_value());
  for (const auto& rec : a.history) {
    EXPECT_TRUE(rec.val_acc < a.best->val_acc || (rec.val_acc == a.best->val_acc && rec.val_loss >= a.best->val_loss));
  }
}

TEST(Trainer, RejectsBadInput) {
  const ModelConfig cfg = tiny_model_config();
  const auto init = init_params<float>(cfg, 1);
  TrainConfig tc = quiet_config();
  EXPECT_THROW(train(cfg, init, {}, random_dataset(cfg, 1, 1), tc), std::invalid_argument);
  tc.batch_size = 0;
  EXPECT_THROW(tc.validate(), std::invalid_argument);
  EXPECT_THROW(evaluate(init, cfg, {}), std::invalid_argument);
}

TEST(Trainer, DivergenceIsReported) {
  const ModelConfig cfg = tiny_model_config();
  ModelParams<float> init = init_params<float>(cfg, 1);
  init.head_out.bias[0] = std::numeric_limits<float>::infinity();
  try {
    train(cfg, init, random_dataset(cfg, 2, 1), quiet_config());
    FAIL() << "expected NumericError";
  } catch (const NumericError& e) {
    EXPECT_NE(std::string(e.what()).find("non-finite"), std::string::npos);
  }
}

TEST(ParallelFor, CoversEveryIndexAndRethrows) {
  std::vector<int> hit(50, 0);
  parallel_for(hit.size(), 4, [&](std::size_t i) { hit[i] += 1; });
  for (int h : hit) EXPECT_EQ(h, 1);
  EXPECT_THROW(parallel_for(10, 3, [](std::size_t i) { if (i == 7) throw std::runtime_error("x"); }),
               std::runtime_error);
}

TEST(ReportIo, HistoryRoundTrip) {
  std::vector<EpochRecord> h{{1, 0.7, 0.5, 0.69, 0.5}, {2, 0.1 + 0.2, 1.0 / 3.0, 1e-300, 1.0}};
  const fs::path path = fs::temp_directory_path() / "vividet_history.csv";
  export_history(h, path);
  EXPECT_EQ(read_history(path), h);
  std::ifstream in(path);
  std::size_t lines = 0;
  for (std::string line; std::getline(in, line);) ++lines;
  EXPECT_EQ(lines, h.size() + 1);
  EXPECT_EQ(history_csv({}), "epoch,train_loss,train_acc,val_loss,val_acc\n");
  {
    std::ofstream bad(path);
    bad << "epoch,loss\n1,2\n";
  }
  EXPECT_THROW(read_history(path), FormatError);
}

TEST(ReportIo, ReportRoundTrip) {
  const EvalReport r = report_from_confusion({{{7, 0}, {3, 0}}});
  EXPECT_EQ(parse_report_json(report_json(r)), r);
  const fs::path json = fs::temp_directory_path() / "vividet_report.json";
  const fs::path table = fs::temp_directory_path() / "vividet_report.txt";
  export_report(r, json, table);
  EXPECT_EQ(read_report(json), r);
  std::ifstream t(table);
  const std::string text((std::istreambuf_iterator<char>(t)), std::istreambuf_iterator<char>());
  EXPECT_EQ(text, format_report_table(r));
  EXPECT_THROW(parse_report_json("{\"format\":\"other\"}"), FormatError);
}

TEST(Fixture, ArchivedSyntheticHistory) {
  const fs::path path = fs::path(VIVIDET_FIXTURE_DIR) / "synthetic_history.csv";
  ASSERT_TRUE(fs::exists(path));
  const auto h = read_history(path);
  ASSERT_EQ(h.size(), 30u);
  double best = 0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    EXPECT_EQ(h[i].epoch, i + 1);
    best = std::max(best, h[i].val_acc);
  }
  EXPECT_GE(best, 0.90);
}
