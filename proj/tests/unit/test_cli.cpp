#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "cli.hpp"
#include "vividet/model/model_check.hpp"
#include "vividet/model/params.hpp"
#include "vividet/train/report_io.hpp"
#include "vividet/vision/clip_io.hpp"

using namespace vividet;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("vividet_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::map<std::string, std::string> directory_bytes(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) files[fs::relative(e.path(), root).generic_string()] = slurp(e.path());
  return files;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

// Tiny-model settings shared by the train tests.
std::vector<std::string> tiny_train(const fs::path& data, const fs::path& out) {
  return {"train",     "--data",  data.string(), "--out",        out.string(), "--frames", "8",  "--size",
          "16",        "--channels", "1",       "--patch",      "4",          "8",        "8",  "--embed-dim",
          "16",        "--heads", "2",          "--layers",     "1",          "--batch-size", "4"};
}

fs::path small_dataset(const std::string& name) {
  const fs::path dir = fresh_dir(name);
  const auto r = run({"gen-synthetic", "--out", dir.string(), "--clips-per-class", "4", "--frames", "8", "--height",
                      "16", "--width", "16", "--seed", "3"});
  EXPECT_EQ(r.code, 0) << r.err;
  return dir;
}

fs::path only_run_dir(const fs::path& out) {
  std::vector<fs::path> dirs;
  for (const auto& e : fs::directory_iterator(out)) dirs.push_back(e.path());
  EXPECT_EQ(dirs.size(), 1u);
  return dirs.empty() ? fs::path() : dirs[0];
}

}  // namespace

TEST(Cli, GenSyntheticLayoutAndDeterminism) {
  const fs::path a = fresh_dir("gen_a"), b = fresh_dir("gen_b");
  auto r = run({"gen-synthetic", "--clips-per-class", "50", "--seed", "7", "--out", a.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("wrote 100 clips"), std::string::npos);
  ASSERT_EQ(run({"gen-synthetic", "--clips-per-class", "50", "--seed", "7", "--out", b.string()}).code, 0);

  const auto files = directory_bytes(a);
  std::size_t violent = 0, nonviolent = 0;
  for (const auto& [name, bytes] : files) {
    violent += name.starts_with("violent/");
    nonviolent += name.starts_with("nonviolent/");
  }
  EXPECT_EQ(violent, 50u);
  EXPECT_EQ(nonviolent, 50u);
  EXPECT_EQ(files, directory_bytes(b));

  std::istringstream manifest(files.at("manifest.txt"));
  std::size_t listed = 0;
  for (std::string path, label; manifest >> path >> label; ++listed) {
    EXPECT_TRUE(files.contains(path)) << path;
    EXPECT_TRUE(path.starts_with(label + "/")) << path;
  }
  EXPECT_EQ(listed, 100u);
}

TEST(Cli, HelpMatchesDocumentation) {
  const std::string doc = slurp(fs::path(VIVIDET_DOCS_DIR) / "cli.md");
  ASSERT_FALSE(doc.empty());
  for (const std::string cmd : {"vividet", "gen-synthetic", "train", "eval", "predict", "augment-preview", "gradcheck"}) {
    const auto heading = doc.find("\n### " + cmd + "\n");
    ASSERT_NE(heading, std::string::npos) << cmd;
    const auto open = doc.find("```text\n", heading);
    ASSERT_NE(open, std::string::npos) << cmd;
    const auto body = open + 8;
    const std::string documented = doc.substr(body, doc.find("```", body) - body);
    const auto r = cmd == "vividet" ? run({"--help"}) : run({cmd, "--help"});
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, documented) << cmd;
  }
}

TEST(Cli, TrainDefaultsAreDocumented) {
  const auto r = run({"train", "--help"});
  for (const char* s : {"--batch-size UINT [32]", "--patch UINT [[8,8,8]]", "--epochs UINT [100]", "--lr FLOAT [0.0001]",
                        "--weight-decay FLOAT [1e-05]", "--embed-dim UINT [128]", "--heads UINT [8]",
                        "--layers UINT [8]"}) {
    EXPECT_NE(r.out.find(s), std::string::npos) << s;
  }
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"bogus"}).code, 2);
  EXPECT_EQ(run({"train", "--data"}).code, 2);
  EXPECT_EQ(run({"gradcheck", "--step", "abc"}).code, 2);
  EXPECT_EQ(run({"--version"}).code, 0);

  const fs::path dir = fresh_dir("exit");
  write_text(dir / "bad.vvdt", "not a checkpoint at all");
  const fs::path data = small_dataset("exit_data");
  auto r = run({"eval", "--checkpoint", (dir / "bad.vvdt").string(), "--data", data.string()});
  EXPECT_EQ(r.code, 3);
  EXPECT_FALSE(r.err.empty());
  EXPECT_EQ(run({"predict", "--checkpoint", (dir / "missing.vvdt").string(), "--clip", "nowhere.vclip"}).code, 3);

  write_text(dir / "sectioned.toml", "[train]\nepochs = 1\n");
  EXPECT_EQ(run({"train", "--data", data.string(), "--config", (dir / "sectioned.toml").string()}).code, 2);
  write_text(dir / "unknown.toml", "colour = 3\n");
  EXPECT_EQ(run({"train", "--data", data.string(), "--config", (dir / "unknown.toml").string()}).code, 2);
}

TEST(Cli, ShapeMismatchNamesBothShapes) {
  const fs::path dir = fresh_dir("mismatch");
  save_model(dir / "m.vvdt", tiny_model_config(), init_params<float>(tiny_model_config(), 1));
  Rng rng(1);
  write_clip(random_clip({8, 16, 16, 3}, Label::Violent, rng), dir / "c.vclip");
  const auto r = run({"predict", "--checkpoint", (dir / "m.vvdt").string(), "--clip", (dir / "c.vclip").string()});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("8x16x16x3"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("8x16x16x1"), std::string::npos) << r.err;
}

TEST(Cli, ConfigPrecedence) {
  const fs::path dir = fresh_dir("precedence");
  write_text(dir / "gen.toml", "# synthetic settings\nframes = 5\nheight = 10\nwidth = 12\nclips-per-class = 1\n");
  auto first_clip_bytes = [&](const fs::path& out) {
    for (const auto& e : fs::directory_iterator(out / "violent")) return slurp(e.path());
    return std::string();
  };

  // default < file < flag
  ASSERT_EQ(run({"gen-synthetic", "--out", (dir / "d").string(), "--clips-per-class", "1"}).code, 0);
  ASSERT_EQ(run({"gen-synthetic", "--out", (dir / "f").string(), "--config", (dir / "gen.toml").string()}).code, 0);
  ASSERT_EQ(run({"gen-synthetic", "--out", (dir / "c").string(), "--config", (dir / "gen.toml").string(), "--frames",
                 "3"})
                .code,
            0);
  const auto clip_of = [&](const fs::path& out) {
    for (const auto& e : fs::directory_iterator(out / "violent")) return read_clip(e.path());
    return VideoClip{};
  };
  EXPECT_EQ(clip_of(dir / "d").frame_count(), 16u);
  EXPECT_EQ(clip_of(dir / "f").frame_count(), 5u);
  EXPECT_EQ(clip_of(dir / "f").width(), 12u);
  EXPECT_EQ(clip_of(dir / "c").frame_count(), 3u);
  EXPECT_EQ(clip_of(dir / "c").width(), 12u);

  // VIVIDET_SEED sits between the config file and the default.
  ::setenv("VIVIDET_SEED", "99", 1);
  ASSERT_EQ(run({"gen-synthetic", "--out", (dir / "env").string(), "--clips-per-class", "1"}).code, 0);
  ASSERT_EQ(run({"gen-synthetic", "--out", (dir / "flag").string(), "--clips-per-class", "1", "--seed", "7"}).code, 0);
  ::unsetenv("VIVIDET_SEED");
  ASSERT_EQ(run({"gen-synthetic", "--out", (dir / "s99").string(), "--clips-per-class", "1", "--seed", "99"}).code, 0);
  EXPECT_EQ(first_clip_bytes(dir / "env"), first_clip_bytes(dir / "s99"));
  EXPECT_EQ(first_clip_bytes(dir / "flag"), first_clip_bytes(dir / "d"));
  EXPECT_NE(first_clip_bytes(dir / "env"), first_clip_bytes(dir / "d"));
}

TEST(Cli, PredictZeroHead) {
  const fs::path dir = fresh_dir("predict");
  const ModelConfig cfg = tiny_model_config();
  ModelParams<float> p = init_params<float>(cfg, 1);
  std::fill(p.head_out.weight.data().begin(), p.head_out.weight.data().end(), 0.0f);
  save_model(dir / "zero.vvdt", cfg, p);
  Rng rng(2);
  write_clip(random_clip(cfg.input, Label::Unlabeled, rng), dir / "c.vclip");
  const std::vector<std::string> args{"predict", "--checkpoint", (dir / "zero.vvdt").string(), "--clip",
                                      (dir / "c.vclip").string()};
  const auto r = run(args);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("p_violent=0.5000"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("violent     0.5000"), std::string::npos);
  EXPECT_NE(r.out.find("nonviolent  0.5000"), std::string::npos);
  EXPECT_EQ(run(args).out, r.out);
}

TEST(Cli, PredictProbabilitiesSumToOne) {
  const fs::path dir = fresh_dir("predict_sum");
  const ModelConfig cfg = tiny_model_config();
  ModelParams<float> p = init_params<float>(cfg, 4);
  for (auto& v : p.head_out.weight.data()) v *= 200.0f;
  save_model(dir / "m.vvdt", cfg, p);
  Rng rng(5);
  write_clip(random_clip(cfg.input, Label::Unlabeled, rng), dir / "c.vclip");
  const auto r = run({"predict", "--checkpoint", (dir / "m.vvdt").string(), "--clip", (dir / "c.vclip").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(r.out);
  std::string name;
  double pv = 0, pn = 0;
  in >> name >> pv >> name >> pn;
  EXPECT_NEAR(pv + pn, 1.0, 1e-4 + 1e-12);
}

TEST(Cli, AugmentPreview) {
  const fs::path dir = fresh_dir("augment");
  Rng rng(3);
  const VideoClip clip = random_clip({6, 16, 16, 3}, Label::Violent, rng);
  write_clip(clip, dir / "in.vclip");
  auto r = run({"augment-preview", "--clip", (dir / "in.vclip").string(), "--out", (dir / "id.vclip").string(),
                "--identity", "--frames-dir", (dir / "frames").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(slurp(dir / "id.vclip"), slurp(dir / "in.vclip"));
  std::size_t dumped = 0;
  for (const auto& e : fs::directory_iterator(dir / "frames")) dumped += e.path().extension() == ".ppm";
  EXPECT_EQ(dumped, 6u);

  for (const char* out : {"a.vclip", "b.vclip"}) {
    ASSERT_EQ(run({"augment-preview", "--clip", (dir / "in.vclip").string(), "--out", (dir / out).string(), "--seed",
                   "11"})
                  .code,
              0);
  }
  EXPECT_EQ(slurp(dir / "a.vclip"), slurp(dir / "b.vclip"));
  EXPECT_NE(slurp(dir / "a.vclip"), slurp(dir / "in.vclip"));
}

TEST(Cli, TrainZeroEpochs) {
  const fs::path data = small_dataset("zero_data");
  const fs::path out = fresh_dir("zero_out");
  auto args = tiny_train(data, out);
  args.insert(args.end(), {"--epochs", "0", "--seed", "4"});
  const auto r = run(args);
  ASSERT_EQ(r.code, 0) << r.err;
  const fs::path run_dir = only_run_dir(out);
  EXPECT_EQ(slurp(run_dir / "history.csv"), "epoch,train_loss,train_acc,val_loss,val_acc\n");
  const auto [cfg, params] = load_model(run_dir / "model_best.vvdt");
  EXPECT_EQ(cfg.embed_dim, 16u);
  EXPECT_EQ(params.embed.weight, init_params<float>(cfg, 4).embed.weight);
  EXPECT_TRUE(fs::exists(run_dir / "model_final.vvdt"));
  EXPECT_TRUE(fs::exists(run_dir / "report.json"));
  EXPECT_TRUE(fs::exists(run_dir / "config.toml"));
}

TEST(Cli, TrainIsReproducibleAndEvalReadsItsCheckpoint) {
  const fs::path data = small_dataset("repro_data");
  const fs::path a = fresh_dir("repro_a"), b = fresh_dir("repro_b");
  auto args = tiny_train(data, a);
  args.insert(args.end(), {"--epochs", "2", "--seed", "6", "--checkpoint-every", "1"});
  ASSERT_EQ(run(args).code, 0);
  args = tiny_train(data, b);
  args.insert(args.end(), {"--epochs", "2", "--seed", "6", "--checkpoint-every", "1", "--workers", "2"});
  ASSERT_EQ(run(args).code, 0);
  const fs::path ra = only_run_dir(a), rb = only_run_dir(b);
  EXPECT_EQ(ra.filename(), rb.filename());  // --workers does not change the run identity
  auto fa = directory_bytes(ra), fb = directory_bytes(rb);
  fa.erase("config.toml");  // records --out
  fb.erase("config.toml");
  EXPECT_EQ(fa, fb);
  EXPECT_TRUE(fs::exists(ra / "model_epoch_0002.vvdt"));

  // Re-running from the snapshot lands in the same run directory.
  const fs::path c = fresh_dir("repro_c");
  ASSERT_EQ(run({"train", "--config", (ra / "config.toml").string(), "--out", c.string()}).code, 0);
  EXPECT_EQ(only_run_dir(c).filename(), ra.filename());
  EXPECT_EQ(slurp(only_run_dir(c) / "history.csv"), slurp(ra / "history.csv"));

  const fs::path eval_out = fresh_dir("repro_eval");
  const auto r = run({"eval", "--checkpoint", (ra / "model_best.vvdt").string(), "--data", data.string(), "--out",
                      eval_out.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("Weighted Average"), std::string::npos);
  EXPECT_EQ(read_report(eval_out / "eval_report.json").total, 8u);
}

TEST(Cli, DivergenceExitsFour) {
  const fs::path data = small_dataset("diverge_data");
  const fs::path out = fresh_dir("diverge_out");
  auto args = tiny_train(data, out);
  args.insert(args.end(), {"--epochs", "2", "--lr", "1e300"});
  const auto r = run(args);
  EXPECT_EQ(r.code, 4) << r.err;
  EXPECT_NE(r.err.find("non-finite"), std::string::npos) << r.err;
}

TEST(Cli, GradcheckPassesAndFails) {
  auto r = run({"gradcheck", "--batch", "1"});
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  r = run({"gradcheck", "--batch", "1", "--tolerance", "1e-30"});
  EXPECT_EQ(r.code, 4);
}
