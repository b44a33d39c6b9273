#include "cli.hpp"

#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "vividet/model/model_check.hpp"
#include "vividet/model/params.hpp"
#include "vividet/model/vivit.hpp"
#include "vividet/tensor/rng.hpp"
#include "vividet/train/report_io.hpp"
#include "vividet/train/trainer.hpp"
#include "vividet/vision/augment.hpp"
#include "vividet/vision/clip_io.hpp"
#include "vividet/vision/synthetic.hpp"
#include "vividet/vision/transforms.hpp"

namespace vividet::cli {

namespace fs = std::filesystem;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Raised by gradcheck when the tolerance is exceeded.
struct CheckFailed : std::runtime_error {
  using std::runtime_error::runtime_error;
};

constexpr const char* kSeedEnv = "VIVIDET_SEED";

std::string fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

// Runs `fn`, reporting any failure other than a divergence as a DataError prefixed with `what`.
template <typename Fn>
auto as_data(const std::string& what, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const NumericError&) {
    throw;
  } catch (const DataError&) {
    throw;
  } catch (const std::exception& e) {
    throw DataError(what + ": " + e.what());
  }
}

template <typename Fn>
auto as_usage(Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

/// Applies `key = value` lines from a flat TOML-style file to options not given on the command line.
void apply_config_file(CLI::App& app, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file '" + path + "'");
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigTOML().from_config(in);
  } catch (const CLI::Error& e) {
    throw UsageError("config file '" + path + "': " + e.what());
  }
  for (const CLI::ConfigItem& item : items) {
    if (!item.parents.empty()) {
      throw UsageError("config file '" + path + "': sections are not supported (key '" + item.fullname() + "')");
    }
    CLI::Option* opt = app.get_option_no_throw("--" + item.name);
    if (opt == nullptr || item.name == "config" || item.name == "help") {
      throw UsageError("config file '" + path + "': unknown key '" + item.name + "' for " + app.get_name());
    }
    if (opt->count() > 0) continue;  // command-line flags win
    try {
      opt->add_result(item.inputs);
      opt->run_callback();
    } catch (const CLI::Error& e) {
      throw UsageError("config file '" + path + "': " + e.what());
    }
  }
}

/// Falls back to VIVIDET_SEED when neither a flag nor the config file set the seed.
void apply_seed_env(CLI::Option* seed_opt) {
  if (seed_opt == nullptr || seed_opt->count() > 0) return;
  const char* env = std::getenv(kSeedEnv);
  if (env == nullptr || *env == '\0') return;
  try {
    seed_opt->add_result(std::string(env));
    seed_opt->run_callback();
  } catch (const CLI::Error& e) {
    throw UsageError(std::string(kSeedEnv) + ": " + e.what());
  }
}

/// Resolved option values as `key=value` lines in declaration order, minus `skip` keys.
std::string snapshot(const CLI::App& app, const std::vector<std::string>& skip) {
  std::istringstream in(app.config_to_str(true, false));
  std::string line, out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::string key = line.substr(0, line.find('='));
    bool keep = true;
    for (const auto& s : skip) keep = keep && key != s;
    if (keep) out += line + "\n";
  }
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  f << text;
  if (!f) throw DataError("cannot write '" + path.string() + "'");
}

void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw DataError("cannot create directory '" + dir.string() + "'");
}

std::string shape_text(const InputShape& s) {
  return std::to_string(s.frames) + "x" + std::to_string(s.height) + "x" + std::to_string(s.width) + "x" +
         std::to_string(s.channels);
}

// ---------------------------------------------------------------------------------------------
// Shared flag groups

struct ModelFlags {
  std::size_t frames = 56;
  std::size_t size = 64;
  std::size_t channels = 3;
  std::vector<std::size_t> patch{8, 8, 8};
  std::size_t embed_dim = 128;
  std::size_t heads = 8;
  std::size_t layers = 8;
  std::size_t mlp_ratio = 4;
  std::string head = "linear";
  std::string attention_scale = "per_head_dim";

  void add(CLI::App& app) {
    app.add_option("--frames", frames, "Frames per clip after sampling")->capture_default_str();
    app.add_option("--size", size, "Square frame size after letterboxing")->capture_default_str();
    app.add_option("--channels", channels, "Channels per frame")->capture_default_str();
    app.add_option("--patch", patch, "Tubelet size: frames height width")->expected(3)->capture_default_str();
    app.add_option("--embed-dim", embed_dim, "Token width D")->capture_default_str();
    app.add_option("--heads", heads, "Attention heads")->capture_default_str();
    app.add_option("--layers", layers, "Encoder layers")->capture_default_str();
    app.add_option("--mlp-ratio", mlp_ratio, "MLP hidden width as a multiple of D")->capture_default_str();
    app.add_option("--head", head, "Classification head: linear or tanh_hidden")
        ->check(CLI::IsMember({"linear", "tanh_hidden"}))
        ->capture_default_str();
    app.add_option("--attention-scale", attention_scale, "Attention scaling: per_head_dim or full_dim")
        ->check(CLI::IsMember({"per_head_dim", "full_dim"}))
        ->capture_default_str();
  }

  ModelConfig config() const {
    return as_usage([&] {
      ModelConfig c;
      c.input = InputShape{frames, size, size, channels};
      c.tubelet = TubeletSize{patch.at(0), patch.at(1), patch.at(2)};
      c.embed_dim = embed_dim;
      c.heads = heads;
      c.layers = layers;
      c.mlp_ratio = mlp_ratio;
      c.head = parse_head_variant(head);
      c.attention_scale = parse_attention_scale(attention_scale);
      c.validate();
      return c;
    });
  }
};

struct AugmentFlags {
  double blur_min = 0.5;
  double blur_max = 1.5;
  double rotation = 15.0;
  double hflip = 0.5;
  double vflip = 0.0;
  double noise = 0.05;

  void add(CLI::App& app) {
    app.add_option("--blur-min", blur_min, "Lower bound of the Gaussian blur sigma")->capture_default_str();
    app.add_option("--blur-max", blur_max, "Upper bound of the Gaussian blur sigma")->capture_default_str();
    app.add_option("--rotation", rotation, "Maximum absolute rotation in degrees")->capture_default_str();
    app.add_option("--hflip", hflip, "Horizontal flip probability")->capture_default_str();
    app.add_option("--vflip", vflip, "Vertical flip probability")->capture_default_str();
    app.add_option("--noise", noise, "Uniform pixel perturbation amplitude")->capture_default_str();
  }

  AugmentSpec spec(std::uint64_t seed) const {
    return as_usage([&] {
      AugmentSpec s;
      s.blur_sigma_lo = blur_min;
      s.blur_sigma_hi = blur_max;
      s.rotation_lo_deg = -rotation;
      s.rotation_hi_deg = rotation;
      s.h_flip_prob = hflip;
      s.v_flip_prob = vflip;
      s.perturb_amplitude = noise;
      s.seed = seed;
      s.validate();
      return s;
    });
  }
};

std::vector<VideoClip> load_for_model(const std::string& root, const ModelConfig& config) {
  if (config.input.height != config.input.width) {
    throw DataError("model input " + shape_text(config.input) + " is not square; datasets are letterboxed to squares");
  }
  std::vector<VideoClip> clips = as_data("loading dataset '" + root + "'",
                                         [&] { return load_dataset(root, config.input.frames, config.input.height); });
  if (clips.empty()) throw DataError("dataset '" + root + "' contains no clips");
  for (const VideoClip& c : clips) {
    if (c.channels() != config.input.channels) {
      throw DataError("clip '" + c.source_id + "' has shape " + clip_shape_str(c) + ", model expects " +
                      shape_text(config.input));
    }
  }
  return clips;
}

VideoClip load_clip_for_model(const std::string& path, const ModelConfig& config) {
  VideoClip clip = as_data("reading clip '" + path + "'", [&] { return load_clip_any(path); });
  if (clip.channels() != config.input.channels) {
    throw DataError("clip '" + path + "' has shape " + clip_shape_str(clip) + ", model expects " +
                    shape_text(config.input));
  }
  if (clip.frame_count() != config.input.frames || clip.height() != config.input.height ||
      clip.width() != config.input.width) {
    if (config.input.height != config.input.width) {
      throw DataError("clip '" + path + "' has shape " + clip_shape_str(clip) + ", model expects " +
                      shape_text(config.input));
    }
    clip = preprocess_clip(clip, config.input.frames, config.input.height);
  }
  return clip;
}

std::pair<ModelConfig, ModelParams<float>> load_checkpoint(const std::string& path) {
  return as_data("loading checkpoint '" + path + "'", [&] { return load_model(path); });
}

// ---------------------------------------------------------------------------------------------
// Commands

struct Command {
  CLI::App* app = nullptr;
  std::string config_path;
  CLI::Option* seed = nullptr;
  std::function<int()> exec;

  virtual ~Command() = default;

  void add_config_option() { app->add_option("--config", config_path, "Flat key = value config file"); }

  // Enforced after the config file is applied, so a config file can supply required values.
  std::vector<CLI::Option*> required;
  void require(CLI::Option* opt) {
    opt->option_text("TEXT REQUIRED");
    required.push_back(opt);
  }
  void check_required() const {
    for (const CLI::Option* opt : required) {
      if (opt->count() == 0) throw UsageError(opt->get_name() + " is required");
    }
  }
};

struct GenSynthetic : Command {
  std::string out_dir;
  SyntheticSpec spec;

  GenSynthetic(CLI::App& parent, std::ostream& out) {
    app = parent.add_subcommand("gen-synthetic", "Generate a synthetic two-class clip dataset");
    require(app->add_option("--out", out_dir, "Output dataset directory"));
    app->add_option("--clips-per-class", spec.clips_per_class, "Clips per class")->capture_default_str();
    app->add_option("--frames", spec.frame_count, "Frames per clip")->capture_default_str();
    app->add_option("--height", spec.height, "Frame height")->capture_default_str();
    app->add_option("--width", spec.width, "Frame width")->capture_default_str();
    app->add_option("--channels", spec.channels, "Channels per frame")->capture_default_str();
    app->add_option("--motion-gap", spec.motion_gap, "Speed multiplier of violent over nonviolent motion")
        ->capture_default_str();
    seed = app->add_option("--seed", spec.seed, "Generator seed (falls back to VIVIDET_SEED)")->capture_default_str();
    add_config_option();
    exec = [this, &out] {
      const std::vector<VideoClip> clips = as_usage([&] { return generate_synthetic(spec); });
      as_data("writing dataset '" + out_dir + "'", [&] { return write_dataset(clips, out_dir); });
      double diff[kNumClasses] = {0.0, 0.0};
      for (const VideoClip& c : clips) diff[class_index(c.label)] += mean_interframe_difference(c);
      const double n = static_cast<double>(spec.clips_per_class);
      out << "wrote " << clips.size() << " clips to " << out_dir << "\n"
          << "mean inter-frame difference: violent " << fmt("%.6f", diff[kViolentClass] / n) << ", nonviolent "
          << fmt("%.6f", diff[kNonViolentClass] / n) << "\n";
      return kOk;
    };
  }
};

struct Train : Command {
  std::string data;
  std::string out_root = "runs";
  ModelFlags model;
  AugmentFlags aug;
  bool augment = true;
  std::size_t batch_size = 32;
  std::size_t epochs = 100;
  double learning_rate = 1e-4;
  double weight_decay = 1e-5;
  double split = 0.6;
  std::uint64_t seed_value = 0;
  std::size_t workers = 1;
  std::size_t checkpoint_every = 0;

  Train(CLI::App& parent, std::ostream& out) {
    app = parent.add_subcommand("train", "Train a classifier and write a run directory");
    require(app->add_option("--data", data, "Dataset root with violent/ and nonviolent/ subdirectories"));
    app->add_option("--out", out_root, "Parent directory of run directories")->capture_default_str();
    model.add(*app);
    app->add_option("--batch-size", batch_size, "Clips per optimizer step")->capture_default_str();
    app->add_option("--epochs", epochs, "Training epochs")->capture_default_str();
    app->add_option("--lr", learning_rate, "Learning rate")->capture_default_str();
    app->add_option("--weight-decay", weight_decay, "Decoupled weight decay")->capture_default_str();
    app->add_option("--split", split, "Training share of each class")->capture_default_str();
    app->add_option("--augment", augment, "Online augmentation of training clips (true or false)")->capture_default_str();
    aug.add(*app);
    app->add_option("--checkpoint-every", checkpoint_every, "Extra checkpoint every N epochs (0 disables)")
        ->capture_default_str();
    seed = app->add_option("--seed", seed_value, "Seed for init, split, shuffles, augmentation (falls back to VIVIDET_SEED)")
               ->capture_default_str();
    app->add_option("--workers", workers, "Threads for per-clip work; results do not depend on it")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    add_config_option();
    exec = [this, &out] { return run(out); };
  }

  int run(std::ostream& out) {
    const ModelConfig mc = model.config();
    TrainConfig tc;
    tc.batch_size = batch_size;
    tc.epochs = epochs;
    tc.learning_rate = learning_rate;
    tc.weight_decay = weight_decay;
    tc.split_fraction = split;
    tc.seed = seed_value;
    tc.augment = augment;
    tc.augmentation = aug.spec(0);
    tc.checkpoint_every = checkpoint_every;
    tc.workers = workers;
    as_usage([&] { tc.validate(); });

    const std::vector<VideoClip> clips = load_for_model(data, mc);
    const DatasetSplit split_idx = as_data("splitting dataset", [&] { return stratified_split(clips, split, seed_value); });
    std::vector<VideoClip> train_set, val_set;
    bool seen[kNumClasses] = {false, false};
    for (std::size_t i : split_idx.train) {
      train_set.push_back(clips[i]);
      seen[class_index(clips[i].label)] = true;
    }
    for (std::size_t i : split_idx.val) val_set.push_back(clips[i]);
    if (!seen[0] || !seen[1]) throw DataError("training split does not contain both classes");

    const std::string snap = snapshot(*app, {"config", "workers", "help"});
    const fs::path run_dir = fs::path(out_root) / ("run_" + hash_hex(snapshot(*app, {"config", "workers", "help", "out"})));
    ensure_directory(run_dir);
    write_text(run_dir / "config.toml", snap);
    out << "run directory: " << run_dir.string() << "\n";
    const ModelParams<float> initial = init_params<float>(mc, seed_value);
    out << "train clips: " << train_set.size() << ", validation clips: " << val_set.size()
        << ", parameters: " << initial.parameter_count() << "\n";
    std::vector<EpochRecord> partial;
    TrainCallbacks cb;
    cb.on_epoch = [&](const EpochRecord& r) {
      partial.push_back(r);
      out << "epoch " << r.epoch << "/" << epochs << " train_loss " << fmt("%.4f", r.train_loss) << " train_acc "
          << fmt("%.4f", r.train_acc) << " val_loss " << fmt("%.4f", r.val_loss) << " val_acc "
          << fmt("%.4f", r.val_acc) << "\n";
      out.flush();
    };
    cb.on_best = [&](const EpochRecord&, const ModelParams<float>& p) { save_model(run_dir / "model_best.vvdt", mc, p); };
    cb.on_checkpoint = [&](const EpochRecord& r, const ModelParams<float>& p) {
      char name[48];
      std::snprintf(name, sizeof name, "model_epoch_%04zu.vvdt", r.epoch);
      save_model(run_dir / name, mc, p);
    };

    TrainResult result;
    try {
      result = train(mc, initial, train_set, val_set, tc, cb);
    } catch (const NumericError&) {
      export_history(partial, run_dir / "history.csv");
      throw;
    }
    if (!result.best) save_model(run_dir / "model_best.vvdt", mc, result.best_params);
    save_model(run_dir / "model_final.vvdt", mc, result.final_params);
    export_history(result.history, run_dir / "history.csv");
    const EvalReport report = evaluate(result.best_params, mc, val_set, workers);
    export_report(report, run_dir / "report.json", run_dir / "report.txt");
    out << "\nvalidation report (best checkpoint";
    if (result.best) out << ", epoch " << result.best->epoch;
    out << "):\n" << format_report_table(report);
    return kOk;
  }

  static std::string hash_hex(const std::string& text) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, fnv1a64(text));
    return buf;
  }
};

struct Eval : Command {
  std::string checkpoint;
  std::string data;
  std::string out_dir = ".";
  std::size_t workers = 1;

  Eval(CLI::App& parent, std::ostream& out) {
    app = parent.add_subcommand("eval", "Evaluate a checkpoint on a labeled dataset");
    require(app->add_option("--checkpoint", checkpoint, "Model checkpoint (.vvdt)"));
    require(app->add_option("--data", data, "Dataset root with violent/ and nonviolent/ subdirectories"));
    app->add_option("--out", out_dir, "Directory for eval_report.json and eval_report.txt")->capture_default_str();
    app->add_option("--workers", workers, "Threads for per-clip work")->check(CLI::PositiveNumber)->capture_default_str();
    add_config_option();
    exec = [this, &out] {
      const auto [mc, params] = load_checkpoint(checkpoint);
      const std::vector<VideoClip> clips = load_for_model(data, mc);
      const EvalReport report = evaluate(params, mc, clips, workers);
      ensure_directory(out_dir);
      as_data("writing report", [&] {
        export_report(report, fs::path(out_dir) / "eval_report.json", fs::path(out_dir) / "eval_report.txt");
      });
      out << format_report_table(report);
      return kOk;
    };
  }
};

struct Predict : Command {
  std::string checkpoint;
  std::string clip_path;

  Predict(CLI::App& parent, std::ostream& out) {
    app = parent.add_subcommand("predict", "Classify one clip");
    require(app->add_option("--checkpoint", checkpoint, "Model checkpoint (.vvdt)"));
    require(app->add_option("--clip", clip_path, "Clip file (.vclip) or frame directory"));
    add_config_option();
    exec = [this, &out] {
      const auto [mc, params] = load_checkpoint(checkpoint);
      const VideoClip clip = load_clip_for_model(clip_path, mc);
      const std::vector<float> probs = classify(clip, params, mc);
      const std::size_t cls = argmax(std::span<const float>(probs));
      const std::string label(label_name(label_from_class(cls)));
      const double p_violent = probs[kViolentClass];
      out << "violent     " << fmt("%.4f", probs[kViolentClass]) << "\n"
          << "nonviolent  " << fmt("%.4f", probs[kNonViolentClass]) << "\n"
          << "label=" << label << " p_violent=" << fmt("%.4f", p_violent) << "\n";
      return kOk;
    };
  }
};

struct AugmentPreview : Command {
  std::string clip_path;
  std::string out_path;
  std::string frames_dir;
  AugmentFlags aug;
  bool identity = false;
  std::uint64_t seed_value = 0;

  AugmentPreview(CLI::App& parent, std::ostream& out) {
    app = parent.add_subcommand("augment-preview", "Augment one clip and optionally dump its frames");
    require(app->add_option("--clip", clip_path, "Input clip file (.vclip) or frame directory"));
    require(app->add_option("--out", out_path, "Output .vclip path"));
    app->add_option("--frames-dir", frames_dir, "Directory for per-frame PGM/PPM images");
    aug.add(*app);
    app->add_flag("--identity", identity, "Use the no-op augmentation spec");
    seed = app->add_option("--seed", seed_value, "Augmentation seed (falls back to VIVIDET_SEED)")->capture_default_str();
    add_config_option();
    exec = [this, &out] {
      const AugmentSpec spec = identity ? AugmentSpec::identity(seed_value) : aug.spec(seed_value);
      const VideoClip clip = as_data("reading clip '" + clip_path + "'", [&] { return load_clip_any(clip_path); });
      const VideoClip result = augment_clip(clip, spec);
      as_data("writing '" + out_path + "'", [&] { write_clip(result, out_path); });
      out << "wrote " << out_path << " (" << clip_shape_str(result) << ")\n";
      if (!frames_dir.empty()) {
        ensure_directory(frames_dir);
        const char* ext = result.channels() == 1 ? "pgm" : "ppm";
        as_data("writing frames", [&] {
          for (std::size_t t = 0; t < result.frames.size(); ++t) {
            char name[32];
            std::snprintf(name, sizeof name, "frame_%04zu.%s", t, ext);
            write_pnm(result.frames[t], fs::path(frames_dir) / name);
          }
        });
        out << "wrote " << result.frames.size() << " frames to " << frames_dir << "\n";
      }
      return kOk;
    };
  }
};

struct GradCheck : Command {
  ModelGradCheckSetup setup;
  double tolerance = 1e-3;

  GradCheck(CLI::App& parent, std::ostream& out) {
    app = parent.add_subcommand("gradcheck", "Finite-difference gradient check of the tiny model in 64-bit");
    app->add_option("--batch", setup.batch, "Clips in the checked batch")->capture_default_str();
    app->add_option("--step", setup.step, "Central-difference step")->capture_default_str();
    app->add_option("--tolerance", tolerance, "Maximum accepted relative error")->capture_default_str();
    seed = app->add_option("--seed", setup.seed, "Parameter and input seed (falls back to VIVIDET_SEED)")
               ->capture_default_str();
    add_config_option();
    exec = [this, &out] {
      if (setup.batch == 0) throw UsageError("--batch must be at least 1");
      const GradCheckResult r = as_usage([&] { return check_model_gradients(setup); });
      out << "coordinates checked: " << r.coordinates_checked << "\n"
          << "max relative error: " << fmt("%.3e", r.max_rel_error) << " (tensor " << r.worst_tensor << ", index "
          << r.worst_index << ", analytic " << fmt("%.6e", r.worst_analytic) << ", numeric "
          << fmt("%.6e", r.worst_numeric) << ")\n";
      if (!(r.max_rel_error <= tolerance)) {
        throw CheckFailed("gradient check failed: " + fmt("%.3e", r.max_rel_error) + " > " + fmt("%.3e", tolerance));
      }
      out << "gradient check passed\n";
      return kOk;
    };
  }
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Video transformer violence classifier", "vividet"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "vividet 0.1.0");

  std::vector<std::unique_ptr<Command>> commands;
  commands.push_back(std::make_unique<GenSynthetic>(app, out));
  commands.push_back(std::make_unique<Train>(app, out));
  commands.push_back(std::make_unique<Eval>(app, out));
  commands.push_back(std::make_unique<Predict>(app, out));
  commands.push_back(std::make_unique<AugmentPreview>(app, out));
  commands.push_back(std::make_unique<GradCheck>(app, out));

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    for (auto& cmd : commands) {
      if (!cmd->app->parsed()) continue;
      if (!cmd->config_path.empty()) apply_config_file(*cmd->app, cmd->config_path);
      apply_seed_env(cmd->seed);
      cmd->check_required();
      return cmd->exec();
    }
    return kUsage;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const NumericError& e) {
    err << "error: " << e.what() << "\n";
    return kDivergence;
  } catch (const CheckFailed& e) {
    err << "error: " << e.what() << "\n";
    return kDivergence;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kDataError;
  }
}

}  // namespace vividet::cli
