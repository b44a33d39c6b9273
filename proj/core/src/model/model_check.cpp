#include "vividet/model/model_check.hpp"

#include <vector>

#include "vividet/model/params.hpp"
#include "vividet/model/vivit.hpp"

namespace vividet {

ModelConfig tiny_model_config() {
  ModelConfig c;
  c.input = InputShape{8, 16, 16, 1};
  c.tubelet = TubeletSize{4, 8, 8};
  c.embed_dim = 16;
  c.heads = 2;
  c.layers = 2;
  return c;
}

VideoClip random_clip(const InputShape& input, Label label, Rng& rng) {
  VideoClip clip;
  clip.label = label;
  clip.source_id = "random";
  for (std::size_t t = 0; t < input.frames; ++t) {
    Frame f(input.height, input.width, input.channels, 0.0f);
    for (float& v : f.pixels) v = static_cast<float>(rng.uniform());
    clip.frames.push_back(std::move(f));
  }
  return clip;
}

GradCheckResult check_model_gradients(const ModelGradCheckSetup& setup) {
  setup.config.validate();
  Rng rng(mix_seed(setup.seed, 0xC11F));
  std::vector<VideoClip> clips;
  std::vector<std::size_t> labels;
  // One shared label: with mixed labels and near-uniform initial predictions the per-clip
  // gradients cancel, leaving only values near the finite-difference noise floor.
  for (std::size_t b = 0; b < setup.batch; ++b) {
    clips.push_back(random_clip(setup.config.input, Label::Violent, rng));
    labels.push_back(kViolentClass);
  }

  const ModelParams<double> params = init_params<double>(setup.config, setup.seed);
  std::vector<Tensor<double>> tensors;
  params.visit([&](const std::string&, const Tensor<double>& t) { tensors.push_back(t); });

  const ModelConfig& config = setup.config;
  const ScalarFunction<double> loss = [&](Tape<double>& tape, std::span<const Var<double>> leaves) {
    const ParamVars<double> vars = vars_from_leaves(leaves, config);
    std::vector<Var<double>> rows;
    for (const VideoClip& clip : clips) rows.push_back(forward_logits(tape, clip, vars, config));
    const Var<double> logits = ad::concat_rows(std::span<const Var<double>>(rows));
    return ad::cross_entropy(logits, std::span<const std::size_t>(labels));
  };
  return check_gradients(loss, std::move(tensors), setup.step, setup.options);
}

}  // namespace vividet
