#include "vividet/model/config.hpp"

#include <sstream>
#include <stdexcept>
#include <vector>

#include "vividet/tensor/tensor.hpp"

namespace vividet {

namespace {

std::vector<std::size_t> parse_list(const std::string& s, std::size_t expected, const std::string& key) {
  std::vector<std::size_t> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stoul(item));
    } catch (const std::exception&) {
      throw FormatError("manifest key '" + key + "': bad integer '" + item + "'");
    }
  }
  if (out.size() != expected) throw FormatError("manifest key '" + key + "' expects " + std::to_string(expected) + " values");
  return out;
}

}  // namespace

TokenGrid tubelet_grid(const InputShape& input, const TubeletSize& tubelet) {
  if (tubelet.frames == 0 || tubelet.height == 0 || tubelet.width == 0) {
    throw std::invalid_argument("tubelet dimensions must be positive");
  }
  if (tubelet.frames > input.frames || tubelet.height > input.height || tubelet.width > input.width) {
    throw std::invalid_argument("tubelet " + std::to_string(tubelet.frames) + "x" + std::to_string(tubelet.height) + "x" +
                                std::to_string(tubelet.width) + " exceeds input " + std::to_string(input.frames) + "x" +
                                std::to_string(input.height) + "x" + std::to_string(input.width));
  }
  return {input.frames / tubelet.frames, input.height / tubelet.height, input.width / tubelet.width};
}

void ModelConfig::validate() const {
  if (input.frames == 0 || input.height == 0 || input.width == 0 || input.channels == 0) {
    throw std::invalid_argument("model input dimensions must be positive");
  }
  tubelet_grid(input, tubelet);
  if (embed_dim == 0 || heads == 0 || layers == 0 || mlp_ratio == 0) {
    throw std::invalid_argument("embed_dim, heads, layers and mlp_ratio must be positive");
  }
  if (embed_dim % heads != 0) {
    throw std::invalid_argument("embed_dim " + std::to_string(embed_dim) + " is not divisible by heads " +
                                std::to_string(heads));
  }
  if (classes < 2) throw std::invalid_argument("classes must be at least 2");
  if (!(layer_norm_eps > 0.0)) throw std::invalid_argument("layer_norm_eps must be positive");
}

std::string to_string(HeadVariant v) { return v == HeadVariant::Linear ? "linear" : "tanh_hidden"; }
std::string to_string(AttentionScale v) { return v == AttentionScale::PerHeadDim ? "per_head_dim" : "full_dim"; }

HeadVariant parse_head_variant(const std::string& s) {
  if (s == "linear") return HeadVariant::Linear;
  if (s == "tanh_hidden") return HeadVariant::TanhHidden;
  throw std::invalid_argument("unknown head variant '" + s + "' (expected linear or tanh_hidden)");
}

AttentionScale parse_attention_scale(const std::string& s) {
  if (s == "per_head_dim") return AttentionScale::PerHeadDim;
  if (s == "full_dim") return AttentionScale::FullDim;
  throw std::invalid_argument("unknown attention scale '" + s + "' (expected per_head_dim or full_dim)");
}

std::string ModelConfig::to_manifest() const {
  std::ostringstream os;
  os.precision(17);
  os << "format=vividet-model\n"
     << "input=" << input.frames << "," << input.height << "," << input.width << "," << input.channels << "\n"
     << "tubelet=" << tubelet.frames << "," << tubelet.height << "," << tubelet.width << "\n"
     << "embed_dim=" << embed_dim << "\n"
     << "heads=" << heads << "\n"
     << "layers=" << layers << "\n"
     << "mlp_ratio=" << mlp_ratio << "\n"
     << "classes=" << classes << "\n"
     << "head=" << to_string(head) << "\n"
     << "attention_scale=" << to_string(attention_scale) << "\n"
     << "layer_norm_eps=" << layer_norm_eps << "\n";
  return os.str();
}

ModelConfig ModelConfig::from_manifest(const std::string& text) {
  ModelConfig c;
  std::istringstream is(text);
  std::string line;
  bool tagged = false;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw FormatError("malformed manifest line '" + line + "'");
    const std::string key = line.substr(0, eq), value = line.substr(eq + 1);
    try {
      if (key == "format") {
        if (value != "vividet-model") throw FormatError("manifest format '" + value + "' is not vividet-model");
        tagged = true;
      } else if (key == "input") {
        const auto v = parse_list(value, 4, key);
        c.input = {v[0], v[1], v[2], v[3]};
      } else if (key == "tubelet") {
        const auto v = parse_list(value, 3, key);
        c.tubelet = {v[0], v[1], v[2]};
      } else if (key == "embed_dim") {
        c.embed_dim = std::stoul(value);
      } else if (key == "heads") {
        c.heads = std::stoul(value);
      } else if (key == "layers") {
        c.layers = std::stoul(value);
      } else if (key == "mlp_ratio") {
        c.mlp_ratio = std::stoul(value);
      } else if (key == "classes") {
        c.classes = std::stoul(value);
      } else if (key == "head") {
        c.head = parse_head_variant(value);
      } else if (key == "attention_scale") {
        c.attention_scale = parse_attention_scale(value);
      } else if (key == "layer_norm_eps") {
        c.layer_norm_eps = std::stod(value);
      } else {
        throw FormatError("unknown manifest key '" + key + "'");
      }
    } catch (const FormatError&) {
      throw;
    } catch (const std::exception& e) {
      throw FormatError("manifest key '" + key + "': " + e.what());
    }
  }
  if (!tagged) throw FormatError("checkpoint manifest is missing its format line");
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("checkpoint manifest describes an invalid model: ") + e.what());
  }
  return c;
}

}  // namespace vividet
