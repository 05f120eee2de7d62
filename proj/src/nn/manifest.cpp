#include "rlcycle/nn/manifest.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "rlcycle/errors.hpp"

namespace rlcycle::nn {

using nlohmann::json;

json to_manifest_json(const Network& net) {
  json layers = json::array();
  for (std::size_t k = 0; k < net.layer_count(); ++k) {
    const auto& shape = net.layers()[k];
    const auto w = net.weights(k);
    json rows = json::array();
    for (std::size_t o = 0; o < shape.out; ++o) {
      rows.push_back(std::vector<double>(w.begin() + o * shape.in,
                                         w.begin() + (o + 1) * shape.in));
    }
    const auto b = net.biases(k);
    layers.push_back({{"activation", to_string(shape.activation)},
                      {"weights", std::move(rows)},
                      {"biases", std::vector<double>(b.begin(), b.end())}});
  }
  return {{"format_version", kManifestVersion}, {"layers", std::move(layers)}};
}

namespace {

double finite_number(const json& v, const char* what) {
  if (!v.is_number()) throw ParseError(std::string(what) + " must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ParseError(std::string(what) + " is not finite");
  return x;
}

}  // namespace

Network from_manifest_json(const json& manifest) {
  if (!manifest.is_object()) throw ParseError("manifest must be a JSON object");
  if (!manifest.contains("format_version") ||
      manifest["format_version"] != kManifestVersion) {
    throw ParseError("unsupported manifest format_version");
  }
  if (!manifest.contains("layers") || !manifest["layers"].is_array() ||
      manifest["layers"].empty()) {
    throw ParseError("manifest needs a non-empty 'layers' array");
  }
  const auto& layers = manifest["layers"];
  std::vector<std::size_t> sizes;
  std::vector<Activation> acts;
  for (std::size_t k = 0; k < layers.size(); ++k) {
    const auto& layer = layers[k];
    if (!layer.is_object() || !layer.contains("weights") || !layer.contains("biases") ||
        !layer.contains("activation") || !layer["activation"].is_string()) {
      throw ParseError("layer " + std::to_string(k) + " is missing fields");
    }
    const auto& w = layer["weights"];
    if (!w.is_array() || w.empty() || !w[0].is_array() || w[0].empty()) {
      throw ParseError("layer " + std::to_string(k) + " has no weights");
    }
    const std::size_t out = w.size();
    const std::size_t in = w[0].size();
    if (k == 0) {
      sizes.push_back(in);
    } else if (sizes.back() != in) {
      throw ParseError("layer " + std::to_string(k) + " input size " +
                       std::to_string(in) + " does not chain with previous output " +
                       std::to_string(sizes.back()));
    }
    sizes.push_back(out);
    acts.push_back(activation_from_string(layer["activation"].get<std::string>()));
  }

  Network net(sizes, acts);
  for (std::size_t k = 0; k < layers.size(); ++k) {
    const auto& shape = net.layers()[k];
    const auto& rows = layers[k]["weights"];
    auto w = net.weights(k);
    for (std::size_t o = 0; o < shape.out; ++o) {
      if (!rows[o].is_array() || rows[o].size() != shape.in) {
        throw ParseError("layer " + std::to_string(k) + " row " + std::to_string(o) +
                         " length != declared input size " + std::to_string(shape.in));
      }
      for (std::size_t i = 0; i < shape.in; ++i) {
        w[o * shape.in + i] = finite_number(rows[o][i], "weight");
      }
    }
    const auto& biases = layers[k]["biases"];
    if (!biases.is_array() || biases.size() != shape.out) {
      throw ParseError("layer " + std::to_string(k) + " bias length != output size");
    }
    auto b = net.biases(k);
    for (std::size_t o = 0; o < shape.out; ++o) b[o] = finite_number(biases[o], "bias");
  }
  return net;
}

std::string serialize(const Network& net) { return to_manifest_json(net).dump(); }

Network deserialize(std::string_view bytes) {
  json parsed;
  try {
    parsed = json::parse(bytes);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("manifest is not valid JSON: ") + e.what());
  }
  return from_manifest_json(parsed);
}

void save_manifest(const Network& net, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << serialize(net) << '\n';
}

Network load_manifest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return deserialize(ss.str());
}

}  // namespace rlcycle::nn
