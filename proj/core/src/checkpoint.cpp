#include "skelgait/checkpoint.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace skelgait {

using nlohmann::json;

namespace {

json network_config_json(const NetworkConfig& c) {
  json j;
  j["k_max"] = c.k_max;
  j["channels"] = c.channels;
  j["tcn_window"] = c.tcn_window;
  j["learning_rate"] = c.learning_rate;
  j["epochs"] = c.epochs;
  j["batch_size"] = c.batch_size;
  j["seed"] = c.seed;
  j["lambda_distance"] = c.lambda_distance;
  j["angle_embedding"] = c.angle_embedding;
  j["epsilon"] = c.epsilon;
  if (c.co_learning) {
    j["co_learning"] = {{"orderings", c.co_learning->image.orderings},
                        {"frames", c.co_learning->image.frames},
                        {"image_seed", c.co_learning->image.seed},
                        {"patch_size", c.co_learning->patch_size},
                        {"embed_dim", c.co_learning->embed_dim}};
  } else {
    j["co_learning"] = nullptr;
  }
  return j;
}

NetworkConfig network_config_from(const json& j) {
  NetworkConfig c;
  c.k_max = j.at("k_max").get<int>();
  c.channels = j.at("channels").get<std::vector<std::size_t>>();
  c.tcn_window = j.at("tcn_window").get<std::size_t>();
  c.learning_rate = j.at("learning_rate").get<double>();
  c.epochs = j.at("epochs").get<std::size_t>();
  c.batch_size = j.at("batch_size").get<std::size_t>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.lambda_distance = j.at("lambda_distance").get<double>();
  c.angle_embedding = j.at("angle_embedding").get<bool>();
  c.epsilon = j.at("epsilon").get<double>();
  const json& co = j.at("co_learning");
  if (!co.is_null()) {
    CoLearningConfig cl;
    cl.image.orderings = co.at("orderings").get<std::size_t>();
    cl.image.frames = co.at("frames").get<std::size_t>();
    cl.image.seed = co.at("image_seed").get<std::uint64_t>();
    cl.patch_size = co.at("patch_size").get<std::size_t>();
    cl.embed_dim = co.at("embed_dim").get<std::size_t>();
    c.co_learning = cl;
  }
  return c;
}

}  // namespace

std::string checkpoint_to_string(const Checkpoint& ckpt) {
  const Network& net = ckpt.network;
  json doc;
  doc["format"] = "skelgait-checkpoint";
  doc["version"] = kCheckpointVersion;
  doc["topology"] = "kinect25";
  doc["input_channels"] = net.input_channels();
  doc["trained"] = net.trained;
  doc["network"] = network_config_json(net.config);
  json params = json::array();
  net.for_each_parameter([&](const std::string& name, std::vector<std::size_t> shape,
                             std::span<const double> values) {
    params.push_back({{"name", name},
                      {"shape", shape},
                      {"values", std::vector<double>(values.begin(), values.end())}});
  });
  doc["parameters"] = std::move(params);
  if (ckpt.clips) {
    doc["clips"] = {{"clip_frames", ckpt.clips->clip_frames}, {"n_clips", ckpt.clips->n_clips}};
  } else {
    doc["clips"] = nullptr;
  }
  if (ckpt.svr) {
    const SvrModel& m = *ckpt.svr;
    doc["svr"] = {{"epsilon", m.epsilon},
                  {"C", m.C},
                  {"bias", m.bias},
                  {"weights", std::vector<double>(m.weights.data(),
                                                  m.weights.data() + m.weights.size())}};
  } else {
    doc["svr"] = nullptr;
  }
  return doc.dump(1) + "\n";
}

Checkpoint checkpoint_from_string(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("checkpoint: ") + e.what());
  }
  try {
    if (doc.at("format") != "skelgait-checkpoint") {
      throw ParseError("checkpoint: not a skelgait checkpoint");
    }
    const int version = doc.at("version").get<int>();
    if (version != kCheckpointVersion) {
      throw ParseError("checkpoint: unsupported version " + std::to_string(version));
    }
    if (doc.at("topology") != "kinect25") {
      throw ParseError("checkpoint: unknown topology " + doc.at("topology").dump());
    }
    Checkpoint ckpt;
    const NetworkConfig cfg = network_config_from(doc.at("network"));
    ckpt.network = make_network(cfg, default_topology(),
                                doc.at("input_channels").get<std::size_t>());
    ckpt.network.trained = doc.at("trained").get<bool>();

    const json& params = doc.at("parameters");
    std::size_t index = 0;
    ckpt.network.for_each_parameter([&](const std::string& name, std::vector<std::size_t> shape,
                                        std::span<double> values) {
      if (index >= params.size()) {
        throw ValidationError("checkpoint: missing parameter '" + name + "'");
      }
      const json& p = params[index++];
      const auto got_name = p.at("name").get<std::string>();
      if (got_name != name) {
        throw ValidationError("checkpoint: expected parameter '" + name + "', found '" +
                              got_name + "'");
      }
      if (p.at("shape").get<std::vector<std::size_t>>() != shape) {
        throw ValidationError("checkpoint: parameter '" + name + "' has shape " +
                              p.at("shape").dump() + ", config implies " + json(shape).dump());
      }
      const auto v = p.at("values").get<std::vector<double>>();
      if (v.size() != values.size()) {
        throw ValidationError("checkpoint: parameter '" + name + "' has " +
                              std::to_string(v.size()) + " values, expected " +
                              std::to_string(values.size()));
      }
      std::copy(v.begin(), v.end(), values.begin());
    });
    if (index != params.size()) {
      throw ValidationError("checkpoint: " + std::to_string(params.size() - index) +
                            " unexpected extra parameter arrays");
    }

    if (const json& c = doc.at("clips"); !c.is_null()) {
      ckpt.clips = ClipConfig{c.at("clip_frames").get<std::size_t>(),
                              c.at("n_clips").get<std::size_t>()};
    }
    if (const json& s = doc.at("svr"); !s.is_null()) {
      SvrModel m;
      m.epsilon = s.at("epsilon").get<double>();
      m.C = s.at("C").get<double>();
      m.bias = s.at("bias").get<double>();
      const auto w = s.at("weights").get<std::vector<double>>();
      m.weights = Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
      ckpt.svr = std::move(m);
    }
    return ckpt;
  } catch (const json::exception& e) {
    throw ParseError(std::string("checkpoint: ") + e.what());
  } catch (const ConfigError& e) {
    throw ValidationError(std::string("checkpoint: invalid network config: ") + e.what());
  }
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  const std::string text = checkpoint_to_string(ckpt);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write checkpoint " + path.string());
  out << text;
  if (!out) throw IoError("failed writing checkpoint " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return checkpoint_from_string(buf.str());
}

}  // namespace skelgait
