#include "dvs/config.h"

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>

namespace dvs {
namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(int line, const std::string& msg) {
  throw ConfigError("config line " + std::to_string(line) + ": " + msg);
}

double to_double(std::string_view v, int line, std::string_view key) {
  double out = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) {
    fail(line, "expected a number for '" + std::string(key) + "', got '" + std::string(v) + "'");
  }
  return out;
}

template <typename Int>
Int to_int(std::string_view v, int line, std::string_view key) {
  Int out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) {
    fail(line, "expected an integer for '" + std::string(key) + "', got '" + std::string(v) + "'");
  }
  return out;
}

ObjectSpec parse_object(std::string_view v, int line) {
  std::istringstream ss{std::string(v)};
  std::string shape;
  ss >> shape;
  ObjectSpec o;
  if (shape == "rect") {
    o.shape = Shape::kRectangle;
  } else if (shape == "disc") {
    o.shape = Shape::kDisc;
  } else {
    fail(line, "object shape must be rect or disc, got '" + shape + "'");
  }
  std::string tok;
  while (ss >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) fail(line, "object attribute '" + tok + "' lacks '='");
    const std::string_view k = std::string_view(tok).substr(0, eq);
    const std::string_view val = std::string_view(tok).substr(eq + 1);
    if (k == "class") {
      o.cls = to_int<Label>(val, line, k);
    } else if (k == "x") {
      o.x = to_double(val, line, k);
    } else if (k == "y") {
      o.y = to_double(val, line, k);
    } else if (k == "w") {
      o.width = to_double(val, line, k);
    } else if (k == "h") {
      o.height = to_double(val, line, k);
    } else if (k == "r") {
      o.radius = to_double(val, line, k);
    } else if (k == "vx") {
      o.vx = to_double(val, line, k);
    } else if (k == "vy") {
      o.vy = to_double(val, line, k);
    } else if (k == "jitter") {
      o.jitter = to_double(val, line, k);
    } else {
      fail(line, "unknown object attribute '" + std::string(k) + "'");
    }
  }
  return o;
}

}  // namespace

SceneSpec ExperimentConfig::scene() const { return scene(seed); }

SceneSpec ExperimentConfig::scene(std::uint64_t seed_override) const {
  SceneSpec s = make_scene(preset, seed_override, frame_w, frame_h, sequence_length);
  s.num_classes = num_classes;
  if (!objects.empty()) s.objects = objects;
  if (flicker) s.flicker = *flicker;
  s.validate();
  return s;
}

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig cfg;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string_view s = raw;
    if (const auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
    s = trim(s);
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) fail(line, "expected 'key = value'");
    const std::string_view key = trim(s.substr(0, eq));
    const std::string_view val = trim(s.substr(eq + 1));
    if (val.empty()) fail(line, "empty value for '" + std::string(key) + "'");

    if (key == "scene") {
      cfg.preset = parse_preset(val);
    } else if (key == "frame_w") {
      cfg.frame_w = to_int<int>(val, line, key);
    } else if (key == "frame_h") {
      cfg.frame_h = to_int<int>(val, line, key);
    } else if (key == "num_classes") {
      cfg.num_classes = to_int<int>(val, line, key);
    } else if (key == "sequence_length") {
      cfg.sequence_length = to_int<int>(val, line, key);
    } else if (key == "seed") {
      cfg.seed = to_int<std::uint64_t>(val, line, key);
    } else if (key == "flicker") {
      cfg.flicker = to_double(val, line, key);
    } else if (key == "object") {
      cfg.objects.push_back(parse_object(val, line));
    } else if (key == "seg_noise") {
      cfg.backends.seg_noise_rate = to_double(val, line, key);
    } else if (key == "flow_noise") {
      cfg.backends.flow_noise_sigma = to_double(val, line, key);
    } else if (key == "seg_cost") {
      cfg.backends.seg_cost = to_double(val, line, key);
    } else if (key == "flow_cost") {
      cfg.backends.flow_cost = to_double(val, line, key);
    } else if (key == "dn_cost") {
      cfg.backends.dn_cost = to_double(val, line, key);
    } else {
      fail(line, "unknown key '" + std::string(key) + "'");
    }
  }
  cfg.backends.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return parse_config(in);
}

}  // namespace dvs
