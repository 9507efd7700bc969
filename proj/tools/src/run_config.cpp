#include "radarnet_cli/run_config.hpp"

#include <concepts>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "radarnet/error.hpp"

namespace radarnet::cli {

namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::Config, "config field '" + path + "' " + what);
}

// Strict view of one JSON object: every key must be read, else it is
// reported as unknown when the view is closed.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_.empty() ? "<root>" : path_, "must be an object");
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json* find(const std::string& key) {
    auto it = j_.find(key);
    if (it == j_.end()) return nullptr;
    seen_.insert(key);
    return &*it;
  }

  void read(const std::string& key, double& dst) {
    if (const json* v = find(key)) {
      if (!v->is_number()) fail(field(key), "must be a number");
      dst = v->get<double>();
    }
  }
  template <std::unsigned_integral U>
  void read(const std::string& key, U& dst) {
    if (const json* v = find(key)) {
      if (!v->is_number_unsigned()) fail(field(key), "must be a non-negative integer");
      dst = v->get<U>();
    }
  }
  void read(const std::string& key, bool& dst) {
    if (const json* v = find(key)) {
      if (!v->is_boolean()) fail(field(key), "must be true or false");
      dst = v->get<bool>();
    }
  }
  void read(const std::string& key, std::string& dst) {
    if (const json* v = find(key)) {
      if (!v->is_string()) fail(field(key), "must be a string");
      dst = v->get<std::string>();
    }
  }

  void close() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.contains(key)) fail(field(key), "is not a known setting");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

std::string layout_name(BodyLayout l) {
  switch (l) {
    case BodyLayout::Compact: return "compact";
    case BodyLayout::TwoBody: return "two_body";
    case BodyLayout::Box: return "box";
  }
  return "compact";
}

json profile_to_json(const ClassProfile& p) {
  return {{"length_min", p.length_min},
          {"length_max", p.length_max},
          {"speed_min", p.speed_min},
          {"speed_max", p.speed_max},
          {"scatterers_per_meter", p.scatterers_per_meter},
          {"amplitude_min", p.amplitude_min},
          {"amplitude_max", p.amplitude_max},
          {"height_min", p.height_min},
          {"height_max", p.height_max},
          {"rear_plate_amplitude", p.rear_plate_amplitude},
          {"layout", layout_name(p.layout)},
          {"gap_start", p.gap_start},
          {"gap_end", p.gap_end}};
}

void read_profile(Section s, ClassProfile& p) {
  s.read("length_min", p.length_min);
  s.read("length_max", p.length_max);
  s.read("speed_min", p.speed_min);
  s.read("speed_max", p.speed_max);
  s.read("scatterers_per_meter", p.scatterers_per_meter);
  s.read("amplitude_min", p.amplitude_min);
  s.read("amplitude_max", p.amplitude_max);
  s.read("height_min", p.height_min);
  s.read("height_max", p.height_max);
  s.read("rear_plate_amplitude", p.rear_plate_amplitude);
  std::string layout = layout_name(p.layout);
  s.read("layout", layout);
  if (layout == "compact") {
    p.layout = BodyLayout::Compact;
  } else if (layout == "two_body") {
    p.layout = BodyLayout::TwoBody;
  } else if (layout == "box") {
    p.layout = BodyLayout::Box;
  } else {
    fail(s.field("layout"), "must be compact, two_body or box");
  }
  s.read("gap_start", p.gap_start);
  s.read("gap_end", p.gap_end);
  s.close();
}

void check_range(const std::string& path, double lo, double hi) {
  if (!(lo <= hi)) fail(path, "has min above max");
}

}  // namespace

RadarParams RunConfig::radar_params() const {
  RadarParams p = radar;
  p.geometry.depression = degrees_to_radians(depression_deg);
  return p;
}

ClassCounts RunConfig::counts() const {
  return dataset_preset == "skewed" ? skewed_counts() : uniform_counts(per_class);
}

CvConfig RunConfig::cv_config() const {
  CvConfig c;
  c.folds = folds;
  c.train_per_class = train_per_class;
  c.val_per_class = val_per_class;
  c.split_seed = split_seed;
  c.net_seed = net_seed;
  c.preset = network;
  c.train = train;
  c.threads = threads;
  return c;
}

void RunConfig::apply_preset(const std::string& name) {
  if (name == "desk") {
    train_per_class = 40;
    val_per_class = 10;
  } else if (name == "skewed") {
    train_per_class = 400;
    val_per_class = 45;
  } else {
    throw Error(ErrorCode::Config, "unknown preset '" + name + "' (expected desk or skewed)");
  }
  dataset_preset = name;
}

void RunConfig::validate() const {
  try {
    radar_params().validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::Config, std::string("radar: ") + e.what());
  }
  try {
    train.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::Config, std::string("train: ") + e.what());
  }
  if (dataset_preset != "desk" && dataset_preset != "skewed") {
    fail("dataset.preset", "must be desk or skewed");
  }
  if (per_class == 0) fail("dataset.per_class", "must be positive");
  if (folds == 0) fail("cv.folds", "must be positive");
  if (train_per_class == 0) fail("cv.train_per_class", "must be positive");
  check_range("profiles.global_speed", profiles.global_speed_min, profiles.global_speed_max);
  if (!(profiles.global_speed_min > 0.0)) fail("profiles.global_speed_min", "must be positive");
  if (!(profiles.footprint_length > 0.0)) fail("profiles.footprint_length", "must be positive");
  for (auto cls : kAllClasses) {
    const ClassProfile& p = profiles[cls];
    const std::string base = "profiles.classes." + std::string(class_letter(cls)) + ".";
    check_range(base + "length", p.length_min, p.length_max);
    check_range(base + "speed", p.speed_min, p.speed_max);
    check_range(base + "amplitude", p.amplitude_min, p.amplitude_max);
    check_range(base + "height", p.height_min, p.height_max);
    if (!(p.length_min > 0.0)) fail(base + "length_min", "must be positive");
    if (!(p.scatterers_per_meter > 0.0)) fail(base + "scatterers_per_meter", "must be positive");
    if (p.speed_min < profiles.global_speed_min || p.speed_max > profiles.global_speed_max) {
      fail(base + "speed_min", "range must lie within the global speed bounds");
    }
    if (!(p.gap_start >= 0.0 && p.gap_start < p.gap_end && p.gap_end <= 1.0)) {
      fail(base + "gap_start", "must satisfy 0 <= gap_start < gap_end <= 1");
    }
  }
}

std::string config_to_json(const RunConfig& c) {
  json j;
  j["radar"] = {{"carrier_hz", c.radar.carrier_hz},
                {"sweep_bandwidth_hz", c.radar.sweep_bandwidth_hz},
                {"ramp_duration_s", c.radar.ramp_duration_s},
                {"samples_per_ramp", c.radar.samples_per_ramp},
                {"fft_size", c.radar.fft_size},
                {"amplitude", c.radar.amplitude},
                {"mount_height", c.radar.geometry.mount_height},
                {"depression_deg", c.depression_deg}};
  json classes = json::object();
  for (auto cls : kAllClasses) classes[std::string(class_letter(cls))] = profile_to_json(c.profiles[cls]);
  j["profiles"] = {{"global_speed_min", c.profiles.global_speed_min},
                   {"global_speed_max", c.profiles.global_speed_max},
                   {"footprint_length", c.profiles.footprint_length},
                   {"entry_distance", c.profiles.entry_distance},
                   {"snr_db", c.profiles.snr_db},
                   {"classes", classes}};
  j["dataset"] = {{"preset", c.dataset_preset},
                  {"per_class", c.per_class},
                  {"seed", c.dataset_seed},
                  {"target_width", c.tensor.target_width},
                  {"target_height", c.tensor.target_height},
                  {"crop_width", c.tensor.crop_width},
                  {"save_signals", c.save_signals}};
  j["cv"] = {{"folds", c.folds},
             {"train_per_class", c.train_per_class},
             {"val_per_class", c.val_per_class},
             {"split_seed", c.split_seed},
             {"net_seed", c.net_seed},
             {"network", std::string(nn::to_string(c.network))}};
  j["train"] = {{"learning_rate", c.train.learning_rate},
                {"momentum", c.train.momentum},
                {"weight_decay", c.train.weight_decay},
                {"epochs", c.train.epochs},
                {"seed", c.train.seed},
                {"dropout_rate", c.train.dropout_rate}};
  j["threads"] = c.threads;
  j["paths"] = {{"data", c.data_dir.string()}, {"out", c.out.string()}};
  return j.dump(2) + "\n";
}

RunConfig config_from_json(const std::string& text, const RunConfig& base) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::Config, std::string("config is not valid JSON: ") + e.what());
  }
  RunConfig c = base;
  Section root(j, "");

  if (const json* v = root.find("radar")) {
    Section s(*v, "radar");
    s.read("carrier_hz", c.radar.carrier_hz);
    s.read("sweep_bandwidth_hz", c.radar.sweep_bandwidth_hz);
    s.read("ramp_duration_s", c.radar.ramp_duration_s);
    s.read("samples_per_ramp", c.radar.samples_per_ramp);
    s.read("fft_size", c.radar.fft_size);
    s.read("amplitude", c.radar.amplitude);
    s.read("mount_height", c.radar.geometry.mount_height);
    s.read("depression_deg", c.depression_deg);
    s.close();
  }
  if (const json* v = root.find("profiles")) {
    Section s(*v, "profiles");
    s.read("global_speed_min", c.profiles.global_speed_min);
    s.read("global_speed_max", c.profiles.global_speed_max);
    s.read("footprint_length", c.profiles.footprint_length);
    s.read("entry_distance", c.profiles.entry_distance);
    s.read("snr_db", c.profiles.snr_db);
    if (const json* cl = s.find("classes")) {
      Section classes(*cl, "profiles.classes");
      for (auto cls : kAllClasses) {
        const std::string letter(class_letter(cls));
        if (const json* p = classes.find(letter)) {
          read_profile(Section(*p, classes.field(letter)), c.profiles[cls]);
        }
      }
      classes.close();
    }
    s.close();
  }
  if (const json* v = root.find("dataset")) {
    Section s(*v, "dataset");
    s.read("preset", c.dataset_preset);
    s.read("per_class", c.per_class);
    s.read("seed", c.dataset_seed);
    s.read("target_width", c.tensor.target_width);
    s.read("target_height", c.tensor.target_height);
    s.read("crop_width", c.tensor.crop_width);
    s.read("save_signals", c.save_signals);
    s.close();
  }
  if (const json* v = root.find("cv")) {
    Section s(*v, "cv");
    s.read("folds", c.folds);
    s.read("train_per_class", c.train_per_class);
    s.read("val_per_class", c.val_per_class);
    s.read("split_seed", c.split_seed);
    s.read("net_seed", c.net_seed);
    std::string net(nn::to_string(c.network));
    s.read("network", net);
    try {
      c.network = nn::parse_preset(net);
    } catch (const Error&) {
      fail("cv.network", "must be mini or full");
    }
    s.close();
  }
  if (const json* v = root.find("train")) {
    Section s(*v, "train");
    s.read("learning_rate", c.train.learning_rate);
    s.read("momentum", c.train.momentum);
    s.read("weight_decay", c.train.weight_decay);
    s.read("epochs", c.train.epochs);
    s.read("seed", c.train.seed);
    s.read("dropout_rate", c.train.dropout_rate);
    s.close();
  }
  root.read("threads", c.threads);
  if (const json* v = root.find("paths")) {
    Section s(*v, "paths");
    std::string data = c.data_dir.string(), out = c.out.string();
    s.read("data", data);
    s.read("out", out);
    c.data_dir = data;
    c.out = out;
    s.close();
  }
  root.close();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read config '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return config_from_json(text.str());
}

}  // namespace radarnet::cli
