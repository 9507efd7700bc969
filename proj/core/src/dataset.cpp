#include "radarnet/dataset.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <random>
#include <sstream>

#include <json.hpp>

#include "binary_io.hpp"
#include "radarnet/error.hpp"
#include "radarnet/parallel.hpp"
#include "radarnet/signal_io.hpp"
#include "radarnet/tensor_io.hpp"

namespace radarnet {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::string radar_params_hash(const RadarParams& p) {
  std::string bytes;
  detail::put_f64(bytes, p.carrier_hz);
  detail::put_f64(bytes, p.sweep_bandwidth_hz);
  detail::put_f64(bytes, p.ramp_duration_s);
  detail::put_u64(bytes, p.samples_per_ramp);
  detail::put_u64(bytes, p.fft_size);
  detail::put_f64(bytes, p.amplitude);
  detail::put_f64(bytes, p.geometry.mount_height);
  detail::put_f64(bytes, p.geometry.depression);
  std::uint64_t h = 0xcbf29ce484222325ull;  // FNV-1a
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ClassCounts skewed_counts() {
  return {{VehicleClass::A, 3000}, {VehicleClass::B, 600}, {VehicleClass::C, 700},
          {VehicleClass::D, 2300}, {VehicleClass::E, 2400}, {VehicleClass::G, 981}};
}

ClassCounts uniform_counts(std::size_t per_class) {
  ClassCounts counts;
  for (auto c : kAllClasses) counts[c] = per_class;
  return counts;
}

// ---- manifest --------------------------------------------------------------

std::string manifest_to_json(const Manifest& m) {
  json j;
  j["format_version"] = m.format_version;
  j["radar_params_hash"] = m.radar_params_hash;
  j["base_seed"] = m.base_seed;
  j["tensor_shape"] = {{"channels", m.tensor_shape.channels},
                       {"height", m.tensor_shape.height},
                       {"width", m.tensor_shape.width}};
  json counts = json::object();
  for (auto c : kAllClasses) counts[std::string(class_letter(c))] = m.class_counts[index_of(c)];
  j["class_counts"] = counts;
  json samples = json::array();
  for (const auto& r : m.samples) {
    json s = {{"id", r.id},
              {"class", std::string(class_letter(r.label))},
              {"file", r.file},
              {"speed", r.speed},
              {"seed", r.seed}};
    if (!r.signal_file.empty()) s["signal_file"] = r.signal_file;
    samples.push_back(std::move(s));
  }
  j["samples"] = std::move(samples);
  return j.dump(2) + "\n";
}

Manifest manifest_from_json(const std::string& text) {
  Manifest m;
  try {
    const json j = json::parse(text);
    m.format_version = j.at("format_version").get<int>();
    if (m.format_version != kManifestFormatVersion) {
      throw Error(ErrorCode::Config,
                  "unsupported manifest format_version " + std::to_string(m.format_version));
    }
    m.radar_params_hash = j.at("radar_params_hash").get<std::string>();
    m.base_seed = j.at("base_seed").get<std::uint64_t>();
    const auto& shape = j.at("tensor_shape");
    m.tensor_shape = {shape.at("channels").get<std::size_t>(),
                      shape.at("height").get<std::size_t>(),
                      shape.at("width").get<std::size_t>()};
    for (const auto& [letter, count] : j.at("class_counts").items()) {
      m.class_counts[index_of(parse_class(letter))] = count.get<std::size_t>();
    }
    for (const auto& s : j.at("samples")) {
      SampleRecord r;
      r.id = s.at("id").get<SampleId>();
      r.label = parse_class(s.at("class").get<std::string>());
      r.file = s.at("file").get<std::string>();
      r.speed = s.at("speed").get<double>();
      r.seed = s.at("seed").get<std::uint64_t>();
      if (s.contains("signal_file")) r.signal_file = s.at("signal_file").get<std::string>();
      m.samples.push_back(std::move(r));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Config, std::string("malformed manifest: ") + e.what());
  }
  for (std::size_t i = 0; i < m.samples.size(); ++i) {
    if (m.samples[i].id != i) {
      throw Error(ErrorCode::Config, "manifest sample ids must be 0..n-1 in order");
    }
  }
  return m;
}

void write_manifest(const fs::path& path, const Manifest& m) {
  detail::write_file(path, manifest_to_json(m));
}

Manifest read_manifest(const fs::path& path) {
  return manifest_from_json(detail::read_file(path));
}

// ---- dataset ---------------------------------------------------------------

std::size_t Dataset::default_threads() { return default_thread_count(); }

const SampleRecord& Dataset::record(SampleId id) const {
  if (id >= manifest.samples.size()) {
    throw Error(ErrorCode::InvalidArgument, "sample id " + std::to_string(id) + " out of range");
  }
  return manifest.samples[id];
}

RdTensor Dataset::load(SampleId id) const {
  const SampleRecord& r = record(id);
  RdTensor t = load_tensor(root / r.file);
  const TensorShape shape{t.channels, t.height, t.width};
  if (!(shape == manifest.tensor_shape)) {
    throw Error(ErrorCode::ShapeMismatch, "tensor '" + r.file + "' does not match the manifest shape");
  }
  t.label = r.label;
  return t;
}

std::vector<RdTensor> Dataset::load_all(std::size_t threads) const {
  std::vector<RdTensor> out(size());
  parallel_for(size(), threads, [&](std::size_t i) { out[i] = load(i); });
  return out;
}

Dataset open_dataset(const fs::path& root) {
  const fs::path manifest = root / "manifest.json";
  if (!fs::exists(manifest)) {
    throw Error(ErrorCode::Io, "no manifest.json in '" + root.string() + "'");
  }
  return {root, read_manifest(manifest)};
}

namespace {

struct DatasetPlan {
  Manifest manifest;
  std::vector<Scenario> scenarios;
  TensorShapeOptions shape;
};

DatasetPlan plan_dataset(const ClassCounts& counts, std::uint64_t base_seed,
                         const ProfileTable& profiles, const RadarParams& radar,
                         const GenerateOptions& options) {
  radar.validate();
  for (const auto& [cls, n] : counts) {
    if (n == 0) {
      throw Error(ErrorCode::InvalidArgument,
                  "class " + std::string(class_letter(cls)) + " requests zero samples");
    }
  }

  DatasetPlan plan;
  Manifest& m = plan.manifest;
  m.radar_params_hash = radar_params_hash(radar);
  m.base_seed = base_seed;
  for (auto cls : kAllClasses) {
    auto it = counts.find(cls);
    if (it == counts.end()) continue;
    m.class_counts[index_of(cls)] = it->second;
    for (std::size_t k = 0; k < it->second; ++k) {
      const SampleId id = m.samples.size();
      SampleRecord r;
      r.id = id;
      r.label = cls;
      r.seed = base_seed + id;
      char name[64];
      std::snprintf(name, sizeof name, "samples/%06llu_%s", static_cast<unsigned long long>(id),
                    std::string(class_letter(cls)).c_str());
      r.file = std::string(name) + ".rdt";
      if (options.save_signals) r.signal_file = std::string(name) + ".rdb";
      plan.scenarios.push_back(sample_vehicle_scenario(cls, r.seed, profiles));
      r.speed = plan.scenarios.back().speed;
      m.samples.push_back(std::move(r));
    }
  }

  plan.shape = options.tensor;
  if (plan.shape.target_width == 0) {
    // Each pass yields an even ramp count, split evenly between polarities.
    for (const auto& s : plan.scenarios) {
      plan.shape.target_width =
          std::max(plan.shape.target_width, ramps_for_pass(s.footprint_length, s.speed, radar) / 2);
    }
  }
  return plan;
}

std::size_t worker_count(const GenerateOptions& options) {
  return options.threads == 0 ? default_thread_count() : options.threads;
}

}  // namespace

Dataset generate_dataset(const ClassCounts& counts, std::uint64_t base_seed,
                         const ProfileTable& profiles, const RadarParams& radar,
                         const fs::path& out_dir, const GenerateOptions& options) {
  DatasetPlan plan = plan_dataset(counts, base_seed, profiles, radar, options);

  std::error_code ec;
  // "data/" names the directory data, not an empty entry inside it.
  const fs::path dir = out_dir.has_filename() ? out_dir : out_dir.parent_path();
  const fs::path parent = dir.has_parent_path() ? dir.parent_path() : fs::path(".");
  if (!fs::is_directory(parent, ec)) {
    throw Error(ErrorCode::Io, "parent directory of '" + out_dir.string() + "' does not exist");
  }
  fs::create_directory(out_dir, ec);
  fs::create_directory(out_dir / "samples", ec);
  if (!fs::is_directory(out_dir / "samples")) {
    throw Error(ErrorCode::Io, "cannot create '" + (out_dir / "samples").string() + "'");
  }

  Manifest& m = plan.manifest;
  std::vector<TensorShape> shapes(plan.scenarios.size());
  parallel_for(plan.scenarios.size(), worker_count(options), [&](std::size_t i) {
    const BeatSignal sig = synthesize_beat_signal(plan.scenarios[i], radar);
    const RdTensor t = signal_to_tensor(sig, radar, plan.shape);
    shapes[i] = {t.channels, t.height, t.width};
    save_tensor(out_dir / m.samples[i].file, t);
    if (options.save_signals) save_signal(out_dir / m.samples[i].signal_file, sig);
  });
  if (!shapes.empty()) m.tensor_shape = shapes.front();

  write_manifest(out_dir / "manifest.json", m);
  return {out_dir, std::move(m)};
}

InMemoryDataset synthesize_dataset(const ClassCounts& counts, std::uint64_t base_seed,
                                   const ProfileTable& profiles, const RadarParams& radar,
                                   const GenerateOptions& options) {
  DatasetPlan plan = plan_dataset(counts, base_seed, profiles, radar, options);
  InMemoryDataset out;
  out.tensors.resize(plan.scenarios.size());
  parallel_for(plan.scenarios.size(), worker_count(options), [&](std::size_t i) {
    out.tensors[i] = signal_to_tensor(synthesize_beat_signal(plan.scenarios[i], radar), radar, plan.shape);
  });
  if (!out.tensors.empty()) {
    const auto& t = out.tensors.front();
    plan.manifest.tensor_shape = {t.channels, t.height, t.width};
  }
  for (auto& r : plan.manifest.samples) {
    r.file.clear();
    r.signal_file.clear();
  }
  out.manifest = std::move(plan.manifest);
  return out;
}

// ---- splits and batches ----------------------------------------------------

PerClass<std::vector<SampleId>> ids_by_class(const std::vector<SampleId>& ids, const Manifest& m) {
  PerClass<std::vector<SampleId>> out;
  for (SampleId id : ids) {
    if (id >= m.samples.size()) {
      throw Error(ErrorCode::InvalidArgument, "sample id " + std::to_string(id) + " out of range");
    }
    out[index_of(m.samples[id].label)].push_back(id);
  }
  return out;
}

std::vector<FoldSplit> stratified_fold_split(const Manifest& m, std::size_t k,
                                             std::size_t train_per_class,
                                             std::size_t val_per_class, std::uint64_t seed) {
  if (k == 0) throw Error(ErrorCode::InvalidArgument, "fold count must be positive");
  PerClass<std::vector<SampleId>> by_class;
  for (const auto& r : m.samples) by_class[index_of(r.label)].push_back(r.id);
  for (auto cls : kAllClasses) {
    const std::size_t have = by_class[index_of(cls)].size();
    if (have < train_per_class + val_per_class + 1) {
      std::ostringstream msg;
      msg << "class " << class_letter(cls) << " has " << have << " samples but the split needs "
          << train_per_class + val_per_class + 1;
      throw Error(ErrorCode::InsufficientClass, msg.str());
    }
  }

  std::vector<FoldSplit> folds(k);
  for (std::size_t f = 0; f < k; ++f) {
    FoldSplit& split = folds[f];
    split.fold_index = f;
    std::mt19937_64 rng(mix_seed({seed, f}));
    for (auto cls : kAllClasses) {
      std::vector<SampleId> ids = by_class[index_of(cls)];
      std::shuffle(ids.begin(), ids.end(), rng);
      const auto train_end = ids.begin() + static_cast<std::ptrdiff_t>(train_per_class);
      const auto val_end = train_end + static_cast<std::ptrdiff_t>(val_per_class);
      split.train.insert(split.train.end(), ids.begin(), train_end);
      split.val.insert(split.val.end(), train_end, val_end);
      split.test.insert(split.test.end(), val_end, ids.end());
    }
    std::sort(split.train.begin(), split.train.end());
    std::sort(split.val.begin(), split.val.end());
    std::sort(split.test.begin(), split.test.end());
  }
  return folds;
}

std::vector<Batch> balanced_batches(const PerClass<std::vector<SampleId>>& train_by_class,
                                    std::uint64_t seed) {
  std::size_t per_epoch = SIZE_MAX;
  for (auto cls : kAllClasses) {
    const auto& ids = train_by_class[index_of(cls)];
    if (ids.empty()) {
      throw Error(ErrorCode::MissingClass, "training set has no samples of class " +
                                               std::string(class_letter(cls)));
    }
    per_epoch = std::min(per_epoch, ids.size());
  }
  PerClass<std::vector<SampleId>> shuffled = train_by_class;
  std::mt19937_64 rng(seed);
  for (auto& ids : shuffled) std::shuffle(ids.begin(), ids.end(), rng);

  std::vector<Batch> batches(per_epoch);
  for (std::size_t b = 0; b < per_epoch; ++b) {
    for (std::size_t c = 0; c < kNumClasses; ++c) batches[b][c] = shuffled[c][b];
  }
  return batches;
}

}  // namespace radarnet
