#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <map>
#include <string>
#include <vector>

#include "radarnet/radar_model.hpp"
#include "radarnet/scenario.hpp"
#include "radarnet/seed.hpp"
#include "radarnet/spectrogram.hpp"
#include "radarnet/vehicle_class.hpp"

namespace radarnet {

using SampleId = std::uint64_t;
using ClassCounts = std::map<VehicleClass, std::size_t>;
template <typename T>
using PerClass = std::array<T, kNumClasses>;

struct SampleRecord {
  SampleId id = 0;
  VehicleClass label = VehicleClass::A;
  std::string file;  // relative to the dataset root
  double speed = 0.0;
  std::uint64_t seed = 0;
  std::string signal_file;  // optional raw .rdb signal, relative to the root
};

struct TensorShape {
  std::size_t channels = 0, height = 0, width = 0;
  bool operator==(const TensorShape&) const = default;
};

inline constexpr int kManifestFormatVersion = 1;

/// Everything needed to locate and validate a generated corpus. Serialized
/// as manifest.json in the dataset root.
struct Manifest {
  int format_version = kManifestFormatVersion;
  std::string radar_params_hash;
  std::uint64_t base_seed = 0;
  TensorShape tensor_shape;
  PerClass<std::size_t> class_counts{};
  std::vector<SampleRecord> samples;  // ordered by id, ids are 0..n-1
};

struct Dataset {
  std::filesystem::path root;
  Manifest manifest;

  std::size_t size() const noexcept { return manifest.samples.size(); }
  const SampleRecord& record(SampleId id) const;
  RdTensor load(SampleId id) const;
  /// Loads every tensor in id order, labels attached.
  std::vector<RdTensor> load_all(std::size_t threads = default_threads()) const;

  static std::size_t default_threads();
};

/// Stable hex digest of every RadarParams field.
std::string radar_params_hash(const RadarParams& p);

struct GenerateOptions {
  TensorShapeOptions tensor{};  // target_width 0 selects the widest sample
  bool save_signals = false;    // also write the raw .rdb beat signal per sample
  std::size_t threads = 0;      // 0 = hardware concurrency
};

/// Synthesizes one labeled tensor (and optionally its signal) per requested
/// sample. Sample i, in class order A..G, uses scenario seed base_seed + i.
/// `out_dir` is created if missing; its parent must exist.
Dataset generate_dataset(const ClassCounts& counts, std::uint64_t base_seed,
                         const ProfileTable& profiles, const RadarParams& radar,
                         const std::filesystem::path& out_dir,
                         const GenerateOptions& options = {});

struct InMemoryDataset {
  Manifest manifest;  // sample records carry no file names
  std::vector<RdTensor> tensors;
};

/// Same samples as generate_dataset, kept in memory instead of on disk.
InMemoryDataset synthesize_dataset(const ClassCounts& counts, std::uint64_t base_seed,
                                   const ProfileTable& profiles, const RadarParams& radar,
                                   const GenerateOptions& options = {});

void write_manifest(const std::filesystem::path& path, const Manifest& m);
Manifest read_manifest(const std::filesystem::path& path);
std::string manifest_to_json(const Manifest& m);
Manifest manifest_from_json(const std::string& text);

Dataset open_dataset(const std::filesystem::path& root);

struct FoldSplit {
  std::size_t fold_index = 0;
  std::vector<SampleId> train;
  std::vector<SampleId> val;
  std::vector<SampleId> test;
};

/// Per fold: shuffle each class independently (seeded by seed and fold
/// index), take the train and validation quotas, the rest is test. Test
/// sets of different folds overlap.
std::vector<FoldSplit> stratified_fold_split(const Manifest& m, std::size_t k,
                                             std::size_t train_per_class,
                                             std::size_t val_per_class, std::uint64_t seed);

PerClass<std::vector<SampleId>> ids_by_class(const std::vector<SampleId>& ids, const Manifest& m);

using Batch = PerClass<SampleId>;

/// One epoch of class-balanced batches: each batch holds one sample of every
/// class in class order; the epoch has min-class-count batches and each
/// class is sampled without replacement.
std::vector<Batch> balanced_batches(const PerClass<std::vector<SampleId>>& train_by_class,
                                    std::uint64_t seed);

/// Class-skewed counts with cars, cargo trucks and buses dominating.
ClassCounts skewed_counts();
ClassCounts uniform_counts(std::size_t per_class);

}  // namespace radarnet
