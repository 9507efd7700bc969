#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>

#include "radarnet/dataset.hpp"
#include "radarnet/evaluation.hpp"
#include "radarnet/network.hpp"
#include "radarnet/optimizer.hpp"
#include "radarnet/radar_model.hpp"
#include "radarnet/scenario.hpp"

namespace radarnet::cli {

/// Every knob a subcommand can use. Defaults equal the library defaults, so
/// an empty config file and no flags reproduce them.
struct RunConfig {
  RadarParams radar{};
  double depression_deg = 32.0;  // replaces radar.geometry.depression on load
  ProfileTable profiles = ProfileTable::defaults();

  std::string dataset_preset = "desk";  // desk | skewed
  std::size_t per_class = 100;          // desk preset only
  std::uint64_t dataset_seed = 1;
  TensorShapeOptions tensor{};
  bool save_signals = false;

  std::size_t folds = 10;
  std::size_t train_per_class = 40;
  std::size_t val_per_class = 10;
  std::uint64_t split_seed = 1;
  std::uint64_t net_seed = 1;
  nn::Preset network = nn::Preset::Mini;
  nn::TrainConfig train{};

  std::size_t threads = 0;  // 0 = hardware concurrency
  std::filesystem::path data_dir;
  std::filesystem::path out;

  RadarParams radar_params() const;
  ClassCounts counts() const;
  CvConfig cv_config() const;

  /// Switches dataset counts and fold quotas together ("desk" or "skewed").
  void apply_preset(const std::string& name);

  /// Throws Error{Config} naming the offending field.
  void validate() const;
};

std::string config_to_json(const RunConfig& cfg);

/// Fields absent from `text` keep the values already in `base`. Unknown
/// fields and type mismatches raise Error{Config} with the dotted field path.
RunConfig config_from_json(const std::string& text, const RunConfig& base = {});
RunConfig load_config(const std::filesystem::path& path);

}  // namespace radarnet::cli
