#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "radarnet/dataset.hpp"
#include "radarnet/network.hpp"
#include "radarnet/optimizer.hpp"
#include "radarnet/spectrogram.hpp"
#include "radarnet/vehicle_class.hpp"

namespace radarnet {

/// Rows are true classes, columns predicted classes.
struct ConfusionMatrix {
  PerClass<PerClass<std::uint64_t>> counts{};

  void add(VehicleClass truth, VehicleClass predicted) {
    ++counts[index_of(truth)][index_of(predicted)];
  }
  std::uint64_t total() const noexcept;
  std::uint64_t row_total(VehicleClass truth) const noexcept;
  /// trace / total; 0 for an empty matrix.
  double accuracy() const noexcept;
  /// Each nonempty row scaled to sum to 1; empty rows stay zero.
  PerClass<PerClass<double>> row_normalized() const;
};

/// Counts (label, prediction) pairs. An empty input yields a zero matrix
/// and a warning on stderr.
ConfusionMatrix confusion_matrix(std::span<const VehicleClass> predictions,
                                 std::span<const VehicleClass> labels);

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double mean_loss = 0.0;
  double val_accuracy = 0.0;
};

/// 1-based index of the first maximum; 0 for an empty list.
std::size_t select_best_epoch(std::span<const double> val_accuracies);

struct TrainResult {
  nn::NetworkF net;        // snapshot with the best validation accuracy
  RdTensor mean;           // train-set mean tensor used for normalization
  std::vector<EpochRecord> history;
  std::size_t best_epoch = 0;  // 0 when no epoch ran
  double best_val_accuracy = 0.0;
  std::vector<SampleId> trained_ids;  // every id that fed a weight update
};

struct TrainOptions {
  std::size_t threads = 1;  // workers for the six samples of a batch
  bool verbose = false;
};

/// Trains `initial` on the fold's train ids with class-balanced batches and
/// keeps the epoch snapshot with the best validation accuracy. `tensors` is
/// indexed by sample id and must carry labels. The mean tensor comes from
/// the fold's train ids only.
TrainResult train_fold(std::span<const RdTensor> tensors, const FoldSplit& fold,
                       const nn::NetworkF& initial, const nn::TrainConfig& cfg,
                       const TrainOptions& options = {});

/// Predicts every id after subtracting `mean`.
std::vector<VehicleClass> predict_ids(const nn::NetworkF& net, std::span<const RdTensor> tensors,
                                      std::span<const SampleId> ids, const RdTensor& mean);

ConfusionMatrix evaluate_ids(const nn::NetworkF& net, std::span<const RdTensor> tensors,
                             std::span<const SampleId> ids, const RdTensor& mean);

struct CvConfig {
  std::size_t folds = 10;
  std::size_t train_per_class = 40;
  std::size_t val_per_class = 10;
  std::uint64_t split_seed = 1;
  std::uint64_t net_seed = 1;
  nn::Preset preset = nn::Preset::Mini;
  nn::TrainConfig train{};
  std::size_t threads = 0;  // folds trained concurrently; 0 = hardware concurrency
  bool verbose = false;
};

struct FoldReport {
  std::size_t fold_index = 0;
  std::size_t train_size = 0, val_size = 0, test_size = 0;
  std::size_t best_epoch = 0;
  double best_val_accuracy = 0.0;
  std::vector<EpochRecord> history;
  ConfusionMatrix test;
};

struct CvReport {
  CvConfig config;
  std::string radar_params_hash;
  std::uint64_t dataset_base_seed = 0;
  std::vector<FoldReport> folds;
  double mean_accuracy = 0.0;
  PerClass<PerClass<double>> mean_row_normalized{};
};

/// Seeds of fold f: network init mix_seed({net_seed, f}), training
/// mix_seed({train.seed, f}).
CvReport cross_validate(std::span<const RdTensor> tensors, const Manifest& manifest,
                        const CvConfig& config);

/// Stable JSON rendering (no timestamps), so equal inputs give equal bytes.
std::string cv_report_to_json(const CvReport& report);
std::string confusion_to_json(const ConfusionMatrix& m);

/// Row-normalized matrix as a 6x6 greyscale image (row 0 = class A at the top).
std::string matrix_pgm(const PerClass<PerClass<double>>& m, std::size_t cell_pixels = 16);

}  // namespace radarnet
