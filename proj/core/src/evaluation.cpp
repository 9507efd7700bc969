#include "radarnet/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

#include <json.hpp>

#include "radarnet/error.hpp"

namespace radarnet {

using json = nlohmann::ordered_json;

std::uint64_t ConfusionMatrix::total() const noexcept {
  std::uint64_t n = 0;
  for (const auto& row : counts) {
    for (auto c : row) n += c;
  }
  return n;
}

std::uint64_t ConfusionMatrix::row_total(VehicleClass truth) const noexcept {
  std::uint64_t n = 0;
  for (auto c : counts[index_of(truth)]) n += c;
  return n;
}

double ConfusionMatrix::accuracy() const noexcept {
  const std::uint64_t n = total();
  if (n == 0) return 0.0;
  std::uint64_t trace = 0;
  for (std::size_t i = 0; i < kNumClasses; ++i) trace += counts[i][i];
  return static_cast<double>(trace) / static_cast<double>(n);
}

PerClass<PerClass<double>> ConfusionMatrix::row_normalized() const {
  PerClass<PerClass<double>> out{};
  for (std::size_t r = 0; r < kNumClasses; ++r) {
    const std::uint64_t n = row_total(kAllClasses[r]);
    if (n == 0) continue;
    for (std::size_t c = 0; c < kNumClasses; ++c) {
      out[r][c] = static_cast<double>(counts[r][c]) / static_cast<double>(n);
    }
  }
  return out;
}

ConfusionMatrix confusion_matrix(std::span<const VehicleClass> predictions,
                                 std::span<const VehicleClass> labels) {
  if (predictions.size() != labels.size()) {
    throw Error(ErrorCode::ShapeMismatch, "predictions and labels differ in length");
  }
  ConfusionMatrix m;
  if (labels.empty()) {
    std::cerr << "warning: confusion matrix over zero samples; accuracy reported as 0\n";
    return m;
  }
  for (std::size_t i = 0; i < labels.size(); ++i) m.add(labels[i], predictions[i]);
  return m;
}

std::size_t select_best_epoch(std::span<const double> val_accuracies) {
  std::size_t best = 0;
  for (std::size_t i = 0; i < val_accuracies.size(); ++i) {
    if (best == 0 || val_accuracies[i] > val_accuracies[best - 1]) best = i + 1;
  }
  return best;
}

namespace {

json matrix_json(const PerClass<PerClass<double>>& m) {
  json rows = json::array();
  for (const auto& row : m) rows.push_back(json(row));
  return rows;
}

json confusion_json(const ConfusionMatrix& m) {
  json counts = json::array();
  for (const auto& row : m.counts) counts.push_back(json(row));
  json j;
  j["counts"] = counts;
  j["total"] = m.total();
  j["accuracy"] = m.accuracy();
  j["row_normalized"] = matrix_json(m.row_normalized());
  return j;
}

}  // namespace

std::string confusion_to_json(const ConfusionMatrix& m) { return confusion_json(m).dump(2) + "\n"; }

std::string cv_report_to_json(const CvReport& r) {
  json j;
  json classes = json::array();
  for (auto c : kAllClasses) classes.push_back(std::string(class_letter(c)));
  j["classes"] = classes;
  j["radar_params_hash"] = r.radar_params_hash;
  j["dataset_base_seed"] = r.dataset_base_seed;
  j["protocol"] = {{"folds", r.config.folds},
                   {"train_per_class", r.config.train_per_class},
                   {"val_per_class", r.config.val_per_class},
                   {"split_seed", r.config.split_seed},
                   {"net_seed", r.config.net_seed},
                   {"preset", std::string(nn::to_string(r.config.preset))}};
  j["hyperparameters"] = {{"learning_rate", r.config.train.learning_rate},
                          {"momentum", r.config.train.momentum},
                          {"weight_decay", r.config.train.weight_decay},
                          {"epochs", r.config.train.epochs},
                          {"dropout_rate", r.config.train.dropout_rate},
                          {"train_seed", r.config.train.seed}};
  json folds = json::array();
  for (const auto& f : r.folds) {
    json history = json::array();
    for (const auto& e : f.history) {
      history.push_back(
          {{"epoch", e.epoch}, {"mean_loss", e.mean_loss}, {"val_accuracy", e.val_accuracy}});
    }
    folds.push_back({{"fold", f.fold_index},
                     {"train_size", f.train_size},
                     {"val_size", f.val_size},
                     {"test_size", f.test_size},
                     {"best_epoch", f.best_epoch},
                     {"best_val_accuracy", f.best_val_accuracy},
                     {"test_accuracy", f.test.accuracy()},
                     {"confusion", confusion_json(f.test)},
                     {"history", history}});
  }
  j["folds"] = folds;
  j["mean_accuracy"] = r.mean_accuracy;
  j["mean_row_normalized"] = matrix_json(r.mean_row_normalized);
  j["class_G_row"] = json(r.mean_row_normalized[index_of(VehicleClass::G)]);
  j["class_G_accuracy"] = r.mean_row_normalized[index_of(VehicleClass::G)][index_of(VehicleClass::G)];
  return j.dump(2) + "\n";
}

std::string matrix_pgm(const PerClass<PerClass<double>>& m, std::size_t cell_pixels) {
  const std::size_t side = kNumClasses * cell_pixels;
  std::string out = "P5\n" + std::to_string(side) + " " + std::to_string(side) + "\n255\n";
  const std::size_t header = out.size();
  out.resize(header + side * side);
  for (std::size_t y = 0; y < side; ++y) {
    for (std::size_t x = 0; x < side; ++x) {
      const double v = std::clamp(m[y / cell_pixels][x / cell_pixels], 0.0, 1.0);
      out[header + y * side + x] =
          static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * v)));
    }
  }
  return out;
}

}  // namespace radarnet
