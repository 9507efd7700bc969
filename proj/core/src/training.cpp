#include "radarnet/evaluation.hpp"

#include <cmath>
#include <iostream>
#include <set>
#include <sstream>

#include "radarnet/error.hpp"
#include "radarnet/parallel.hpp"
#include "radarnet/seed.hpp"

namespace radarnet {

namespace {

std::size_t label_index(const RdTensor& t, SampleId id) {
  if (!t.label) {
    throw Error(ErrorCode::InvalidArgument, "tensor " + std::to_string(id) + " has no label");
  }
  return index_of(*t.label);
}

const RdTensor& tensor_at(std::span<const RdTensor> tensors, SampleId id) {
  if (id >= tensors.size()) {
    throw Error(ErrorCode::InvalidArgument, "sample id " + std::to_string(id) + " out of range");
  }
  return tensors[id];
}

PerClass<std::vector<SampleId>> group_by_label(std::span<const RdTensor> tensors,
                                               std::span<const SampleId> ids) {
  PerClass<std::vector<SampleId>> out;
  for (SampleId id : ids) out[label_index(tensor_at(tensors, id), id)].push_back(id);
  return out;
}

double accuracy_of(const nn::NetworkF& net, std::span<const RdTensor> tensors,
                   std::span<const SampleId> ids, const RdTensor& mean) {
  return evaluate_ids(net, tensors, ids, mean).accuracy();
}

}  // namespace

std::vector<VehicleClass> predict_ids(const nn::NetworkF& net, std::span<const RdTensor> tensors,
                                      std::span<const SampleId> ids, const RdTensor& mean) {
  std::vector<VehicleClass> preds;
  preds.reserve(ids.size());
  for (SampleId id : ids) {
    const RdTensor x = mean_normalize(tensor_at(tensors, id), mean);
    preds.push_back(class_from_index(nn::predict<float>(net, x.values).class_index));
  }
  return preds;
}

ConfusionMatrix evaluate_ids(const nn::NetworkF& net, std::span<const RdTensor> tensors,
                             std::span<const SampleId> ids, const RdTensor& mean) {
  const auto preds = predict_ids(net, tensors, ids, mean);
  std::vector<VehicleClass> labels;
  labels.reserve(ids.size());
  for (SampleId id : ids) labels.push_back(class_from_index(label_index(tensor_at(tensors, id), id)));
  return confusion_matrix(preds, labels);
}

TrainResult train_fold(std::span<const RdTensor> tensors, const FoldSplit& fold,
                       const nn::NetworkF& initial, const nn::TrainConfig& cfg,
                       const TrainOptions& options) {
  cfg.validate();
  if (fold.train.empty()) throw Error(ErrorCode::EmptyInput, "fold has no training samples");

  std::vector<const RdTensor*> train_ptrs;
  for (SampleId id : fold.train) train_ptrs.push_back(&tensor_at(tensors, id));

  TrainResult result;
  result.mean = compute_mean_tensor(std::span<const RdTensor* const>(train_ptrs));
  result.net = initial;
  if (cfg.epochs == 0) return result;

  // Normalized copies of the training inputs, addressed by sample id.
  std::vector<RdTensor> normalized(tensors.size());
  for (SampleId id : fold.train) normalized[id] = mean_normalize(tensors[id], result.mean);
  const auto train_by_class = group_by_label(tensors, fold.train);

  nn::NetworkF net = initial;
  auto velocity = net.zero_buffers();
  std::vector<double> val_history;
  std::set<SampleId> trained;

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const auto batches = balanced_batches(train_by_class, mix_seed({cfg.seed, epoch}));
    double loss_sum = 0.0;
    for (std::size_t b = 0; b < batches.size(); ++b) {
      const Batch& batch = batches[b];
      std::array<nn::ParamBuffers<float>, kNumClasses> slot_grads;
      std::array<double, kNumClasses> slot_loss{};
      parallel_for(kNumClasses, options.threads, [&](std::size_t slot) {
        const SampleId id = batch[slot];
        const auto cache = net.forward(normalized[id].values, nn::Mode::Train,
                                       mix_seed({cfg.seed, epoch, b, slot}));
        const auto lg = nn::loss_and_grad(cache.probabilities(), label_index(tensors[id], id));
        slot_loss[slot] = lg.loss;
        const std::vector<float> d_logits(lg.d_logits.begin(), lg.d_logits.end());
        slot_grads[slot] = net.zero_buffers();
        net.backward_into(cache, d_logits, slot_grads[slot]);
      });

      // Fixed slot order keeps the reduction bit-reproducible.
      auto grads = std::move(slot_grads[0]);
      double batch_loss = slot_loss[0];
      for (std::size_t slot = 1; slot < kNumClasses; ++slot) {
        batch_loss += slot_loss[slot];
        for (std::size_t p = 0; p < grads.size(); ++p) {
          for (std::size_t j = 0; j < grads[p].size(); ++j) grads[p][j] += slot_grads[slot][p][j];
        }
      }
      const float inv = 1.0f / static_cast<float>(kNumClasses);
      for (auto& g : grads) {
        for (auto& v : g) v *= inv;
      }
      batch_loss /= static_cast<double>(kNumClasses);
      if (!std::isfinite(batch_loss)) {
        std::ostringstream msg;
        msg << "non-finite loss in epoch " << epoch << ", batch " << b + 1;
        throw Error(ErrorCode::NonFiniteLoss, msg.str());
      }
      loss_sum += batch_loss;
      nn::sgd_step(net, grads, velocity, cfg);
      for (SampleId id : batch) trained.insert(id);
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.mean_loss = loss_sum / static_cast<double>(batches.size());
    rec.val_accuracy = fold.val.empty() ? 0.0 : accuracy_of(net, tensors, fold.val, result.mean);
    result.history.push_back(rec);
    val_history.push_back(rec.val_accuracy);
    if (select_best_epoch(val_history) == epoch) {
      result.net = net;
      result.best_epoch = epoch;
      result.best_val_accuracy = rec.val_accuracy;
    }
    if (options.verbose) {
      std::cerr << "  fold " << fold.fold_index << " epoch " << epoch << ": loss "
                << rec.mean_loss << ", val accuracy " << rec.val_accuracy << "\n";
    }
  }
  result.trained_ids.assign(trained.begin(), trained.end());
  return result;
}

CvReport cross_validate(std::span<const RdTensor> tensors, const Manifest& manifest,
                        const CvConfig& config) {
  config.train.validate();
  if (tensors.size() != manifest.samples.size()) {
    throw Error(ErrorCode::ShapeMismatch, "tensor count does not match the manifest");
  }
  const auto splits = stratified_fold_split(manifest, config.folds, config.train_per_class,
                                            config.val_per_class, config.split_seed);
  const nn::Shape input{manifest.tensor_shape.channels, manifest.tensor_shape.height,
                        manifest.tensor_shape.width};

  CvReport report;
  report.config = config;
  report.radar_params_hash = manifest.radar_params_hash;
  report.dataset_base_seed = manifest.base_seed;
  report.folds.resize(splits.size());

  const std::size_t threads = config.threads == 0 ? default_thread_count() : config.threads;
  parallel_for(splits.size(), threads, [&](std::size_t f) {
    const FoldSplit& split = splits[f];
    const auto initial = nn::build_network<float>(config.preset, input, kNumClasses,
                                                  mix_seed({config.net_seed, f}),
                                                  config.train.dropout_rate);
    nn::TrainConfig cfg = config.train;
    cfg.seed = mix_seed({config.train.seed, f});
    TrainOptions options;
    options.verbose = config.verbose;
    const TrainResult trained = train_fold(tensors, split, initial, cfg, options);

    FoldReport& fr = report.folds[f];
    fr.fold_index = split.fold_index;
    fr.train_size = split.train.size();
    fr.val_size = split.val.size();
    fr.test_size = split.test.size();
    fr.best_epoch = trained.best_epoch;
    fr.best_val_accuracy = trained.best_val_accuracy;
    fr.history = trained.history;
    fr.test = evaluate_ids(trained.net, tensors, split.test, trained.mean);
    if (config.verbose) {
      std::cerr << "fold " << f << ": test accuracy " << fr.test.accuracy() << " (best epoch "
                << fr.best_epoch << ")\n";
    }
  });

  double acc_sum = 0.0;
  for (const auto& f : report.folds) {
    acc_sum += f.test.accuracy();
    const auto rows = f.test.row_normalized();
    for (std::size_t r = 0; r < kNumClasses; ++r) {
      for (std::size_t c = 0; c < kNumClasses; ++c) report.mean_row_normalized[r][c] += rows[r][c];
    }
  }
  const double k = static_cast<double>(report.folds.size());
  report.mean_accuracy = acc_sum / k;
  for (auto& row : report.mean_row_normalized) {
    for (auto& v : row) v /= k;
  }
  return report;
}

}  // namespace radarnet
