// Acceptance harness: one PASS/FAIL line per criterion. With no arguments
// every criterion runs; otherwise only the listed numbers (1-8).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "radarnet/dataset.hpp"
#include "radarnet/evaluation.hpp"
#include "radarnet/fft.hpp"
#include "radarnet/gradient_check.hpp"
#include "radarnet/pgm.hpp"
#include "radarnet/radar_model.hpp"
#include "radarnet/scenario.hpp"
#include "radarnet/spectrogram.hpp"
#include "radarnet/tensor_io.hpp"
#include "radarnet/weights_io.hpp"

using namespace radarnet;

namespace {

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Frequency of the strongest bin of the first column.
double peak_hz(const Spectrogram& s) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < s.bins; ++k) {
    if (s.at(k, 0) > s.at(best, 0)) best = k;
  }
  return static_cast<double>(best) * s.bin_hz;
}

// ---- 1. static targets --------------------------------------------------------

void beat_physics(Verdict& v) {
  const RadarParams p;
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> range(5.0, 100.0);
  std::uniform_real_distribution<double> phase(0.0, oracle::kTwoPi);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const FixedTarget t{range(rng), 0.0, 1.0, phase(rng)};
    const auto [up, down] = build_spectrograms(synthesize_fixed_targets({&t, 1}, 2, p), p);
    const RangeVelocity rv = invert_beat(peak_hz(up), peak_hz(down), p);
    worst = std::max(worst, std::abs(rv.range_m - t.range_m));
  }
  v.detail << "max |R error| " << worst << " m (tol 1.25 m)";
  v.require(worst <= 1.25, "range within one resolution cell");
}

// ---- 2. moving targets --------------------------------------------------------

void moving_targets(Verdict& v) {
  const RadarParams p;
  std::mt19937_64 rng(202);
  std::uniform_real_distribution<double> speed(10.0, 38.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> phase(0.0, oracle::kTwoPi);
  double worst_r = 0.0, worst_v = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double vel = speed(rng);
    // Keep the up-ramp beat two bins below Nyquist so the tone is not aliased.
    const double r_max =
        std::min(100.0, (p.nyquist_hz() - 2.0 * p.bin_hz() - oracle::doppler(vel)) /
                            (oracle::range_term(1.0)));
    const double r = 5.0 + unit(rng) * (r_max - 5.0);
    const FixedTarget t{r, vel, 1.0, phase(rng)};
    const auto [up, down] = build_spectrograms(synthesize_fixed_targets({&t, 1}, 2, p), p);
    // The modulus spectrum holds |f_down|; its sign comes from the simulated truth.
    const double truth_down = oracle::range_term(r) - oracle::doppler(vel);
    const double f_down = std::copysign(peak_hz(down), truth_down);
    const RangeVelocity rv = invert_beat(peak_hz(up), f_down, p);
    worst_r = std::max(worst_r, std::abs(rv.range_m - r));
    worst_v = std::max(worst_v, std::abs(rv.radial_velocity_mps - vel));
  }
  v.detail << "max |v error| " << worst_v << " m/s (tol 0.16), max |R error| " << worst_r
           << " m (tol 1.25)";
  v.require(worst_v <= 0.16, "velocity tolerance");
  v.require(worst_r <= 1.25, "range tolerance");
}

// ---- 3. FFT against the direct DFT -------------------------------------------

void dft_equivalence(Verdict& v) {
  std::mt19937_64 rng(303);
  double worst_dft = 0.0, worst_parseval = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto w = oracle::random_window(rng, 512);
    const auto fast = fft_modulus(w, 512);
    const auto slow = oracle::naive_dft_modulus(w, 512);
    double diff = 0.0, norm = 0.0;
    for (std::size_t k = 0; k < fast.size(); ++k) {
      diff = std::max(diff, std::abs(fast[k] - slow[k]));
      norm = std::max(norm, std::abs(slow[k]));
    }
    worst_dft = std::max(worst_dft, diff / norm);

    // One-sided form of sum |X_k|^2 = N sum x_n^2.
    long double energy = 0.0L, spectral = 0.0L;
    for (float x : w) energy += static_cast<long double>(x) * x;
    for (std::size_t k = 0; k < fast.size(); ++k) {
      const long double m2 = static_cast<long double>(fast[k]) * fast[k];
      spectral += (k == 0 || k == 256) ? m2 : 2.0L * m2;
    }
    const double rel = static_cast<double>(std::abs(spectral - 512.0L * energy) / (512.0L * energy));
    worst_parseval = std::max(worst_parseval, rel);
  }
  v.detail << "max relative DFT error " << worst_dft << ", Parseval " << worst_parseval
           << " (tol 1e-6)";
  v.require(worst_dft < 1e-6, "DFT equivalence");
  v.require(worst_parseval < 1e-6, "Parseval");
}

// ---- 4. gradient check --------------------------------------------------------

void gradient(Verdict& v) {
  const nn::Shape shape{3, 257, 32};
  std::mt19937_64 rng(404);
  std::normal_distribution<double> dist;
  std::vector<double> xd(shape.size());
  for (auto& x : xd) x = dist(rng);
  const std::vector<float> xf(xd.begin(), xd.end());

  nn::GradientCheckOptions opt;
  opt.samples = 200;
  const auto high = nn::gradient_check(nn::build_network<double>(nn::Preset::Mini, shape, 6, 41),
                                       std::span<const double>(xd), 2, opt);
  const auto standard = nn::gradient_check(nn::build_network<float>(nn::Preset::Mini, shape, 6, 41),
                                           std::span<const float>(xf), 2, opt);
  v.detail << "high precision " << high.max_relative_error << " over " << high.checked
           << " params (tol 1e-5), standard " << standard.max_relative_error << " over "
           << standard.checked << " params (tol 1e-3)";
  v.require(high.checked >= 200 && standard.checked >= 200, "at least 200 parameters probed");
  v.require(high.max_relative_error < 1e-5, "high precision tolerance");
  v.require(standard.max_relative_error < 1e-3, "standard precision tolerance");
}

// ---- 5. full preset shapes ----------------------------------------------------

void architecture(Verdict& v) {
  const auto net = nn::build_network<float>(nn::Preset::Full, {3, 227, 227}, 6, 5);
  std::mt19937_64 rng(505);
  std::normal_distribution<float> dist;
  std::vector<float> x(3 * 227 * 227);
  for (auto& e : x) e = dist(rng);
  const auto cache = net.forward(x, nn::Mode::Eval);

  // Distinct consecutive shapes after the input.
  std::vector<nn::Shape> chain;
  for (std::size_t i = 1; i < net.shapes().size(); ++i) {
    const auto& s = net.shapes()[i];
    if (chain.empty() || !(chain.back() == s)) chain.push_back(s);
  }
  const std::vector<nn::Shape> expected = {
      {96, 55, 55}, {96, 27, 27}, {256, 27, 27}, {256, 13, 13}, {384, 13, 13},
      {256, 13, 13}, {256, 6, 6}, {4096, 1, 1}, {6, 1, 1}};
  v.require(chain == expected, "shape chain");

  std::vector<std::size_t> kernels, units;
  for (const auto& l : net.layers()) {
    if (l.kind == nn::LayerKind::Conv) kernels.push_back(l.out_channels);
    if (l.kind == nn::LayerKind::FullyConnected) units.push_back(l.units);
  }
  v.require(kernels == std::vector<std::size_t>{96, 256, 384, 384, 256}, "conv kernel counts");
  v.require(units == std::vector<std::size_t>{4096, 4096, 6}, "fc widths");
  v.require(cache.activations.back().size() == 6, "output length");

  // 384x13x13 appears on two consecutive conv layers.
  std::size_t conv384 = 0;
  for (std::size_t i = 0; i < net.layers().size(); ++i) {
    if (net.layers()[i].kind == nn::LayerKind::Conv && net.shapes()[i + 1] == nn::Shape{384, 13, 13}) {
      ++conv384;
    }
  }
  v.require(conv384 == 2, "two 384x13x13 conv outputs");

  v.detail << "chain";
  for (const auto& s : chain) v.detail << ' ' << nn::to_string(s);
  v.detail << "; conv kernels 96 256 384 384 256; fc 4096 4096 6";
}

// ---- 6. end-to-end benchmark --------------------------------------------------

void end_to_end(Verdict& v) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::uint64_t dataset_seed = 1;
  const InMemoryDataset data = synthesize_dataset(uniform_counts(100), dataset_seed,
                                                  ProfileTable::defaults(), RadarParams{});
  CvConfig cfg;  // 10 folds, 40/10 per class, mini preset, TrainConfig defaults
  const CvReport rep = cross_validate(data.tensors, data.manifest, cfg);
  const double g = rep.mean_row_normalized[index_of(VehicleClass::G)][index_of(VehicleClass::G)];

  // Determinism: fold 0 again, with a different worker count for the batch slots.
  const auto splits = stratified_fold_split(data.manifest, 1, cfg.train_per_class,
                                            cfg.val_per_class, cfg.split_seed);
  const nn::Shape input{data.manifest.tensor_shape.channels, data.manifest.tensor_shape.height,
                        data.manifest.tensor_shape.width};
  nn::TrainConfig tc = cfg.train;
  tc.seed = mix_seed({cfg.train.seed, 0});
  TrainOptions to;
  to.threads = 3;
  const TrainResult again = train_fold(
      data.tensors, splits[0],
      nn::build_network<float>(cfg.preset, input, kNumClasses, mix_seed({cfg.net_seed, 0}),
                               cfg.train.dropout_rate),
      tc, to);
  const ConfusionMatrix again_test = evaluate_ids(again.net, data.tensors, splits[0].test, again.mean);
  bool same = again_test.counts == rep.folds[0].test.counts &&
              again.history.size() == rep.folds[0].history.size();
  for (std::size_t e = 0; same && e < again.history.size(); ++e) {
    same = again.history[e].mean_loss == rep.folds[0].history[e].mean_loss &&
           again.history[e].val_accuracy == rep.folds[0].history[e].val_accuracy;
  }
  const double elapsed = seconds_since(t0);

  v.detail << "mean accuracy " << rep.mean_accuracy << " (>= 0.90), class G " << g
           << " (>= 0.95), fold 0 rerun " << (same ? "identical" : "DIFFERENT") << ", " << elapsed
           << " s (< 1800 s)";
  v.require(rep.mean_accuracy >= 0.90, "mean accuracy");
  v.require(g >= 0.95, "class G accuracy");
  v.require(same, "deterministic rerun");
  v.require(elapsed < 1800.0, "runtime");
}

// ---- 7. pipeline invariants ---------------------------------------------------

void invariants(Verdict& v) {
  const RadarParams p;
  const ProfileTable profiles = ProfileTable::defaults();
  std::size_t checked_tensors = 0;

  // Average channel and zero padding, straight from the spectrograms.
  for (auto cls : kAllClasses) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const BeatSignal sig = synthesize_beat_signal(sample_vehicle_scenario(cls, 700 + seed, profiles), p);
      const auto [up, down] = build_spectrograms(sig, p);
      const RdTensor t = build_tensor(up, down, 32);
      bool avg_ok = true, pad_ok = true, copy_ok = true;
      for (std::size_t h = 0; h < t.height; ++h) {
        for (std::size_t w = 0; w < t.width; ++w) {
          const double u = w < up.columns ? up.at(h, w) : 0.0;
          const double d = w < down.columns ? down.at(h, w) : 0.0;
          copy_ok &= t.at(0, h, w) == static_cast<float>(u) && t.at(1, h, w) == static_cast<float>(d);
          const double a = 0.5 * (static_cast<double>(t.at(0, h, w)) + t.at(1, h, w));
          avg_ok &= std::abs(t.at(2, h, w) - a) <= 1e-6 * std::max(1.0, std::abs(a));
          if (w >= up.columns) pad_ok &= t.at(0, h, w) == 0.0f;
          if (w >= down.columns) pad_ok &= t.at(1, h, w) == 0.0f;
          if (w >= std::max(up.columns, down.columns)) pad_ok &= t.at(2, h, w) == 0.0f;
        }
      }
      v.require(copy_ok, "up/down channels copy the spectrograms");
      v.require(avg_ok, "channel 2 is the up/down average");
      v.require(pad_ok, "padding columns are zero");
      ++checked_tensors;
    }
  }

  const InMemoryDataset data = synthesize_dataset(uniform_counts(30), 9, profiles, p);
  const Manifest& m = data.manifest;

  // Folds: quotas, disjointness, coverage.
  const auto folds = stratified_fold_split(m, 4, 12, 5, 3);
  for (const auto& f : folds) {
    std::set<SampleId> tr(f.train.begin(), f.train.end()), va(f.val.begin(), f.val.end()),
        te(f.test.begin(), f.test.end());
    v.require(tr.size() == 72 && va.size() == 30 && te.size() == 78, "fold sizes");
    bool disjoint = true;
    for (auto id : va) disjoint &= !tr.contains(id);
    for (auto id : te) disjoint &= !tr.contains(id) && !va.contains(id);
    v.require(disjoint, "train/val/test disjoint");
    v.require(tr.size() + va.size() + te.size() == m.samples.size(), "fold covers the corpus");
    const auto by = ids_by_class(f.train, m);
    for (auto cls : kAllClasses) v.require(by[index_of(cls)].size() == 12, "train quota per class");
  }

  // Mean normalization of the fold-0 train set has zero mean.
  std::vector<RdTensor> train;
  for (auto id : folds[0].train) train.push_back(data.tensors[id]);
  const RdTensor mean = compute_mean_tensor(train);
  double worst_mean = 0.0;
  std::vector<double> acc(mean.size(), 0.0);
  for (const auto& t : train) {
    const RdTensor n = mean_normalize(t, mean);
    for (std::size_t i = 0; i < n.size(); ++i) acc[i] += n.values[i];
  }
  for (double a : acc) worst_mean = std::max(worst_mean, std::abs(a / static_cast<double>(train.size())));
  v.require(worst_mean < 1e-5, "normalized train set has zero mean");

  // Balanced batches: one sample of each class, no repeats within a class.
  const auto by_class = ids_by_class(folds[0].train, m);
  const auto batches = balanced_batches(by_class, 17);
  v.require(batches.size() == 12, "batch count equals the smallest class count");
  PerClass<std::set<SampleId>> seen;
  for (const auto& b : batches) {
    for (auto cls : kAllClasses) {
      const SampleId id = b[index_of(cls)];
      v.require(m.samples[id].label == cls, "batch slot holds its class");
      v.require(seen[index_of(cls)].insert(id).second, "no repeat within an epoch");
    }
  }

  // Softmax: sums to one and ignores a common shift of the logits.
  auto net = nn::build_network<float>(nn::Preset::Mini, {3, 257, 32}, 6, 77);
  const RdTensor x = mean_normalize(data.tensors[0], mean);
  const auto base = net.forward(x.values, nn::Mode::Eval);
  const std::vector<float> p0(base.probabilities().begin(), base.probabilities().end());
  double sum = 0.0;
  for (float q : p0) sum += q;
  v.require(std::abs(sum - 1.0) < 1e-6, "softmax sums to one");
  for (auto& prm : net.mutable_parameters()) {
    if (prm.name == "fc5.bias") {
      for (auto& b : prm.values) b += 25.0f;
    }
  }
  const auto shifted = net.forward(x.values, nn::Mode::Eval);
  double shift_err = 0.0;
  for (std::size_t i = 0; i < p0.size(); ++i) {
    shift_err = std::max(shift_err, std::abs(static_cast<double>(shifted.probabilities()[i]) - p0[i]));
  }
  v.require(shift_err < 1e-6, "softmax shift invariance");

  // Confusion totals.
  std::vector<VehicleClass> labels, preds;
  std::mt19937_64 rng(7);
  for (const auto& r : m.samples) {
    labels.push_back(r.label);
    preds.push_back(class_from_index(rng() % kNumClasses));
  }
  const ConfusionMatrix cm = confusion_matrix(preds, labels);
  v.require(cm.total() == m.samples.size(), "confusion total");
  for (auto cls : kAllClasses) v.require(cm.row_total(cls) == 30, "confusion row totals");
  double row_sum = 0.0;
  for (double q : cm.row_normalized()[0]) row_sum += q;
  v.require(std::abs(row_sum - 1.0) < 1e-12, "row-normalized rows sum to one");

  v.detail << checked_tensors << " tensors, " << folds.size() << " folds, " << batches.size()
           << " batches; max normalized mean " << worst_mean << ", softmax shift error " << shift_err;
}

// ---- 8. file formats ----------------------------------------------------------

void formats(Verdict& v) {
  oracle::TempDir dir("acceptance_formats");

  RdTensor t(3, 257, 32);
  std::mt19937_64 rng(808);
  std::normal_distribution<float> dist(0.0f, 100.0f);
  for (auto& e : t.values) e = dist(rng);
  t.values[0] = -0.0f;
  t.values[1] = 1e-40f;  // subnormal
  save_tensor(dir / "t.rdt", t);
  const RdTensor back = load_tensor(dir / "t.rdt");
  v.require(back.same_shape(t) &&
                std::memcmp(back.values.data(), t.values.data(), t.size() * sizeof(float)) == 0,
            ".rdt values bit-exact");
  const std::string bytes = encode_tensor(t);
  const unsigned char head[16] = {'R', 'D', 'T', '1', 3, 0, 0, 0, 1, 1, 0, 0, 32, 0, 0, 0};
  v.require(bytes.size() == 16 + 4 * t.size() && std::memcmp(bytes.data(), head, 16) == 0,
            ".rdt header bytes");
  v.require(encode_tensor(back) == bytes, ".rdt re-encodes identically");

  const auto net = nn::build_network<float>(nn::Preset::Mini, {3, 257, 32}, 6, 88);
  nn::save_weights(dir / "w.rdw", net);
  auto other = nn::build_network<float>(nn::Preset::Mini, {3, 257, 32}, 6, 89);
  nn::load_weights(dir / "w.rdw", other);
  bool same = net.parameters().size() == other.parameters().size();
  for (std::size_t i = 0; same && i < net.parameters().size(); ++i) {
    const auto& a = net.parameters()[i].values;
    const auto& b = other.parameters()[i].values;
    same = a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(float)) == 0;
  }
  v.require(same, ".rdw weights bit-exact");
  v.require(nn::encode_weights(nn::weight_records(other)) ==
                nn::encode_weights(nn::weight_records(net)),
            ".rdw re-encodes identically");

  const std::string pgm = export_pgm(t, 2, false);
  const std::string header = "P5\n32 257\n255\n";
  v.require(pgm.compare(0, header.size(), header) == 0 && pgm.size() == header.size() + 32 * 257,
            "tensor PGM header");
  const std::string logpgm = export_pgm(t, 0, true);
  v.require(logpgm.compare(0, header.size(), header) == 0 && logpgm.size() == pgm.size(),
            "log PGM header");
  const std::string mat = matrix_pgm(PerClass<PerClass<double>>{}, 16);
  const std::string mat_header = "P5\n96 96\n255\n";
  v.require(mat.compare(0, mat_header.size(), mat_header) == 0 &&
                mat.size() == mat_header.size() + 96 * 96,
            "matrix PGM header");

  v.detail << ".rdt " << bytes.size() << " bytes, .rdw " << net.parameter_count()
           << " weights, PGM headers exact";
}

struct Criterion {
  int id;
  const char* name;
  double time_limit_s;
  std::function<void(Verdict&)> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {1, "beat-physics oracle", 10.0, beat_physics},
      {2, "moving-target oracle", 10.0, moving_targets},
      {3, "DFT equivalence", 60.0, dft_equivalence},
      {4, "gradient check", 120.0, gradient},
      {5, "architecture fidelity", 60.0, architecture},
      {6, "end-to-end synthetic benchmark", 1800.0, end_to_end},
      {7, "pipeline invariants", 60.0, invariants},
      {8, "format roundtrips", 60.0, formats},
  };
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));

  int failures = 0;
  for (const auto& c : all) {
    if (!wanted.empty() && !wanted.contains(c.id)) continue;
    Verdict v;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.run(v);
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail << " [exception: " << e.what() << "]";
    }
    const double s = seconds_since(t0);
    if (s >= c.time_limit_s) {
      v.pass = false;
      v.detail << " [over the " << c.time_limit_s << " s limit]";
    }
    std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << c.id << " (" << c.name
              << "): " << v.detail.str() << "; " << s << " s" << std::endl;
    if (!v.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
