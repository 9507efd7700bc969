#include "radarnet_cli/cli.hpp"

#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "radarnet/dataset.hpp"
#include "radarnet/error.hpp"
#include "radarnet/evaluation.hpp"
#include "radarnet/parallel.hpp"
#include "radarnet/pgm.hpp"
#include "radarnet/seed.hpp"
#include "radarnet/signal_io.hpp"
#include "radarnet/tensor_io.hpp"
#include "radarnet/weights_io.hpp"
#include "radarnet_cli/run_config.hpp"

namespace radarnet::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

fs::path mean_path_for(const fs::path& weights) {
  fs::path p = weights;
  return p.replace_extension(".mean.rdt");
}

fs::path report_path_for(const fs::path& weights) {
  fs::path p = weights;
  return p.replace_extension(".report.json");
}

namespace {

// Raw flag values. Whether a flag overrides the config is decided by its
// count after parsing, so the initial values here never leak into a run.
struct Flags {
  std::string config;
  std::size_t threads = 0;
  std::string preset;
  std::size_t per_class = 0;
  std::uint64_t seed = 0;
  std::size_t width = 0;
  bool save_signals = false;
  std::size_t folds = 0, train_per_class = 0, val_per_class = 0;
  std::uint64_t split_seed = 0, net_seed = 0, train_seed = 0;
  std::string network;
  double lr = 0.0, momentum = 0.0, weight_decay = 0.0, dropout = 0.0;
  std::size_t epochs = 0;
  std::string data, out;

  std::string input, weights, init_weights, report, matrix;
  std::size_t fold = 0;
  std::string channel = "all";
  std::string split = "test";
  bool log_scale = false, reinit_fc = false, verbose = false, dump = false;
};

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "JSON run configuration; flags override its values");
  sub->add_option("--threads", f.threads, "Worker threads (0 = all cores)");
}

void add_dataset_flags(CLI::App* sub, Flags& f) {
  sub->add_option("--preset", f.preset, "Dataset preset: desk (100 per class) or skewed (9,981 samples)")
      ->check(CLI::IsMember({"desk", "skewed"}));
  sub->add_option("--per-class", f.per_class, "Samples per class for the desk preset");
  sub->add_option("--seed", f.seed, "Dataset base seed; sample i uses seed + i");
  sub->add_option("--width", f.width, "Tensor width in ramps (0 = widest sample)");
}

void add_train_flags(CLI::App* sub, Flags& f) {
  sub->add_option("--network", f.network, "Network preset")->check(CLI::IsMember({"mini", "full"}));
  sub->add_option("--train-per-class", f.train_per_class, "Training samples per class and fold");
  sub->add_option("--val-per-class", f.val_per_class, "Validation samples per class and fold");
  sub->add_option("--split-seed", f.split_seed, "Seed of the fold splits");
  sub->add_option("--net-seed", f.net_seed, "Seed of the weight initialization");
  sub->add_option("--train-seed", f.train_seed, "Seed of batch order and dropout masks");
  sub->add_option("--lr", f.lr, "Learning rate");
  sub->add_option("--momentum", f.momentum, "SGD momentum");
  sub->add_option("--weight-decay", f.weight_decay, "L2 weight decay");
  sub->add_option("--dropout", f.dropout, "Dropout rate");
  sub->add_option("--epochs", f.epochs, "Training epochs per fold");
  sub->add_flag("--verbose", f.verbose, "Print per-epoch progress to stderr");
}

bool given(const CLI::App* sub, const std::string& name) {
  const CLI::Option* o = sub->get_option_no_throw(name);
  return o != nullptr && o->count() > 0;
}

RunConfig resolve_config(const CLI::App* sub, const Flags& f) {
  RunConfig cfg = f.config.empty() ? RunConfig{} : load_config(f.config);
  if (given(sub, "--preset")) cfg.apply_preset(f.preset);
  if (given(sub, "--threads")) cfg.threads = f.threads;
  if (given(sub, "--per-class")) cfg.per_class = f.per_class;
  if (given(sub, "--seed")) cfg.dataset_seed = f.seed;
  if (given(sub, "--width")) cfg.tensor.target_width = f.width;
  if (given(sub, "--save-signals")) cfg.save_signals = f.save_signals;
  if (given(sub, "--folds")) cfg.folds = f.folds;
  if (given(sub, "--train-per-class")) cfg.train_per_class = f.train_per_class;
  if (given(sub, "--val-per-class")) cfg.val_per_class = f.val_per_class;
  if (given(sub, "--split-seed")) cfg.split_seed = f.split_seed;
  if (given(sub, "--net-seed")) cfg.net_seed = f.net_seed;
  if (given(sub, "--train-seed")) cfg.train.seed = f.train_seed;
  if (given(sub, "--network")) cfg.network = nn::parse_preset(f.network);
  if (given(sub, "--lr")) cfg.train.learning_rate = f.lr;
  if (given(sub, "--momentum")) cfg.train.momentum = f.momentum;
  if (given(sub, "--weight-decay")) cfg.train.weight_decay = f.weight_decay;
  if (given(sub, "--dropout")) cfg.train.dropout_rate = f.dropout;
  if (given(sub, "--epochs")) cfg.train.epochs = f.epochs;
  if (given(sub, "--data")) cfg.data_dir = f.data;
  if (given(sub, "--out")) cfg.out = f.out;
  cfg.validate();
  return cfg;
}

std::size_t worker_threads(const RunConfig& cfg) {
  return cfg.threads == 0 ? default_thread_count() : cfg.threads;
}

void require_file(const fs::path& p, const char* what) {
  if (!fs::is_regular_file(p)) {
    throw Error(ErrorCode::Io, std::string(what) + " '" + p.string() + "' does not exist");
  }
}

void require_parent(const fs::path& p) {
  const fs::path target = p.has_filename() ? p : p.parent_path();
  const fs::path parent = target.has_parent_path() ? target.parent_path() : fs::path(".");
  if (!fs::is_directory(parent)) {
    throw Error(ErrorCode::Io, "parent directory of '" + p.string() + "' does not exist");
  }
}

fs::path require_out(const RunConfig& cfg, const char* flag) {
  if (cfg.out.empty()) {
    throw Error(ErrorCode::Config, std::string("no output path; pass ") + flag + " or set paths.out");
  }
  require_parent(cfg.out);
  return cfg.out;
}

std::string read_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read '" + p.string() + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream o(p, std::ios::binary);
  o << text;
  if (!o) throw Error(ErrorCode::Io, "cannot write '" + p.string() + "'");
}

bool is_signal_file(const std::string& bytes) { return bytes.rfind("RDB1", 0) == 0; }

// Columns needed to hold every ramp of a raw signal without cropping.
std::size_t natural_width(const BeatSignal& sig) {
  const RampWindows w = segment_ramps(sig);
  return std::max(w.up.size(), w.down.size());
}

// The tensor behind a .rdt or .rdb input. A raw signal runs the same
// STFT -> stack -> pad pipeline as dataset generation; `width` 0 keeps the
// natural width.
RdTensor input_tensor(const fs::path& path, const RunConfig& cfg, std::size_t width) {
  const std::string bytes = read_bytes(path);
  if (!is_signal_file(bytes)) return decode_tensor(bytes);
  const BeatSignal sig = decode_signal(bytes);
  TensorShapeOptions shape = cfg.tensor;
  shape.target_width = width == 0 ? std::max(cfg.tensor.target_width, natural_width(sig)) : width;
  return signal_to_tensor(sig, cfg.radar_params(), shape);
}

void check_radar_hash(const Manifest& m, const RunConfig& cfg, std::ostream& err) {
  const std::string h = radar_params_hash(cfg.radar_params());
  if (m.radar_params_hash != h) {
    err << "warning: dataset radar_params_hash " << m.radar_params_hash
        << " differs from the configured radar (" << h << ")\n";
  }
}

void print_counts(std::ostream& out, const PerClass<std::size_t>& counts) {
  out << "class counts:";
  for (auto c : kAllClasses) out << ' ' << class_letter(c) << '=' << counts[index_of(c)];
  out << '\n';
}

void print_confusion(std::ostream& out, const ConfusionMatrix& m) {
  out << "truth\\pred";
  for (auto c : kAllClasses) out << std::setw(6) << class_letter(c);
  out << '\n';
  for (auto r : kAllClasses) {
    out << std::setw(10) << class_letter(r);
    for (auto c : kAllClasses) out << std::setw(6) << m.counts[index_of(r)][index_of(c)];
    out << '\n';
  }
  out << "accuracy " << std::fixed << std::setprecision(4) << m.accuracy() << '\n';
  out.unsetf(std::ios::floatfield);
}

nn::Shape shape_of(const TensorShape& s) { return {s.channels, s.height, s.width}; }

// ---- subcommands -------------------------------------------------------------

int cmd_generate(const RunConfig& cfg, std::ostream& out) {
  const fs::path dir = require_out(cfg, "-o");
  GenerateOptions opt;
  opt.tensor = cfg.tensor;
  opt.save_signals = cfg.save_signals;
  opt.threads = cfg.threads;
  const Dataset ds =
      generate_dataset(cfg.counts(), cfg.dataset_seed, cfg.profiles, cfg.radar_params(), dir, opt);
  const auto& m = ds.manifest;
  out << "generated " << ds.size() << " samples in " << dir.string() << '\n';
  out << "tensor shape " << m.tensor_shape.channels << 'x' << m.tensor_shape.height << 'x'
      << m.tensor_shape.width << '\n';
  print_counts(out, m.class_counts);
  out << "radar_params_hash " << m.radar_params_hash << "\nbase_seed " << m.base_seed << '\n';
  return 0;
}

int cmd_plot(const RunConfig& cfg, const Flags& f, std::ostream& out) {
  require_file(f.input, "input");
  const fs::path target = require_out(cfg, "-o");
  const RdTensor t = input_tensor(f.input, cfg, 0);
  const std::vector<std::pair<std::string, std::size_t>> all = {
      {"up", kUpChannel}, {"down", kDownChannel}, {"avg", kAverageChannel}};
  for (const auto& [name, channel] : all) {
    if (f.channel != "all" && f.channel != name) continue;
    if (channel >= t.channels) {
      throw Error(ErrorCode::ShapeMismatch, "input has no channel '" + name + "'");
    }
    fs::path path = target;
    if (f.channel == "all") {
      path = target.parent_path() / (target.stem().string() + "." + name + ".pgm");
    }
    write_pgm(path, export_pgm(t, channel, f.log_scale));
    out << "wrote " << path.string() << " (" << t.width << "x" << t.height << ")\n";
  }
  return 0;
}

struct LoadedData {
  Manifest manifest;
  std::vector<RdTensor> tensors;
};

LoadedData load_data(const RunConfig& cfg, std::ostream& err) {
  if (cfg.data_dir.empty()) {
    throw Error(ErrorCode::Config, "no dataset; pass --data or set paths.data");
  }
  const Dataset ds = open_dataset(cfg.data_dir);
  check_radar_hash(ds.manifest, cfg, err);
  return {ds.manifest, ds.load_all(worker_threads(cfg))};
}

FoldSplit fold_split(const Manifest& m, const RunConfig& cfg, std::size_t fold) {
  // Each fold is drawn independently, so asking for fold + 1 folds and
  // keeping the last reproduces fold `fold` of a cross-validation run.
  return stratified_fold_split(m, fold + 1, cfg.train_per_class, cfg.val_per_class,
                               cfg.split_seed)
      .back();
}

json history_json(const std::vector<EpochRecord>& history) {
  json h = json::array();
  for (const auto& e : history) {
    h.push_back({{"epoch", e.epoch}, {"mean_loss", e.mean_loss}, {"val_accuracy", e.val_accuracy}});
  }
  return h;
}

int cmd_train(const RunConfig& cfg, const Flags& f, std::ostream& out, std::ostream& err) {
  if (!f.init_weights.empty()) require_file(f.init_weights, "initial weights");
  const fs::path weights = require_out(cfg, "--out");
  const LoadedData data = load_data(cfg, err);
  const FoldSplit split = fold_split(data.manifest, cfg, f.fold);

  nn::NetworkF net = nn::build_network<float>(cfg.network, shape_of(data.manifest.tensor_shape),
                                             kNumClasses, mix_seed({cfg.net_seed, f.fold}),
                                             cfg.train.dropout_rate);
  if (!f.init_weights.empty()) {
    nn::LoadOptions lo;
    lo.reinit_fc = f.reinit_fc;
    const nn::LoadReport rep = nn::load_weights(f.init_weights, net, lo);
    out << "imported " << rep.loaded.size() << " parameter arrays from " << f.init_weights;
    if (!rep.kept.empty()) {
      out << "; kept initial values for";
      for (const auto& k : rep.kept) out << ' ' << k;
    }
    out << '\n';
  }

  nn::TrainConfig tc = cfg.train;
  tc.seed = mix_seed({cfg.train.seed, f.fold});
  TrainOptions opt;
  opt.threads = worker_threads(cfg);
  opt.verbose = f.verbose;
  const TrainResult r = train_fold(data.tensors, split, net, tc, opt);
  const ConfusionMatrix test = evaluate_ids(r.net, data.tensors, split.test, r.mean);

  nn::save_weights(weights, r.net);
  save_tensor(mean_path_for(weights), r.mean);
  json rep;
  rep["fold"] = f.fold;
  rep["network"] = std::string(nn::to_string(cfg.network));
  rep["train_size"] = split.train.size();
  rep["val_size"] = split.val.size();
  rep["test_size"] = split.test.size();
  rep["best_epoch"] = r.best_epoch;
  rep["best_val_accuracy"] = r.best_val_accuracy;
  rep["test_accuracy"] = test.accuracy();
  rep["confusion"] = json::parse(confusion_to_json(test));
  rep["history"] = history_json(r.history);
  write_text(report_path_for(weights), rep.dump(2) + "\n");

  out << "fold " << f.fold << ": best epoch " << r.best_epoch << ", val accuracy "
      << r.best_val_accuracy << ", test accuracy " << test.accuracy() << '\n';
  out << "wrote " << weights.string() << ", " << mean_path_for(weights).string() << ", "
      << report_path_for(weights).string() << '\n';
  return 0;
}

struct Model {
  nn::NetworkF net;
  RdTensor mean;
};

Model load_model(const RunConfig& cfg, const fs::path& weights) {
  require_file(weights, "weights");
  const fs::path mean_path = mean_path_for(weights);
  if (!fs::is_regular_file(mean_path)) {
    throw Error(ErrorCode::Io, "mean tensor '" + mean_path.string() + "' for weights '" +
                                   weights.string() + "' does not exist");
  }
  RdTensor mean = load_tensor(mean_path);
  nn::NetworkF net = nn::build_network<float>(cfg.network, {mean.channels, mean.height, mean.width},
                                             kNumClasses, 0, cfg.train.dropout_rate);
  nn::load_weights(weights, net);
  return {std::move(net), std::move(mean)};
}

int cmd_eval(const RunConfig& cfg, const Flags& f, std::ostream& out, std::ostream& err) {
  const Model model = load_model(cfg, f.weights);
  const LoadedData data = load_data(cfg, err);
  std::vector<SampleId> ids;
  if (f.split == "all") {
    for (const auto& r : data.manifest.samples) ids.push_back(r.id);
  } else {
    const FoldSplit split = fold_split(data.manifest, cfg, f.fold);
    ids = f.split == "val" ? split.val : f.split == "train" ? split.train : split.test;
  }
  const ConfusionMatrix m = evaluate_ids(model.net, data.tensors, ids, model.mean);
  out << f.split << " samples: " << ids.size() << '\n';
  print_confusion(out, m);
  if (!f.report.empty()) {
    require_parent(f.report);
    write_text(f.report, confusion_to_json(m));
  }
  return 0;
}

int cmd_cv(const RunConfig& cfg, const Flags& f, std::ostream& out, std::ostream& err) {
  if (!f.report.empty()) require_parent(f.report);
  if (!f.matrix.empty()) require_parent(f.matrix);
  LoadedData data;
  if (cfg.data_dir.empty()) {
    GenerateOptions opt;
    opt.tensor = cfg.tensor;
    opt.threads = cfg.threads;
    InMemoryDataset mem =
        synthesize_dataset(cfg.counts(), cfg.dataset_seed, cfg.profiles, cfg.radar_params(), opt);
    data = {std::move(mem.manifest), std::move(mem.tensors)};
    out << "synthesized " << data.tensors.size() << " samples (seed " << cfg.dataset_seed << ")\n";
  } else {
    data = load_data(cfg, err);
  }
  CvConfig cv = cfg.cv_config();
  cv.verbose = f.verbose;
  const CvReport rep = cross_validate(data.tensors, data.manifest, cv);

  for (const auto& fr : rep.folds) {
    out << "fold " << fr.fold_index << ": test accuracy " << fr.test.accuracy() << " (best epoch "
        << fr.best_epoch << ")\n";
  }
  out << "per-class accuracy:";
  for (auto c : kAllClasses) {
    out << ' ' << class_letter(c) << '=' << rep.mean_row_normalized[index_of(c)][index_of(c)];
  }
  out << "\nmean accuracy " << rep.mean_accuracy << '\n';
  if (!f.report.empty()) write_text(f.report, cv_report_to_json(rep));
  if (!f.matrix.empty()) write_pgm(f.matrix, matrix_pgm(rep.mean_row_normalized));
  return 0;
}

int cmd_predict(const RunConfig& cfg, const Flags& f, std::ostream& out) {
  require_file(f.input, "input");
  const Model model = load_model(cfg, f.weights);
  const RdTensor t = input_tensor(f.input, cfg, model.mean.width);
  if (!t.same_shape(model.mean)) {
    throw Error(ErrorCode::ShapeMismatch, "input '" + f.input + "' does not match the model input shape");
  }
  const RdTensor x = mean_normalize(t, model.mean);
  const nn::Prediction p = nn::predict<float>(model.net, x.values);
  out << "class " << class_letter(class_from_index(p.class_index)) << " ("
      << class_description(class_from_index(p.class_index)) << ")\n";
  out << std::setprecision(9);
  for (std::size_t i = 0; i < p.scores.size(); ++i) {
    out << class_letter(class_from_index(i)) << ' ' << p.scores[i] << '\n';
  }
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"FM-CW radar vehicle classification", "radarnet"};
  app.require_subcommand(1);
  Flags f;

  auto* gen = app.add_subcommand("generate", "Synthesize a labeled dataset on disk");
  add_common(gen, f);
  add_dataset_flags(gen, f);
  gen->add_option("-o,--out", f.out, "Output dataset directory (its parent must exist)");
  gen->add_flag("--save-signals", f.save_signals, "Also store each raw beat signal as .rdb");

  auto* plot = app.add_subcommand("plot", "Render a tensor or raw signal as PGM images");
  add_common(plot, f);
  plot->add_option("input", f.input, ".rdt tensor or .rdb raw signal")->required();
  plot->add_option("-o,--out", f.out, "Output image; with --channel all, <stem>.<channel>.pgm");
  plot->add_option("--channel", f.channel, "up, down, avg or all")
      ->check(CLI::IsMember({"up", "down", "avg", "all"}));
  plot->add_option("--width", f.width, "Minimum width for raw signals");
  plot->add_flag("--log", f.log_scale, "Map magnitudes through 20 log10 before scaling");

  auto* train = app.add_subcommand("train", "Train one fold and save weights, mean and report");
  add_common(train, f);
  add_train_flags(train, f);
  train->add_option("--data", f.data, "Dataset directory");
  train->add_option("--fold", f.fold, "Fold index (same split and seeds as cv)");
  train->add_option("--init-weights", f.init_weights, "Initialize from a .rdw file");
  train->add_flag("--reinit-fc", f.reinit_fc,
                  "With --init-weights: keep fully connected layers freshly initialized");
  train->add_option("-o,--out", f.out, "Output .rdw weights file");

  auto* eval = app.add_subcommand("eval", "Confusion matrix of saved weights on a fold");
  add_common(eval, f);
  eval->add_option("--weights", f.weights, ".rdw weights (mean tensor expected beside it)")
      ->required();
  eval->add_option("--data", f.data, "Dataset directory");
  eval->add_option("--fold", f.fold, "Fold index");
  eval->add_option("--split", f.split, "train, val, test or all")
      ->check(CLI::IsMember({"train", "val", "test", "all"}));
  eval->add_option("--network", f.network, "Network preset")->check(CLI::IsMember({"mini", "full"}));
  eval->add_option("--train-per-class", f.train_per_class, "Training samples per class and fold");
  eval->add_option("--val-per-class", f.val_per_class, "Validation samples per class and fold");
  eval->add_option("--split-seed", f.split_seed, "Seed of the fold splits");
  eval->add_option("--report", f.report, "Write the confusion matrix as JSON");

  auto* cv = app.add_subcommand("cv", "k-fold cross-validation");
  add_common(cv, f);
  add_dataset_flags(cv, f);
  add_train_flags(cv, f);
  cv->add_option("--data", f.data, "Dataset directory; synthesized in memory when omitted");
  cv->add_option("--folds", f.folds, "Number of folds");
  cv->add_option("--report", f.report, "Write the JSON report");
  cv->add_option("--matrix", f.matrix, "Write the mean confusion matrix as PGM");

  auto* predict = app.add_subcommand("predict", "Classify one tensor or raw signal");
  add_common(predict, f);
  predict->add_option("input", f.input, ".rdt tensor or .rdb raw signal")->required();
  predict->add_option("--weights", f.weights, ".rdw weights (mean tensor expected beside it)")
      ->required();
  predict->add_option("--network", f.network, "Network preset")
      ->check(CLI::IsMember({"mini", "full"}));

  auto* config = app.add_subcommand("config", "Show the effective configuration");
  add_common(config, f);
  config->add_flag("--dump", f.dump, "Print every setting as JSON");

  std::vector<std::string> argv_store = {"radarnet"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 2;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    const RunConfig cfg = resolve_config(sub, f);
    if (sub == gen) return cmd_generate(cfg, out);
    if (sub == plot) return cmd_plot(cfg, f, out);
    if (sub == train) return cmd_train(cfg, f, out, err);
    if (sub == eval) return cmd_eval(cfg, f, out, err);
    if (sub == cv) return cmd_cv(cfg, f, out, err);
    if (sub == predict) return cmd_predict(cfg, f, out);
    if (f.dump) {
      out << config_to_json(cfg);
    } else {
      out << "configuration is valid; pass --dump to print every setting\n";
    }
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace radarnet::cli
