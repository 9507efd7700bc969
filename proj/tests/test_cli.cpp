#include <doctest.h>

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "oracles.hpp"
#include "radarnet/signal_io.hpp"
#include "radarnet/tensor_io.hpp"
#include "radarnet/weights_io.hpp"
#include "radarnet_cli/cli.hpp"
#include "radarnet_cli/run_config.hpp"

using namespace radarnet;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code = 0;
  std::string out, err;
};

Outcome radarnet_cmd(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Every file under `dir`, keyed by relative path.
std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) files[fs::relative(e.path(), dir).string()] = slurp(e.path());
  }
  return files;
}

std::vector<double> scores_of(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);  // "class X (...)"
  std::vector<double> s;
  std::string letter;
  double v = 0;
  while (in >> letter >> v) s.push_back(v);
  return s;
}

// Small corpus plus quotas that make train/cv finish in about a second.
const std::vector<std::string> kSmall = {"--per-class", "8", "--seed", "3"};
const std::vector<std::string> kQuick = {"--train-per-class", "4", "--val-per-class", "2",
                                         "--epochs", "1", "--threads", "1"};

std::vector<std::string> cat(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("generate desk preset writes 600 tensors and a manifest, reproducibly") {
  oracle::TempDir dir("cli_gen");
  const auto first = radarnet_cmd({"generate", "--preset", "desk", "--seed", "1", "-o",
                                   (dir.path() / "data").string() + "/"});
  REQUIRE(first.code == 0);
  CHECK(first.out.find("generated 600 samples") != std::string::npos);
  const auto files = snapshot(dir / "data");
  CHECK(files.size() == 601);
  CHECK(files.contains("manifest.json"));

  REQUIRE(radarnet_cmd({"generate", "--preset", "desk", "--seed", "1", "-o",
                        (dir.path() / "again").string()})
              .code == 0);
  CHECK(snapshot(dir / "again") == files);
}

TEST_CASE("generate with a missing parent exits 1 naming the path") {
  oracle::TempDir dir("cli_gen_missing");
  const std::string target = (dir.path() / "absent" / "data").string();
  const auto r = radarnet_cmd(cat({"generate", "-o", target}, kSmall));
  CHECK(r.code == 1);
  CHECK(r.err.find(target) != std::string::npos);
}

TEST_CASE("usage errors exit 2 and every subcommand documents its flags") {
  const std::map<std::string, std::vector<std::string>> flags = {
      {"generate", {"--config", "--threads", "--preset", "--per-class", "--seed", "--width", "--out",
                    "--save-signals"}},
      {"plot", {"--config", "--threads", "--out", "--channel", "--width", "--log"}},
      {"train", {"--config", "--threads", "--network", "--train-per-class", "--val-per-class",
                 "--split-seed", "--net-seed", "--train-seed", "--lr", "--momentum",
                 "--weight-decay", "--dropout", "--epochs", "--verbose", "--data", "--fold",
                 "--init-weights", "--reinit-fc", "--out"}},
      {"eval", {"--config", "--threads", "--weights", "--data", "--fold", "--split", "--network",
                "--report"}},
      {"cv", {"--config", "--threads", "--preset", "--per-class", "--seed", "--folds", "--data",
              "--epochs", "--lr", "--report", "--matrix"}},
      {"predict", {"--config", "--threads", "--weights", "--network"}},
      {"config", {"--config", "--threads", "--dump"}},
  };
  for (const auto& [sub, names] : flags) {
    CAPTURE(sub);
    const auto help = radarnet_cmd({sub, "--help"});
    CHECK(help.code == 0);
    for (const auto& n : names) {
      CAPTURE(n);
      CHECK(help.out.find(n) != std::string::npos);
    }
    CHECK(radarnet_cmd({sub, "--no-such-flag"}).code == 2);
  }
  CHECK(radarnet_cmd({}).code == 2);
  CHECK(radarnet_cmd({"frobnicate"}).code == 2);
  CHECK(radarnet_cmd({"generate", "--seed", "minus-one"}).code == 2);
}

TEST_CASE("config dump lists library defaults and roundtrips") {
  const auto r = radarnet_cmd({"config", "--dump"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["train"]["learning_rate"].get<double>() == 0.0001);
  CHECK(j["train"]["momentum"].get<double>() == 0.9);
  CHECK(j["train"]["weight_decay"].get<double>() == 0.0005);
  CHECK(j["train"]["epochs"].get<int>() == 15);
  CHECK(j["cv"]["folds"].get<int>() == 10);
  CHECK(j["cv"]["train_per_class"].get<int>() == 40);
  CHECK(j["cv"]["val_per_class"].get<int>() == 10);
  CHECK(j["cv"]["network"].get<std::string>() == "mini");
  CHECK(j["dataset"]["per_class"].get<int>() == 100);
  CHECK(j["dataset"]["target_width"].get<int>() == 32);
  CHECK(j["radar"]["sweep_bandwidth_hz"].get<double>() == 120e6);
  CHECK(j["profiles"]["snr_db"].get<double>() == 20.0);

  const cli::RunConfig back = cli::config_from_json(r.out);
  CHECK(cli::config_to_json(back) == r.out);
  CHECK(radar_params_hash(back.radar_params()) == radar_params_hash(RadarParams{}));
}

TEST_CASE("flags override the config file") {
  oracle::TempDir dir("cli_cfg");
  std::ofstream(dir / "run.json") << R"({"threads": 5, "train": {"epochs": 7}})";
  const auto r = radarnet_cmd({"config", "--config", (dir / "run.json").string(), "--threads",
                               "3", "--dump"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["threads"].get<int>() == 3);
  CHECK(j["train"]["epochs"].get<int>() == 7);
}

TEST_CASE("invalid config fields exit 1 naming the field") {
  oracle::TempDir dir("cli_badcfg");
  const std::vector<std::pair<std::string, std::string>> cases = {
      {R"({"train": {"epochz": 3}})", "train.epochz"},
      {R"({"train": {"learning_rate": "fast"}})", "train.learning_rate"},
      {R"({"cv": {"folds": -2}})", "cv.folds"},
      {R"({"profiles": {"classes": {"G": {"layout": "round"}}}})", "profiles.classes.G.layout"},
      {R"({"profiles": {"classes": {"H": {}}}})", "profiles.classes.H"},
      {R"({"train": {"momentum": 1.5}})", "momentum"},
      {R"({"radar": {"samples_per_ramp": 1}})", "samples_per_ramp"},
  };
  for (const auto& [text, field] : cases) {
    CAPTURE(text);
    std::ofstream(dir / "bad.json") << text;
    const auto r = radarnet_cmd({"config", "--config", (dir / "bad.json").string()});
    CHECK(r.code == 1);
    CHECK(r.err.find(field) != std::string::npos);
  }
}

TEST_CASE("plot of a static target draws one line at the predicted bin") {
  oracle::TempDir dir("cli_plot");
  const RadarParams p;
  const FixedTarget target{40.0, 0.0, 1.0, 0.0};
  save_signal(dir / "static.rdb", synthesize_fixed_targets({&target, 1}, 8, p));
  const auto r = radarnet_cmd({"plot", (dir / "static.rdb").string(), "--channel", "up", "-o",
                               (dir / "up.pgm").string()});
  REQUIRE(r.code == 0);
  const std::string pgm = slurp(dir / "up.pgm");
  const std::string header = "P5\n32 257\n255\n";
  REQUIRE(pgm.substr(0, header.size()) == header);
  const auto bin = static_cast<std::size_t>(std::lround(oracle::range_term(40.0) / p.bin_hz()));
  const std::size_t row = 256 - bin;
  for (std::size_t c = 0; c < 4; ++c) {
    CHECK(static_cast<unsigned char>(pgm[header.size() + row * 32 + c]) == 255);
  }
  // Brightest pixel of each filled column sits on that row.
  for (std::size_t c = 0; c < 4; ++c) {
    std::size_t best = 0;
    for (std::size_t y = 0; y < 257; ++y) {
      if (static_cast<unsigned char>(pgm[header.size() + y * 32 + c]) >
          static_cast<unsigned char>(pgm[header.size() + best * 32 + c])) {
        best = y;
      }
    }
    CHECK(best == row);
  }
}

TEST_CASE("plot of a zero tensor is black; --log keeps the dimensions") {
  oracle::TempDir dir("cli_plot_zero");
  save_tensor(dir / "zero.rdt", RdTensor(3, 257, 32));
  REQUIRE(radarnet_cmd({"plot", (dir / "zero.rdt").string(), "-o", (dir / "z.pgm").string()})
              .code == 0);
  for (const char* ch : {"up", "down", "avg"}) {
    const std::string pgm = slurp(dir / (std::string("z.") + ch + ".pgm"));
    const std::string header = "P5\n32 257\n255\n";
    REQUIRE(pgm.size() == header.size() + 32 * 257);
    CHECK(pgm.find_first_not_of('\0', header.size()) == std::string::npos);
  }

  RdTensor t(3, 257, 32);
  for (std::size_t i = 0; i < t.size(); ++i) t.values[i] = static_cast<float>(i % 97);
  save_tensor(dir / "ramp.rdt", t);
  REQUIRE(radarnet_cmd({"plot", (dir / "ramp.rdt").string(), "--channel", "avg", "-o",
                        (dir / "lin.pgm").string()})
              .code == 0);
  REQUIRE(radarnet_cmd({"plot", (dir / "ramp.rdt").string(), "--channel", "avg", "--log", "-o",
                        (dir / "log.pgm").string()})
              .code == 0);
  const std::string lin = slurp(dir / "lin.pgm"), log = slurp(dir / "log.pgm");
  CHECK(lin.size() == log.size());
  CHECK(lin.substr(0, 14) == log.substr(0, 14));
  CHECK(lin != log);
}

TEST_CASE("plot of a corrupt file exits 1") {
  oracle::TempDir dir("cli_plot_bad");
  std::ofstream(dir / "junk.rdt") << "not a tensor";
  CHECK(radarnet_cmd({"plot", (dir / "junk.rdt").string(), "-o", (dir / "x.pgm").string()}).code ==
        1);
  CHECK(radarnet_cmd({"plot", (dir / "none.rdt").string(), "-o", (dir / "x.pgm").string()}).code ==
        1);
}

TEST_CASE("train, predict and eval on a small corpus") {
  oracle::TempDir dir("cli_train");
  const std::string data = (dir / "data").string();
  REQUIRE(radarnet_cmd(cat({"generate", "--save-signals", "-o", data}, kSmall)).code == 0);

  const std::string w = (dir / "w.rdw").string();
  const auto tr = radarnet_cmd(cat({"train", "--data", data, "--fold", "1", "-o", w}, kQuick));
  REQUIRE(tr.code == 0);
  CHECK(fs::exists(dir / "w.mean.rdt"));
  const auto report = nlohmann::json::parse(slurp(dir / "w.report.json"));
  CHECK(report["fold"].get<int>() == 1);
  CHECK(report["train_size"].get<int>() == 24);
  CHECK(report["val_size"].get<int>() == 12);

  // Same command, same bytes.
  const std::string w2 = (dir / "w2.rdw").string();
  REQUIRE(radarnet_cmd(cat({"train", "--data", data, "--fold", "1", "-o", w2}, kQuick)).code == 0);
  CHECK(slurp(w) == slurp(w2));
  CHECK(slurp(dir / "w.mean.rdt") == slurp(dir / "w2.mean.rdt"));

  // Tensor and raw-signal inputs go through the same pipeline.
  const auto manifest = read_manifest(dir / "data" / "manifest.json");
  const auto& rec = manifest.samples[5];
  const auto from_tensor = radarnet_cmd({"predict", (dir / "data" / rec.file).string(), "--weights", w});
  const auto from_signal =
      radarnet_cmd({"predict", (dir / "data" / rec.signal_file).string(), "--weights", w});
  REQUIRE(from_tensor.code == 0);
  REQUIRE(from_signal.code == 0);
  CHECK(from_tensor.out == from_signal.out);
  CHECK(radarnet_cmd({"predict", (dir / "data" / rec.file).string(), "--weights", w}).out ==
        from_tensor.out);
  const auto scores = scores_of(from_tensor.out);
  REQUIRE(scores.size() == 6);
  double sum = 0;
  for (double s : scores) sum += s;
  CHECK(std::abs(sum - 1.0) < 1e-6);

  const auto ev = radarnet_cmd({"eval", "--weights", w, "--data", data, "--fold", "1",
                                "--train-per-class", "4", "--val-per-class", "2", "--report",
                                (dir / "eval.json").string()});
  REQUIRE(ev.code == 0);
  const auto cm = nlohmann::json::parse(slurp(dir / "eval.json"));
  CHECK(cm["total"].get<int>() == 12);
  CHECK(cm["accuracy"].get<double>() == doctest::Approx(report["test_accuracy"].get<double>()));

  // Mean tensor travels with the weights.
  fs::copy_file(w, dir / "lone.rdw");
  const auto lone = radarnet_cmd({"predict", (dir / "data" / rec.file).string(), "--weights",
                                  (dir / "lone.rdw").string()});
  CHECK(lone.code == 1);
  CHECK(lone.err.find("lone.mean.rdt") != std::string::npos);
}

TEST_CASE("train --init-weights --reinit-fc imports only the convolutional layers") {
  oracle::TempDir dir("cli_finetune");
  const std::string data = (dir / "data").string();
  REQUIRE(radarnet_cmd(cat({"generate", "-o", data}, kSmall)).code == 0);
  const std::string w = (dir / "w.rdw").string();
  REQUIRE(radarnet_cmd(cat({"train", "--data", data, "-o", w}, kQuick)).code == 0);

  const auto r = radarnet_cmd(cat({"train", "--data", data, "--init-weights", w, "--reinit-fc",
                                   "--epochs", "0", "-o", (dir / "ft.rdw").string()},
                                  {"--train-per-class", "4", "--val-per-class", "2"}));
  REQUIRE(r.code == 0);
  CHECK(r.out.find("imported 6 parameter arrays") != std::string::npos);
  CHECK(r.out.find("fc4.weight fc4.bias fc5.weight fc5.bias") != std::string::npos);

  const auto src = nn::decode_weights(slurp(w));
  const auto dst = nn::decode_weights(slurp(dir / "ft.rdw"));
  REQUIRE(src.size() == dst.size());
  for (std::size_t i = 0; i < src.size(); ++i) {
    CAPTURE(src[i].name);
    const bool fc = src[i].name.rfind("fc", 0) == 0;
    CHECK((src[i].values == dst[i].values) == !fc);
  }

  const auto missing = radarnet_cmd({"train", "--data", data, "--init-weights",
                                     (dir / "absent.rdw").string(), "-o", (dir / "x.rdw").string()});
  CHECK(missing.code == 1);
  CHECK(missing.err.find("absent.rdw") != std::string::npos);
}

TEST_CASE("cv synthesizes in memory and reports deterministically") {
  oracle::TempDir dir("cli_cv");
  const auto args = cat(cat({"cv", "--folds", "2", "--report", (dir / "a.json").string(),
                             "--matrix", (dir / "m.pgm").string()},
                            kSmall),
                        kQuick);
  const auto r = radarnet_cmd(args);
  REQUIRE(r.code == 0);
  CHECK(r.out.find("mean accuracy") != std::string::npos);
  const auto rep = nlohmann::json::parse(slurp(dir / "a.json"));
  CHECK(rep["folds"].size() == 2);
  CHECK(slurp(dir / "m.pgm").rfind("P5\n96 96\n255\n", 0) == 0);

  auto again = args;
  again[4] = (dir / "b.json").string();
  REQUIRE(radarnet_cmd(again).code == 0);
  CHECK(slurp(dir / "a.json") == slurp(dir / "b.json"));

  // Same corpus from disk gives the same report.
  const std::string data = (dir / "data").string();
  REQUIRE(radarnet_cmd(cat({"generate", "-o", data}, kSmall)).code == 0);
  auto disk = args;
  disk[4] = (dir / "c.json").string();
  disk.push_back("--data");
  disk.push_back(data);
  REQUIRE(radarnet_cmd(disk).code == 0);
  CHECK(slurp(dir / "a.json") == slurp(dir / "c.json"));
}

}  // TEST_SUITE
