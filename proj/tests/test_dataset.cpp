#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "oracles.hpp"
#include "radarnet/dataset.hpp"
#include "radarnet/error.hpp"
#include "radarnet/tensor_io.hpp"

using namespace radarnet;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Manifest synthetic_manifest(std::size_t per_class) {
  Manifest m;
  m.tensor_shape = {3, 4, 4};
  SampleId id = 0;
  for (auto c : kAllClasses) {
    m.class_counts[index_of(c)] = per_class;
    for (std::size_t i = 0; i < per_class; ++i) {
      SampleRecord r;
      r.id = id++;
      r.label = c;
      m.samples.push_back(r);
    }
  }
  return m;
}

}  // namespace

TEST_SUITE("dataset") {

TEST_CASE("generation is deterministic and consistent with its manifest") {
  oracle::TempDir dir("gen");
  GenerateOptions opt;
  opt.tensor.target_width = 32;
  opt.threads = 3;
  const auto a = generate_dataset(uniform_counts(3), 1, ProfileTable::defaults(), RadarParams{}, dir / "a", opt);
  opt.threads = 1;
  const auto b = generate_dataset(uniform_counts(3), 1, ProfileTable::defaults(), RadarParams{}, dir / "b", opt);

  REQUIRE(a.size() == 18);
  for (auto c : kAllClasses) CHECK(a.manifest.class_counts[index_of(c)] == 3);
  CHECK(slurp(dir / "a" / "manifest.json") == slurp(dir / "b" / "manifest.json"));
  for (const auto& rec : a.manifest.samples) {
    CHECK(slurp(dir / "a" / rec.file) == slurp(dir / "b" / rec.file));
    CHECK(rec.seed == 1 + rec.id);
    const auto t = a.load(rec.id);
    CHECK(t.channels == a.manifest.tensor_shape.channels);
    CHECK(t.height == a.manifest.tensor_shape.height);
    CHECK(t.width == a.manifest.tensor_shape.width);
    CHECK(t.label == rec.label);
  }

  const auto reopened = open_dataset(dir / "a");
  CHECK(manifest_to_json(reopened.manifest) == manifest_to_json(a.manifest));
  CHECK(reopened.manifest.radar_params_hash == radar_params_hash(RadarParams{}));
  const auto all = reopened.load_all(2);
  CHECK(all.size() == 18);
  CHECK(all[5].values == a.load(5).values);
}

TEST_CASE("generation errors name the missing path") {
  oracle::TempDir dir("gen_err");
  const auto target = dir.path() / "no" / "such" / "out";
  try {
    generate_dataset(uniform_counts(1), 1, ProfileTable::defaults(), RadarParams{}, target);
    FAIL("expected an Io error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Io);
    CHECK(std::string(e.what()).find((dir.path() / "no" / "such").string()) != std::string::npos);
  }
}

TEST_CASE("radar parameter hash tracks the parameters") {
  RadarParams p;
  const auto h = radar_params_hash(p);
  CHECK(h == radar_params_hash(RadarParams{}));
  p.carrier_hz = 24.125e9;
  CHECK(h != radar_params_hash(p));
}

TEST_CASE("manifest json roundtrip and schema errors") {
  auto m = synthetic_manifest(2);
  m.base_seed = 42;
  m.radar_params_hash = "abc";
  m.samples[3].speed = 27.25;
  m.samples[3].file = "samples/000003_A.rdt";
  const auto text = manifest_to_json(m);
  CHECK(manifest_to_json(manifest_from_json(text)) == text);
  CHECK_THROWS_AS(manifest_from_json("{\"format_version\": 1}"), Error);
  CHECK_THROWS_AS(manifest_from_json("not json"), Error);
}

TEST_CASE("count presets") {
  const auto skewed = skewed_counts();
  std::size_t total = 0;
  for (const auto& [c, n] : skewed) total += n;
  CHECK(total == 9981);
  std::vector<std::pair<std::size_t, VehicleClass>> ranked;
  for (const auto& [c, n] : skewed) ranked.emplace_back(n, c);
  std::sort(ranked.rbegin(), ranked.rend());
  const std::set<VehicleClass> top{ranked[0].second, ranked[1].second, ranked[2].second};
  CHECK(top == std::set<VehicleClass>{VehicleClass::A, VehicleClass::D, VehicleClass::E});
  for (const auto& [c, n] : uniform_counts(100)) CHECK(n == 100);
}

TEST_CASE("stratified folds: quotas, disjointness and coverage") {
  const auto m = synthetic_manifest(100);
  const auto folds = stratified_fold_split(m, 10, 40, 10, 1);
  REQUIRE(folds.size() == 10);
  for (std::size_t f = 0; f < folds.size(); ++f) {
    const auto& fold = folds[f];
    CHECK(fold.fold_index == f);
    CHECK(fold.train.size() == 240);
    CHECK(fold.val.size() == 60);
    CHECK(fold.test.size() == 300);
    std::set<SampleId> seen;
    for (const auto* part : {&fold.train, &fold.val, &fold.test}) {
      for (SampleId id : *part) CHECK(seen.insert(id).second);
    }
    CHECK(seen.size() == m.samples.size());
    const auto train_by = ids_by_class(fold.train, m);
    const auto val_by = ids_by_class(fold.val, m);
    for (std::size_t c = 0; c < kNumClasses; ++c) {
      CHECK(train_by[c].size() == 40);
      CHECK(val_by[c].size() == 10);
    }
  }
  CHECK(folds[0].train != folds[1].train);
  const auto again = stratified_fold_split(m, 10, 40, 10, 1);
  for (std::size_t f = 0; f < 10; ++f) CHECK(again[f].test == folds[f].test);
  CHECK(stratified_fold_split(m, 10, 40, 10, 2)[0].train != folds[0].train);
}

TEST_CASE("large-corpus quotas") {
  Manifest m;
  SampleId id = 0;
  for (const auto& [c, n] : skewed_counts()) {
    for (std::size_t i = 0; i < n; ++i) m.samples.push_back({id++, c, "", 0.0, 0, ""});
  }
  const auto folds = stratified_fold_split(m, 2, 400, 45, 3);
  CHECK(folds[0].train.size() == 2400);
  CHECK(folds[0].val.size() == 270);
  CHECK(folds[0].test.size() == 9981 - 2400 - 270);
}

TEST_CASE("fold split rejects small classes by name") {
  auto m = synthetic_manifest(100);
  std::erase_if(m.samples, [](const SampleRecord& r) { return r.label == VehicleClass::E && r.id % 2 == 0; });
  try {
    stratified_fold_split(m, 3, 40, 10, 1);
    FAIL("expected InsufficientClass");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InsufficientClass);
    CHECK(std::string(e.what()).find('E') != std::string::npos);
  }
  CHECK_NOTHROW(stratified_fold_split(synthetic_manifest(51), 1, 40, 10, 1));
  CHECK_THROWS_AS(stratified_fold_split(synthetic_manifest(50), 1, 40, 10, 1), Error);
}

TEST_CASE("balanced batches cover each class once") {
  const auto m = synthetic_manifest(100);
  auto fold = stratified_fold_split(m, 1, 40, 10, 1)[0];
  auto by_class = ids_by_class(fold.train, m);
  by_class[index_of(VehicleClass::C)].resize(25);
  const auto batches = balanced_batches(by_class, 9);
  CHECK(batches.size() == 25);
  std::set<SampleId> used;
  for (const auto& b : batches) {
    for (std::size_t slot = 0; slot < kNumClasses; ++slot) {
      CHECK(m.samples[b[slot]].label == kAllClasses[slot]);
      CHECK(used.insert(b[slot]).second);
    }
  }
  const auto again = balanced_batches(by_class, 9);
  CHECK(again == batches);
  CHECK(balanced_batches(by_class, 10) != batches);

  by_class[index_of(VehicleClass::G)].clear();
  try {
    balanced_batches(by_class, 9);
    FAIL("expected MissingClass");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MissingClass);
  }
}

}  // TEST_SUITE
