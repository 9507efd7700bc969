#include "radarnet/weights_io.hpp"

#include <map>
#include <set>

#include "binary_io.hpp"
#include "radarnet/error.hpp"

namespace radarnet::nn {

namespace {

constexpr std::string_view kMagic = "RDW1";
constexpr std::uint64_t kMaxValues = std::uint64_t{1} << 32;

std::string layer_of(const std::string& param_name) {
  const auto dot = param_name.rfind('.');
  return dot == std::string::npos ? param_name : param_name.substr(0, dot);
}

std::string dims_string(const std::vector<std::uint32_t>& dims) {
  std::string s;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (i) s += "x";
    s += std::to_string(dims[i]);
  }
  return s;
}

}  // namespace

std::string encode_weights(std::span<const WeightRecord> records) {
  std::string out(kMagic);
  detail::put_u32(out, static_cast<std::uint32_t>(records.size()));
  for (const auto& r : records) {
    detail::put_u32(out, static_cast<std::uint32_t>(r.name.size()));
    out.append(r.name);
    detail::put_u32(out, static_cast<std::uint32_t>(r.dims.size()));
    for (auto d : r.dims) detail::put_u32(out, d);
    for (float v : r.values) detail::put_f32(out, v);
  }
  return out;
}

std::vector<WeightRecord> decode_weights(std::string_view bytes) {
  if (bytes.substr(0, kMagic.size()) != kMagic) {
    throw Error(ErrorCode::BadMagic, "weights file does not start with RDW1");
  }
  detail::Reader in(bytes, "weights file");
  in.take(kMagic.size());
  const std::uint32_t count = in.u32();
  std::vector<WeightRecord> records;
  for (std::uint32_t r = 0; r < count; ++r) {
    WeightRecord rec;
    const std::uint32_t name_len = in.u32();
    rec.name = std::string(in.take(name_len));
    const std::uint32_t rank = in.u32();
    std::uint64_t total = 1;
    for (std::uint32_t d = 0; d < rank; ++d) {
      rec.dims.push_back(in.u32());
      total *= rec.dims.back();
      if (total > kMaxValues) {
        throw Error(ErrorCode::DimensionOverflow, "record '" + rec.name + "' is too large");
      }
    }
    if (total > in.remaining() / 4) {
      throw Error(ErrorCode::Truncated, "record '" + rec.name + "' is truncated");
    }
    rec.values.resize(total);
    for (auto& v : rec.values) v = in.f32();
    records.push_back(std::move(rec));
  }
  return records;
}

template <typename T>
std::vector<WeightRecord> weight_records(const Network<T>& net) {
  std::vector<WeightRecord> out;
  for (const auto& p : net.parameters()) {
    WeightRecord r{p.name, p.dims, std::vector<float>(p.values.size())};
    for (std::size_t i = 0; i < p.values.size(); ++i) r.values[i] = static_cast<float>(p.values[i]);
    out.push_back(std::move(r));
  }
  return out;
}

template <typename T>
LoadReport apply_weights(Network<T>& net, std::span<const WeightRecord> records,
                         const LoadOptions& options) {
  std::map<std::string, const WeightRecord*> by_name;
  for (const auto& r : records) by_name[r.name] = &r;

  std::set<std::string> fc_layers;
  for (const auto& spec : net.layers()) {
    if (spec.kind == LayerKind::FullyConnected) fc_layers.insert(spec.name);
  }

  LoadReport report;
  std::vector<std::pair<std::size_t, const WeightRecord*>> plan;
  std::vector<std::string> offending;
  std::set<std::string> used;
  const auto& params = net.parameters();
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& p = params[i];
    const std::string layer = layer_of(p.name);
    auto it = by_name.find(p.name);
    if (it != by_name.end()) used.insert(p.name);
    if (options.reinit_fc && fc_layers.count(layer)) {
      report.kept.push_back(p.name);
      continue;
    }
    if (it == by_name.end()) {
      if (options.allow_missing) {
        report.kept.push_back(p.name);
      } else {
        offending.push_back(layer + " (" + p.name + " missing)");
      }
      continue;
    }
    if (it->second->dims != p.dims) {
      offending.push_back(layer + " (" + p.name + ": file " + dims_string(it->second->dims) +
                          ", network " + dims_string(p.dims) + ")");
      continue;
    }
    plan.emplace_back(i, it->second);
  }
  if (!offending.empty()) {
    std::string msg = "weights do not match the network for layer(s): ";
    for (std::size_t i = 0; i < offending.size(); ++i) {
      if (i) msg += "; ";
      msg += offending[i];
    }
    throw Error(ErrorCode::LayerMismatch, msg);
  }
  auto& mutable_params = net.mutable_parameters();
  for (const auto& [index, rec] : plan) {
    auto& dst = mutable_params[index].values;
    for (std::size_t j = 0; j < dst.size(); ++j) dst[j] = static_cast<T>(rec->values[j]);
    report.loaded.push_back(mutable_params[index].name);
  }
  for (const auto& r : records) {
    if (!used.count(r.name)) report.ignored.push_back(r.name);
  }
  return report;
}

template <typename T>
void save_weights(const std::filesystem::path& path, const Network<T>& net) {
  const auto records = weight_records(net);
  detail::write_file(path, encode_weights(records));
}

template <typename T>
LoadReport load_weights(const std::filesystem::path& path, Network<T>& net,
                        const LoadOptions& options) {
  const auto records = decode_weights(detail::read_file(path));
  return apply_weights(net, records, options);
}

template std::vector<WeightRecord> weight_records<float>(const Network<float>&);
template std::vector<WeightRecord> weight_records<double>(const Network<double>&);
template LoadReport apply_weights<float>(Network<float>&, std::span<const WeightRecord>,
                                         const LoadOptions&);
template LoadReport apply_weights<double>(Network<double>&, std::span<const WeightRecord>,
                                          const LoadOptions&);
template void save_weights<float>(const std::filesystem::path&, const Network<float>&);
template void save_weights<double>(const std::filesystem::path&, const Network<double>&);
template LoadReport load_weights<float>(const std::filesystem::path&, Network<float>&,
                                        const LoadOptions&);
template LoadReport load_weights<double>(const std::filesystem::path&, Network<double>&,
                                         const LoadOptions&);

}  // namespace radarnet::nn
