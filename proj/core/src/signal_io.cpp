#include "radarnet/signal_io.hpp"

#include "binary_io.hpp"

namespace radarnet {

namespace {
constexpr std::string_view kMagic = "RDB1";
constexpr std::uint32_t kNoLabel = 0xFFFFFFFFu;
}  // namespace

std::string encode_signal(const BeatSignal& sig) {
  std::string out;
  out.reserve(32 + 4 * sig.samples.size());
  out.append(kMagic);
  detail::put_u32(out, static_cast<std::uint32_t>(sig.samples_per_ramp));
  detail::put_u32(out, static_cast<std::uint32_t>(sig.first_ramp));
  detail::put_u32(out, sig.label ? static_cast<std::uint32_t>(index_of(*sig.label)) : kNoLabel);
  detail::put_f64(out, sig.sample_rate);
  detail::put_u64(out, sig.samples.size());
  for (float v : sig.samples) detail::put_f32(out, v);
  return out;
}

BeatSignal decode_signal(std::string_view bytes) {
  if (bytes.substr(0, kMagic.size()) != kMagic) {
    throw Error(ErrorCode::BadMagic, "signal file does not start with RDB1");
  }
  detail::Reader in(bytes, "signal file");
  in.take(kMagic.size());
  BeatSignal sig;
  sig.samples_per_ramp = in.u32();
  const std::uint32_t first = in.u32();
  if (first > 1) throw Error(ErrorCode::InvalidArgument, "signal file has an invalid ramp flag");
  sig.first_ramp = static_cast<RampPolarity>(first);
  const std::uint32_t label = in.u32();
  if (label != kNoLabel) sig.label = class_from_index(label);
  sig.sample_rate = in.f64();
  const std::uint64_t count = in.u64();
  if (count > in.remaining() / 4) {
    throw Error(ErrorCode::Truncated, "signal file payload is shorter than its header states");
  }
  sig.samples.resize(count);
  for (auto& v : sig.samples) v = in.f32();
  return sig;
}

void save_signal(const std::filesystem::path& path, const BeatSignal& sig) {
  detail::write_file(path, encode_signal(sig));
}

BeatSignal load_signal(const std::filesystem::path& path) {
  return decode_signal(detail::read_file(path));
}

}  // namespace radarnet
