#include "radarnet/tensor_io.hpp"

#include <fstream>
#include <iterator>
#include <limits>

#include "binary_io.hpp"

namespace radarnet {

namespace detail {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "' for reading");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::Io, "write to '" + path.string() + "' failed");
}

}  // namespace detail

namespace {
constexpr std::string_view kMagic = "RDT1";
// 1 Gi floats; anything larger is treated as a corrupt header.
constexpr std::uint64_t kMaxElements = std::uint64_t{1} << 30;
}  // namespace

std::string encode_tensor(const RdTensor& t) {
  std::string out;
  out.reserve(16 + 4 * t.values.size());
  out.append(kMagic);
  detail::put_u32(out, static_cast<std::uint32_t>(t.channels));
  detail::put_u32(out, static_cast<std::uint32_t>(t.height));
  detail::put_u32(out, static_cast<std::uint32_t>(t.width));
  for (float v : t.values) detail::put_f32(out, v);
  return out;
}

RdTensor decode_tensor(std::string_view bytes) {
  detail::Reader in(bytes, "tensor file");
  if (bytes.size() < kMagic.size() || bytes.substr(0, kMagic.size()) != kMagic) {
    throw Error(ErrorCode::BadMagic, "tensor file does not start with RDT1");
  }
  in.take(kMagic.size());
  const std::uint64_t c = in.u32();
  const std::uint64_t h = in.u32();
  const std::uint64_t w = in.u32();
  const bool overflow = (c != 0 && h > kMaxElements / c) ||
                        (c * h != 0 && w > kMaxElements / (c * h));
  if (overflow) {
    throw Error(ErrorCode::DimensionOverflow, "tensor dimensions overflow the element limit");
  }
  const std::uint64_t count = c * h * w;
  if (in.remaining() < count * 4) {
    throw Error(ErrorCode::Truncated, "tensor file payload is shorter than its header states");
  }
  RdTensor t(c, h, w);
  for (auto& v : t.values) v = in.f32();
  return t;
}

void save_tensor(const std::filesystem::path& path, const RdTensor& t) {
  detail::write_file(path, encode_tensor(t));
}

RdTensor load_tensor(const std::filesystem::path& path) {
  return decode_tensor(detail::read_file(path));
}

}  // namespace radarnet
