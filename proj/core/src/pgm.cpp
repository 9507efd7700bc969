#include "radarnet/pgm.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "binary_io.hpp"

namespace radarnet {

std::string export_pgm(std::span<const double> values, std::size_t rows, std::size_t cols,
                       bool log_scale) {
  if (values.size() != rows * cols) {
    throw Error(ErrorCode::ShapeMismatch, "matrix size does not match its dimensions");
  }
  std::vector<double> mapped(values.begin(), values.end());
  if (log_scale) {
    for (auto& v : mapped) v = 20.0 * std::log10(std::abs(v) + 1e-12);
  }
  double lo = 0.0, hi = 0.0;
  if (!mapped.empty()) {
    const auto [mn, mx] = std::minmax_element(mapped.begin(), mapped.end());
    lo = *mn;
    hi = *mx;
  }

  std::string out = "P5\n" + std::to_string(cols) + " " + std::to_string(rows) + "\n255\n";
  const std::size_t header = out.size();
  out.resize(header + rows * cols, '\0');
  if (hi > lo) {
    const double scale = 255.0 / (hi - lo);
    for (std::size_t r = 0; r < rows; ++r) {
      const std::size_t image_row = rows - 1 - r;
      for (std::size_t c = 0; c < cols; ++c) {
        const double level = std::round((mapped[r * cols + c] - lo) * scale);
        out[header + image_row * cols + c] =
            static_cast<char>(static_cast<unsigned char>(std::clamp(level, 0.0, 255.0)));
      }
    }
  }
  return out;
}

std::string export_pgm(const Spectrogram& s, bool log_scale) {
  return export_pgm(s.values, s.bins, s.columns, log_scale);
}

std::string export_pgm(const RdTensor& t, std::size_t channel, bool log_scale) {
  if (channel >= t.channels) throw Error(ErrorCode::InvalidArgument, "channel out of range");
  const auto ch = t.channel(channel);
  std::vector<double> values(ch.begin(), ch.end());
  return export_pgm(values, t.height, t.width, log_scale);
}

void write_pgm(const std::filesystem::path& path, const std::string& pgm) {
  detail::write_file(path, pgm);
}

}  // namespace radarnet
