#include "radarnet/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "radarnet/error.hpp"

namespace radarnet {

ProfileTable ProfileTable::defaults() {
  ProfileTable t;
  // length, speed, density, amplitude, height, rear plate, layout, coupling gap
  t[VehicleClass::A] = {3.5, 5.0, 25.0, 36.0, 1.5, 0.6, 1.0, 0.3, 1.4, 0.0, BodyLayout::Compact};
  // Car towing a tall box trailer or caravan.
  t[VehicleClass::B] = {8.0, 12.0, 22.0, 33.0, 0.6, 0.3, 0.6, 0.6, 2.6, 1.2, BodyLayout::TwoBody,
                        0.35, 0.55};
  t[VehicleClass::C] = {10.0, 14.0, 20.0, 25.0, 0.6, 0.6, 1.0, 1.0, 3.5, 2.0, BodyLayout::Compact};
  // Tractor unit plus a tall semitrailer with large flat panels.
  t[VehicleClass::D] = {14.0, 18.0, 20.0, 25.0, 1.4, 0.7, 1.0, 2.5, 4.0, 2.5, BodyLayout::TwoBody,
                        0.18, 0.28};
  t[VehicleClass::E] = {11.0, 14.0, 22.0, 28.0, 1.5, 0.8, 0.9, 0.5, 3.6, 1.0, BodyLayout::Box};
  t[VehicleClass::G] = {1.8, 2.5, 25.0, 38.0, 2.0, 0.15, 0.35, 0.4, 1.4, 0.0, BodyLayout::Compact};
  return t;
}

Scenario sample_vehicle_scenario(VehicleClass cls, std::uint64_t seed,
                                 const ProfileTable& profiles) {
  if (index_of(cls) >= kNumClasses) {
    throw Error(ErrorCode::UnknownClass, "unknown vehicle class");
  }
  const ClassProfile& prof = profiles[cls];
  std::mt19937_64 rng(seed);
  auto uniform = [&rng](double lo, double hi) {
    if (hi <= lo) return lo;
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };

  Scenario s;
  s.class_label = cls;
  s.seed = seed;
  s.footprint_length = profiles.footprint_length;
  s.entry_distance = profiles.entry_distance;

  const double v_lo = prof.speed_min;
  const double v_hi = std::min(prof.speed_max, profiles.global_speed_max);
  s.speed = uniform(std::min(v_lo, v_hi), v_hi);

  const double length = uniform(prof.length_min, prof.length_max);
  const auto count = static_cast<std::size_t>(
      std::max(2.0, std::round(length * prof.scatterers_per_meter)));

  const double gap_lo = prof.gap_start, gap_hi = prof.gap_end;
  const double spacing = length / static_cast<double>(count);
  s.scatterers.reserve(count + 1);
  for (std::size_t i = 0; i < count; ++i) {
    double pos = (static_cast<double>(i) + 0.5) * spacing + uniform(-0.25, 0.25) * spacing;
    if (prof.layout == BodyLayout::TwoBody) {
      const double u = pos / length;
      if (u > gap_lo && u < gap_hi) pos = (u < 0.5 * (gap_lo + gap_hi) ? gap_lo : gap_hi) * length;
    }
    Scatterer sc;
    sc.along_track_offset = std::clamp(pos, 0.0, length);
    sc.height = uniform(prof.height_min, prof.height_max);
    sc.amplitude = prof.layout == BodyLayout::Box
                       ? 0.5 * (prof.amplitude_min + prof.amplitude_max) +
                             uniform(-0.02, 0.02) * (prof.amplitude_max - prof.amplitude_min)
                       : uniform(prof.amplitude_min, prof.amplitude_max);
    s.scatterers.push_back(sc);
  }
  if (prof.rear_plate_amplitude > 0.0) {
    s.scatterers.push_back({length, uniform(prof.height_min, prof.height_max),
                            prof.rear_plate_amplitude});
  }

  double peak = 0.0;
  for (const auto& sc : s.scatterers) peak = std::max(peak, sc.amplitude);
  s.noise_sigma = peak / std::pow(10.0, profiles.snr_db / 20.0);
  return s;
}

}  // namespace radarnet
