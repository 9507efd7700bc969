#pragma once

#include <array>
#include <cstdint>

#include "radarnet/radar_model.hpp"
#include "radarnet/vehicle_class.hpp"

namespace radarnet {

/// How scatterers are laid out along a vehicle body.
enum class BodyLayout : std::uint8_t {
  Compact,  // scatterers spread over the whole length
  TwoBody,  // tractor/car plus trailer separated by a coupling gap
  Box,      // uniform boxy body, near-constant reflectivity
};

/// Per-class simulation ranges. These are tuning knobs of the synthetic
/// corpus, not measured vehicle statistics.
struct ClassProfile {
  double length_min = 4.0, length_max = 5.0;      // m
  double speed_min = 25.0, speed_max = 36.0;      // m/s
  double scatterers_per_meter = 1.0;
  double amplitude_min = 0.5, amplitude_max = 1.0;
  double height_min = 0.3, height_max = 1.5;      // m
  double rear_plate_amplitude = 0.0;              // extra strong rear reflector, 0 = none
  BodyLayout layout = BodyLayout::Compact;
  // TwoBody only: empty coupling gap as fractions of the length.
  double gap_start = 0.40, gap_end = 0.50;
};

struct ProfileTable {
  std::array<ClassProfile, kNumClasses> classes{};
  double global_speed_min = 10.0;   // m/s
  double global_speed_max = 38.0;   // m/s, keeps the up-ramp beat below fs/2
  double footprint_length = 30.0;   // m
  double entry_distance = -10.5;    // m, footprint start
  double snr_db = 20.0;             // peak scatterer amplitude over noise sigma

  const ClassProfile& operator[](VehicleClass c) const { return classes[index_of(c)]; }
  ClassProfile& operator[](VehicleClass c) { return classes[index_of(c)]; }

  static ProfileTable defaults();
};

/// Draws a vehicle pass of class `cls`. Deterministic in (cls, seed, profiles).
Scenario sample_vehicle_scenario(VehicleClass cls, std::uint64_t seed,
                                 const ProfileTable& profiles = ProfileTable::defaults());

}  // namespace radarnet
