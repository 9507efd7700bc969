#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "radarnet/vehicle_class.hpp"

namespace radarnet {

inline constexpr double kSpeedOfLight = 299'792'458.0;  // m/s
inline constexpr double kPi = 3.14159265358979323846;

constexpr double degrees_to_radians(double deg) noexcept { return deg * kPi / 180.0; }

/// Mounting geometry of the radar above the lane.
struct Geometry {
  double mount_height = 5.3;                        // m
  double depression = degrees_to_radians(32.0);     // rad

  /// Horizontal distance at which the boresight meets the road surface.
  double boresight_ground_distance() const;
};

/// Triangular-sweep FM-CW radar configuration. Defaults describe a 24 GHz
/// radar sweeping 120 MHz every 40 ms with 512 baseband samples per ramp.
struct RadarParams {
  double carrier_hz = 24e9;
  double sweep_bandwidth_hz = 120e6;
  double ramp_duration_s = 0.040;
  std::size_t samples_per_ramp = 512;
  std::size_t fft_size = 512;
  double amplitude = 1.0;
  Geometry geometry{};

  double sample_rate() const { return static_cast<double>(samples_per_ramp) / ramp_duration_s; }
  double wavelength() const { return kSpeedOfLight / carrier_hz; }
  double sweep_slope() const { return sweep_bandwidth_hz / ramp_duration_s; }
  double bin_hz() const { return sample_rate() / static_cast<double>(fft_size); }
  double nyquist_hz() const { return 0.5 * sample_rate(); }

  /// Throws Error{InvalidArgument} naming the first offending field.
  void validate() const;
};

enum class RampPolarity : std::uint8_t { Up = 0, Down = 1 };

constexpr RampPolarity opposite(RampPolarity p) noexcept {
  return p == RampPolarity::Up ? RampPolarity::Down : RampPolarity::Up;
}

/// Unit triangular pulse: 1+t on (-1,0], 1-t on (0,1), zero elsewhere.
double tri(double t) noexcept;

/// Frequency deviation m(t) of the transmitted carrier: a symmetric
/// triangle wave of period 2T spanning [-df/2, +df/2], rising on [2nT, (2n+1)T].
double modulating_frequency(double t, const RadarParams& p) noexcept;

/// f0 + m(t).
double instantaneous_tx_frequency(double t, const RadarParams& p) noexcept;

struct BeatPair {
  double up_hz = 0.0;
  double down_hz = 0.0;
};

struct RangeVelocity {
  double range_m = 0.0;
  double radial_velocity_mps = 0.0;
};

/// Up/down-ramp beat frequencies of a point target. The Doppler term enters
/// by magnitude, so the sign of `radial_velocity_mps` does not matter; the
/// down-ramp beat can come out negative.
BeatPair beat_frequencies(double range_m, double radial_velocity_mps, const RadarParams& p);

/// Algebraic inverse of beat_frequencies. The recovered velocity is the
/// Doppler magnitude converted to m/s.
RangeVelocity invert_beat(double up_hz, double down_hz, const RadarParams& p);

struct Scatterer {
  double along_track_offset = 0.0;  // m, measured from the vehicle front
  double height = 0.0;              // m above the road
  double amplitude = 0.0;           // reflectivity, >= 0
};

/// One vehicle pass. The vehicle moves away from the radar at constant
/// speed; scatterer k sits at horizontal distance
/// entry_distance + offset_k + speed * t. The antenna footprint spans
/// [entry_distance, entry_distance + footprint_length].
struct Scenario {
  VehicleClass class_label = VehicleClass::A;
  double speed = 25.0;             // m/s
  double entry_distance = -10.5;   // m
  double footprint_length = 30.0;  // m
  std::vector<Scatterer> scatterers;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;
};

struct BeatSignal {
  std::vector<float> samples;
  double sample_rate = 0.0;
  RampPolarity first_ramp = RampPolarity::Up;
  std::size_t samples_per_ramp = 0;
  std::optional<VehicleClass> label;

  std::size_t ramp_count() const {
    return samples_per_ramp == 0 ? 0 : samples.size() / samples_per_ramp;
  }
};

/// Raised-cosine antenna weight at horizontal distance d.
double footprint_weight(double d, double footprint_start, double footprint_length) noexcept;

/// Number of ramps a pass lasts: the smallest even count covering
/// footprint_length / speed.
std::size_t ramps_for_pass(double footprint_length, double speed, const RadarParams& p);

/// Dechirped baseband signal of a vehicle pass. Range and radial velocity
/// of each scatterer are frozen at the midpoint of every ramp.
BeatSignal synthesize_beat_signal(const Scenario& s, const RadarParams& p);

/// A target at fixed range and radial velocity for the whole observation.
struct FixedTarget {
  double range_m = 0.0;
  double radial_velocity_mps = 0.0;
  double amplitude = 1.0;
  double phase = 0.0;
};

/// Beat signal of stationary-geometry targets over `num_ramps` ramps,
/// starting with an up-ramp.
BeatSignal synthesize_fixed_targets(std::span<const FixedTarget> targets, std::size_t num_ramps,
                                    const RadarParams& p, double noise_sigma = 0.0,
                                    std::uint64_t seed = 0);

}  // namespace radarnet
