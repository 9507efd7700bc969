#include "radarnet/radar_model.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <string>

#include "radarnet/error.hpp"

namespace radarnet {

namespace {

void require(bool ok, const char* field, const char* rule) {
  if (!ok) {
    throw Error(ErrorCode::InvalidArgument,
                std::string("radar parameter '") + field + "' must satisfy " + rule);
  }
}

// Adds amplitude * cos(2*pi*f*n/fs + phase) to one ramp of samples.
void add_tone(std::span<float> ramp, double freq_hz, double sample_rate, double amplitude,
              double phase) {
  const double step = 2.0 * kPi * freq_hz / sample_rate;
  for (std::size_t n = 0; n < ramp.size(); ++n) {
    ramp[n] += static_cast<float>(amplitude * std::cos(step * static_cast<double>(n) + phase));
  }
}

void check_nyquist(double freq_hz, const RadarParams& p, std::size_t ramp) {
  if (!(std::abs(freq_hz) < p.nyquist_hz())) {
    std::ostringstream msg;
    msg << "beat frequency " << freq_hz << " Hz in ramp " << ramp
        << " is not below the Nyquist limit " << p.nyquist_hz() << " Hz";
    throw Error(ErrorCode::NyquistViolation, msg.str());
  }
}

void add_noise(std::vector<float>& samples, double sigma, std::mt19937_64& rng) {
  if (sigma <= 0.0) return;
  std::normal_distribution<double> noise(0.0, sigma);
  for (auto& x : samples) x += static_cast<float>(noise(rng));
}

RampPolarity polarity_of(std::size_t ramp, RampPolarity first) {
  return ramp % 2 == 0 ? first : opposite(first);
}

}  // namespace

double Geometry::boresight_ground_distance() const {
  return mount_height / std::tan(depression);
}

void RadarParams::validate() const {
  require(carrier_hz > 0.0, "carrier_hz", "> 0");
  require(sweep_bandwidth_hz > 0.0, "sweep_bandwidth_hz", "> 0");
  require(ramp_duration_s > 0.0, "ramp_duration_s", "> 0");
  require(samples_per_ramp >= 2, "samples_per_ramp", ">= 2");
  require(fft_size >= samples_per_ramp, "fft_size", ">= samples_per_ramp");
  require(amplitude >= 0.0, "amplitude", ">= 0");
  require(geometry.mount_height > 0.0, "geometry.mount_height", "> 0");
  require(geometry.depression > 0.0 && geometry.depression < kPi / 2, "geometry.depression",
          "0 < alpha < pi/2");
}

double tri(double t) noexcept {
  if (t > -1.0 && t <= 0.0) return 1.0 + t;
  if (t > 0.0 && t < 1.0) return 1.0 - t;
  return 0.0;
}

double modulating_frequency(double t, const RadarParams& p) noexcept {
  const double period = 2.0 * p.ramp_duration_s;
  double phase = std::fmod(t, period);
  if (phase < 0.0) phase += period;
  // One triangle centred on the middle of the period; the remaining terms of
  // the periodic sum vanish on [0, 2T).
  return p.sweep_bandwidth_hz * (tri((phase - p.ramp_duration_s) / p.ramp_duration_s) - 0.5);
}

double instantaneous_tx_frequency(double t, const RadarParams& p) noexcept {
  return p.carrier_hz + modulating_frequency(t, p);
}

BeatPair beat_frequencies(double range_m, double radial_velocity_mps, const RadarParams& p) {
  if (!(range_m >= 0.0) || !std::isfinite(range_m)) {
    throw Error(ErrorCode::DomainError, "range must be finite and non-negative");
  }
  if (!std::isfinite(radial_velocity_mps)) {
    throw Error(ErrorCode::DomainError, "radial velocity must be finite");
  }
  const double delay = 2.0 * range_m / kSpeedOfLight;
  const double range_term = p.sweep_slope() * delay;
  const double doppler = std::abs(2.0 * radial_velocity_mps / p.wavelength());
  return {range_term + doppler, range_term - doppler};
}

RangeVelocity invert_beat(double up_hz, double down_hz, const RadarParams& p) {
  const double range_term = 0.5 * (up_hz + down_hz);
  if (!(range_term >= 0.0)) {
    throw Error(ErrorCode::DomainError, "beat pair implies a negative range");
  }
  const double doppler = 0.5 * (up_hz - down_hz);
  const double delay = range_term / p.sweep_slope();
  return {0.5 * delay * kSpeedOfLight, 0.5 * doppler * p.wavelength()};
}

double footprint_weight(double d, double footprint_start, double footprint_length) noexcept {
  const double u = (d - footprint_start) / footprint_length;
  if (!(u > 0.0 && u < 1.0)) return 0.0;
  return 0.5 * (1.0 - std::cos(2.0 * kPi * u));
}

std::size_t ramps_for_pass(double footprint_length, double speed, const RadarParams& p) {
  if (!(speed > 0.0) || !(footprint_length > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "speed and footprint_length must be positive");
  }
  const double duration = footprint_length / speed;
  auto ramps = static_cast<std::size_t>(std::ceil(duration / p.ramp_duration_s - 1e-9));
  if (ramps < 2) ramps = 2;
  if (ramps % 2 != 0) ++ramps;
  return ramps;
}

BeatSignal synthesize_beat_signal(const Scenario& s, const RadarParams& p) {
  p.validate();
  if (s.scatterers.empty()) {
    throw Error(ErrorCode::EmptyScatterers, "scenario has no scatterers");
  }
  if (!(s.speed > 0.0)) throw Error(ErrorCode::InvalidArgument, "scenario speed must be > 0");
  for (const auto& sc : s.scatterers) {
    if (!(sc.amplitude >= 0.0) || !(sc.height >= 0.0)) {
      throw Error(ErrorCode::InvalidArgument,
                  "scatterer amplitude and height must be non-negative");
    }
  }
  const std::size_t num_ramps = ramps_for_pass(s.footprint_length, s.speed, p);
  const std::size_t spr = p.samples_per_ramp;

  BeatSignal sig;
  sig.sample_rate = p.sample_rate();
  sig.samples_per_ramp = spr;
  sig.first_ramp = RampPolarity::Up;
  sig.label = s.class_label;
  sig.samples.assign(num_ramps * spr, 0.0f);

  std::mt19937_64 rng(s.seed);
  std::uniform_real_distribution<double> phase_dist(0.0, 2.0 * kPi);
  std::vector<double> phases(s.scatterers.size());
  for (auto& ph : phases) ph = phase_dist(rng);

  const double h = p.geometry.mount_height;
  for (std::size_t r = 0; r < num_ramps; ++r) {
    const double t_mid = (static_cast<double>(r) + 0.5) * p.ramp_duration_s;
    const RampPolarity polarity = polarity_of(r, sig.first_ramp);
    std::span<float> ramp(sig.samples.data() + r * spr, spr);
    for (std::size_t k = 0; k < s.scatterers.size(); ++k) {
      const Scatterer& sc = s.scatterers[k];
      const double d = s.entry_distance + sc.along_track_offset + s.speed * t_mid;
      const double w = footprint_weight(d, s.entry_distance, s.footprint_length);
      if (w == 0.0 || sc.amplitude == 0.0) continue;
      const double dz = h - sc.height;
      const double range = std::sqrt(dz * dz + d * d);
      const double v_radial = range > 0.0 ? s.speed * d / range : 0.0;
      const BeatPair beats = beat_frequencies(range, v_radial, p);
      const double f = polarity == RampPolarity::Up ? beats.up_hz : beats.down_hz;
      check_nyquist(f, p, r);
      add_tone(ramp, f, sig.sample_rate, p.amplitude * sc.amplitude * w, phases[k]);
    }
  }
  add_noise(sig.samples, s.noise_sigma, rng);
  return sig;
}

BeatSignal synthesize_fixed_targets(std::span<const FixedTarget> targets, std::size_t num_ramps,
                                    const RadarParams& p, double noise_sigma,
                                    std::uint64_t seed) {
  p.validate();
  if (targets.empty()) throw Error(ErrorCode::EmptyScatterers, "no targets given");
  const std::size_t spr = p.samples_per_ramp;
  BeatSignal sig;
  sig.sample_rate = p.sample_rate();
  sig.samples_per_ramp = spr;
  sig.first_ramp = RampPolarity::Up;
  sig.samples.assign(num_ramps * spr, 0.0f);

  for (std::size_t r = 0; r < num_ramps; ++r) {
    const RampPolarity polarity = polarity_of(r, sig.first_ramp);
    std::span<float> ramp(sig.samples.data() + r * spr, spr);
    for (const auto& t : targets) {
      const BeatPair beats = beat_frequencies(t.range_m, t.radial_velocity_mps, p);
      const double f = polarity == RampPolarity::Up ? beats.up_hz : beats.down_hz;
      check_nyquist(f, p, r);
      add_tone(ramp, f, sig.sample_rate, p.amplitude * t.amplitude, t.phase);
    }
  }
  std::mt19937_64 rng(seed);
  add_noise(sig.samples, noise_sigma, rng);
  return sig;
}

}  // namespace radarnet
