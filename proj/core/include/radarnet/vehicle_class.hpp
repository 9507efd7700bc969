#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

namespace radarnet {

/// Highway vehicle categories: car, car-trailer, truck, cargo truck, bus,
/// motorcycle. The enumerator order is the class index order used by the
/// network output and by tie breaking (A < B < C < D < E < G).
enum class VehicleClass : std::uint8_t { A = 0, B, C, D, E, G };

inline constexpr std::size_t kNumClasses = 6;

inline constexpr std::array<VehicleClass, kNumClasses> kAllClasses = {
    VehicleClass::A, VehicleClass::B, VehicleClass::C,
    VehicleClass::D, VehicleClass::E, VehicleClass::G};

constexpr std::size_t index_of(VehicleClass c) noexcept {
  return static_cast<std::size_t>(c);
}

VehicleClass class_from_index(std::size_t index);

/// Single-letter code ("A" ... "G").
std::string_view class_letter(VehicleClass c) noexcept;
std::string_view class_description(VehicleClass c) noexcept;

/// Parses a single-letter code; throws Error{UnknownClass} otherwise.
VehicleClass parse_class(std::string_view letter);
std::optional<VehicleClass> try_parse_class(std::string_view letter) noexcept;

}  // namespace radarnet
