#include "radarnet/vehicle_class.hpp"

#include <string>

#include "radarnet/error.hpp"

namespace radarnet {

VehicleClass class_from_index(std::size_t index) {
  if (index >= kNumClasses) {
    throw Error(ErrorCode::UnknownClass,
                "class index out of range: " + std::to_string(index));
  }
  return kAllClasses[index];
}

std::string_view class_letter(VehicleClass c) noexcept {
  static constexpr std::array<std::string_view, kNumClasses> kLetters = {
      "A", "B", "C", "D", "E", "G"};
  return kLetters[index_of(c)];
}

std::string_view class_description(VehicleClass c) noexcept {
  static constexpr std::array<std::string_view, kNumClasses> kNames = {
      "car", "car-trailer", "truck", "cargo truck", "bus", "motorcycle"};
  return kNames[index_of(c)];
}

std::optional<VehicleClass> try_parse_class(std::string_view letter) noexcept {
  for (auto c : kAllClasses) {
    if (class_letter(c) == letter) return c;
  }
  return std::nullopt;
}

VehicleClass parse_class(std::string_view letter) {
  if (auto c = try_parse_class(letter)) return *c;
  throw Error(ErrorCode::UnknownClass,
              "unknown vehicle class '" + std::string(letter) + "'");
}

}  // namespace radarnet
