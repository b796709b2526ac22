#include "latnet/setting.hpp"

#include <stdexcept>

namespace latnet {

SpaceSetting SpaceSetting::korobov_hilbert(int alpha) {
  if (alpha < 1) throw std::invalid_argument("Korobov (Hilbert) setting requires alpha >= 1");
  return {SpaceKind::KorobovHilbert, alpha};
}

SpaceSetting SpaceSetting::korobov_non_hilbert(int alpha) {
  if (alpha < 2) throw std::invalid_argument("Korobov (non-Hilbert) setting requires alpha >= 2");
  return {SpaceKind::KorobovNonHilbert, alpha};
}

SpaceSetting SpaceSetting::make(SpaceKind kind, int alpha) {
  switch (kind) {
    case SpaceKind::SobolevShifted: return sobolev_shifted();
    case SpaceKind::KorobovHilbert: return korobov_hilbert(alpha);
    case SpaceKind::KorobovNonHilbert: return korobov_non_hilbert(alpha);
  }
  throw std::invalid_argument("unknown space kind");
}

double SpaceSetting::lambda_lower() const {
  switch (kind_) {
    case SpaceKind::SobolevShifted: return 0.5;
    case SpaceKind::KorobovHilbert: return 1.0 / (2.0 * alpha_);
    case SpaceKind::KorobovNonHilbert: return 1.0 / alpha_;
  }
  return 0.0;
}

std::string SpaceSetting::name() const {
  switch (kind_) {
    case SpaceKind::SobolevShifted: return "sobolev-shifted";
    case SpaceKind::KorobovHilbert: return "korobov-hilbert(alpha=" + std::to_string(alpha_) + ")";
    case SpaceKind::KorobovNonHilbert:
      return "korobov-non-hilbert(alpha=" + std::to_string(alpha_) + ")";
  }
  return "?";
}

char SpaceSetting::letter() const {
  switch (kind_) {
    case SpaceKind::SobolevShifted: return 'a';
    case SpaceKind::KorobovHilbert: return 'b';
    case SpaceKind::KorobovNonHilbert: return 'c';
  }
  return '?';
}

SpaceKind parse_space_kind(const std::string& text) {
  if (text == "a" || text == "sobolev-shifted") return SpaceKind::SobolevShifted;
  if (text == "b" || text == "korobov-hilbert") return SpaceKind::KorobovHilbert;
  if (text == "c" || text == "korobov-non-hilbert") return SpaceKind::KorobovNonHilbert;
  throw std::invalid_argument("unknown space setting '" + text + "' (expected a, b or c)");
}

}  // namespace latnet
