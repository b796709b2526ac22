#pragma once

#include <string>

namespace latnet {

enum class SpaceKind {
  SobolevShifted,     // unanchored Sobolev space of smoothness one, randomly shifted rule
  KorobovHilbert,     // weighted Korobov space, Hilbert norm, smoothness alpha >= 1
  KorobovNonHilbert,  // weighted Korobov space, sup-type norm, smoothness alpha >= 2
};

class SpaceSetting {
 public:
  static SpaceSetting sobolev_shifted() { return {SpaceKind::SobolevShifted, 1}; }
  static SpaceSetting korobov_hilbert(int alpha);
  static SpaceSetting korobov_non_hilbert(int alpha);
  static SpaceSetting make(SpaceKind kind, int alpha);

  SpaceKind kind() const { return kind_; }
  int alpha() const { return alpha_; }

  // Open lower end of the admissible lambda interval; the upper end is 1.
  double lambda_lower() const;

  std::string name() const;
  char letter() const;

  bool operator==(const SpaceSetting&) const = default;

 private:
  SpaceSetting(SpaceKind kind, int alpha) : kind_(kind), alpha_(alpha) {}
  SpaceKind kind_;
  int alpha_;
};

// Parses "a", "b", "c" (or the full kind names).
SpaceKind parse_space_kind(const std::string& text);

}  // namespace latnet
