// SPDX-License-Identifier: Apache-2.0
//
// Normalized radiation patterns, antenna descriptions and the transmit
// launch field.

#pragma once

#include <cmath>
#include <stdexcept>
#include <variant>

#include "ristrace/field.hpp"
#include "ristrace/geometry.hpp"

namespace ristrace {

namespace pattern {

struct Isotropic {
  friend bool operator==(const Isotropic &, const Isotropic &) = default;
};

/// Rotation-symmetric horn model (cos theta)^(G/2 - 1), linear G.
struct Directional {
  double gain_linear = 1.0;
  friend bool operator==(const Directional &, const Directional &) = default;
};

/// Vertical monopole of height h (in wavelengths), 0 < h <= 1/2. Values are
/// divided by the broadside value (1 - cos kh)^2, which is 1 for h = 1/4.
struct Monopole {
  double height_wavelengths = 0.25;
  friend bool operator==(const Monopole &, const Monopole &) = default;
};

/// Patch element model max(cos theta, 0).
struct Cosine {
  friend bool operator==(const Cosine &, const Cosine &) = default;
};

} // namespace pattern

using AntennaPattern = std::variant<pattern::Isotropic, pattern::Directional, pattern::Monopole, pattern::Cosine>;

inline void validate_pattern(const AntennaPattern &p) {
  if (const auto *d = std::get_if<pattern::Directional>(&p); d && !(d->gain_linear >= 2.0))
    throw std::invalid_argument("directional pattern requires linear gain >= 2");
  if (const auto *m = std::get_if<pattern::Monopole>(&p);
      m && !(m->height_wavelengths > 0.0 && m->height_wavelengths <= 0.5))
    throw std::invalid_argument("monopole height must lie in (0, 0.5] wavelengths");
}

/// cos(theta) at or below this counts as the theta = pi/2 null, so that
/// acos round-off does not leave a 1e-17 residue at grazing angles.
inline constexpr double pattern_null_cos = 1e-12;

/// Normalized pattern value in [0, 1] at elevation theta (rad).
inline double eval_pattern(const AntennaPattern &p, double theta) {
  struct Visitor {
    double theta;
    double operator()(const pattern::Isotropic &) const { return 1.0; }
    double operator()(const pattern::Directional &d) const {
      const double c = std::cos(theta);
      if (c <= pattern_null_cos)
        return 0.0;
      return std::pow(c, d.gain_linear / 2.0 - 1.0);
    }
    double operator()(const pattern::Monopole &m) const {
      const double s = std::sin(theta);
      if (s < 1e-12)
        return 0.0;
      const double kh = 2.0 * pi * m.height_wavelengths;
      const double a = (std::cos(kh * std::cos(theta)) - std::cos(kh)) / s;
      const double peak = 1.0 - std::cos(kh);
      return std::min(1.0, (a * a) / (peak * peak));
    }
    double operator()(const pattern::Cosine &) const {
      const double c = std::cos(theta);
      return c <= pattern_null_cos ? 0.0 : c;
    }
  };
  return std::visit(Visitor{theta}, p);
}

struct Antenna {
  Frame frame;                 // z axis = boresight (or monopole axis)
  AntennaPattern pattern = pattern::Isotropic{};
  double gain_linear = 1.0;
  double power_w = 0.0;        // transmit power; unused for receivers
  Vec3 polarization{0, 0, 1};  // in the antenna frame

  Vec3 world_polarization() const { return frame.to_world_direction(polarization); }

  /// Pattern value for a direction pointing away from the antenna.
  double pattern_towards(const Vec3 &direction) const {
    return eval_pattern(pattern, angles_in_frame(frame, direction).theta);
  }

  void validate(bool transmitter) const {
    if (!(gain_linear > 0.0))
      throw std::invalid_argument("antenna gain must be positive");
    if (transmitter && !(power_w > 0.0))
      throw std::invalid_argument("transmit power must be positive");
    if (!is_unit(polarization))
      throw std::invalid_argument("antenna polarization must be a unit vector");
    validate_pattern(pattern);
  }

  friend bool operator==(const Antenna &, const Antenna &) = default;
};

/// Field launched towards `direction`, before any distance factor:
/// |E| = sqrt(2 eta0 P_t G_t F_t), phase 0. Vector mode polarizes it
/// transverse to the ray. Scalar mode keeps every ray on the same fixed
/// axis so that superposition reduces to adding complex amplitudes.
inline FieldPhasor tx_launch_field(const Antenna &tx, const Vec3 &direction,
                                   PolarizationMode mode = PolarizationMode::vector) {
  const double f = tx.pattern_towards(direction);
  const double mag = std::sqrt(2.0 * free_space_impedance * tx.power_w * tx.gain_linear * f);
  if (mode == PolarizationMode::scalar)
    return FieldPhasor::along(tx.world_polarization(), mag);
  const Vec3 pol = transverse_polarization(tx.world_polarization(), direction);
  return FieldPhasor::along(pol, mag);
}

/// lambda^2 G / (4 pi)
inline double effective_aperture(double gain_linear, double wavelength) {
  return wavelength * wavelength * gain_linear / (4.0 * pi);
}

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double dbm_to_watt(double dbm) { return 1e-3 * db_to_linear(dbm); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

} // namespace ristrace
