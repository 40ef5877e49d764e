// SPDX-License-Identifier: Apache-2.0
//
// Complex field phasors and the radio constants shared by every hop.

#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "ristrace/geometry.hpp"

namespace ristrace {

using cplx = std::complex<double>;

inline constexpr double speed_of_light = 299792458.0;      // m/s
inline constexpr double vacuum_permittivity = 8.8541878128e-12; // F/m
inline constexpr double free_space_impedance = 120.0 * pi; // Ohm

/// How polarization is tracked along a path.
///  - scalar: the phasor keeps the launch polarization; every interaction
///    multiplies it by a complex scalar (walls use r_s).
///  - vector: full transverse projections at RIS, walls and receiver.
enum class PolarizationMode { scalar, vector };

struct RadioParams {
  double frequency = 23.8e9; // Hz

  double wavelength() const { return speed_of_light / frequency; }
  double wavenumber() const { return 2.0 * pi / wavelength(); }

  static RadioParams at(double frequency_hz) {
    if (!(frequency_hz > 0.0))
      throw std::invalid_argument("frequency must be positive");
    return RadioParams{frequency_hz};
  }

  friend bool operator==(const RadioParams &, const RadioParams &) = default;
};

/// exp(-j 2 pi d / lambda)
inline cplx propagation_phase(double d, double wavelength) { return std::polar(1.0, -2.0 * pi * d / wavelength); }

/// Complex 3-vector in world coordinates.
///
/// Units depend on the hop: volts at launch, V/m after a spreading factor,
/// and a received-voltage equivalent once the receive aperture is folded in.
class FieldPhasor {
public:
  FieldPhasor() = default;
  FieldPhasor(cplx x, cplx y, cplx z) : v_{x, y, z} {}

  /// amplitude * unit polarization
  static FieldPhasor along(const Vec3 &polarization, cplx amplitude) {
    return {amplitude * polarization.x, amplitude * polarization.y, amplitude * polarization.z};
  }

  const cplx &operator[](std::size_t i) const { return v_[i]; }
  cplx &operator[](std::size_t i) { return v_[i]; }

  FieldPhasor &operator+=(const FieldPhasor &o) {
    for (std::size_t i = 0; i < 3; ++i)
      v_[i] += o.v_[i];
    return *this;
  }
  FieldPhasor &operator*=(cplx s) {
    for (auto &c : v_)
      c *= s;
    return *this;
  }
  friend FieldPhasor operator+(FieldPhasor a, const FieldPhasor &b) { return a += b; }
  friend FieldPhasor operator*(FieldPhasor a, cplx s) { return a *= s; }
  friend FieldPhasor operator*(cplx s, FieldPhasor a) { return a *= s; }
  friend FieldPhasor operator-(const FieldPhasor &a) { return a * cplx(-1.0); }

  double norm_squared() const { return std::norm(v_[0]) + std::norm(v_[1]) + std::norm(v_[2]); }
  double magnitude() const { return std::sqrt(norm_squared()); }
  bool is_zero() const { return norm_squared() == 0.0; }

  /// sum_i v_i * axis_i
  cplx project(const Vec3 &axis) const { return v_[0] * axis.x + v_[1] * axis.y + v_[2] * axis.z; }

  /// Magnitude of the component along a real direction.
  double transverse_error(const Vec3 &direction) const { return std::abs(project(direction)); }

  friend bool operator==(const FieldPhasor &, const FieldPhasor &) = default;

private:
  std::array<cplx, 3> v_{};
};

/// Unit polarization transverse to `direction`, derived from a reference
/// axis. Throws when the axis is (anti)parallel to the direction.
inline Vec3 transverse_polarization(const Vec3 &axis, const Vec3 &direction) {
  const Vec3 t = axis - dot(axis, direction) * direction;
  const double n = norm(t);
  if (n < 1e-9)
    throw std::domain_error("polarization axis is parallel to the propagation direction");
  return t / n;
}

} // namespace ristrace
