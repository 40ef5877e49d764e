// SPDX-License-Identifier: Apache-2.0
//
// Per-hop field evolution: TX -> RIS element -> (walls) -> RX, coherent
// superposition and received power. Fresnel reflection on lossy planes.

#pragma once

#include <cmath>
#include <complex>
#include <span>
#include <stdexcept>
#include <utility>

#include "ristrace/antennas.hpp"
#include "ristrace/field.hpp"
#include "ristrace/geometry.hpp"
#include "ristrace/ris.hpp"

namespace ristrace {

struct Material {
  double eps_r = 1.0;
  double sigma = 0.0; // S/m

  void validate() const {
    if (!(eps_r >= 1.0))
      throw std::invalid_argument("material invariant violated: eps_r >= 1");
    if (!(sigma >= 0.0))
      throw std::invalid_argument("material invariant violated: sigma >= 0");
  }

  friend bool operator==(const Material &, const Material &) = default;
};

/// eps_r - j sigma / (2 pi f eps0)
inline cplx complex_permittivity(const Material &mat, double frequency) {
  if (!(frequency > 0.0))
    throw std::invalid_argument("frequency must be positive");
  return {mat.eps_r, -mat.sigma / (2.0 * pi * frequency * vacuum_permittivity)};
}

/// Field arriving at an element: sqrt(F A / (4 pi d^2)) exp(-j2 pi d/lambda) E_t.
/// `theta_in` is measured in the element frame towards the source.
inline FieldPhasor impinging_field(const FieldPhasor &e_t, double d_t, double theta_in, double area,
                                   const AntennaPattern &element_pattern, double wavelength) {
  if (!(d_t > 0.0))
    throw std::domain_error("degenerate geometry: transmitter coincides with RIS element");
  const double f = eval_pattern(element_pattern, theta_in);
  const double amp = std::sqrt(f * area / (4.0 * pi * d_t * d_t));
  return e_t * (amp * propagation_phase(d_t, wavelength));
}

/// Everything an element needs to know about one ray through it.
struct ElementHop {
  Vec3 incoming; // propagation direction TX -> element
  Vec3 outgoing; // propagation direction element -> next point
  double d_t = 0.0;
};

/// Fused element model:
/// sqrt(G F_in F_out d_y d_z / (4 pi)) (Gamma / d_t) exp(-j2 pi d_t/lambda) E_t.
inline FieldPhasor combined_element_field(const FieldPhasor &e_t, const RisPanel &panel, const RisElement &element,
                                          const ElementHop &hop, double wavelength, PolarizationMode mode) {
  if (!(hop.d_t > 0.0))
    throw std::domain_error("degenerate geometry: transmitter coincides with RIS element");
  if (element.gamma == cplx(0.0, 0.0))
    return {};
  const double f_in = eval_pattern(panel.element_pattern(), angles_in_frame(element.frame, -hop.incoming).theta);
  const double f_out = eval_pattern(panel.element_pattern(), angles_in_frame(element.frame, hop.outgoing).theta);
  const double f_ris = f_in * f_out;
  if (f_ris == 0.0)
    return {};
  const cplx scale = std::sqrt(panel.element_gain() * f_ris * element.d_y * element.d_z / (4.0 * pi)) *
                     (element.gamma / hop.d_t) * propagation_phase(hop.d_t, wavelength);
  if (mode == PolarizationMode::scalar)
    return e_t * scale;
  const Vec3 pol_in = transverse_polarization(panel.polarization_axis(), hop.incoming);
  const Vec3 pol_out = transverse_polarization(panel.polarization_axis(), hop.outgoing);
  return FieldPhasor::along(pol_out, scale * e_t.project(pol_in));
}

/// The same quantity built from impinging_field followed by element_reemit.
inline FieldPhasor composed_element_field(const FieldPhasor &e_t, const RisPanel &panel, const RisElement &element,
                                          const ElementHop &hop, double wavelength, PolarizationMode mode) {
  const double theta_in = angles_in_frame(element.frame, -hop.incoming).theta;
  const FieldPhasor e_in =
      impinging_field(e_t, hop.d_t, theta_in, element.area(), panel.element_pattern(), wavelength);
  return element_reemit(e_in, element, hop.incoming, hop.outgoing, panel.element_gain(), panel.element_pattern(),
                        panel.polarization_axis(), mode);
}

/// Field at the receiver:
/// sqrt(G_r F_r) (lambda / (4 pi d_r)) exp(-j2 pi d_r/lambda) E.
/// `arrival` is the propagation direction of the last hop. Vector mode keeps
/// only the component along the receive polarization.
inline FieldPhasor field_at_rx(const FieldPhasor &e, double d_r, const Antenna &rx, const Vec3 &arrival,
                               double wavelength, PolarizationMode mode) {
  if (!(d_r > 0.0))
    throw std::domain_error("degenerate geometry: receiver coincides with the last interaction point");
  const double f_r = rx.pattern_towards(-arrival);
  if (f_r == 0.0)
    return {};
  const cplx scale =
      std::sqrt(rx.gain_linear * f_r) * (wavelength / (4.0 * pi * d_r)) * propagation_phase(d_r, wavelength);
  if (mode == PolarizationMode::scalar)
    return e * scale;
  const Vec3 pol = transverse_polarization(rx.world_polarization(), arrival);
  return FieldPhasor::along(pol, scale * e.project(pol));
}

/// Sum in the given order. Callers supply components already sorted by
/// their path key so the result does not depend on how they were produced.
inline FieldPhasor superpose(std::span<const FieldPhasor> components) {
  FieldPhasor total;
  for (const auto &c : components)
    total += c;
  return total;
}

inline constexpr double power_floor_dbm = -400.0;

struct ReceivedPower {
  double watts = 0.0;
  double dbm = power_floor_dbm;
};

/// |E|^2 / (2 eta0)
inline ReceivedPower received_power(const FieldPhasor &e_r) {
  ReceivedPower p;
  p.watts = e_r.norm_squared() / (2.0 * free_space_impedance);
  if (p.watts > 0.0)
    p.dbm = std::max(power_floor_dbm, 10.0 * std::log10(p.watts / 1e-3));
  return p;
}

struct FresnelCoefficients {
  cplx r_s;
  cplx r_p;
};

/// Reflection coefficients from vacuum onto a half space with relative
/// permittivity `eps_c`, for incidence angle with cosine `cos_i`.
/// r_p is referenced to p = s x k on both sides.
inline FresnelCoefficients fresnel_coefficients(double cos_i, cplx eps_c) {
  const double sin2 = std::max(0.0, 1.0 - cos_i * cos_i);
  const cplx root = std::sqrt(eps_c - sin2);
  return {(cos_i - root) / (cos_i + root), (eps_c * cos_i - root) / (eps_c * cos_i + root)};
}

struct Reflection {
  FieldPhasor field;
  Vec3 direction;
};

/// Specular reflection of a ray off `surface`. The s axis is
/// normalize(incident x n); at normal incidence the surface x axis is used.
/// Scalar mode applies r_s to the whole phasor.
inline Reflection fresnel_reflect(const FieldPhasor &e_in, const Vec3 &incident, const Rect &surface,
                                  const Material &mat, double frequency, PolarizationMode mode) {
  const Vec3 &n = surface.normal();
  const double dn = dot(incident, n);
  if (std::abs(dn) < 1e-9)
    throw std::domain_error("grazing incidence on reflecting surface");
  if (dn > 0.0)
    throw std::domain_error("ray hits the back side of a reflecting surface");
  const Vec3 out = reflect_direction(incident, n);
  const auto [r_s, r_p] = fresnel_coefficients(-dn, complex_permittivity(mat, frequency));
  if (mode == PolarizationMode::scalar)
    return {e_in * r_s, out};

  const Vec3 c = cross(incident, n);
  const Vec3 s = norm(c) < 1e-12 ? surface.frame().x_axis() : normalized(c);
  const Vec3 p_in = cross(s, incident);
  const Vec3 p_out = cross(s, out);
  FieldPhasor e_out = FieldPhasor::along(s, r_s * e_in.project(s));
  e_out += FieldPhasor::along(p_out, r_p * e_in.project(p_in));
  return {e_out, out};
}

} // namespace ristrace
