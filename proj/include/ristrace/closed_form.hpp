// SPDX-License-Identifier: Apache-2.0
//
// Closed-form received power for a RIS scene without walls, scalar fields.
// Written as one expression per element so it can be compared against the
// modular pipeline.

#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>

#include "ristrace/antennas.hpp"
#include "ristrace/field.hpp"
#include "ristrace/geometry.hpp"
#include "ristrace/scene.hpp"

namespace ristrace {

/// P_r [W] = |sum_m sqrt(2 eta0 P_t G_t F_t) * sqrt(G F_in F_out d_y d_z / 4pi)
///   * Gamma_m / d_t * sqrt(G_r F_r) * lambda / (4 pi d_r)
///   * exp(-jk (d_t + d_r))|^2 / (2 eta0).
/// Elements the TX sees from behind or that face away from `rx` drop out.
inline double closed_form_power_w(const Scene &scene, const Vec3 &rx) {
  if (!scene.ris)
    throw std::invalid_argument("closed form needs a RIS");
  if (!scene.surfaces.empty())
    throw std::invalid_argument("closed form covers scenes without surfaces only");
  const double lambda = scene.wavelength();
  const double k = 2.0 * pi / lambda;
  const RisPanel &ris = *scene.ris;
  const Antenna rx_ant = scene.rx_at(rx);
  const Vec3 tx = scene.tx.frame.origin();
  const double eta = free_space_impedance;

  cplx sum{0.0, 0.0};
  for (const auto &e : ris.elements()) {
    const Vec3 c = e.center();
    const double d_t = distance(tx, c);
    const double d_r = distance(c, rx);
    if (dot(tx - c, e.normal()) <= 0.0 || dot(rx - c, e.normal()) <= 0.0 || d_r <= 0.0)
      continue;
    const double f_t = scene.tx.pattern_towards((c - tx) / d_t);
    const double f_in = eval_pattern(ris.element_pattern(), angles_in_frame(e.frame, (tx - c) / d_t).theta);
    const double f_out = eval_pattern(ris.element_pattern(), angles_in_frame(e.frame, (rx - c) / d_r).theta);
    const double f_r = rx_ant.pattern_towards((c - rx) / d_r);
    sum += std::sqrt(2.0 * eta * scene.tx.power_w * scene.tx.gain_linear * f_t) *
           std::sqrt(ris.element_gain() * f_in * f_out * e.d_y * e.d_z / (4.0 * pi)) * e.gamma / d_t *
           std::sqrt(rx_ant.gain_linear * f_r) * lambda / (4.0 * pi * d_r) * std::polar(1.0, -k * (d_t + d_r));
  }
  return std::norm(sum) / (2.0 * eta);
}

} // namespace ristrace
