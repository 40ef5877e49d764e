// SPDX-License-Identifier: Apache-2.0
//
// Reconfigurable intelligent surface: hexagonal element lattice, per-element
// reemission and the 1-bit configuration optimizer.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ristrace/antennas.hpp"
#include "ristrace/field.hpp"
#include "ristrace/geometry.hpp"

namespace ristrace {

struct RisElement {
  std::size_t index = 0;
  Frame frame;        // origin = element center, z = element normal
  double d_y = 0.0;   // effective size [m]
  double d_z = 0.0;
  cplx gamma{0.0, 0.0};

  const Vec3 &center() const { return frame.origin(); }
  const Vec3 &normal() const { return frame.z_axis(); }
  double area() const { return d_y * d_z; }

  friend bool operator==(const RisElement &, const RisElement &) = default;
};

/// 4 pi d_y d_z / lambda^2
inline double default_element_gain(double d_y, double d_z, double wavelength) {
  if (!(d_y > 0.0 && d_z > 0.0 && wavelength > 0.0))
    throw std::invalid_argument("element size and wavelength must be positive");
  return 4.0 * pi * d_y * d_z / (wavelength * wavelength);
}

/// Geometry of a centered hexagonal panel.
struct HexLayout {
  int rings = 6;
  double pitch = 9.45e-3;        // nearest-neighbour spacing [m]
  double element_size_y = 6.6e-3;
  double element_size_z = 6.6e-3;
  double rotation = 0.0;         // lattice rotation about the normal [rad]
  double footprint_width = 0.12; // opaque panel extent [m]
  double footprint_height = 0.12;

  std::size_t element_count() const { return 1 + 3 * static_cast<std::size_t>(rings) * (rings + 1); }

  friend bool operator==(const HexLayout &, const HexLayout &) = default;
};

class RisPanel {
public:
  RisPanel() = default;

  const Frame &frame() const { return frame_; }
  const Vec3 &center() const { return frame_.origin(); }
  const Vec3 &normal() const { return frame_.z_axis(); }
  const std::vector<RisElement> &elements() const { return elements_; }
  std::size_t size() const { return elements_.size(); }
  double element_gain() const { return element_gain_; }
  const AntennaPattern &element_pattern() const { return element_pattern_; }
  const std::vector<cplx> &alphabet() const { return alphabet_; }
  const HexLayout &layout() const { return layout_; }
  /// World-frame reference axis for element polarization (panel y).
  const Vec3 &polarization_axis() const { return frame_.y_axis(); }

  /// Opaque panel outline.
  Rect footprint() const { return Rect(frame_, 0.5 * layout_.footprint_width, 0.5 * layout_.footprint_height); }

  std::vector<cplx> config() const {
    std::vector<cplx> g;
    g.reserve(elements_.size());
    for (const auto &e : elements_)
      g.push_back(e.gamma);
    return g;
  }

  /// Copy with new reflection coefficients. Values are snapped to the
  /// matching alphabet entry (tolerance 1e-9).
  RisPanel with_config(std::span<const cplx> gammas) const {
    if (gammas.size() != elements_.size())
      throw std::invalid_argument("RIS configuration has " + std::to_string(gammas.size()) +
                                  " entries, panel has " + std::to_string(elements_.size()) + " elements");
    RisPanel out = *this;
    for (std::size_t m = 0; m < gammas.size(); ++m)
      out.elements_[m].gamma = alphabet_[alphabet_index(gammas[m], m)];
    return out;
  }

  RisPanel with_alphabet_indices(std::span<const std::size_t> choice) const {
    std::vector<cplx> g;
    g.reserve(choice.size());
    for (auto i : choice)
      g.push_back(alphabet_.at(i));
    return with_config(g);
  }

  std::size_t alphabet_index(cplx value, std::size_t element = 0) const {
    for (std::size_t i = 0; i < alphabet_.size(); ++i)
      if (std::abs(alphabet_[i] - value) <= 1e-9)
        return i;
    std::ostringstream os;
    os << "reflection coefficient " << value << " of element " << element << " is not in the alphabet";
    throw std::invalid_argument(os.str());
  }

  friend bool operator==(const RisPanel &, const RisPanel &) = default;

  friend RisPanel build_hex_panel(const Frame &, const HexLayout &, double, std::vector<cplx>);

private:
  Frame frame_;
  HexLayout layout_;
  std::vector<RisElement> elements_;
  double element_gain_ = 1.0;
  AntennaPattern element_pattern_ = pattern::Cosine{};
  std::vector<cplx> alphabet_;
};

/// Index of the largest-magnitude entry; lowest index on ties.
inline std::size_t strongest_entry(std::span<const cplx> alphabet) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < alphabet.size(); ++i)
    if (std::abs(alphabet[i]) > std::abs(alphabet[best]))
      best = i;
  return best;
}

/// Centered hexagonal lattice in the panel plane. Element 0 sits at the
/// center; the rest follow ring by ring, counter-clockwise from the panel
/// x axis. Every element starts at the strongest alphabet entry.
inline RisPanel build_hex_panel(const Frame &frame, const HexLayout &layout, double element_gain,
                                std::vector<cplx> alphabet) {
  if (layout.rings < 0)
    throw std::invalid_argument("ring count must be non-negative");
  if (!(layout.pitch > 0.0))
    throw std::invalid_argument("element pitch must be positive");
  if (!(layout.element_size_y > 0.0 && layout.element_size_z > 0.0))
    throw std::invalid_argument("element size must be positive");
  if (!(element_gain > 0.0))
    throw std::invalid_argument("element gain must be positive");
  if (alphabet.empty())
    throw std::invalid_argument("reflection alphabet must not be empty");

  struct Site {
    int ring;
    double angle;
    double u;
    double v;
  };
  std::vector<Site> sites;
  const int R = layout.rings;
  const double s3 = std::sqrt(3.0);
  for (int q = -R; q <= R; ++q)
    for (int r = -R; r <= R; ++r) {
      const int s = -q - r;
      const int ring = std::max({std::abs(q), std::abs(r), std::abs(s)});
      if (ring > R)
        continue;
      const double u = q + 0.5 * r;
      const double v = 0.5 * s3 * r;
      double a = std::atan2(v, u);
      if (a < 0.0)
        a += 2.0 * pi;
      sites.push_back({ring, ring == 0 ? 0.0 : a, u, v});
    }
  std::sort(sites.begin(), sites.end(),
            [](const Site &a, const Site &b) { return a.ring != b.ring ? a.ring < b.ring : a.angle < b.angle; });

  RisPanel panel;
  panel.frame_ = frame;
  panel.layout_ = layout;
  panel.element_gain_ = element_gain;
  panel.alphabet_ = std::move(alphabet);
  const cplx initial = panel.alphabet_[strongest_entry(panel.alphabet_)];
  const double c = std::cos(layout.rotation), sn = std::sin(layout.rotation);
  panel.elements_.reserve(sites.size());
  for (std::size_t m = 0; m < sites.size(); ++m) {
    const double u = layout.pitch * (c * sites[m].u - sn * sites[m].v);
    const double v = layout.pitch * (sn * sites[m].u + c * sites[m].v);
    const Vec3 center = frame.origin() + u * frame.x_axis() + v * frame.y_axis();
    panel.elements_.push_back(
        RisElement{m, frame.translated_to(center), layout.element_size_y, layout.element_size_z, initial});
  }
  return panel;
}

/// Reemitted field sqrt(G F_out) Gamma E_in.
///
/// `incoming` and `outgoing` are propagation directions (towards and away
/// from the element). In vector mode the element receives the component of
/// E_in along its polarization axis and reradiates along the same axis made
/// transverse to `outgoing`.
inline FieldPhasor element_reemit(const FieldPhasor &e_in, const RisElement &element, const Vec3 &incoming,
                                  const Vec3 &outgoing, double element_gain, const AntennaPattern &element_pattern,
                                  const Vec3 &polarization_axis, PolarizationMode mode) {
  if (element.gamma == cplx(0.0, 0.0))
    return {};
  const double f_out = eval_pattern(element_pattern, angles_in_frame(element.frame, outgoing).theta);
  if (f_out == 0.0)
    return {};
  const cplx scale = std::sqrt(element_gain * f_out) * element.gamma;
  if (mode == PolarizationMode::scalar)
    return e_in * scale;
  const Vec3 pol_in = transverse_polarization(polarization_axis, incoming);
  const Vec3 pol_out = transverse_polarization(polarization_axis, outgoing);
  return FieldPhasor::along(pol_out, scale * e_in.project(pol_in));
}

/// Result of the coordinate-ascent optimizer.
struct GreedyResult {
  std::vector<std::size_t> choice;   // alphabet index per element
  std::vector<double> objective;     // |sum Gamma_m c_m| before sweep 1 and after every sweep
  int sweeps = 0;
};

/// Coordinate ascent over a discrete alphabet maximizing |sum_m Gamma_m c_m|.
///
/// Starts with every element on the strongest entry and sweeps elements in
/// index order. An element changes only when the best entry strictly beats
/// its current value; ties among candidates go to the lower alphabet index.
/// Stops after a sweep with no change.
inline GreedyResult configure_greedy(std::span<const cplx> alphabet, std::span<const FieldPhasor> contributions) {
  if (alphabet.empty())
    throw std::invalid_argument("reflection alphabet must not be empty");
  const std::size_t M = contributions.size();
  GreedyResult res;
  res.choice.assign(M, strongest_entry(alphabet));

  FieldPhasor total;
  for (std::size_t m = 0; m < M; ++m)
    total += alphabet[res.choice[m]] * contributions[m];
  auto objective_of = [](const FieldPhasor &f) { return f.magnitude(); };
  res.objective.push_back(objective_of(total));

  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t m = 0; m < M; ++m) {
      const FieldPhasor others = total + (-alphabet[res.choice[m]]) * contributions[m];
      const double current = objective_of(total);
      std::size_t best = res.choice[m];
      double best_value = current;
      for (std::size_t i = 0; i < alphabet.size(); ++i) {
        const double v = objective_of(others + alphabet[i] * contributions[m]);
        const double tol = 1e-12 * std::max(best_value, 1e-300);
        if (v > best_value + tol) {
          best = i;
          best_value = v;
        }
      }
      if (best != res.choice[m]) {
        res.choice[m] = best;
        // recompute from scratch to keep the objective free of drift
        total = FieldPhasor{};
        for (std::size_t k = 0; k < M; ++k)
          total += alphabet[res.choice[k]] * contributions[k];
        changed = true;
      }
    }
    ++res.sweeps;
    res.objective.push_back(objective_of(total));
  }
  return res;
}

// RIS configuration file: one line per element, "index magnitude phase_deg".
// Lines starting with '#' are comments.

inline void write_ris_config(std::ostream &os, std::span<const cplx> gammas) {
  os << "# ristrace ris-config v1\n# index magnitude phase_deg\n";
  os << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (std::size_t m = 0; m < gammas.size(); ++m)
    os << m << ' ' << std::abs(gammas[m]) << ' ' << rad_to_deg(std::arg(gammas[m])) << '\n';
}

inline std::vector<cplx> read_ris_config(std::istream &is) {
  std::vector<cplx> gammas;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#')
      continue;
    std::istringstream ls(line);
    std::size_t index = 0;
    double mag = 0.0, phase = 0.0;
    std::string extra;
    if (!(ls >> index >> mag >> phase) || (ls >> extra))
      throw std::runtime_error("RIS config line " + std::to_string(line_no) + ": expected 'index magnitude phase_deg'");
    if (index != gammas.size())
      throw std::runtime_error("RIS config line " + std::to_string(line_no) + ": expected index " +
                               std::to_string(gammas.size()));
    if (mag < 0.0)
      throw std::runtime_error("RIS config line " + std::to_string(line_no) + ": negative magnitude");
    gammas.push_back(std::polar(mag, deg_to_rad(phase)));
  }
  return gammas;
}

inline void save_ris_config(const std::string &path, std::span<const cplx> gammas) {
  std::ofstream os(path);
  if (!os)
    throw std::runtime_error("cannot open '" + path + "' for writing");
  write_ris_config(os, gammas);
  if (!os)
    throw std::runtime_error("failed writing '" + path + "'");
}

inline std::vector<cplx> load_ris_config(const std::string &path) {
  std::ifstream is(path);
  if (!is)
    throw std::runtime_error("cannot open RIS config '" + path + "'");
  return read_ris_config(is);
}

} // namespace ristrace
