// SPDX-License-Identifier: Apache-2.0
//
// Scene model. A Scene is always built from a SceneConfig, the external
// representation with the units used in configuration files (GHz, dBm, dB,
// degrees, millimeters for RIS geometry, meters elsewhere). The built-in
// presets go through the same path as parsed files.

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ristrace/antennas.hpp"
#include "ristrace/field.hpp"
#include "ristrace/geometry.hpp"
#include "ristrace/grid.hpp"
#include "ristrace/propagation.hpp"
#include "ristrace/ris.hpp"

namespace ristrace {

/// Invalid or inconsistent scene configuration.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct SolverSettings {
  int max_order = 0;          // specular bounces between RIS and RX
  bool center_prune = true;
  PolarizationMode mode = PolarizationMode::scalar;
  bool line_of_sight = false; // include the direct TX -> RX path

  friend bool operator==(const SolverSettings &, const SolverSettings &) = default;
};

/// Cartesian world position, or spherical coordinates about the RIS center
/// with world-aligned axes (phi from +x, theta from +z).
struct PlacementConfig {
  bool spherical = false;
  Vec3 cartesian_m;
  double r_m = 0.0;
  double phi_deg = 0.0;
  double theta_deg = 0.0;

  static PlacementConfig at(const Vec3 &p) { return {false, p, 0.0, 0.0, 0.0}; }
  static PlacementConfig about_ris(double r_m, double phi_deg, double theta_deg) {
    return {true, {}, r_m, phi_deg, theta_deg};
  }

  friend bool operator==(const PlacementConfig &, const PlacementConfig &) = default;
};

struct PatternConfig {
  std::string type = "isotropic"; // isotropic | directional | monopole | cosine
  double height_wavelengths = 0.25;

  friend bool operator==(const PatternConfig &, const PatternConfig &) = default;
};

struct SurfaceConfig {
  std::string name;
  Vec3 center_m;
  Vec3 normal;
  Vec3 up{0, 0, 1};
  double width_m = 1.0;  // along up x normal
  double height_m = 1.0; // along up
  std::string material;
  bool reflective = false;
  bool blocking = true;

  friend bool operator==(const SurfaceConfig &, const SurfaceConfig &) = default;
};

struct RisConfig {
  Vec3 center_m;
  Vec3 normal{1, 0, 0};
  Vec3 up{0, 0, 1};
  int rings = 6;
  double pitch_mm = 9.45;
  double element_size_y_mm = 6.6;
  double element_size_z_mm = 6.6;
  double lattice_rotation_deg = 0.0;
  double footprint_width_mm = 120.0;
  double footprint_height_mm = 120.0;
  std::optional<double> element_gain;                  // linear; nullopt: 4 pi d_y d_z / lambda^2
  std::vector<std::pair<double, double>> alphabet;     // (magnitude, phase_deg)
  std::optional<std::string> config_file;

  friend bool operator==(const RisConfig &, const RisConfig &) = default;
};

struct TxConfig {
  PlacementConfig position;
  std::optional<Vec3> look_at; // nullopt: RIS center
  Vec3 up{0, 0, 1};
  double power_dbm = 0.0;
  double gain_db = 0.0;
  PatternConfig pattern;
  Vec3 polarization{0, 1, 0}; // antenna frame; y is the projected `up`

  friend bool operator==(const TxConfig &, const TxConfig &) = default;
};

struct RxConfig {
  PlacementConfig target;
  double gain_db = 0.0;
  PatternConfig pattern;
  Vec3 axis{0, 0, 1};
  Vec3 up{0, 1, 0};
  Vec3 polarization{0, 0, 1}; // antenna frame

  friend bool operator==(const RxConfig &, const RxConfig &) = default;
};

struct SceneConfig {
  std::string name;
  double frequency_ghz = 23.8;
  std::map<std::string, Material> materials;
  std::vector<SurfaceConfig> surfaces;
  std::optional<RisConfig> ris;
  TxConfig tx;
  RxConfig rx;
  std::optional<GridSpec> grid;
  SolverSettings solver;

  friend bool operator==(const SceneConfig &, const SceneConfig &) = default;
};

struct Surface {
  std::string name;
  Rect rect;
  Material material;
  bool reflective = false;
  bool blocking = true;

  friend bool operator==(const Surface &, const Surface &) = default;
};

struct Scene {
  SceneConfig config;
  RadioParams radio;
  std::vector<Surface> surfaces;
  std::optional<RisPanel> ris;
  Antenna tx;
  Antenna rx;  // template; moved to each receive point with rx_at
  Vec3 target; // intended receiver for RIS optimization
  std::optional<GridSpec> grid;
  SolverSettings solver;

  const std::string &name() const { return config.name; }
  double wavelength() const { return radio.wavelength(); }

  Antenna rx_at(const Vec3 &position) const {
    Antenna a = rx;
    a.frame = rx.frame.translated_to(position);
    return a;
  }

  std::vector<SurfaceId> reflective_ids() const {
    std::vector<SurfaceId> ids;
    for (SurfaceId i = 0; i < surfaces.size(); ++i)
      if (surfaces[i].reflective)
        ids.push_back(i);
    return ids;
  }

  friend bool operator==(const Scene &, const Scene &) = default;
};

namespace detail {

template <class F> auto guarded(const std::string &where, F &&f) -> decltype(f()) {
  try {
    return f();
  } catch (const ConfigError &) {
    throw;
  } catch (const std::exception &e) {
    throw ConfigError(where + ": " + e.what());
  }
}

inline AntennaPattern make_pattern(const PatternConfig &p, double gain_linear, const std::string &where) {
  AntennaPattern out;
  if (p.type == "isotropic")
    out = pattern::Isotropic{};
  else if (p.type == "directional")
    out = pattern::Directional{gain_linear};
  else if (p.type == "cosine")
    out = pattern::Cosine{};
  else if (p.type == "monopole")
    out = pattern::Monopole{p.height_wavelengths};
  else
    throw ConfigError(where + ".type: unknown pattern '" + p.type + "'");
  guarded(where, [&] { validate_pattern(out); });
  return out;
}

} // namespace detail

/// Transmit antenna frame: boresight towards `look_at`, y axis from `up`.
inline Frame aim_frame(const Vec3 &position, const Vec3 &look_at, const Vec3 &up) {
  return Frame::from_z_up(position, look_at - position, up);
}

/// Validate a configuration and turn it into a scene. A relative
/// `ris.config_file` is resolved against `base_dir`.
inline Scene build_scene(const SceneConfig &cfg, const std::filesystem::path &base_dir = {}) {
  using detail::guarded;
  Scene s;
  s.config = cfg;
  s.radio = guarded("radio.frequency_ghz", [&] { return RadioParams::at(cfg.frequency_ghz * 1e9); });
  const double lambda = s.radio.wavelength();

  for (const auto &[name, mat] : cfg.materials)
    guarded("materials." + name, [&] { mat.validate(); });

  for (std::size_t i = 0; i < cfg.surfaces.size(); ++i) {
    const SurfaceConfig &sc = cfg.surfaces[i];
    const std::string where = "surfaces[" + std::to_string(i) + "]";
    const auto mit = cfg.materials.find(sc.material);
    if (mit == cfg.materials.end())
      throw ConfigError(where + ".material: unknown material '" + sc.material + "'");
    Surface surf;
    surf.name = sc.name;
    surf.rect = guarded(where, [&] { return Rect::from_center(sc.center_m, sc.normal, sc.up, sc.width_m, sc.height_m); });
    surf.material = mit->second;
    surf.reflective = sc.reflective;
    surf.blocking = sc.blocking;
    s.surfaces.push_back(std::move(surf));
  }

  if (cfg.ris) {
    const RisConfig &rc = *cfg.ris;
    HexLayout layout;
    layout.rings = rc.rings;
    layout.pitch = rc.pitch_mm * 1e-3;
    layout.element_size_y = rc.element_size_y_mm * 1e-3;
    layout.element_size_z = rc.element_size_z_mm * 1e-3;
    layout.rotation = deg_to_rad(rc.lattice_rotation_deg);
    layout.footprint_width = rc.footprint_width_mm * 1e-3;
    layout.footprint_height = rc.footprint_height_mm * 1e-3;
    const double gain = rc.element_gain ? *rc.element_gain : guarded("ris.element_size_mm", [&] {
      return default_element_gain(layout.element_size_y, layout.element_size_z, lambda);
    });
    std::vector<cplx> alphabet;
    for (const auto &[mag, phase] : rc.alphabet) {
      if (mag < 0.0)
        throw ConfigError("ris.alphabet: magnitudes must be non-negative");
      alphabet.push_back(std::polar(mag, deg_to_rad(phase)));
    }
    const Frame frame = guarded("ris", [&] { return Frame::from_z_up(rc.center_m, rc.normal, rc.up); });
    s.ris = guarded("ris", [&] {
      if (!(layout.footprint_width > 0.0 && layout.footprint_height > 0.0))
        throw std::invalid_argument("footprint must be positive");
      return build_hex_panel(frame, layout, gain, alphabet);
    });
    if (rc.config_file) {
      std::filesystem::path p = *rc.config_file;
      if (p.is_relative())
        p = base_dir / p;
      s.ris = guarded("ris.config_file", [&] { return s.ris->with_config(load_ris_config(p.string())); });
    }
  }

  auto resolve = [&](const PlacementConfig &p, const std::string &where) {
    if (!p.spherical)
      return p.cartesian_m;
    if (!s.ris)
      throw ConfigError(where + ": spherical placement requires a RIS");
    if (p.r_m < 0.0)
      throw ConfigError(where + ".r_m: must be >= 0");
    if (p.theta_deg < 0.0 || p.theta_deg > 180.0)
      throw ConfigError(where + ".theta_deg: must lie in [0, 180]");
    return spherical_to_cartesian(p.r_m, deg_to_rad(p.phi_deg), deg_to_rad(p.theta_deg), Frame::world(s.ris->center()));
  };

  {
    const TxConfig &tc = cfg.tx;
    const Vec3 pos = resolve(tc.position, "tx.position");
    if (!tc.look_at && !s.ris)
      throw ConfigError("tx.look_at: \"ris_center\" requires a RIS");
    const Vec3 look = tc.look_at ? *tc.look_at : s.ris->center();
    s.tx.frame = guarded("tx", [&] { return aim_frame(pos, look, tc.up); });
    s.tx.gain_linear = db_to_linear(tc.gain_db);
    s.tx.power_w = dbm_to_watt(tc.power_dbm);
    s.tx.pattern = detail::make_pattern(tc.pattern, s.tx.gain_linear, "tx.pattern");
    s.tx.polarization = tc.polarization;
    guarded("tx", [&] { s.tx.validate(true); });
  }

  {
    const RxConfig &rc = cfg.rx;
    s.target = resolve(rc.target, "rx.target");
    s.rx.frame = guarded("rx", [&] { return Frame::from_z_up(s.target, rc.axis, rc.up); });
    s.rx.gain_linear = db_to_linear(rc.gain_db);
    s.rx.power_w = 0.0;
    s.rx.pattern = detail::make_pattern(rc.pattern, s.rx.gain_linear, "rx.pattern");
    s.rx.polarization = rc.polarization;
    guarded("rx", [&] { s.rx.validate(false); });
  }

  if (cfg.grid) {
    guarded("grid", [&] { cfg.grid->validate(); });
    s.grid = cfg.grid;
  }
  if (cfg.solver.max_order < 0)
    throw ConfigError("solver.max_order: must be >= 0");
  s.solver = cfg.solver;
  return s;
}

namespace presets {

/// Shared radio, RIS, antenna and grid setup of both built-in scenes.
inline SceneConfig anechoic_config() {
  SceneConfig c;
  c.name = "anechoic";
  c.frequency_ghz = 23.8;

  RisConfig ris;
  ris.center_m = {0, 0, 0.5};
  ris.normal = {1, 0, 0};
  ris.up = {0, 0, 1};
  ris.alphabet = {{1.25, 0.0}, {0.0, 0.0}};
  c.ris = ris;

  c.tx.position = PlacementConfig::about_ris(1.86, -36.0, 90.0);
  c.tx.up = {0, 0, 1};
  c.tx.power_dbm = 10.0;
  c.tx.gain_db = 19.0;
  c.tx.pattern = {"directional", 0.25};
  c.tx.polarization = {0, 1, 0};

  c.rx.target = PlacementConfig::about_ris(1.4, 10.0, 106.0);
  c.rx.gain_db = 0.0;
  c.rx.pattern = {"monopole", 0.25};

  c.grid = GridSpec{0.92, 1.52, 0.02, 0.92, 0.114, 0.01};
  c.solver = SolverSettings{0, true, PolarizationMode::scalar, false};
  return c;
}

/// 2 x 2.4 x 1 m metallic room: reflective walls at y = +-1.2 and x = 2, a
/// blocking RIS wall at x = 0 with a 12 x 12 cm opening, and a
/// 0.9 x 0.05 x 1 m blocking box hiding the receive area from the TX.
inline SceneConfig table1_reflective_config() {
  SceneConfig c = anechoic_config();
  c.name = "table1_reflective";
  c.materials["metal"] = Material{1.0, 1e7};
  auto add = [&](const char *name, Vec3 center, Vec3 normal, double w, double h, bool reflective) {
    c.surfaces.push_back(SurfaceConfig{name, center, normal, {0, 0, 1}, w, h, "metal", reflective, true});
  };
  add("wall_north", {1.0, 1.2, 0.5}, {0, -1, 0}, 2.0, 1.0, true);
  add("wall_south", {1.0, -1.2, 0.5}, {0, 1, 0}, 2.0, 1.0, true);
  add("wall_back", {2.0, 0.0, 0.5}, {-1, 0, 0}, 2.4, 1.0, true);
  add("ris_wall_west", {0.0, -0.63, 0.5}, {1, 0, 0}, 1.14, 1.0, false);
  add("ris_wall_east", {0.0, 0.63, 0.5}, {1, 0, 0}, 1.14, 1.0, false);
  add("ris_wall_below", {0.0, 0.0, 0.22}, {1, 0, 0}, 0.12, 0.44, false);
  add("ris_wall_above", {0.0, 0.0, 0.78}, {1, 0, 0}, 0.12, 0.44, false);
  add("blocker_south", {1.55, -0.5, 0.5}, {0, -1, 0}, 0.9, 1.0, false);
  add("blocker_north", {1.55, -0.45, 0.5}, {0, 1, 0}, 0.9, 1.0, false);
  add("blocker_west", {1.1, -0.475, 0.5}, {-1, 0, 0}, 0.05, 1.0, false);
  add("blocker_east", {2.0, -0.475, 0.5}, {1, 0, 0}, 0.05, 1.0, false);
  c.solver = SolverSettings{2, true, PolarizationMode::vector, false};
  return c;
}

inline Scene anechoic() { return build_scene(anechoic_config()); }
inline Scene table1_reflective() { return build_scene(table1_reflective_config()); }

inline std::optional<Scene> by_name(const std::string &name) {
  if (name == "anechoic")
    return anechoic();
  if (name == "table1_reflective")
    return table1_reflective();
  return std::nullopt;
}

} // namespace presets

} // namespace ristrace
