// SPDX-License-Identifier: Apache-2.0
//
// Scene configuration documents (JSON) <-> SceneConfig. Units are part of
// the key names. Unknown keys are rejected.

#pragma once

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>

#include "json.hpp"

#include "ristrace/scene.hpp"

namespace ristrace {

inline constexpr const char *scene_format_tag = "ristrace-scene/1";

namespace detail {

using nlohmann::json;

class Reader {
public:
  Reader(const json &j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object())
      throw ConfigError(where() + ": expected an object");
  }

  std::string where() const { return path_.empty() ? std::string("<root>") : path_; }
  std::string sub(const std::string &key) const { return path_.empty() ? key : path_ + "." + key; }

  void allow(std::initializer_list<const char *> keys) const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      bool ok = false;
      for (const char *k : keys)
        ok = ok || it.key() == k;
      if (!ok)
        throw ConfigError(sub(it.key()) + ": unknown field");
    }
  }

  bool has(const char *key) const { return j_.contains(key); }

  const json &raw(const char *key) const {
    if (!j_.contains(key))
      throw ConfigError(sub(key) + ": missing required field");
    return j_.at(key);
  }

  Reader object(const char *key) const { return Reader(raw(key), sub(key)); }

  double number(const char *key) const {
    const json &v = raw(key);
    if (!v.is_number())
      throw ConfigError(sub(key) + ": expected a number");
    return v.get<double>();
  }
  double number_or(const char *key, double fallback) const { return has(key) ? number(key) : fallback; }

  int integer(const char *key) const {
    const json &v = raw(key);
    if (!v.is_number_integer())
      throw ConfigError(sub(key) + ": expected an integer");
    return v.get<int>();
  }

  bool boolean_or(const char *key, bool fallback) const {
    if (!has(key))
      return fallback;
    const json &v = raw(key);
    if (!v.is_boolean())
      throw ConfigError(sub(key) + ": expected true or false");
    return v.get<bool>();
  }

  std::string string(const char *key) const {
    const json &v = raw(key);
    if (!v.is_string())
      throw ConfigError(sub(key) + ": expected a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const char *key, std::size_t n) const {
    const json &v = raw(key);
    const std::string msg = sub(key) + ": expected an array of " + std::to_string(n) + " numbers";
    if (!v.is_array() || v.size() != n)
      throw ConfigError(msg);
    std::vector<double> out;
    for (const auto &x : v) {
      if (!x.is_number())
        throw ConfigError(msg);
      out.push_back(x.get<double>());
    }
    return out;
  }

  Vec3 vec3(const char *key) const {
    const auto v = numbers(key, 3);
    return {v[0], v[1], v[2]};
  }
  Vec3 vec3_or(const char *key, const Vec3 &fallback) const { return has(key) ? vec3(key) : fallback; }

  const json &value() const { return j_; }

private:
  const json &j_;
  std::string path_;
};

inline PlacementConfig read_placement(const Reader &r) {
  r.allow({"cartesian_m", "spherical"});
  if (r.has("cartesian_m") == r.has("spherical"))
    throw ConfigError(r.where() + ": give exactly one of 'cartesian_m' or 'spherical'");
  if (r.has("cartesian_m"))
    return PlacementConfig::at(r.vec3("cartesian_m"));
  const Reader s = r.object("spherical");
  s.allow({"r_m", "phi_deg", "theta_deg"});
  return PlacementConfig::about_ris(s.number("r_m"), s.number("phi_deg"), s.number("theta_deg"));
}

inline PatternConfig read_pattern(const Reader &r) {
  r.allow({"type", "height_wavelengths"});
  PatternConfig p;
  p.type = r.string("type");
  if (r.has("height_wavelengths") && p.type != "monopole")
    throw ConfigError(r.sub("height_wavelengths") + ": only valid for monopole patterns");
  p.height_wavelengths = r.number_or("height_wavelengths", 0.25);
  return p;
}

inline json vec_json(const Vec3 &v) { return json::array({v.x, v.y, v.z}); }

inline json placement_json(const PlacementConfig &p) {
  if (!p.spherical)
    return {{"cartesian_m", vec_json(p.cartesian_m)}};
  return {{"spherical", {{"r_m", p.r_m}, {"phi_deg", p.phi_deg}, {"theta_deg", p.theta_deg}}}};
}

inline json pattern_json(const PatternConfig &p) {
  json j = {{"type", p.type}};
  if (p.type == "monopole")
    j["height_wavelengths"] = p.height_wavelengths;
  return j;
}

} // namespace detail

/// Parse a scene document into its configuration record (schema checks
/// only; physical validation happens in build_scene).
inline SceneConfig parse_scene_config(const std::string &text) {
  using detail::Reader;
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error &e) {
    throw ConfigError(std::string("parse error: ") + e.what());
  }
  const Reader root(doc, "");
  root.allow({"format", "name", "radio", "tx", "rx", "grid", "materials", "surfaces", "ris", "solver"});
  if (root.string("format") != scene_format_tag)
    throw ConfigError(std::string("format: expected '") + scene_format_tag + "'");

  SceneConfig c;
  c.name = root.has("name") ? root.string("name") : "";
  {
    const Reader radio = root.object("radio");
    radio.allow({"frequency_ghz"});
    c.frequency_ghz = radio.number("frequency_ghz");
  }

  if (root.has("materials")) {
    const Reader mats = root.object("materials");
    for (auto it = mats.value().begin(); it != mats.value().end(); ++it) {
      const Reader m(it.value(), mats.sub(it.key()));
      m.allow({"eps_r", "sigma_s_per_m"});
      c.materials[it.key()] = Material{m.number("eps_r"), m.number("sigma_s_per_m")};
    }
  }

  if (root.has("surfaces")) {
    const auto &arr = root.raw("surfaces");
    if (!arr.is_array())
      throw ConfigError("surfaces: expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const Reader r(arr[i], "surfaces[" + std::to_string(i) + "]");
      r.allow({"name", "center_m", "normal", "up", "size_m", "material", "reflective", "blocking"});
      SurfaceConfig sc;
      sc.name = r.string("name");
      sc.center_m = r.vec3("center_m");
      sc.normal = r.vec3("normal");
      sc.up = r.vec3_or("up", {0, 0, 1});
      const auto size = r.numbers("size_m", 2);
      sc.width_m = size[0];
      sc.height_m = size[1];
      sc.material = r.string("material");
      sc.reflective = r.boolean_or("reflective", false);
      sc.blocking = r.boolean_or("blocking", true);
      c.surfaces.push_back(std::move(sc));
    }
  }

  if (root.has("ris")) {
    const Reader r = root.object("ris");
    r.allow({"center_m", "normal", "up", "rings", "pitch_mm", "element_size_mm", "lattice_rotation_deg",
             "footprint_mm", "element_gain", "alphabet", "config_file"});
    RisConfig rc;
    rc.center_m = r.vec3("center_m");
    rc.normal = r.vec3("normal");
    rc.up = r.vec3("up");
    rc.rings = r.integer("rings");
    rc.pitch_mm = r.number("pitch_mm");
    const auto es = r.numbers("element_size_mm", 2);
    rc.element_size_y_mm = es[0];
    rc.element_size_z_mm = es[1];
    rc.lattice_rotation_deg = r.number_or("lattice_rotation_deg", 0.0);
    const auto fp = r.numbers("footprint_mm", 2);
    rc.footprint_width_mm = fp[0];
    rc.footprint_height_mm = fp[1];
    if (r.has("element_gain")) {
      const auto &g = r.raw("element_gain");
      if (g.is_string() && g.get<std::string>() == "auto")
        rc.element_gain.reset();
      else if (g.is_number())
        rc.element_gain = g.get<double>();
      else
        throw ConfigError(r.sub("element_gain") + ": expected a number or \"auto\"");
    }
    const auto &alpha = r.raw("alphabet");
    const std::string msg = r.sub("alphabet") + ": expected a non-empty array of [magnitude, phase_deg]";
    if (!alpha.is_array() || alpha.empty())
      throw ConfigError(msg);
    for (const auto &a : alpha) {
      if (!a.is_array() || a.size() != 2 || !a[0].is_number() || !a[1].is_number())
        throw ConfigError(msg);
      rc.alphabet.emplace_back(a[0].get<double>(), a[1].get<double>());
    }
    if (r.has("config_file"))
      rc.config_file = r.string("config_file");
    c.ris = rc;
  }

  {
    const Reader tx = root.object("tx");
    tx.allow({"position", "look_at", "up", "power_dbm", "gain_db", "pattern", "polarization"});
    c.tx.position = detail::read_placement(tx.object("position"));
    if (tx.has("look_at")) {
      const auto &la = tx.raw("look_at");
      if (la.is_string()) {
        if (la.get<std::string>() != "ris_center")
          throw ConfigError(tx.sub("look_at") + ": expected \"ris_center\" or [x, y, z]");
      } else {
        c.tx.look_at = tx.vec3("look_at");
      }
    }
    c.tx.up = tx.vec3_or("up", {0, 0, 1});
    c.tx.power_dbm = tx.number("power_dbm");
    c.tx.gain_db = tx.number("gain_db");
    c.tx.pattern = detail::read_pattern(tx.object("pattern"));
    c.tx.polarization = tx.vec3_or("polarization", {0, 1, 0});
  }

  {
    const Reader rx = root.object("rx");
    rx.allow({"target", "gain_db", "pattern", "axis", "up", "polarization"});
    c.rx.target = detail::read_placement(rx.object("target"));
    c.rx.gain_db = rx.number("gain_db");
    c.rx.pattern = detail::read_pattern(rx.object("pattern"));
    c.rx.axis = rx.vec3_or("axis", {0, 0, 1});
    c.rx.up = rx.vec3_or("up", {0, 1, 0});
    c.rx.polarization = rx.vec3_or("polarization", {0, 0, 1});
  }

  if (root.has("grid")) {
    const Reader g = root.object("grid");
    g.allow({"x_m", "y_m", "z_m", "step_m"});
    const auto xr = g.numbers("x_m", 2), yr = g.numbers("y_m", 2);
    c.grid = GridSpec{xr[0], xr[1], yr[0], yr[1], g.number("z_m"), g.number("step_m")};
  }

  if (root.has("solver")) {
    const Reader sv = root.object("solver");
    sv.allow({"max_order", "center_prune", "polarization", "line_of_sight"});
    c.solver.max_order = sv.has("max_order") ? sv.integer("max_order") : 0;
    c.solver.center_prune = sv.boolean_or("center_prune", true);
    c.solver.line_of_sight = sv.boolean_or("line_of_sight", false);
    const std::string mode = sv.has("polarization") ? sv.string("polarization") : "scalar";
    if (mode == "scalar")
      c.solver.mode = PolarizationMode::scalar;
    else if (mode == "vector")
      c.solver.mode = PolarizationMode::vector;
    else
      throw ConfigError(sv.sub("polarization") + ": expected \"scalar\" or \"vector\"");
  }
  return c;
}

/// Canonical document. parse_scene_config(serialize_scene_config(c)) == c.
inline std::string serialize_scene_config(const SceneConfig &c) {
  using detail::json;
  using detail::vec_json;
  json doc;
  doc["format"] = scene_format_tag;
  doc["name"] = c.name;
  doc["radio"] = {{"frequency_ghz", c.frequency_ghz}};

  if (!c.materials.empty()) {
    json mats = json::object();
    for (const auto &[name, m] : c.materials)
      mats[name] = {{"eps_r", m.eps_r}, {"sigma_s_per_m", m.sigma}};
    doc["materials"] = mats;
  }

  if (!c.surfaces.empty()) {
    json arr = json::array();
    for (const auto &s : c.surfaces)
      arr.push_back({{"name", s.name},
                     {"center_m", vec_json(s.center_m)},
                     {"normal", vec_json(s.normal)},
                     {"up", vec_json(s.up)},
                     {"size_m", {s.width_m, s.height_m}},
                     {"material", s.material},
                     {"reflective", s.reflective},
                     {"blocking", s.blocking}});
    doc["surfaces"] = arr;
  }

  if (c.ris) {
    const RisConfig &r = *c.ris;
    json alpha = json::array();
    for (const auto &[mag, phase] : r.alphabet)
      alpha.push_back({mag, phase});
    json j = {{"center_m", vec_json(r.center_m)},
              {"normal", vec_json(r.normal)},
              {"up", vec_json(r.up)},
              {"rings", r.rings},
              {"pitch_mm", r.pitch_mm},
              {"element_size_mm", {r.element_size_y_mm, r.element_size_z_mm}},
              {"lattice_rotation_deg", r.lattice_rotation_deg},
              {"footprint_mm", {r.footprint_width_mm, r.footprint_height_mm}},
              {"alphabet", alpha}};
    j["element_gain"] = r.element_gain ? json(*r.element_gain) : json("auto");
    if (r.config_file)
      j["config_file"] = *r.config_file;
    doc["ris"] = j;
  }

  json tx = {{"position", detail::placement_json(c.tx.position)},
             {"up", vec_json(c.tx.up)},
             {"power_dbm", c.tx.power_dbm},
             {"gain_db", c.tx.gain_db},
             {"pattern", detail::pattern_json(c.tx.pattern)},
             {"polarization", vec_json(c.tx.polarization)}};
  tx["look_at"] = c.tx.look_at ? vec_json(*c.tx.look_at) : json("ris_center");
  doc["tx"] = tx;

  doc["rx"] = {{"target", detail::placement_json(c.rx.target)},
               {"gain_db", c.rx.gain_db},
               {"pattern", detail::pattern_json(c.rx.pattern)},
               {"axis", vec_json(c.rx.axis)},
               {"up", vec_json(c.rx.up)},
               {"polarization", vec_json(c.rx.polarization)}};

  if (c.grid)
    doc["grid"] = {{"x_m", {c.grid->x0, c.grid->x1}},
                   {"y_m", {c.grid->y0, c.grid->y1}},
                   {"z_m", c.grid->z},
                   {"step_m", c.grid->step}};

  doc["solver"] = {{"max_order", c.solver.max_order},
                   {"center_prune", c.solver.center_prune},
                   {"polarization", c.solver.mode == PolarizationMode::vector ? "vector" : "scalar"},
                   {"line_of_sight", c.solver.line_of_sight}};
  return doc.dump(2) + "\n";
}

inline Scene parse_scene(const std::string &text, const std::filesystem::path &base_dir = {}) {
  return build_scene(parse_scene_config(text), base_dir);
}

inline Scene load_scene_file(const std::filesystem::path &path) {
  std::ifstream is(path);
  if (!is)
    throw ConfigError("cannot open scene file '" + path.string() + "'");
  std::ostringstream ss;
  ss << is.rdbuf();
  try {
    return parse_scene(ss.str(), path.parent_path());
  } catch (const ConfigError &e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

/// A preset name ("anechoic", "table1_reflective") or a scene file path.
inline Scene load_scene(const std::string &name_or_path) {
  if (auto preset = presets::by_name(name_or_path))
    return *preset;
  return load_scene_file(name_or_path);
}

} // namespace ristrace
