// SPDX-License-Identifier: Apache-2.0
//
// Receiver-grid sweeps, RIS optimization for a fixed target and the CSV /
// PPM output writers.

#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "ristrace/grid.hpp"
#include "ristrace/pathfinder.hpp"
#include "ristrace/propagation.hpp"
#include "ristrace/ris.hpp"
#include "ristrace/scene.hpp"
#include "ristrace/scene_io.hpp"

namespace ristrace {

/// 64-bit FNV-1a, used to tag outputs with the inputs that produced them.
inline std::uint64_t fnv1a(const std::string &bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::uint64_t scene_hash(const Scene &scene) { return fnv1a(serialize_scene_config(scene.config)); }

inline std::uint64_t ris_config_hash(const Scene &scene) {
  if (!scene.ris)
    return 0;
  std::ostringstream os;
  write_ris_config(os, scene.ris->config());
  return fnv1a(os.str());
}

/// Direct element -> point contributions with a unit reflection coefficient.
/// Elements without a valid direct path contribute zero.
inline std::vector<FieldPhasor> unit_contributions(const Scene &scene, const Vec3 &point, PolarizationMode mode) {
  if (!scene.ris)
    throw std::invalid_argument("scene has no RIS");
  const PathFinder finder(scene, 0, false);
  std::vector<FieldPhasor> c(scene.ris->size());
  const Antenna rx = scene.rx_at(point);
  for (const auto &path : finder.find_paths(point)) {
    if (!path.element)
      continue;
    RisElement unit = scene.ris->elements()[*path.element];
    unit.gamma = cplx(1.0, 0.0);
    c[*path.element] = ris_path_field(path, scene, unit, rx, mode);
  }
  return c;
}

/// Configure the RIS for `target` (direct paths only) and return the scene
/// with the frozen configuration.
inline Scene optimize_and_freeze(const Scene &scene, const Vec3 &target) {
  if (!scene.ris)
    throw std::invalid_argument("scene has no RIS to configure");
  const auto contributions = unit_contributions(scene, target, scene.solver.mode);
  if (std::all_of(contributions.begin(), contributions.end(), [](const FieldPhasor &f) { return f.is_zero(); }))
    throw std::runtime_error("no RIS element reaches the target through an unblocked path");
  const auto result = configure_greedy(scene.ris->alphabet(), contributions);
  Scene out = scene;
  out.ris = scene.ris->with_alphabet_indices(result.choice);
  return out;
}

struct SweepOptions {
  int max_order = 0;
  PolarizationMode mode = PolarizationMode::scalar;
  bool center_prune = true;
  unsigned threads = 1; // 0: hardware concurrency

  static SweepOptions from(const Scene &s, unsigned threads = 1) {
    return {s.solver.max_order, s.solver.mode, s.solver.center_prune, threads};
  }
};

struct PowerGrid {
  GridSpec spec;
  std::vector<double> dbm;                // row-major, index = j * count_x + i
  std::vector<std::uint32_t> path_counts; // paths found per point
  std::uint64_t scene_hash = 0;
  std::uint64_t ris_hash = 0;
  int max_order = 0;
  PolarizationMode mode = PolarizationMode::scalar;

  double at(std::size_t i, std::size_t j) const { return dbm[j * spec.count_x() + i]; }
};

struct PointResult {
  double dbm = power_floor_dbm;
  double watts = 0.0;
  std::uint32_t paths = 0;
};

/// Received power at one point: all paths, summed in path order.
inline PointResult evaluate_point(const PathFinder &finder, const Vec3 &point, PolarizationMode mode) {
  const Scene &scene = finder.scene();
  const Antenna rx = scene.rx_at(point);
  const auto paths = finder.find_paths(point);
  FieldPhasor total;
  for (const auto &p : paths)
    total += path_field(p, scene, rx, mode);
  const auto p = received_power(total);
  return {p.dbm, p.watts, static_cast<std::uint32_t>(paths.size())};
}

/// Power over every grid point. Points are independent and written by
/// index, so the result does not depend on the thread count.
inline PowerGrid sweep_grid(const Scene &scene, const GridSpec &grid, const SweepOptions &opt) {
  grid.validate();
  Scene local = scene;
  local.solver.max_order = opt.max_order;
  local.solver.center_prune = opt.center_prune;
  local.solver.mode = opt.mode;
  const PathFinder finder(local);

  PowerGrid out;
  out.spec = grid;
  out.max_order = opt.max_order;
  out.mode = opt.mode;
  out.scene_hash = scene_hash(scene);
  out.ris_hash = ris_config_hash(scene);
  const std::size_t n = grid.size();
  out.dbm.assign(n, power_floor_dbm);
  out.path_counts.assign(n, 0);

  unsigned workers = opt.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : opt.threads;
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    constexpr std::size_t chunk = 16;
    for (;;) {
      const std::size_t begin = next.fetch_add(chunk);
      if (begin >= n)
        return;
      const std::size_t end = std::min(n, begin + chunk);
      for (std::size_t k = begin; k < end; ++k) {
        const auto r = evaluate_point(finder, grid.point(k), opt.mode);
        out.dbm[k] = r.dbm;
        out.path_counts[k] = r.paths;
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned t = 0; t < workers; ++t)
      pool.emplace_back(work);
  }
  return out;
}

/// CSV: header row "y\x,<x0>,<x1>,...", then one row per y with the y
/// coordinate first. Values in dBm, fixed with 6 decimals. LF endings.
inline void write_grid_csv(std::ostream &os, const PowerGrid &grid) {
  const std::size_t nx = grid.spec.count_x(), ny = grid.spec.count_y();
  char buf[64];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.6f", v);
    os << buf;
  };
  os << "y\\x";
  for (std::size_t i = 0; i < nx; ++i) {
    os << ',';
    put(grid.spec.x(i));
  }
  os << '\n';
  for (std::size_t j = 0; j < ny; ++j) {
    put(grid.spec.y(j));
    for (std::size_t i = 0; i < nx; ++i) {
      os << ',';
      put(grid.at(i, j));
    }
    os << '\n';
  }
}

inline void write_grid_csv(const std::string &path, const PowerGrid &grid) {
  std::ofstream os(path, std::ios::binary);
  if (!os)
    throw std::runtime_error("cannot open '" + path + "' for writing");
  write_grid_csv(os, grid);
  if (!os)
    throw std::runtime_error("failed writing '" + path + "'");
}

struct CsvGrid {
  std::vector<double> xs;
  std::vector<double> ys;
  std::vector<double> values; // row-major like PowerGrid
};

inline CsvGrid read_grid_csv(std::istream &is) {
  CsvGrid g;
  std::string line;
  auto split = [](const std::string &l) {
    std::vector<std::string> cells;
    std::stringstream ss(l);
    std::string cell;
    while (std::getline(ss, cell, ','))
      cells.push_back(cell);
    return cells;
  };
  if (!std::getline(is, line))
    throw std::runtime_error("empty grid CSV");
  const auto header = split(line);
  for (std::size_t i = 1; i < header.size(); ++i)
    g.xs.push_back(std::stod(header[i]));
  while (std::getline(is, line)) {
    if (line.empty())
      continue;
    const auto cells = split(line);
    if (cells.size() != g.xs.size() + 1)
      throw std::runtime_error("grid CSV row " + std::to_string(g.ys.size() + 1) + " has the wrong column count");
    g.ys.push_back(std::stod(cells[0]));
    for (std::size_t i = 1; i < cells.size(); ++i)
      g.values.push_back(std::stod(cells[i]));
  }
  return g;
}

/// Binary PPM (P6), one pixel per grid point. The first image row is the
/// smallest y, columns run with increasing x. Colors interpolate linearly
/// through a five-stop dark-blue -> yellow ramp; values outside
/// [lo_dbm, hi_dbm] are clamped.
inline void write_heatmap(std::ostream &os, const PowerGrid &grid, double lo_dbm, double hi_dbm) {
  if (!(lo_dbm < hi_dbm))
    throw std::invalid_argument("heatmap range must satisfy min < max");
  static constexpr std::array<std::array<double, 3>, 5> stops{{
      {68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}}};
  const std::size_t nx = grid.spec.count_x(), ny = grid.spec.count_y();
  os << "P6\n# ristrace heatmap v1 range_dbm " << lo_dbm << ' ' << hi_dbm << " row0=min_y\n"
     << nx << ' ' << ny << "\n255\n";
  for (std::size_t j = 0; j < ny; ++j)
    for (std::size_t i = 0; i < nx; ++i) {
      const double t = std::clamp((grid.at(i, j) - lo_dbm) / (hi_dbm - lo_dbm), 0.0, 1.0);
      const double pos = t * (stops.size() - 1);
      const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(pos), stops.size() - 2);
      const double f = pos - static_cast<double>(k);
      for (int c = 0; c < 3; ++c) {
        const double v = stops[k][c] + f * (stops[k + 1][c] - stops[k][c]);
        os.put(static_cast<char>(static_cast<unsigned char>(std::lround(v))));
      }
    }
}

inline void write_heatmap(const std::string &path, const PowerGrid &grid, double lo_dbm, double hi_dbm) {
  std::ofstream os(path, std::ios::binary);
  if (!os)
    throw std::runtime_error("cannot open '" + path + "' for writing");
  write_heatmap(os, grid, lo_dbm, hi_dbm);
  if (!os)
    throw std::runtime_error("failed writing '" + path + "'");
}

} // namespace ristrace
