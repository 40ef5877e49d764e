// SPDX-License-Identifier: Apache-2.0
//
// ristrace command-line tool: optimize / sweep / paths / validate.
// Exit codes: 0 ok, 1 usage, 2 configuration, 3 runtime.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ristrace/ristrace.hpp"

namespace fs = std::filesystem;
using namespace ristrace;

namespace {

enum Exit { ok = 0, usage = 1, config = 2, runtime = 3 };

class UsageError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<double> parse_list(const std::string &text, std::size_t count, const char *flag) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(cell, &used);
    } catch (const std::exception &) {
      used = 0;
    }
    if (used == 0 || used != cell.size())
      throw UsageError(std::string(flag) + ": '" + cell + "' is not a number");
    out.push_back(v);
  }
  if (out.size() != count)
    throw UsageError(std::string(flag) + ": expected " + std::to_string(count) + " comma-separated values");
  return out;
}

Vec3 parse_point(const std::string &text, const char *flag) {
  const auto v = parse_list(text, 3, flag);
  return {v[0], v[1], v[2]};
}

GridSpec parse_grid(const std::string &text) {
  const auto v = parse_list(text, 6, "--grid");
  GridSpec g{v[0], v[1], v[2], v[3], v[4], v[5]};
  try {
    g.validate();
  } catch (const std::invalid_argument &e) {
    throw UsageError(std::string("--grid: ") + e.what());
  }
  return g;
}

PolarizationMode parse_mode(const std::string &m) {
  if (m == "scalar")
    return PolarizationMode::scalar;
  if (m == "vector")
    return PolarizationMode::vector;
  throw UsageError("--mode: expected 'scalar' or 'vector', got '" + m + "'");
}

struct Common {
  std::string scene = "anechoic";
  std::string ris_config;
  std::string grid;
  std::optional<int> max_order;
  std::string mode;
  bool no_center_prune = false;
  unsigned threads = 0;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App *app, Common &c) {
  app->add_option("--scene", c.scene, "Preset name (anechoic, table1_reflective) or scene JSON file")
      ->capture_default_str();
  app->add_option("--ris-config", c.ris_config, "RIS configuration file (overrides the scene's)");
  app->add_option("--grid", c.grid, "Receiver grid x0,x1,y0,y1,z,step in metres");
  app->add_option("--max-order", c.max_order, "Maximum number of wall reflections K")->check(CLI::NonNegativeNumber);
  app->add_option("--mode", c.mode, "Field model: scalar or vector");
  app->add_flag("--no-center-prune", c.no_center_prune, "Disable the RIS-center sequence pre-check");
  app->add_option("--threads", c.threads, "Worker threads (0 = all cores)")->capture_default_str();
  app->add_option("--out", c.out, "Output directory")->capture_default_str();
  app->add_option("--seed", c.seed, "Random seed (only used by validate)");
}

/// Scene with command-line overrides applied.
Scene prepare_scene(const Common &c) {
  Scene s = load_scene(c.scene);
  if (c.max_order)
    s.solver.max_order = *c.max_order;
  if (!c.mode.empty())
    s.solver.mode = parse_mode(c.mode);
  if (c.no_center_prune)
    s.solver.center_prune = false;
  if (!c.ris_config.empty()) {
    if (!s.ris)
      throw ConfigError("--ris-config: scene '" + s.name() + "' has no RIS");
    std::vector<cplx> gammas;
    try {
      gammas = load_ris_config(c.ris_config);
      s.ris = s.ris->with_config(gammas);
    } catch (const std::exception &e) {
      throw ConfigError(std::string("--ris-config: ") + e.what());
    }
  }
  return s;
}

fs::path output_dir(const Common &c) {
  fs::path dir = c.out;
  fs::create_directories(dir);
  return dir;
}

/// RIS frozen for the scene target unless a configuration was supplied.
Scene frozen(const Common &c, const Scene &s) {
  if (!s.ris || !c.ris_config.empty() || (s.config.ris && s.config.ris->config_file))
    return s;
  return optimize_and_freeze(s, s.target);
}

int run_optimize(const Common &c, const std::string &target_text) {
  Scene s = prepare_scene(c);
  if (!s.ris)
    throw ConfigError("scene '" + s.name() + "' has no RIS to optimize");
  const Vec3 target = target_text.empty() ? s.target : parse_point(target_text, "--target");
  const Scene out = optimize_and_freeze(s, target);
  const fs::path file = output_dir(c) / "ris_config.txt";
  save_ris_config(file.string(), out.ris->config());
  std::size_t on = 0;
  for (const auto &g : out.ris->config())
    on += std::abs(g) > 0.0;
  std::cout << "wrote " << file.string() << " (" << on << " of " << out.ris->size() << " elements active)\n";
  return ok;
}

int run_sweep(const Common &c, const std::vector<double> &range, const std::string &dump_at) {
  const Scene s = frozen(c, prepare_scene(c));
  GridSpec grid;
  if (!c.grid.empty())
    grid = parse_grid(c.grid);
  else if (s.grid)
    grid = *s.grid;
  else
    throw UsageError("scene has no grid; pass --grid");

  const auto t0 = std::chrono::steady_clock::now();
  const PowerGrid result = sweep_grid(s, grid, SweepOptions::from(s, c.threads));
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const fs::path dir = output_dir(c);
  write_grid_csv((dir / "power.csv").string(), result);
  write_heatmap((dir / "power.ppm").string(), result, range[0], range[1]);
  {
    std::ofstream meta(dir / "sweep_meta.txt");
    char buf[32];
    meta << "# ristrace sweep v1\n";
    meta << "scene " << s.name() << '\n';
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(result.scene_hash));
    meta << "scene_hash " << buf << '\n';
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(result.ris_hash));
    meta << "ris_hash " << buf << '\n';
    meta << "max_order " << result.max_order << '\n';
    meta << "mode " << (result.mode == PolarizationMode::vector ? "vector" : "scalar") << '\n';
    meta << "points " << grid.size() << '\n';
  }
  if (s.ris) {
    save_ris_config((dir / "ris_config.txt").string(), s.ris->config());
  }
  if (!dump_at.empty()) {
    const Vec3 p = parse_point(dump_at, "--dump-paths-at");
    std::ofstream os(dir / "paths.txt");
    const PathFinder finder(s);
    write_path_dump(os, finder.find_paths(p), s, s.rx_at(p), s.solver.mode);
  }

  double best = power_floor_dbm;
  for (double v : result.dbm)
    best = std::max(best, v);
  std::printf("%zu points in %.2f s, max %.3f dBm, output in %s\n", grid.size(), secs, best, dir.string().c_str());
  return ok;
}

int run_paths(const Common &c, const std::string &rx_text) {
  const Scene s = frozen(c, prepare_scene(c));
  const Vec3 rx = rx_text.empty() ? s.target : parse_point(rx_text, "--rx");
  const PathFinder finder(s);
  const auto paths = finder.find_paths(rx);
  if (c.out == "-") {
    write_path_dump(std::cout, paths, s, s.rx_at(rx), s.solver.mode);
    return ok;
  }
  const fs::path file = output_dir(c) / "paths.txt";
  std::ofstream os(file);
  write_path_dump(os, paths, s, s.rx_at(rx), s.solver.mode);
  FieldPhasor total;
  for (const auto &p : paths)
    total += path_field(p, s, s.rx_at(rx), s.solver.mode);
  std::printf("%zu paths, P_r = %.6f dBm, written to %s\n", paths.size(), received_power(total).dbm,
              file.string().c_str());
  return ok;
}

/// Random configurations and receiver positions; the modular pipeline must
/// match the closed form to 1e-9 relative.
int run_validate(const Common &c, int configs, int points) {
  Scene base = prepare_scene(c);
  if (!base.ris || !base.surfaces.empty())
    throw ConfigError("validate needs a RIS scene without surfaces (e.g. the anechoic preset)");
  base.solver.mode = PolarizationMode::scalar;
  std::mt19937_64 rng(c.seed.value_or(1));
  const auto &alphabet = base.ris->alphabet();
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
  std::uniform_real_distribution<double> ux(0.3, 2.0), uy(-0.8, 0.8), uz(0.0, 1.0);

  double worst = 0.0;
  std::size_t compared = 0;
  for (int k = 0; k < configs; ++k) {
    std::vector<std::size_t> choice(base.ris->size());
    for (auto &i : choice)
      i = pick(rng);
    Scene s = base;
    s.ris = base.ris->with_alphabet_indices(choice);
    const PathFinder finder(s);
    for (int j = 0; j < points; ++j) {
      const Vec3 rx{ux(rng), uy(rng), uz(rng)};
      const auto pipeline = evaluate_point(finder, rx, PolarizationMode::scalar);
      const double w = pipeline.watts;
      const double ref = closed_form_power_w(s, rx);
      if (ref == 0.0 && w == 0.0)
        continue;
      worst = std::max(worst, std::abs(w - ref) / ref);
      ++compared;
    }
  }
  const bool pass = worst <= 1e-9;
  std::printf("%s: %zu comparisons, max relative error %.3e (tolerance 1e-9)\n", pass ? "PASS" : "FAIL", compared,
              worst);
  return pass ? ok : runtime;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Ray tracing of RIS-assisted links in rectangular rooms"};
  app.require_subcommand(1);
  Common common;

  auto *opt = app.add_subcommand("optimize", "Configure the RIS for a target receiver and write the configuration");
  add_common(opt, common);
  std::string target;
  opt->add_option("--target", target, "Target x,y,z in metres (default: scene target)");

  auto *sweep = app.add_subcommand("sweep", "Received power over a receiver grid (CSV + PPM)");
  add_common(sweep, common);
  std::vector<double> range{-80.0, -50.0};
  std::string dump_at;
  sweep->add_option("--range", range, "Heatmap colour range min max in dBm")->expected(2)->capture_default_str();
  sweep->add_option("--dump-paths-at", dump_at, "Also write the path dump for this x,y,z");

  auto *paths = app.add_subcommand("paths", "List all propagation paths to one receiver position");
  add_common(paths, common);
  std::string rx;
  paths->add_option("--rx", rx, "Receiver x,y,z in metres (default: scene target)");

  auto *validate = app.add_subcommand("validate", "Compare the pipeline against the closed-form anechoic model");
  add_common(validate, common);
  int configs = 20, points = 50;
  validate->add_option("--configs", configs, "Random RIS configurations")->check(CLI::PositiveNumber);
  validate->add_option("--points", points, "Random receiver positions per configuration")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? ok : usage;
  }

  try {
    if (*opt)
      return run_optimize(common, target);
    if (*sweep) {
      if (!(range[0] < range[1]))
        throw UsageError("--range: min must be below max");
      return run_sweep(common, range, dump_at);
    }
    if (*paths)
      return run_paths(common, rx);
    if (*validate)
      return run_validate(common, configs, points);
  } catch (const UsageError &e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return usage;
  } catch (const ConfigError &e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return config;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return runtime;
  }
  return usage;
}
