// SPDX-License-Identifier: Apache-2.0
//
// Acceptance run: one PASS/FAIL line per criterion, followed by the
// measured values. Exit status is non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <map>
#include <numeric>
#include <queue>
#include <random>
#include <string>
#include <vector>

#include "ristrace/ristrace.hpp"

using namespace ristrace;

namespace {

const Vec3 target{1.33, 0.23, 0.11};
const GridSpec coarse_grid{0.92, 1.52, 0.02, 0.92, 0.114, 0.01};
const GridSpec fine_grid{1.1, 1.3, 0.25, 0.45, 0.114, 0.002};

int failures = 0;

void report(int id, const char *title, bool pass, const std::string &detail) {
  std::printf("%s criterion %d: %s\n", pass ? "PASS" : "FAIL", id, title);
  std::printf("    %s\n", detail.c_str());
  std::fflush(stdout);
  failures += !pass;
}

std::string fmt(const char *f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------------------
// 1. Anechoic beam footprint

struct BeamMetrics {
  double max_dbm = 0;
  double x_extent = 0;
  double y_extent = 0;
  double strongest_side_lobe = -1e9;
  int side_lobes = 0;
};

BeamMetrics beam_metrics(const PowerGrid &g, double threshold, double lobe_floor) {
  const std::size_t nx = g.spec.count_x(), ny = g.spec.count_y();
  BeamMetrics m;
  const auto peak = std::max_element(g.dbm.begin(), g.dbm.end());
  m.max_dbm = *peak;

  // 4-connected region above the threshold grown from the peak
  std::vector<char> main(g.dbm.size(), 0);
  std::queue<std::size_t> q;
  q.push(static_cast<std::size_t>(peak - g.dbm.begin()));
  main[q.front()] = 1;
  double x0 = 1e9, x1 = -1e9, y0 = 1e9, y1 = -1e9;
  while (!q.empty()) {
    const std::size_t k = q.front();
    q.pop();
    const std::size_t i = k % nx, j = k / nx;
    x0 = std::min(x0, g.spec.x(i));
    x1 = std::max(x1, g.spec.x(i));
    y0 = std::min(y0, g.spec.y(j));
    y1 = std::max(y1, g.spec.y(j));
    auto visit = [&](std::size_t ii, std::size_t jj) {
      const std::size_t n = jj * nx + ii;
      if (!main[n] && g.dbm[n] > threshold) {
        main[n] = 1;
        q.push(n);
      }
    };
    if (i > 0)
      visit(i - 1, j);
    if (i + 1 < nx)
      visit(i + 1, j);
    if (j > 0)
      visit(i, j - 1);
    if (j + 1 < ny)
      visit(i, j + 1);
  }
  m.x_extent = x1 - x0;
  m.y_extent = y1 - y0;

  // side lobes: 3x3 local maxima outside the main region
  for (std::size_t j = 0; j < ny; ++j)
    for (std::size_t i = 0; i < nx; ++i) {
      const std::size_t k = j * nx + i;
      if (main[k] || g.dbm[k] < lobe_floor)
        continue;
      bool is_max = true;
      for (int dj = -1; dj <= 1 && is_max; ++dj)
        for (int di = -1; di <= 1; ++di) {
          const long ii = static_cast<long>(i) + di, jj = static_cast<long>(j) + dj;
          if ((di || dj) && ii >= 0 && jj >= 0 && ii < static_cast<long>(nx) && jj < static_cast<long>(ny) &&
              g.dbm[jj * nx + ii] > g.dbm[k]) {
            is_max = false;
            break;
          }
        }
      if (is_max) {
        ++m.side_lobes;
        m.strongest_side_lobe = std::max(m.strongest_side_lobe, g.dbm[k]);
      }
    }
  return m;
}

void criterion_anechoic() {
  const auto t0 = std::chrono::steady_clock::now();
  const Scene s = optimize_and_freeze(presets::anechoic(), target);
  const PowerGrid g = sweep_grid(s, coarse_grid, SweepOptions::from(s, 1));
  const double secs = seconds_since(t0);
  const BeamMetrics m = beam_metrics(g, -60.0, -80.0);
  const bool lobes_ok = m.side_lobes > 0 && m.strongest_side_lobe >= -80.0 && m.strongest_side_lobe <= -67.0;
  const bool pass = m.max_dbm >= -60.0 && m.max_dbm <= -55.0 && std::abs(m.x_extent - 0.5) <= 0.1 + 1e-9 &&
                    std::abs(m.y_extent - 0.2) <= 0.1 + 1e-9 && lobes_ok && secs <= 60.0;
  report(1, "anechoic reproduction", pass,
         fmt("%zu points in %.2f s (1 thread); max %.3f dBm; region > -60 dBm spans %.2f m (x) by %.2f m (y); "
             "%d side-lobe peaks >= -80 dBm, strongest %.2f dBm",
             g.dbm.size(), secs, m.max_dbm, m.x_extent, m.y_extent, m.side_lobes, m.strongest_side_lobe));
}

// ---------------------------------------------------------------------------
// 2. Closed-form oracle, written against plain arrays

double oracle_power_w(const double tx[3], const double tx_axis[3], double p_t, double g_t,
                      const std::vector<std::array<double, 3>> &centers, const std::vector<std::complex<double>> &gam,
                      const double normal[3], double d_y, double d_z, double g_el, double lambda, const double rx[3]) {
  auto sub = [](const double *a, const double *b, double *o) {
    for (int i = 0; i < 3; ++i)
      o[i] = a[i] - b[i];
  };
  auto dot3 = [](const double *a, const double *b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; };
  const double eta = 120.0 * M_PI;
  std::complex<double> sum = 0.0;
  for (std::size_t m = 0; m < centers.size(); ++m) {
    const double *c = centers[m].data();
    double to_tx[3], to_rx[3];
    sub(tx, c, to_tx);
    sub(rx, c, to_rx);
    const double dt = std::sqrt(dot3(to_tx, to_tx)), dr = std::sqrt(dot3(to_rx, to_rx));
    const double cin = dot3(to_tx, normal) / dt, cout = dot3(to_rx, normal) / dr;
    const double ct = -dot3(to_tx, tx_axis) / dt;
    const double cr = to_rx[2] / dr; // monopole axis = world z
    const double sr = std::sqrt(std::max(0.0, 1.0 - cr * cr));
    const double f_t = ct > 0 ? std::pow(ct, g_t / 2.0 - 1.0) : 0.0;
    const double f_r = sr > 0 ? std::pow(std::cos(M_PI / 2.0 * cr) / sr, 2) : 0.0;
    const double f_in = cin > 0 ? cin : 0.0, f_out = cout > 0 ? cout : 0.0;
    sum += std::sqrt(2 * eta * p_t * g_t * f_t) * std::sqrt(g_el * f_in * f_out * d_y * d_z / (4 * M_PI)) * gam[m] /
           dt * std::sqrt(f_r) * lambda / (4 * M_PI * dr) * std::exp(std::complex<double>(0, -2 * M_PI * (dt + dr) / lambda));
  }
  return std::norm(sum) / (2 * eta);
}

void criterion_closed_form() {
  Scene base = presets::anechoic();
  base.solver.mode = PolarizationMode::scalar;
  const double lambda = 299792458.0 / 23.8e9;
  const double p_t = 0.01, g_t = std::pow(10.0, 1.9);
  const double g_el = 4 * M_PI * 6.6e-3 * 6.6e-3 / (lambda * lambda);
  const double normal[3] = {1, 0, 0};
  const Vec3 txp = base.tx.frame.origin();
  const double tx[3] = {txp.x, txp.y, txp.z};
  const Vec3 axis = normalized(Vec3{0, 0, 0.5} - txp);
  const double tx_axis[3] = {axis.x, axis.y, axis.z};
  std::vector<std::array<double, 3>> centers;
  for (const auto &e : base.ris->elements())
    centers.push_back({e.center().x, e.center().y, e.center().z});

  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> ux(0.2, 2.0), uy(-1.0, 1.0), uz(0.0, 1.0);
  double worst = 0.0;
  int compared = 0, zero = 0;
  for (int k = 0; k < 20; ++k) {
    std::vector<std::size_t> choice(127);
    std::vector<std::complex<double>> gam(127);
    for (std::size_t m = 0; m < 127; ++m) {
      choice[m] = rng() % 2;
      gam[m] = choice[m] == 0 ? 1.25 : 0.0;
    }
    Scene s = base;
    s.ris = base.ris->with_alphabet_indices(choice);
    const PathFinder finder(s);
    for (int j = 0; j < 50; ++j) {
      const double rx[3] = {ux(rng), uy(rng), uz(rng)};
      const double ref = oracle_power_w(tx, tx_axis, p_t, g_t, centers, gam, normal, 6.6e-3, 6.6e-3, g_el, lambda, rx);
      const double got = evaluate_point(finder, {rx[0], rx[1], rx[2]}, PolarizationMode::scalar).watts;
      if (ref == 0.0) {
        ++zero;
        worst = std::max(worst, got == 0.0 ? 0.0 : 1.0);
        continue;
      }
      worst = std::max(worst, std::abs(got - ref) / ref);
      ++compared;
    }
  }
  report(2, "closed-form oracle equivalence", worst <= 1e-9 && compared >= 900,
         fmt("20 configurations x 50 receivers: %d non-zero comparisons, %d zero, max relative error %.3e", compared,
             zero, worst));
}

// ---------------------------------------------------------------------------
// 3. Friis

void criterion_friis() {
  SceneConfig c;
  c.name = "friis";
  c.frequency_ghz = 23.8;
  c.tx.position = PlacementConfig::at({0, 0, 1});
  c.tx.look_at = Vec3{1, 0, 1};
  c.tx.power_dbm = 10.0;
  c.tx.gain_db = 0.0;
  c.tx.pattern = {"isotropic", 0.25};
  c.rx.target = PlacementConfig::at({1, 0, 1});
  c.rx.gain_db = 0.0;
  c.rx.pattern = {"monopole", 0.25};
  c.solver.line_of_sight = true;
  const Scene s = build_scene(c);
  const double lambda = s.wavelength();
  double worst = 0.0;
  std::string values;
  for (double d : {1.0, 2.0, 5.0}) {
    const Vec3 rx{d, 0, 1};
    const double ref = 0.01 * 1.0 * 1.0 * std::pow(lambda / (4 * M_PI * d), 2);
    for (auto mode : {PolarizationMode::scalar, PolarizationMode::vector}) {
      const auto paths = find_paths(s, rx, 0);
      FieldPhasor e;
      for (const auto &p : paths)
        e += path_field(p, s, s.rx_at(rx), mode);
      const double got = received_power(e).watts;
      worst = std::max(worst, paths.size() == 1 ? std::abs(got - ref) / ref : 1.0);
      if (mode == PolarizationMode::scalar)
        values += fmt("d=%g m: %.6e W  ", d, got);
    }
  }
  report(3, "Friis sanity", worst <= 1e-12, values + fmt("max relative error %.3e", worst));
}

// ---------------------------------------------------------------------------
// 4. Path counts

void criterion_path_counts() {
  const Scene a = presets::anechoic();
  const PathFinder fa(a);
  std::size_t bad_anechoic = 0;
  for (std::size_t k = 0; k < coarse_grid.size(); ++k)
    bad_anechoic += fa.find_paths(coarse_grid.point(k)).size() != 127;

  const Scene r = presets::table1_reflective();
  const PathFinder fr(r);
  int max_per_element = 0;
  std::size_t max_reflected = 0, points_with_two = 0, total_paths = 0;
  for (std::size_t k = 0; k < coarse_grid.size(); ++k) {
    const auto paths = fr.find_paths(coarse_grid.point(k));
    total_paths += paths.size();
    std::map<std::size_t, int> per;
    std::size_t refl = 0;
    for (const auto &p : paths) {
      max_per_element = std::max(max_per_element, ++per[*p.element]);
      refl += p.reflected();
    }
    max_reflected = std::max(max_reflected, refl);
    points_with_two += refl >= 2;
  }
  const bool pass = bad_anechoic == 0 && max_per_element <= 10 && points_with_two > 0;
  report(4, "path-count contract", pass,
         fmt("anechoic K=0: %zu of %zu points without exactly 127 paths; reflective K=2: max %d paths per element, "
             "%zu points with >= 2 reflected paths (max %zu), mean %.1f paths per point",
             bad_anechoic, coarse_grid.size(), max_per_element, points_with_two, max_reflected,
             static_cast<double>(total_paths) / coarse_grid.size()));
}

// ---------------------------------------------------------------------------
// 5. Small-scale fading

struct NullStats {
  int lines_in_band = 0;
  int lines_with_nulls = 0;
  double median_spacing_mm = 0;
  double best_line_spacing_mm = 0;
};

/// Nulls: strict local minima along a row that sit at least `prominence`
/// dB below the highest sample within `reach` samples on both sides.
NullStats null_spacing(const PowerGrid &g, double prominence, int reach, double lo_mm, double hi_mm) {
  const std::size_t nx = g.spec.count_x(), ny = g.spec.count_y();
  NullStats st;
  std::vector<double> all;
  double best_gap = 1e9;
  for (std::size_t j = 0; j < ny; ++j) {
    const double *row = &g.dbm[j * nx];
    std::vector<std::size_t> nulls;
    for (std::size_t i = 1; i + 1 < nx; ++i) {
      if (!(row[i] < row[i - 1] && row[i] <= row[i + 1]))
        continue;
      double left = row[i], right = row[i];
      for (int d = 1; d <= reach; ++d) {
        if (i >= static_cast<std::size_t>(d))
          left = std::max(left, row[i - d]);
        if (i + d < nx)
          right = std::max(right, row[i + d]);
      }
      if (std::min(left, right) - row[i] >= prominence)
        nulls.push_back(i);
    }
    if (nulls.size() < 3)
      continue;
    ++st.lines_with_nulls;
    const double mean_mm = 1e3 * g.spec.step * static_cast<double>(nulls.back() - nulls.front()) /
                           static_cast<double>(nulls.size() - 1);
    for (std::size_t k = 1; k < nulls.size(); ++k)
      all.push_back(1e3 * g.spec.step * static_cast<double>(nulls[k] - nulls[k - 1]));
    if (mean_mm >= lo_mm && mean_mm <= hi_mm)
      ++st.lines_in_band;
    if (std::abs(mean_mm - 0.5 * (lo_mm + hi_mm)) < std::abs(best_gap - 0.5 * (lo_mm + hi_mm)))
      best_gap = mean_mm;
  }
  if (!all.empty()) {
    std::nth_element(all.begin(), all.begin() + all.size() / 2, all.end());
    st.median_spacing_mm = all[all.size() / 2];
  }
  st.best_line_spacing_mm = best_gap;
  return st;
}

void criterion_fading() {
  const Scene s = optimize_and_freeze(presets::table1_reflective(), target);
  SweepOptions o = SweepOptions::from(s, 0);
  const PowerGrid k2 = sweep_grid(s, fine_grid, o);
  o.max_order = 0;
  const PowerGrid k0 = sweep_grid(s, fine_grid, o);

  const double lambda_half_mm = 0.5e3 * s.wavelength();
  const NullStats st = null_spacing(k2, 1.0, 3, lambda_half_mm - 2.0, lambda_half_mm + 2.0);
  std::size_t differ = 0;
  for (std::size_t k = 0; k < k2.dbm.size(); ++k)
    differ += std::abs(k2.dbm[k] - k0.dbm[k]) >= 6.0;
  const double frac = static_cast<double>(differ) / k2.dbm.size();
  const bool pass = st.lines_in_band > 0 && frac >= 0.05;
  report(5, "small-scale fading", pass,
         fmt("%zu points; %d of %zu x-scan lines with mean null spacing in [%.1f, %.1f] mm (median adjacent spacing "
             "%.1f mm); K=2 vs K=0 differ by >= 6 dB at %.1f %% of points",
             k2.dbm.size(), st.lines_in_band, fine_grid.count_y(), lambda_half_mm - 2.0, lambda_half_mm + 2.0,
             st.median_spacing_mm, 100.0 * frac));
}

// ---------------------------------------------------------------------------
// 6. Property suites

void criterion_properties() {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> n;
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto unit = [&] { return normalized(Vec3{n(rng), n(rng), n(rng)}); };
  auto frame = [&] {
    const Vec3 z = unit();
    Vec3 up = unit();
    while (std::abs(dot(up, z)) > 0.9)
      up = unit();
    return Frame::from_z_up({u(rng), u(rng), u(rng)}, z, up);
  };
  std::vector<std::string> failed;

  // mirror involution
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Rect r(frame(), 1, 1);
    const Vec3 p{3 * u(rng), 3 * u(rng), 3 * u(rng)};
    worst = std::max(worst, norm(mirror_point(mirror_point(p, r), r) - p));
  }
  if (worst > 1e-12)
    failed.push_back("mirror involution");

  // specular law and unfolding on random two-bounce chains
  worst = 0.0;
  int chains = 0;
  for (int i = 0; i < 2000 && chains < 300; ++i) {
    const std::vector<Rect> planes{Rect(frame(), 3, 3), Rect(frame(), 3, 3)};
    const Vec3 a{u(rng), u(rng), u(rng)}, b{u(rng), u(rng), u(rng)};
    const auto chain = image_method_chain(a, b, planes);
    if (!chain)
      continue;
    ++chains;
    const Vec3 image = mirror_point(mirror_point(b, planes[1]), planes[0]);
    const double len = distance(a, (*chain)[0]) + distance((*chain)[0], (*chain)[1]) + distance((*chain)[1], b);
    worst = std::max(worst, std::abs(len - distance(a, image)));
    const Vec3 pts[4] = {a, (*chain)[0], (*chain)[1], b};
    for (int k = 0; k < 2; ++k) {
      const Vec3 din = normalized(pts[k + 1] - pts[k]), dout = normalized(pts[k + 2] - pts[k + 1]);
      worst = std::max(worst, norm(reflect_direction(din, planes[k].normal()) - dout));
    }
  }
  if (worst > 1e-9 || chains < 100)
    failed.push_back("specular/unfolding");

  // pattern range
  bool range_ok = true;
  for (int i = 0; i < 20000; ++i) {
    const double th = std::acos(u(rng));
    for (const AntennaPattern &p : {AntennaPattern{pattern::Directional{79.43}}, AntennaPattern{pattern::Monopole{0.25}},
                                    AntennaPattern{pattern::Monopole{0.5}}, AntennaPattern{pattern::Cosine{}}}) {
      const double f = eval_pattern(p, th);
      range_ok &= f >= 0.0 && f <= 1.0;
    }
  }
  if (!range_ok)
    failed.push_back("pattern range");

  // Fresnel passivity
  bool passive = true;
  std::uniform_real_distribution<double> er(1.0, 100.0), lg(-4.0, 8.0), ci(1e-4, 1.0);
  for (int i = 0; i < 20000; ++i) {
    const auto c = fresnel_coefficients(ci(rng), complex_permittivity({er(rng), std::pow(10.0, lg(rng))}, 23.8e9));
    passive &= std::abs(c.r_s) <= 1.0 + 1e-12 && std::abs(c.r_p) <= 1.0 + 1e-12;
  }
  if (!passive)
    failed.push_back("Fresnel passivity");

  // P_r linear in P_t
  {
    SceneConfig c = presets::table1_reflective_config();
    Scene s1 = optimize_and_freeze(build_scene(c), target);
    c.tx.power_dbm += 10.0;
    Scene s2 = build_scene(c);
    s2.ris = s1.ris;
    const PathFinder f1(s1), f2(s2);
    double w = 0.0;
    for (int i = 0; i < 50; ++i) {
      const Vec3 p{1.0 + 0.5 * std::abs(u(rng)), 0.5 + 0.4 * u(rng), 0.114};
      const double a = evaluate_point(f1, p, s1.solver.mode).watts, b = evaluate_point(f2, p, s2.solver.mode).watts;
      if (a > 0)
        w = std::max(w, std::abs(b / a - 10.0) / 10.0);
    }
    if (w > 1e-9)
      failed.push_back("P_t linearity");
  }

  // greedy monotonicity and gap to exhaustive search
  int within = 0;
  bool monotone = true;
  const std::vector<cplx> alphabet{{1.25, 0.0}, {0.0, 0.0}};
  for (int t = 0; t < 100; ++t) {
    const std::size_t M = 2 + rng() % 11;
    std::vector<FieldPhasor> c;
    for (std::size_t m = 0; m < M; ++m)
      c.push_back(FieldPhasor::along({0, 0, 1}, cplx(n(rng), n(rng))));
    const auto r = configure_greedy(alphabet, c);
    for (std::size_t k = 1; k < r.objective.size(); ++k)
      monotone &= r.objective[k] >= r.objective[k - 1];
    double best = 0.0;
    for (std::size_t mask = 0; mask < (std::size_t{1} << M); ++mask) {
      cplx sum = 0.0;
      for (std::size_t m = 0; m < M; ++m)
        if (mask >> m & 1)
          sum += 1.25 * c[m][2];
      best = std::max(best, std::abs(sum));
    }
    within += 20.0 * std::log10(best / r.objective.back()) <= 0.5;
  }
  if (!monotone || within < 90)
    failed.push_back("greedy");

  // bit-identical sweeps across worker counts
  {
    const Scene s = optimize_and_freeze(presets::table1_reflective(), target);
    const GridSpec g{1.0, 1.4, 0.1, 0.5, 0.114, 0.02};
    const PowerGrid a = sweep_grid(s, g, SweepOptions::from(s, 1));
    bool same = true;
    for (unsigned w : {2u, 4u, 7u})
      same &= sweep_grid(s, g, SweepOptions::from(s, w)).dbm == a.dbm;
    if (!same)
      failed.push_back("thread determinism");
  }

  std::string detail = "mirror involution, specular/unfolding (" + std::to_string(chains) +
                       " chains), pattern range, Fresnel passivity, P_t linearity, greedy (" + std::to_string(within) +
                       "/100 within 0.5 dB), thread determinism";
  if (!failed.empty()) {
    detail += "; failed:";
    for (const auto &f : failed)
      detail += " " + f;
  }
  report(6, "property suites", failed.empty(), detail);
}

} // namespace

int main() {
  const std::vector<std::function<void()>> criteria{criterion_anechoic, criterion_closed_form, criterion_friis,
                                                    criterion_path_counts, criterion_fading, criterion_properties};
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    try {
      criteria[i]();
    } catch (const std::exception &e) {
      report(static_cast<int>(i + 1), "error", false, e.what());
    }
  }
  std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
