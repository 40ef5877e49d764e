// SPDX-License-Identifier: Apache-2.0
//
// Path enumeration between TX, RIS elements and RX. Reflected RIS -> RX
// paths are built with the image method: candidate surface sequences are
// first checked once from the RIS center, then per element.

#pragma once

#include <algorithm>
#include <cstddef>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "ristrace/field.hpp"
#include "ristrace/geometry.hpp"
#include "ristrace/propagation.hpp"
#include "ristrace/scene.hpp"

namespace ristrace {

/// Reflective surface ids in bounce order.
using SurfaceSequence = std::vector<SurfaceId>;

/// Shortlex order: shorter sequences first, then lexicographic.
inline bool sequence_less(const SurfaceSequence &a, const SurfaceSequence &b) {
  if (a.size() != b.size())
    return a.size() < b.size();
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

/// All sequences of length 0..max_order over `surfaces` with no immediate
/// repetition, in shortlex order of the ids.
inline std::vector<SurfaceSequence> enumerate_sequences(std::span<const SurfaceId> surfaces, int max_order) {
  if (max_order < 0)
    throw std::invalid_argument("maximum reflection order must be non-negative");
  std::vector<SurfaceId> ids(surfaces.begin(), surfaces.end());
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());

  std::vector<SurfaceSequence> out{{}};
  std::size_t level_begin = 0;
  for (int order = 1; order <= max_order; ++order) {
    const std::size_t level_end = out.size();
    for (std::size_t i = level_begin; i < level_end; ++i)
      for (SurfaceId id : ids) {
        if (!out[i].empty() && out[i].back() == id)
          continue;
        SurfaceSequence next = out[i];
        next.push_back(id);
        out.push_back(std::move(next));
      }
    level_begin = level_end;
  }
  return out;
}

/// Bounce points of the specular path start -> seq -> end, or nullopt when
/// a bounce falls outside its finite rectangle.
inline std::optional<std::vector<Vec3>> image_method_chain(const Vec3 &start, const Vec3 &end,
                                                           std::span<const Rect> planes) {
  const std::size_t K = planes.size();
  std::vector<Vec3> images(K);
  Vec3 img = end;
  for (std::size_t k = K; k-- > 0;) {
    img = mirror_point(img, planes[k]);
    images[k] = img;
  }
  std::vector<Vec3> bounces;
  bounces.reserve(K);
  Vec3 p = start;
  for (std::size_t k = 0; k < K; ++k) {
    const Vec3 d = images[k] - p;
    const double len = norm(d);
    if (len == 0.0)
      return std::nullopt;
    const auto hit = ray_rect_intersect(p, d / len, planes[k]);
    if (!hit || hit->distance >= len)
      return std::nullopt;
    bounces.push_back(hit->point);
    p = hit->point;
  }
  return bounces;
}

struct PropagationPath {
  std::optional<std::size_t> element; // nullopt: direct TX -> RX path
  SurfaceSequence sequence;
  std::vector<Vec3> points;           // TX, [element], bounces..., RX

  std::size_t hop_count() const { return points.size() - 1; }
  double hop_length(std::size_t i) const { return distance(points[i], points[i + 1]); }

  double total_length() const {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < points.size(); ++i)
      s += hop_length(i);
    return s;
  }

  /// Unfolded length from the RIS element to the receiver.
  double post_ris_length() const {
    double s = 0.0;
    for (std::size_t i = 1; i + 1 < points.size(); ++i)
      s += hop_length(i);
    return s;
  }

  bool reflected() const { return !sequence.empty(); }

  friend bool operator==(const PropagationPath &, const PropagationPath &) = default;
};

/// Ordering key used for superposition: (element, sequence).
inline bool path_less(const PropagationPath &a, const PropagationPath &b) {
  if (a.element != b.element)
    return a.element < b.element;
  return sequence_less(a.sequence, b.sequence);
}

/// Precomputed blocking lists and candidate sequences for one scene.
class PathFinder {
public:
  PathFinder(const Scene &scene, int max_order, bool center_prune)
      : scene_(scene), max_order_(max_order), center_prune_(center_prune) {
    blocker_of_.assign(scene.surfaces.size(), npos);
    for (SurfaceId i = 0; i < scene.surfaces.size(); ++i)
      if (scene.surfaces[i].blocking) {
        blocker_of_[i] = blockers_.size();
        blockers_.push_back(scene.surfaces[i].rect);
      }
    if (scene.ris) {
      panel_blocker_ = blockers_.size();
      blockers_.push_back(scene.ris->footprint());
    }
    sequences_ = enumerate_sequences(scene.reflective_ids(), max_order);
  }

  explicit PathFinder(const Scene &scene)
      : PathFinder(scene, scene.solver.max_order, scene.solver.center_prune) {}

  const Scene &scene() const { return scene_; }
  const std::vector<SurfaceSequence> &sequences() const { return sequences_; }
  std::span<const Rect> blockers() const { return blockers_; }

  /// Coarse check of one sequence from the RIS center to `rx`.
  bool prune_by_center(const Vec3 &rx, const SurfaceSequence &seq) const {
    if (!scene_.ris)
      return false;
    return trace_from_panel(scene_.ris->center(), rx, seq).has_value();
  }

  std::vector<SurfaceSequence> center_valid_sequences(const Vec3 &rx) const {
    std::vector<SurfaceSequence> out;
    for (const auto &seq : sequences_)
      if (!center_prune_ || prune_by_center(rx, seq))
        out.push_back(seq);
    return out;
  }

  /// Whether `tx` illuminates element `m` directly and from the front.
  bool illuminated(std::size_t m) const {
    const auto &e = scene_.ris->elements()[m];
    const Vec3 &tx = scene_.tx.frame.origin();
    if (dot(tx - e.center(), e.normal()) <= 0.0)
      return false;
    const SurfaceId ex[] = {panel_blocker_};
    return !segment_blocked(tx, e.center(), blockers_, ex);
  }

  /// All valid paths to `rx`, ordered by (element, sequence).
  std::vector<PropagationPath> find_paths(const Vec3 &rx) const {
    std::vector<PropagationPath> paths;
    const Vec3 &tx = scene_.tx.frame.origin();
    if (scene_.solver.line_of_sight && distance(tx, rx) > 0.0 && !segment_blocked(tx, rx, blockers_))
      paths.push_back({std::nullopt, {}, {tx, rx}});
    if (!scene_.ris)
      return paths;
    const auto candidates = center_valid_sequences(rx);
    const auto &elements = scene_.ris->elements();
    for (std::size_t m = 0; m < elements.size(); ++m) {
      if (!illuminated(m))
        continue;
      const Vec3 &c = elements[m].center();
      for (const auto &seq : candidates) {
        auto bounces = trace_from_panel(c, rx, seq);
        if (!bounces)
          continue;
        PropagationPath p{m, seq, {}};
        p.points.reserve(bounces->size() + 3);
        p.points.push_back(tx);
        p.points.push_back(c);
        p.points.insert(p.points.end(), bounces->begin(), bounces->end());
        p.points.push_back(rx);
        paths.push_back(std::move(p));
      }
    }
    return paths;
  }

private:
  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

  /// Image-method chain from a point on the panel, validated hop by hop:
  /// the first hop leaves the panel front, every bounce hits the front of
  /// its surface and no hop is blocked by anything but its own endpoints.
  std::optional<std::vector<Vec3>> trace_from_panel(const Vec3 &start, const Vec3 &rx,
                                                    const SurfaceSequence &seq) const {
    std::vector<Rect> planes;
    planes.reserve(seq.size());
    for (SurfaceId id : seq)
      planes.push_back(scene_.surfaces[id].rect);
    auto bounces = image_method_chain(start, rx, planes);
    if (!bounces)
      return std::nullopt;

    Vec3 prev = start;
    for (std::size_t k = 0; k <= seq.size(); ++k) {
      const Vec3 next = k < seq.size() ? (*bounces)[k] : rx;
      const Vec3 d = next - prev;
      if (norm(d) <= ray_epsilon)
        return std::nullopt;
      if (k == 0 && dot(d, scene_.ris->normal()) <= 0.0)
        return std::nullopt;
      if (k < seq.size() && dot(d, planes[k].normal()) >= 0.0)
        return std::nullopt;
      SurfaceId ex[2];
      std::size_t n_ex = 0;
      const SurfaceId from = k == 0 ? panel_blocker_ : blocker_of_[seq[k - 1]];
      const SurfaceId to = k < seq.size() ? blocker_of_[seq[k]] : npos;
      if (from != npos)
        ex[n_ex++] = from;
      if (to != npos)
        ex[n_ex++] = to;
      if (segment_blocked(prev, next, blockers_, std::span<const SurfaceId>(ex, n_ex)))
        return std::nullopt;
      prev = next;
    }
    return bounces;
  }

  const Scene &scene_;
  int max_order_;
  bool center_prune_;
  std::vector<Rect> blockers_;
  std::vector<std::size_t> blocker_of_;
  std::size_t panel_blocker_ = npos;
  std::vector<SurfaceSequence> sequences_;
};

inline std::vector<PropagationPath> find_paths(const Scene &scene, const Vec3 &rx, int max_order,
                                               bool center_prune = true) {
  return PathFinder(scene, max_order, center_prune).find_paths(rx);
}

/// Field of a RIS path evaluated with `element` in place of the panel's
/// element (used to probe unit reflection coefficients).
///
/// Launch field -> element (d_t) -> Fresnel at every bounce -> receiver,
/// with spreading and phase over the unfolded post-RIS length.
inline FieldPhasor ris_path_field(const PropagationPath &path, const Scene &scene, const RisElement &element,
                                  const Antenna &rx, PolarizationMode mode) {
  const double lambda = scene.wavelength();
  const auto &pts = path.points;
  if (element.gamma == cplx(0.0, 0.0))
    return {};

  const Vec3 to_element = pts[1] - pts[0];
  const double d_t = norm(to_element);
  const Vec3 incoming = to_element / d_t;
  const Vec3 outgoing = normalized(pts[2] - pts[1]);
  FieldPhasor e = tx_launch_field(scene.tx, incoming, mode);
  e = combined_element_field(e, *scene.ris, element, ElementHop{incoming, outgoing, d_t}, lambda, mode);
  if (e.is_zero())
    return e;

  Vec3 dir = outgoing;
  for (std::size_t k = 0; k < path.sequence.size(); ++k) {
    const Surface &s = scene.surfaces[path.sequence[k]];
    const auto refl = fresnel_reflect(e, dir, s.rect, s.material, scene.radio.frequency, mode);
    e = refl.field;
    dir = normalized(pts[k + 3] - pts[k + 2]);
  }
  return field_at_rx(e, path.post_ris_length(), rx, dir, lambda, mode);
}

/// Coherent field contributed by one path at `rx`.
inline FieldPhasor path_field(const PropagationPath &path, const Scene &scene, const Antenna &rx,
                              PolarizationMode mode) {
  if (!path.element) {
    const Vec3 d = path.points[1] - path.points[0];
    const double len = norm(d);
    const Vec3 dir = d / len;
    return field_at_rx(tx_launch_field(scene.tx, dir, mode), len, rx, dir, scene.wavelength(), mode);
  }
  return ris_path_field(path, scene, scene.ris->elements()[*path.element], rx, mode);
}

/// Path dump: one line per path,
///   element sequence points total_length_m power_dbm
/// element is "los" for the direct path, sequence is '-' when empty or the
/// surface ids joined by ','; points are "x,y,z" joined by ';'.
inline void write_path_dump(std::ostream &os, const std::vector<PropagationPath> &paths, const Scene &scene,
                            const Antenna &rx, PolarizationMode mode) {
  os << "# ristrace paths v1\n# element sequence points total_length_m power_dbm\n";
  const auto old_prec = os.precision(9);
  for (const auto &p : paths) {
    if (p.element)
      os << *p.element;
    else
      os << "los";
    os << ' ';
    if (p.sequence.empty())
      os << '-';
    for (std::size_t k = 0; k < p.sequence.size(); ++k)
      os << (k ? "," : "") << p.sequence[k];
    os << ' ';
    for (std::size_t k = 0; k < p.points.size(); ++k)
      os << (k ? ";" : "") << p.points[k].x << ',' << p.points[k].y << ',' << p.points[k].z;
    os << ' ' << p.total_length() << ' ' << received_power(path_field(p, scene, rx, mode)).dbm << '\n';
  }
  os.precision(old_prec);
}

} // namespace ristrace
