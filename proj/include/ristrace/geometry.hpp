// SPDX-License-Identifier: Apache-2.0
//
// Vector math, orientation frames, angle conventions and the ray/rectangle
// primitives used by the path finder.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>

namespace ristrace {

inline constexpr double pi = std::numbers::pi;

/// Self-intersection offset applied at reflection points [m].
inline constexpr double ray_epsilon = 1e-6;

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Vec3 &operator+=(const Vec3 &o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  constexpr Vec3 &operator-=(const Vec3 &o) {
    x -= o.x;
    y -= o.y;
    z -= o.z;
    return *this;
  }
  constexpr Vec3 &operator*=(double s) {
    x *= s;
    y *= s;
    z *= s;
    return *this;
  }

  friend constexpr bool operator==(const Vec3 &, const Vec3 &) = default;
};

constexpr Vec3 operator+(Vec3 a, const Vec3 &b) { return a += b; }
constexpr Vec3 operator-(Vec3 a, const Vec3 &b) { return a -= b; }
constexpr Vec3 operator-(const Vec3 &a) { return {-a.x, -a.y, -a.z}; }
constexpr Vec3 operator*(Vec3 a, double s) { return a *= s; }
constexpr Vec3 operator*(double s, Vec3 a) { return a *= s; }
constexpr Vec3 operator/(const Vec3 &a, double s) { return {a.x / s, a.y / s, a.z / s}; }

constexpr double dot(const Vec3 &a, const Vec3 &b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

constexpr Vec3 cross(const Vec3 &a, const Vec3 &b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm(const Vec3 &a) { return std::sqrt(dot(a, a)); }
inline double distance(const Vec3 &a, const Vec3 &b) { return norm(b - a); }

inline Vec3 normalized(const Vec3 &a) {
  const double n = norm(a);
  if (n == 0.0)
    throw std::invalid_argument("cannot normalize a zero-length vector");
  return a / n;
}

inline bool is_unit(const Vec3 &a, double tol = 1e-9) { return std::abs(norm(a) - 1.0) < tol; }

/// Orthonormal right-handed frame. Columns x, y, z are the local axes in
/// world coordinates.
class Frame {
public:
  Frame() = default;

  /// Validates orthonormality and handedness to 1e-9.
  Frame(const Vec3 &origin, const Vec3 &x_axis, const Vec3 &y_axis, const Vec3 &z_axis)
      : origin_(origin), x_(x_axis), y_(y_axis), z_(z_axis) {
    constexpr double tol = 1e-9;
    if (!is_unit(x_) || !is_unit(y_) || !is_unit(z_))
      throw std::invalid_argument("frame axes must be unit vectors");
    if (std::abs(dot(x_, y_)) >= tol || std::abs(dot(x_, z_)) >= tol || std::abs(dot(y_, z_)) >= tol)
      throw std::invalid_argument("frame axes must be mutually orthogonal");
    if (std::abs(dot(cross(x_, y_), z_) - 1.0) >= tol)
      throw std::invalid_argument("frame must be right-handed");
  }

  /// Frame with the given z axis; y is `up` made orthogonal to z.
  static Frame from_z_up(const Vec3 &origin, const Vec3 &z_axis, const Vec3 &up) {
    const Vec3 z = normalized(z_axis);
    const Vec3 y = normalized(up - dot(up, z) * z);
    return Frame(origin, cross(y, z), y, z);
  }

  static Frame world(const Vec3 &origin = {}) { return Frame(origin, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}); }

  const Vec3 &origin() const { return origin_; }
  const Vec3 &x_axis() const { return x_; }
  const Vec3 &y_axis() const { return y_; }
  const Vec3 &z_axis() const { return z_; }

  Frame translated_to(const Vec3 &origin) const {
    Frame f = *this;
    f.origin_ = origin;
    return f;
  }

  Vec3 to_world_direction(const Vec3 &local) const { return local.x * x_ + local.y * y_ + local.z * z_; }
  Vec3 to_local_direction(const Vec3 &world) const { return {dot(world, x_), dot(world, y_), dot(world, z_)}; }

  friend bool operator==(const Frame &, const Frame &) = default;

private:
  Vec3 origin_{};
  Vec3 x_{1, 0, 0};
  Vec3 y_{0, 1, 0};
  Vec3 z_{0, 0, 1};
};

/// Azimuth from the frame x axis, elevation from the frame z axis.
struct Angles {
  double phi = 0.0;
  double theta = 0.0;
};

inline Vec3 spherical_to_cartesian(double r, double phi, double theta, const Frame &frame) {
  const double st = std::sin(theta);
  const Vec3 local{st * std::cos(phi), st * std::sin(phi), std::cos(theta)};
  return frame.origin() + r * frame.to_world_direction(local);
}

/// Angles of a unit direction in `frame`. At the poles phi is 0.
inline Angles angles_in_frame(const Frame &frame, const Vec3 &direction) {
  const Vec3 l = frame.to_local_direction(direction);
  const double theta = std::acos(std::clamp(l.z, -1.0, 1.0));
  if (l.x == 0.0 && l.y == 0.0)
    return {0.0, theta};
  double phi = std::atan2(l.y, l.x);
  if (phi == -pi)
    phi = pi;
  return {phi, theta};
}

/// Finite rectangle. The frame z axis is the surface normal; half extents
/// run along the frame x and y axes.
class Rect {
public:
  Rect() = default;
  Rect(const Frame &frame, double half_x, double half_y) : frame_(frame), hx_(half_x), hy_(half_y) {
    if (!(hx_ > 0.0) || !(hy_ > 0.0))
      throw std::invalid_argument("rectangle half extents must be positive");
  }

  /// `up` gives the in-plane y axis; width runs along x, height along y.
  static Rect from_center(const Vec3 &center, const Vec3 &normal, const Vec3 &up, double width, double height) {
    return Rect(Frame::from_z_up(center, normal, up), 0.5 * width, 0.5 * height);
  }

  const Frame &frame() const { return frame_; }
  const Vec3 &center() const { return frame_.origin(); }
  const Vec3 &normal() const { return frame_.z_axis(); }
  double half_x() const { return hx_; }
  double half_y() const { return hy_; }

  /// In-plane bounds check of a point assumed to lie on the plane.
  bool contains_in_plane(const Vec3 &p, double slack = 1e-12) const {
    const Vec3 d = p - center();
    return std::abs(dot(d, frame_.x_axis())) <= hx_ + slack && std::abs(dot(d, frame_.y_axis())) <= hy_ + slack;
  }

  friend bool operator==(const Rect &, const Rect &) = default;

private:
  Frame frame_{};
  double hx_ = 0.5;
  double hy_ = 0.5;
};

/// Reflection of `p` across the infinite plane containing `rect`.
inline Vec3 mirror_point(const Vec3 &p, const Rect &rect) {
  const Vec3 &n = rect.normal();
  return p - 2.0 * dot(p - rect.center(), n) * n;
}

/// Reflected direction for a specular bounce off a plane with normal `n`.
inline Vec3 reflect_direction(const Vec3 &d, const Vec3 &n) { return d - 2.0 * dot(d, n) * n; }

struct RayHit {
  Vec3 point;
  double distance = 0.0;
};

inline std::optional<RayHit> ray_rect_intersect(const Vec3 &origin, const Vec3 &direction, const Rect &rect) {
  const double denom = dot(direction, rect.normal());
  if (std::abs(denom) < 1e-12)
    return std::nullopt;
  const double t = dot(rect.center() - origin, rect.normal()) / denom;
  if (!(t > ray_epsilon))
    return std::nullopt;
  const Vec3 p = origin + t * direction;
  if (!rect.contains_in_plane(p))
    return std::nullopt;
  return RayHit{p, t};
}

/// Identifies surfaces by their index in the list passed to segment_blocked.
using SurfaceId = std::size_t;

/// True if any surface not in `excluded` cuts the open segment (a, b).
inline bool segment_blocked(const Vec3 &a, const Vec3 &b, std::span<const Rect> surfaces,
                            std::span<const SurfaceId> excluded = {}) {
  const Vec3 d = b - a;
  const double len = norm(d);
  if (len == 0.0)
    throw std::invalid_argument("segment endpoints coincide");
  const Vec3 dir = d / len;
  for (SurfaceId id = 0; id < surfaces.size(); ++id) {
    if (std::find(excluded.begin(), excluded.end(), id) != excluded.end())
      continue;
    const auto hit = ray_rect_intersect(a, dir, surfaces[id]);
    if (hit && hit->distance < len - ray_epsilon)
      return true;
  }
  return false;
}

inline double deg_to_rad(double deg) { return deg * pi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / pi; }

} // namespace ristrace
