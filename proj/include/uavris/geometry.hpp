#pragma once

#include <stdexcept>
#include <utility>
#include <vector>

#include "uavris/core.hpp"

namespace uavris {

struct Position3D {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

inline bool is_finite(const Position3D& p) {
  return std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.z);
}

inline double distance(const Position3D& a, const Position3D& b) {
  double dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

struct Arena {
  double width = 20.0;   // meters, x in [0, width]
  double height = 20.0;  // meters, y in [0, height]
};

inline Position3D clamp_to_arena(Position3D p, const Arena& arena) {
  p.x = std::min(std::max(p.x, 0.0), arena.width);
  p.y = std::min(std::max(p.y, 0.0), arena.height);
  return p;
}

/// Geometry of one scene: BS at the origin, K users on the ground, and the
/// M×N RIS element grid hanging under the UAV. Element positions are always
/// uav_center plus fixed planar offsets, so moving the UAV moves every element.
struct Layout {
  Position3D bs{};  // origin by convention
  Position3D uav_center{};
  std::vector<Position3D> ris_elements;
  std::vector<Position3D> users;
  int ris_rows = 0;
  int ris_cols = 0;
  double element_spacing = 0.05;  // meters
  double uav_altitude = 20.0;     // meters

  int element_count() const { return ris_rows * ris_cols; }

  void place_uav(double x, double y) {
    uav_center = {x, y, uav_altitude};
    ris_elements.resize(static_cast<std::size_t>(ris_rows) * ris_cols);
    const double x0 = x - 0.5 * (ris_rows - 1) * element_spacing;
    const double y0 = y - 0.5 * (ris_cols - 1) * element_spacing;
    for (int i = 0; i < ris_rows; ++i) {
      for (int j = 0; j < ris_cols; ++j) {
        ris_elements[static_cast<std::size_t>(i) * ris_cols + j] = {
            x0 + i * element_spacing, y0 + j * element_spacing, uav_altitude};
      }
    }
  }

  static Layout make(int rows, int cols, double spacing, double altitude,
                     std::vector<Position3D> users_in, double uav_x, double uav_y) {
    if (rows <= 0 || cols <= 0) throw std::invalid_argument("Layout: RIS grid must be non-empty");
    if (altitude <= 0) throw std::invalid_argument("Layout: uav_altitude must be positive");
    Layout l;
    l.ris_rows = rows;
    l.ris_cols = cols;
    l.element_spacing = spacing;
    l.uav_altitude = altitude;
    l.users = std::move(users_in);
    for (const auto& u : l.users) {
      if (!is_finite(u) || u.z < 0) throw std::invalid_argument("Layout: invalid user position");
    }
    l.place_uav(uav_x, uav_y);
    return l;
  }
};

/// Random-waypoint user motion with a per-slot speed cap. Each user walks
/// toward its private waypoint and draws a fresh one on arrival; positions are
/// clamped to the arena after every step. Owns its RNG stream so trajectories
/// are reproducible independently of channel sampling.
struct MobilityModel {
  Arena arena{};
  double max_speed = 1.0;  // meters per slot
  Rng rng{0};
  std::vector<std::pair<double, double>> waypoints;

  MobilityModel() = default;
  MobilityModel(Arena a, double speed, std::uint64_t seed)
      : arena(a), max_speed(speed), rng(seed) {
    if (speed < 0) throw std::invalid_argument("MobilityModel: max_speed must be >= 0");
  }

  std::pair<double, double> draw_waypoint() {
    return {rng.uniform(0.0, arena.width), rng.uniform(0.0, arena.height)};
  }
};

/// Advances every user by one bounded random-waypoint step. User count and
/// z-coordinates are preserved.
inline Layout step_users(const Layout& layout, MobilityModel& mobility) {
  Layout out = layout;
  if (mobility.waypoints.size() != layout.users.size()) {
    mobility.waypoints.resize(layout.users.size());
    for (auto& w : mobility.waypoints) w = mobility.draw_waypoint();
  }
  for (std::size_t k = 0; k < out.users.size(); ++k) {
    auto& u = out.users[k];
    auto& w = mobility.waypoints[k];
    double dx = w.first - u.x, dy = w.second - u.y;
    double dist = std::sqrt(dx * dx + dy * dy);
    if (dist <= mobility.max_speed) {
      u.x = w.first;
      u.y = w.second;
      w = mobility.draw_waypoint();
    } else if (dist > 0) {
      u.x += dx / dist * mobility.max_speed;
      u.y += dy / dist * mobility.max_speed;
    }
    Position3D clamped = clamp_to_arena(u, mobility.arena);
    u.x = clamped.x;
    u.y = clamped.y;
  }
  return out;
}

inline double kmeans_objective(const std::vector<std::pair<double, double>>& points,
                               std::pair<double, double> center) {
  double s = 0.0;
  for (const auto& p : points) {
    double dx = p.first - center.first, dy = p.second - center.second;
    s += dx * dx + dy * dy;
  }
  return s;
}

/// Horizontal UAV placement minimizing the sum of squared distances to the
/// users. Runs the general Lloyd iteration with a single cluster, whose fixed
/// point is the centroid.
inline std::pair<double, double> kmeans_place_uav(
    const std::vector<std::pair<double, double>>& user_positions, int iterations) {
  if (user_positions.empty()) throw std::invalid_argument("kmeans_place_uav: no users");
  std::pair<double, double> center = user_positions.front();
  for (int it = 0; it < std::max(iterations, 1); ++it) {
    // single cluster: every point is assigned to the one centroid
    double sx = 0.0, sy = 0.0;
    for (const auto& p : user_positions) {
      sx += p.first;
      sy += p.second;
    }
    std::pair<double, double> next{sx / user_positions.size(), sy / user_positions.size()};
    if (next == center) break;
    center = next;
  }
  return center;
}

/// Elevation angle in degrees of the BS→element path, (0, 90] for elements
/// above the BS plane.
inline double elevation_angle_deg(const Position3D& bs, const Position3D& element) {
  double dx = element.x - bs.x, dy = element.y - bs.y, dz = element.z - bs.z;
  double r = std::sqrt(dx * dx + dy * dy + dz * dz);
  if (r == 0.0) throw std::invalid_argument("elevation_angle: coincident points");
  return 180.0 / kPi * std::asin(dz / r);
}

}  // namespace uavris
