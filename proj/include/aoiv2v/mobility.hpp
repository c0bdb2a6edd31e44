#pragma once

#include <deque>
#include <vector>

#include "aoiv2v/config.hpp"
#include "aoiv2v/rng.hpp"

namespace aoiv2v {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Vec2&, const Vec2&) = default;
};

enum class Heading { kPosX, kNegX, kPosY, kNegY };

inline bool is_horizontal(Heading h) { return h == Heading::kPosX || h == Heading::kNegX; }

/// Square torus with `road_count` roads per axis at multiples of the block
/// spacing. Each road carries two lanes, one per direction, offset from the
/// road center line by `lane_offset`:
///   +x at y = Y - o, -x at y = Y + o, +y at x = X + o, -y at x = X - o.
struct RoadGrid {
  double area_side = 250.0;
  double block_spacing = 62.5;
  double lane_offset = 2.0;
  int road_count = 4;

  static RoadGrid from_config(const SimConfig& cfg);

  double road_center(int road) const { return road * block_spacing; }
  /// Perpendicular coordinate of the lane used by `heading` on `road`.
  double lane_coordinate(int road, Heading heading) const;
  double wrap(double c) const;
  /// Minimum-image signed difference a - b on the torus.
  double delta(double a, double b) const;
  Vec2 delta(const Vec2& a, const Vec2& b) const;
};

struct VehicleState {
  Vec2 position;
  Heading heading = Heading::kPosX;
  int road = 0;  // index of the road the vehicle is driving on
  double speed = 0.0;
};

enum class Turn { kStraight, kLeft, kRight };

struct TurnRecord {
  int crossing_road = 0;  // perpendicular road whose center line was crossed
  Heading approach = Heading::kPosX;
  Turn turn = Turn::kStraight;
};

/// A transmitter-receiver pair. The receiver trails its transmitter on the
/// same path and replays the transmitter's turn decisions.
struct VuePair {
  int id = 0;
  VehicleState tx;
  VehicleState rx;
  std::deque<TurnRecord> pending_turns;
};

struct Topology {
  RoadGrid grid;
  std::vector<VuePair> pairs;
};

/// Places `num_pairs` pairs uniformly on random lanes with the receiver
/// `pair_distance_m` behind its transmitter. Throws std::invalid_argument
/// when num_pairs < 1.
Topology init_topology(const SimConfig& cfg, Rng& rng);

/// Advances every vehicle by speed * dt along its path. At each road crossing
/// a transmitter turns left, right or goes straight with equal probability.
void step_mobility(Topology& topo, double dt, Rng& rng);

/// Advances a single vehicle; `decide` is called at every crossing.
template <typename Decide>
void advance_vehicle(const RoadGrid& grid, VehicleState& v, double distance, Decide&& decide);

std::vector<Vec2> pair_midpoints(const RoadGrid& grid, const std::vector<VuePair>& pairs);

Heading turned(Heading h, Turn t);
double euclidean_distance(const RoadGrid& grid, const Vec2& a, const Vec2& b);

// ---------------------------------------------------------------------------

template <typename Decide>
void advance_vehicle(const RoadGrid& grid, VehicleState& v, double distance, Decide&& decide) {
  constexpr double kEps = 1e-9;
  while (distance > 0) {
    const bool horiz = is_horizontal(v.heading);
    const bool forward = v.heading == Heading::kPosX || v.heading == Heading::kPosY;
    const double along = horiz ? v.position.x : v.position.y;
    // Distance to the next perpendicular road center strictly ahead.
    double best = grid.area_side + 1.0;
    int next_road = 0;
    for (int r = 0; r < grid.road_count; ++r) {
      double gap = forward ? grid.road_center(r) - along : along - grid.road_center(r);
      gap = grid.wrap(gap);
      if (gap <= kEps) gap += grid.area_side;
      if (gap < best) {
        best = gap;
        next_road = r;
      }
    }
    if (distance < best) {
      const double moved = forward ? along + distance : along - distance;
      (horiz ? v.position.x : v.position.y) = grid.wrap(moved);
      return;
    }
    distance -= best;
    const double cross = grid.road_center(next_road);
    const Turn t = decide(TurnRecord{next_road, v.heading, Turn::kStraight});
    if (t == Turn::kStraight) {
      (horiz ? v.position.x : v.position.y) = grid.wrap(cross);
      continue;
    }
    const Heading nh = turned(v.heading, t);
    const double old_road_center = grid.road_center(v.road);
    v.heading = nh;
    v.road = next_road;
    if (is_horizontal(nh)) {
      v.position = {grid.wrap(old_road_center), grid.lane_coordinate(next_road, nh)};
    } else {
      v.position = {grid.lane_coordinate(next_road, nh), grid.wrap(old_road_center)};
    }
  }
}

}  // namespace aoiv2v
