#include "aoiv2v/mobility.hpp"

#include <cmath>
#include <stdexcept>

namespace aoiv2v {

RoadGrid RoadGrid::from_config(const SimConfig& cfg) {
  RoadGrid g;
  g.area_side = cfg.area_side_m;
  g.block_spacing = cfg.block_spacing_m;
  g.lane_offset = cfg.lane_offset_m;
  g.road_count = static_cast<int>(std::lround(cfg.area_side_m / cfg.block_spacing_m));
  return g;
}

double RoadGrid::lane_coordinate(int road, Heading heading) const {
  const double c = road_center(road);
  switch (heading) {
    case Heading::kPosX: return wrap(c - lane_offset);
    case Heading::kNegX: return wrap(c + lane_offset);
    case Heading::kPosY: return wrap(c + lane_offset);
    case Heading::kNegY: return wrap(c - lane_offset);
  }
  return c;
}

double RoadGrid::wrap(double c) const {
  double r = std::fmod(c, area_side);
  if (r < 0) r += area_side;
  if (r >= area_side) r -= area_side;
  return r;
}

double RoadGrid::delta(double a, double b) const {
  double d = std::fmod(a - b, area_side);
  if (d > area_side / 2) d -= area_side;
  if (d < -area_side / 2) d += area_side;
  return d;
}

Vec2 RoadGrid::delta(const Vec2& a, const Vec2& b) const {
  return {delta(a.x, b.x), delta(a.y, b.y)};
}

double euclidean_distance(const RoadGrid& grid, const Vec2& a, const Vec2& b) {
  const Vec2 d = grid.delta(a, b);
  return std::hypot(d.x, d.y);
}

Heading turned(Heading h, Turn t) {
  if (t == Turn::kStraight) return h;
  const bool left = t == Turn::kLeft;
  switch (h) {
    case Heading::kPosX: return left ? Heading::kPosY : Heading::kNegY;
    case Heading::kNegX: return left ? Heading::kNegY : Heading::kPosY;
    case Heading::kPosY: return left ? Heading::kNegX : Heading::kPosX;
    case Heading::kNegY: return left ? Heading::kPosX : Heading::kNegX;
  }
  return h;
}

Topology init_topology(const SimConfig& cfg, Rng& rng) {
  if (cfg.num_pairs < 1) throw std::invalid_argument("init_topology: num_pairs must be >= 1");
  Topology topo;
  topo.grid = RoadGrid::from_config(cfg);
  const RoadGrid& g = topo.grid;
  std::uniform_int_distribution<int> heading_dist(0, 3);
  std::uniform_int_distribution<int> road_dist(0, g.road_count - 1);
  std::uniform_real_distribution<double> along_dist(0.0, g.area_side);

  topo.pairs.reserve(static_cast<std::size_t>(cfg.num_pairs));
  for (int k = 0; k < cfg.num_pairs; ++k) {
    VuePair p;
    p.id = k;
    const auto heading = static_cast<Heading>(heading_dist(rng));
    const int road = road_dist(rng);
    const double along = along_dist(rng);
    const double lane = g.lane_coordinate(road, heading);
    const bool forward = heading == Heading::kPosX || heading == Heading::kPosY;
    const double behind = g.wrap(forward ? along - cfg.pair_distance_m
                                         : along + cfg.pair_distance_m);
    p.tx = {is_horizontal(heading) ? Vec2{along, lane} : Vec2{lane, along}, heading, road,
            cfg.speed_mps()};
    p.rx = {is_horizontal(heading) ? Vec2{behind, lane} : Vec2{lane, behind}, heading, road,
            cfg.speed_mps()};
    topo.pairs.push_back(std::move(p));
  }
  return topo;
}

void step_mobility(Topology& topo, double dt, Rng& rng) {
  if (dt <= 0) return;
  std::uniform_int_distribution<int> turn_dist(0, 2);
  for (auto& p : topo.pairs) {
    advance_vehicle(topo.grid, p.tx, p.tx.speed * dt, [&](TurnRecord rec) {
      rec.turn = static_cast<Turn>(turn_dist(rng));
      p.pending_turns.push_back(rec);
      return rec.turn;
    });
    advance_vehicle(topo.grid, p.rx, p.rx.speed * dt, [&](const TurnRecord& rec) {
      if (!p.pending_turns.empty() &&
          p.pending_turns.front().crossing_road == rec.crossing_road &&
          p.pending_turns.front().approach == rec.approach) {
        const Turn t = p.pending_turns.front().turn;
        p.pending_turns.pop_front();
        return t;
      }
      return Turn::kStraight;
    });
  }
}

std::vector<Vec2> pair_midpoints(const RoadGrid& grid, const std::vector<VuePair>& pairs) {
  std::vector<Vec2> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) {
    const Vec2 d = grid.delta(p.tx.position, p.rx.position);
    out.push_back({grid.wrap(p.rx.position.x + d.x / 2), grid.wrap(p.rx.position.y + d.y / 2)});
  }
  return out;
}

}  // namespace aoiv2v
