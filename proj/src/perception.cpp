#include "gridbench/perception.hpp"

#include <algorithm>
#include <cmath>

namespace gridbench {

const VisibleInstance* Observation::nearest_of(int category) const {
  const VisibleInstance* best = nullptr;
  for (const auto& vi : instances) {
    if (vi.category != category) continue;
    if (!best || vi.horizontal_m < best->horizontal_m ||
        (vi.horizontal_m == best->horizontal_m &&
         row_major_less(vi.cell, best->cell)))
      best = &vi;
  }
  return best;
}

namespace {

// Voxel walk from `pos` along `dir`, marking cells visible until the first
// obstacle (inclusive) or the range runs out.
void cast_ray(const WorldGrid& world, double px, double py, double dx,
              double dy, double range, std::vector<uint8_t>& mask) {
  int cx = static_cast<int>(std::floor(px / kCellSize));
  int cy = static_cast<int>(std::floor(py / kCellSize));
  const int step_x = dx > 0 ? 1 : -1;
  const int step_y = dy > 0 ? 1 : -1;
  const double inv_dx = std::abs(dx) < 1e-12 ? 1e18 : 1.0 / dx;
  const double inv_dy = std::abs(dy) < 1e-12 ? 1e18 : 1.0 / dy;
  double t_max_x = ((cx + (step_x > 0 ? 1 : 0)) * kCellSize - px) * inv_dx;
  double t_max_y = ((cy + (step_y > 0 ? 1 : 0)) * kCellSize - py) * inv_dy;
  const double t_delta_x = kCellSize * std::abs(inv_dx);
  const double t_delta_y = kCellSize * std::abs(inv_dy);

  double t = 0;
  while (t <= range) {
    const Cell c{cx, cy};
    if (!world.in_bounds(c)) return;
    mask[static_cast<size_t>(cy) * world.width + cx] = 1;
    if (world.obstacle_at(c)) return;
    if (t_max_x < t_max_y) {
      t = t_max_x;
      t_max_x += t_delta_x;
      cx += step_x;
    } else {
      t = t_max_y;
      t_max_y += t_delta_y;
      cy += step_y;
    }
  }
}

}  // namespace

Observation observe(const WorldGrid& world, const AgentPose& pose,
                    const SensorConfig& sensor) {
  Observation obs;
  obs.width = world.width;
  obs.height = world.height;
  obs.pose = pose;
  obs.visible_mask.assign(static_cast<size_t>(world.width) * world.height, 0);

  const double half_fov = sensor.fov_deg / 2.0;
  const double range_cells = sensor.max_range / kCellSize;
  // Two rays per perimeter cell of the swept arc keeps coverage dense.
  const int rays =
      std::max(3, static_cast<int>(std::ceil(deg_to_rad(sensor.fov_deg) *
                                             range_cells * 2.0)) + 1);
  for (int i = 0; i < rays; ++i) {
    const double a_deg = pose.heading_deg - half_fov +
                         sensor.fov_deg * i / (rays - 1);
    const double a = deg_to_rad(a_deg);
    cast_ray(world, pose.x, pose.y, std::cos(a), std::sin(a),
             sensor.max_range, obs.visible_mask);
  }
  obs.visible_mask[world.index(pose.cell())] = 1;

  // Enforce the advertised envelope exactly: center within range and FOV.
  for (int y = 0; y < world.height; ++y) {
    for (int x = 0; x < world.width; ++x) {
      const size_t idx = static_cast<size_t>(y) * world.width + x;
      if (!obs.visible_mask[idx]) continue;
      const double dx = cell_center(x) - pose.x;
      const double dy = cell_center(y) - pose.y;
      const double d = std::sqrt(dx * dx + dy * dy);
      const bool self = (Cell{x, y} == pose.cell());
      if (!self &&
          (d > sensor.max_range + kDistanceEps ||
           std::abs(relative_bearing_deg(dx, dy, pose.heading_deg)) >
               half_fov + kDistanceEps)) {
        obs.visible_mask[idx] = 0;
        continue;
      }
      obs.cells.push_back(CellObs{Cell{x, y}, world.obstacle_at(Cell{x, y})});
    }
  }

  const double pitch_cos = std::cos(deg_to_rad(pose.pitch_deg));
  auto add_instance = [&](int id, bool is_landmark, int category,
                          std::vector<Cell> cells, bool open, bool toggled) {
    VisibleInstance vi;
    vi.id = id;
    vi.is_landmark = is_landmark;
    vi.category = category;
    vi.cells = std::move(cells);
    vi.cell = vi.cells.front();
    double best = 1e18;
    for (const auto& c : vi.cells) {
      const double dx = cell_center(c.x) - pose.x;
      const double dy = cell_center(c.y) - pose.y;
      const double d = std::sqrt(dx * dx + dy * dy);
      if (d < best - kDistanceEps ||
          (std::abs(d - best) <= kDistanceEps && row_major_less(c, vi.cell))) {
        best = d;
        vi.cell = c;
      }
    }
    vi.horizontal_m = best;
    vi.depth_m = best / pitch_cos;
    vi.bearing_deg = relative_bearing_deg(cell_center(vi.cell.x) - pose.x,
                                          cell_center(vi.cell.y) - pose.y,
                                          pose.heading_deg);
    vi.open = open;
    vi.toggled_on = toggled;
    obs.instances.push_back(std::move(vi));
  };

  for (const auto& lm : world.landmarks) {
    std::vector<Cell> cells;
    for (int y = lm.y; y < lm.y + lm.h; ++y)
      for (int x = lm.x; x < lm.x + lm.w; ++x)
        if (obs.visible_mask[static_cast<size_t>(y) * world.width + x])
          cells.push_back(Cell{x, y});
    if (!cells.empty())
      add_instance(lm.id, true, lm.category, std::move(cells), lm.open,
                   lm.toggled_on);
  }
  for (const auto& o : world.objects) {
    if (o.held || world.concealed(o)) continue;
    const Cell c = world.object_cell(o);
    if (obs.cell_visible(c))
      add_instance(o.id, false, o.category, {c}, false, o.toggled_on);
  }
  return obs;
}

// ---- Semantic map -----------------------------------------------------------

bool SemanticMap::nearest_mark(int ch, double x_m, double y_m,
                               Cell* out) const {
  const auto& set = marks[static_cast<size_t>(ch)];
  if (set.empty()) return false;
  double best = 1e18;
  Cell best_cell{};
  for (uint32_t idx : set) {  // ascending = row-major, so first win breaks ties
    const Cell c{static_cast<int>(idx % width), static_cast<int>(idx / width)};
    const double dx = cell_center(c.x) - x_m;
    const double dy = cell_center(c.y) - y_m;
    const double d = dx * dx + dy * dy;
    if (d < best - kDistanceEps) {
      best = d;
      best_cell = c;
    }
  }
  *out = best_cell;
  return true;
}

SemanticMap make_map(const WorldGrid& world, const CategoryRegistry& reg) {
  SemanticMap m;
  m.width = world.width;
  m.height = world.height;
  m.channels = reg.count() + 1;
  m.grid.assign(static_cast<size_t>(m.channels) * m.width * m.height, 0.0f);
  m.observed.assign(static_cast<size_t>(m.width) * m.height, 0);
  m.marks.resize(static_cast<size_t>(reg.count()));
  return m;
}

SemanticMap ground_truth_map(const WorldGrid& world,
                             const CategoryRegistry& reg) {
  SemanticMap m = make_map(world, reg);
  std::fill(m.observed.begin(), m.observed.end(), 1);
  const int obs_ch = m.obstacle_channel();
  for (int y = 0; y < world.height; ++y) {
    for (int x = 0; x < world.width; ++x) {
      const Cell c{x, y};
      if (world.obstacle_at(c)) {
        m.set(obs_ch, c, 1.0f);
        m.obstacle_log.push_back(static_cast<uint32_t>(m.index(c)));
      }
    }
  }
  for (const auto& lm : world.landmarks)
    for (int y = lm.y; y < lm.y + lm.h; ++y)
      for (int x = lm.x; x < lm.x + lm.w; ++x) {
        m.set(lm.category, Cell{x, y}, 1.0f);
        m.marks[static_cast<size_t>(lm.category)].insert(
            static_cast<uint32_t>(m.index(Cell{x, y})));
      }
  for (const auto& o : world.objects) {
    if (o.held || world.concealed(o)) continue;
    const Cell c = world.object_cell(o);
    m.set(o.category, c, 1.0f);
    m.marks[static_cast<size_t>(o.category)].insert(
        static_cast<uint32_t>(m.index(c)));
  }
  m.version = 1;
  return m;
}

void update_map(SemanticMap& map, const Observation& obs) {
  const int obs_ch = map.obstacle_channel();
  for (const auto& co : obs.cells) {
    const size_t idx = map.index(co.cell);
    map.observed[idx] = 1;
    const float cur = map.grid[static_cast<size_t>(obs_ch) * map.width * map.height + idx];
    if (co.obstacle && cur == 0.0f) {
      map.set(obs_ch, co.cell, 1.0f);
      map.obstacle_log.push_back(static_cast<uint32_t>(idx));
    } else if (!co.obstacle && cur != 0.0f) {
      map.set(obs_ch, co.cell, 0.0f);
      map.obstacle_retracted = true;
    }
  }

  // Staleness repair: visible cells that no longer show a category lose it.
  for (int ch = 0; ch < map.channels - 1; ++ch) {
    auto& set = map.marks[static_cast<size_t>(ch)];
    std::vector<uint32_t> gone;
    for (uint32_t idx : set) {
      const Cell c{static_cast<int>(idx % map.width),
                   static_cast<int>(idx / map.width)};
      if (obs.cell_visible(c)) gone.push_back(idx);
    }
    for (uint32_t idx : gone) {
      map.grid[static_cast<size_t>(ch) * map.width * map.height + idx] = 0.0f;
      set.erase(idx);
    }
  }
  for (const auto& vi : obs.instances) {
    for (const auto& c : vi.cells) {
      map.set(vi.category, c, 1.0f);
      map.marks[static_cast<size_t>(vi.category)].insert(
          static_cast<uint32_t>(map.index(c)));
    }
  }
  ++map.version;
}

}  // namespace gridbench
