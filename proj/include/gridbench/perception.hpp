#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "gridbench/constraints.hpp"
#include "gridbench/geometry.hpp"
#include "gridbench/registry.hpp"
#include "gridbench/world.hpp"

namespace gridbench {

struct CellObs {
  Cell cell;
  bool obstacle = false;
};

struct VisibleInstance {
  int id = -1;
  bool is_landmark = false;
  int category = -1;
  double depth_m = 0;       // sensed range along the pitched camera ray
  double horizontal_m = 0;  // ground-truth horizontal distance (world side)
  double bearing_deg = 0;   // relative to the agent heading
  Cell cell{};              // nearest visible footprint cell
  std::vector<Cell> cells;  // all visible footprint cells
  bool open = false;        // landmark state as sensed
  bool toggled_on = false;
};

struct Observation {
  int width = 0;
  int height = 0;
  AgentPose pose;
  std::vector<CellObs> cells;
  std::vector<uint8_t> visible_mask;  // width*height
  std::vector<VisibleInstance> instances;

  bool cell_visible(const Cell& c) const {
    return c.x >= 0 && c.x < width && c.y >= 0 && c.y < height &&
           visible_mask[static_cast<size_t>(c.y) * width + c.x] != 0;
  }
  const VisibleInstance* nearest_of(int category) const;
  bool sees_category(int category) const { return nearest_of(category) != nullptr; }
};

// Ground-truth visibility by 2-D ray casting: cells inside the field of view
// and range, not cut off by an earlier obstacle along the ray. Concealed and
// held objects are excluded. Deterministic.
Observation observe(const WorldGrid& world, const AgentPose& pose,
                    const SensorConfig& sensor);

// (C+1) x M x M accumulation of observations; channel i = category i,
// last channel = obstacles. Values are 0 or 1; latest observation wins.
struct SemanticMap {
  int width = 0;
  int height = 0;
  int channels = 0;  // category count + 1
  std::vector<float> grid;        // channel-major, then row-major
  std::vector<uint8_t> observed;  // ever-seen mask
  // Sorted mark sets per category channel (row-major indices); these mirror
  // the nonzero cells so queries and staleness repair stay cheap.
  std::vector<std::set<uint32_t>> marks;
  std::vector<uint32_t> obstacle_log;  // obstacle cells in discovery order
  bool obstacle_retracted = false;     // set if an obstacle mark was cleared
  uint64_t version = 0;

  int obstacle_channel() const { return channels - 1; }
  size_t index(const Cell& c) const {
    return static_cast<size_t>(c.y) * width + c.x;
  }
  float at(int ch, const Cell& c) const {
    return grid[static_cast<size_t>(ch) * width * height + index(c)];
  }
  void set(int ch, const Cell& c, float v) {
    grid[static_cast<size_t>(ch) * width * height + index(c)] = v;
  }
  bool channel_empty(int ch) const { return marks[static_cast<size_t>(ch)].empty(); }
  // Nearest marked cell of a channel to a point; row-major tie-break.
  // Returns false when the channel is empty.
  bool nearest_mark(int ch, double x_m, double y_m, Cell* out) const;
};

SemanticMap make_map(const WorldGrid& world, const CategoryRegistry& reg);

// Full ground-truth projection: what a completed exploration would contain.
SemanticMap ground_truth_map(const WorldGrid& world, const CategoryRegistry& reg);

void update_map(SemanticMap& map, const Observation& obs);

// ---- Snapshot exports ------------------------------------------------------

// Composite top-down render (P6 PPM, deterministic palette). The optional
// path is drawn as a polyline of cells; the agent cell as a marker.
void render_composite_ppm(const SemanticMap& map, const CategoryRegistry& reg,
                          const std::string& path,
                          const std::vector<Cell>& overlay = {},
                          const Cell* agent = nullptr);

// Single channel as P5 PGM (255 = occupied).
void write_channel_pgm(const SemanticMap& map, int channel,
                       const std::string& path);

// Raw binary dump: "GBMAPRAW", u32 version, u32 channels, u32 width,
// u32 height, then float32 cells, channel-major then row-major,
// little-endian.
void write_raw_dump(const SemanticMap& map, const std::string& path);

}  // namespace gridbench
