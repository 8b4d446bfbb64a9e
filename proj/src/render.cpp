#include <array>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "gridbench/perception.hpp"

namespace gridbench {

namespace {

struct Rgb {
  unsigned char r, g, b;
};

Rgb hsv(double h, double s, double v) {
  h = std::fmod(h, 360.0) / 60.0;
  const int i = static_cast<int>(h);
  const double f = h - i;
  const double p = v * (1 - s), q = v * (1 - s * f), t = v * (1 - s * (1 - f));
  double r, g, b;
  switch (i % 6) {
    case 0: r = v; g = t; b = p; break;
    case 1: r = q; g = v; b = p; break;
    case 2: r = p; g = v; b = t; break;
    case 3: r = p; g = q; b = v; break;
    case 4: r = t; g = p; b = v; break;
    default: r = v; g = p; b = q; break;
  }
  return Rgb{static_cast<unsigned char>(r * 255),
             static_cast<unsigned char>(g * 255),
             static_cast<unsigned char>(b * 255)};
}

// Fixed palette: channel index alone decides the color.
Rgb channel_color(int ch, bool is_landmark) {
  const double hue = ch * 47.0;  // coprime stride spreads hues
  return is_landmark ? hsv(hue, 0.55, 0.82) : hsv(hue, 0.95, 0.95);
}

std::ofstream open_binary(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  return out;
}

}  // namespace

void render_composite_ppm(const SemanticMap& map, const CategoryRegistry& reg,
                          const std::string& path,
                          const std::vector<Cell>& overlay, const Cell* agent) {
  std::vector<Rgb> img(static_cast<size_t>(map.width) * map.height,
                       Rgb{245, 245, 245});
  auto paint = [&](const Cell& c, Rgb color) {
    img[static_cast<size_t>(c.y) * map.width + c.x] = color;
  };
  const int obs_ch = map.obstacle_channel();
  for (int y = 0; y < map.height; ++y)
    for (int x = 0; x < map.width; ++x) {
      const Cell c{x, y};
      if (!map.observed[map.index(c)])
        paint(c, Rgb{220, 220, 228});  // unexplored haze
      if (map.at(obs_ch, c) > 0) paint(c, Rgb{96, 96, 96});
    }
  // Landmarks first, objects on top.
  for (int pass = 0; pass < 2; ++pass) {
    for (int ch = 0; ch < map.channels - 1; ++ch) {
      const bool lm = reg.at(ch).is_landmark;
      if ((pass == 0) != lm) continue;
      for (uint32_t idx : map.marks[static_cast<size_t>(ch)]) {
        const Cell c{static_cast<int>(idx % map.width),
                     static_cast<int>(idx / map.width)};
        paint(c, channel_color(ch, lm));
      }
    }
  }
  for (const auto& c : overlay) paint(c, Rgb{40, 90, 230});
  if (agent) paint(*agent, Rgb{230, 30, 30});

  auto out = open_binary(path);
  out << "P6\n" << map.width << " " << map.height << "\n255\n";
  // Image rows top-down; world y grows upward.
  for (int y = map.height - 1; y >= 0; --y)
    out.write(reinterpret_cast<const char*>(
                  img.data() + static_cast<size_t>(y) * map.width),
              static_cast<std::streamsize>(map.width) * 3);
}

void write_channel_pgm(const SemanticMap& map, int channel,
                       const std::string& path) {
  auto out = open_binary(path);
  out << "P5\n" << map.width << " " << map.height << "\n255\n";
  for (int y = map.height - 1; y >= 0; --y)
    for (int x = 0; x < map.width; ++x) {
      const unsigned char v =
          map.at(channel, Cell{x, y}) > 0 ? 255 : (map.observed[map.index(Cell{x, y})] ? 32 : 0);
      out.write(reinterpret_cast<const char*>(&v), 1);
    }
}

void write_raw_dump(const SemanticMap& map, const std::string& path) {
  auto out = open_binary(path);
  out.write("GBMAPRAW", 8);
  const uint32_t header[4] = {1u, static_cast<uint32_t>(map.channels),
                              static_cast<uint32_t>(map.width),
                              static_cast<uint32_t>(map.height)};
  out.write(reinterpret_cast<const char*>(header), sizeof header);
  out.write(reinterpret_cast<const char*>(map.grid.data()),
            static_cast<std::streamsize>(map.grid.size() * sizeof(float)));
}

}  // namespace gridbench
