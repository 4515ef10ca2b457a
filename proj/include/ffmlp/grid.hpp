#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "ffmlp/error.hpp"
#include "ffmlp/network.hpp"

namespace ffmlp {

struct GridBox {
  double xmin = -1.0, xmax = 1.0, ymin = -1.0, ymax = 1.0;
};

enum class GridTargetKind { kDecision, kLayer1, kLayer2 };

struct GridTarget {
  GridTargetKind kind = GridTargetKind::kDecision;
  Index neuron = 0;

  std::string str() const {
    switch (kind) {
      case GridTargetKind::kDecision: return "decision";
      case GridTargetKind::kLayer1: return "l1:" + std::to_string(neuron);
      case GridTargetKind::kLayer2: return "l2:" + std::to_string(neuron);
    }
    return "decision";
  }
};

// "decision", "l1:K" or "l2:K".
inline GridTarget parse_target(const std::string& s) {
  if (s == "decision") return {};
  GridTarget t;
  if (s.rfind("l1:", 0) == 0) {
    t.kind = GridTargetKind::kLayer1;
  } else if (s.rfind("l2:", 0) == 0) {
    t.kind = GridTargetKind::kLayer2;
  } else {
    throw ParameterError("target must be decision, l1:K or l2:K, got '" + s + "'");
  }
  const std::string idx = s.substr(3);
  long v = -1;
  const auto [ptr, ec] = std::from_chars(idx.data(), idx.data() + idx.size(), v);
  if (ec != std::errc() || ptr != idx.data() + idx.size() || v < 0)
    throw ParameterError("bad neuron index in target '" + s + "'");
  t.neuron = v;
  return t;
}

// Values on an nx × ny lattice of cell centers. Cells are row-major starting at the
// top-left corner (largest y), the same order the image is written in.
struct GridDump {
  GridBox box;
  Index nx = 0, ny = 0;
  GridTarget target;
  std::vector<double> x, y, value;

  std::size_t size() const { return value.size(); }
};

inline GridDump dump_grid(const FFNetwork& net, const GridBox& box, Index nx, Index ny, const GridTarget& target) {
  if (net.input_dim != 2)
    throw ParameterError("grid dumps need a 2-D model, this one takes " + std::to_string(net.input_dim) + " inputs");
  if (nx < 1 || ny < 1) throw ParameterError("grid resolution must be at least 1x1");
  if (!(box.xmax > box.xmin) || !(box.ymax > box.ymin)) throw ParameterError("grid box is empty");
  if (target.kind == GridTargetKind::kLayer1 && target.neuron >= net.D1())
    throw ParameterError("l1 neuron " + std::to_string(target.neuron) + " out of range (D1 = " +
                         std::to_string(net.D1()) + ")");
  if (target.kind == GridTargetKind::kLayer2 && target.neuron >= net.D2())
    throw ParameterError("l2 neuron " + std::to_string(target.neuron) + " out of range (D2 = " +
                         std::to_string(net.D2()) + ")");
  GridDump g;
  g.box = box;
  g.nx = nx;
  g.ny = ny;
  g.target = target;
  const double dx = (box.xmax - box.xmin) / static_cast<double>(nx);
  const double dy = (box.ymax - box.ymin) / static_cast<double>(ny);
  const auto cells = static_cast<std::size_t>(nx * ny);
  g.x.reserve(cells);
  g.y.reserve(cells);
  g.value.reserve(cells);
  Vector p(2);
  for (Index r = 0; r < ny; ++r) {
    for (Index c = 0; c < nx; ++c) {
      p(0) = box.xmin + (static_cast<double>(c) + 0.5) * dx;
      p(1) = box.ymax - (static_cast<double>(r) + 0.5) * dy;
      const auto [logits, trace] = forward(net, p);
      double v = 0.0;
      switch (target.kind) {
        case GridTargetKind::kDecision: v = decide(logits, net.fallback_class); break;
        case GridTargetKind::kLayer1: v = trace.a1(target.neuron); break;
        case GridTargetKind::kLayer2: v = trace.a2(target.neuron); break;
      }
      g.x.push_back(p(0));
      g.y.push_back(p(1));
      g.value.push_back(v);
    }
  }
  return g;
}

inline void write_grid_csv(const GridDump& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out.precision(17);
  out << "x,y,value\n";
  for (std::size_t i = 0; i < g.size(); ++i) out << g.x[i] << ',' << g.y[i] << ',' << g.value[i] << '\n';
  if (!out) throw DataError("write failed for " + path);
}

// Class colors for decision maps, cycled past ten classes.
inline const std::array<std::array<std::uint8_t, 3>, 10>& class_palette() {
  static const std::array<std::array<std::uint8_t, 3>, 10> p = {{{31, 119, 180},
                                                                  {255, 127, 14},
                                                                  {44, 160, 44},
                                                                  {214, 39, 40},
                                                                  {148, 103, 189},
                                                                  {140, 86, 75},
                                                                  {227, 119, 194},
                                                                  {127, 127, 127},
                                                                  {188, 189, 34},
                                                                  {23, 190, 207}}};
  return p;
}

// Binary PPM (P6). Decision maps use class_palette(); neuron maps are gray, min-max
// normalized over the grid (a constant map is black).
inline void write_grid_ppm(const GridDump& g, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  out << "P6\n" << g.nx << ' ' << g.ny << "\n255\n";
  double lo = 0.0, hi = 0.0;
  if (!g.value.empty()) {
    const auto [a, b] = std::minmax_element(g.value.begin(), g.value.end());
    lo = *a;
    hi = *b;
  }
  const auto& pal = class_palette();
  for (double v : g.value) {
    std::array<std::uint8_t, 3> px{};
    if (g.target.kind == GridTargetKind::kDecision) {
      px = pal[static_cast<std::size_t>(std::max(0.0, v)) % pal.size()];
    } else {
      const double t = hi > lo ? (v - lo) / (hi - lo) : 0.0;
      const auto level = static_cast<std::uint8_t>(std::lround(255.0 * t));
      px = {level, level, level};
    }
    out.write(reinterpret_cast<const char*>(px.data()), 3);
  }
  if (!out) throw DataError("write failed for " + path);
}

}  // namespace ffmlp
