#pragma once

// Zero-contour extraction for reduced (one- or two-parameter) slices of f,
// used to reproduce root-set plots. Marching squares with linear
// interpolation; segments are stitched into polylines.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "contagion/analytic.hpp"
#include "contagion/model.hpp"
#include "contagion/solver.hpp"

namespace contagion {

struct AxisTerm {
  Coord coord;
  double coef = 1.0;
};

struct ReducedFunction {
  std::string label;
  Coord coord;
};

/// Linear tying of the full coordinate vector to one or two free parameters:
/// z^c = sum over terms of coef * u_k. Coordinates not mentioned stay 0.
struct ReducedAxes {
  std::vector<std::vector<AxisTerm>> axes;
  std::vector<ReducedFunction> functions;

  int free_dims() const { return static_cast<int>(axes.size()); }

  RootVector embed(const ModelSpec& spec, double u1, double u2 = 0.0) const {
    RootVector z = RootVector::like(spec);
    const double u[2] = {u1, u2};
    for (std::size_t k = 0; k < axes.size(); ++k)
      for (const auto& t : axes[k]) z[t.coord] += t.coef * u[k];
    return z;
  }

  /// Coordinates of a full vector in the reduced parameters, read off the
  /// first term of each axis.
  std::pair<double, double> project(const RootVector& z) const {
    double u[2] = {0.0, 0.0};
    for (std::size_t k = 0; k < axes.size() && k < 2; ++k)
      if (!axes[k].empty()) u[k] = z[axes[k].front().coord] / axes[k].front().coef;
    return {u[0], u[1]};
  }
};

struct ScanGrid {
  double x0 = 0.0, x1 = 1.0;
  double y0 = 0.0, y1 = 1.0;
  int nx = 100;  // cells along each axis
  int ny = 100;
};

struct ContourPoint {
  double z1 = 0.0;
  double z2 = 0.0;
};

struct Polyline {
  std::string label;
  int segment_id = 0;
  std::vector<ContourPoint> points;
};

namespace detail {

// Edge key: horizontal edges (i,j)-(i+1,j) and vertical edges (i,j)-(i,j+1).
inline std::uint64_t edge_key(int i, int j, bool vertical) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(i)) << 33) |
         (static_cast<std::uint64_t>(static_cast<std::uint32_t>(j)) << 1) | (vertical ? 1u : 0u);
}

struct RawSegment {
  std::uint64_t a, b;
  ContourPoint pa, pb;
};

inline std::vector<Polyline> stitch(const std::string& label, const std::vector<RawSegment>& segs) {
  std::multimap<std::uint64_t, std::size_t> by_edge;
  for (std::size_t s = 0; s < segs.size(); ++s) {
    by_edge.emplace(segs[s].a, s);
    by_edge.emplace(segs[s].b, s);
  }
  std::vector<bool> used(segs.size(), false);
  auto next_from = [&](std::uint64_t key, std::size_t self) -> long {
    auto [lo, hi] = by_edge.equal_range(key);
    for (auto it = lo; it != hi; ++it)
      if (it->second != self && !used[it->second]) return static_cast<long>(it->second);
    return -1;
  };

  std::vector<Polyline> out;
  for (std::size_t s0 = 0; s0 < segs.size(); ++s0) {
    if (used[s0]) continue;
    used[s0] = true;
    std::vector<ContourPoint> pts{segs[s0].pa, segs[s0].pb};
    // Extend forward from b, then backward from a.
    for (int pass = 0; pass < 2; ++pass) {
      std::uint64_t key = pass == 0 ? segs[s0].b : segs[s0].a;
      std::size_t cur = s0;
      for (;;) {
        const long nx = next_from(key, cur);
        if (nx < 0) break;
        const auto& sg = segs[static_cast<std::size_t>(nx)];
        used[static_cast<std::size_t>(nx)] = true;
        const bool enter_a = sg.a == key;
        const ContourPoint far = enter_a ? sg.pb : sg.pa;
        if (pass == 0)
          pts.push_back(far);
        else
          pts.insert(pts.begin(), far);
        key = enter_a ? sg.b : sg.a;
        cur = static_cast<std::size_t>(nx);
      }
    }
    out.push_back({label, static_cast<int>(out.size()), std::move(pts)});
  }
  return out;
}

}  // namespace detail

/// Zero contour of a scalar field on the grid. Nonnegative values count as
/// inside; saddle cells are resolved with the cell-centre average.
inline std::vector<Polyline> zero_contour_2d(const std::string& label,
                                             const std::function<double(double, double)>& field,
                                             const ScanGrid& g) {
  if (g.nx < 1 || g.ny < 1) throw ContagionError(ErrorCode::InvalidArgument, "grid needs >= 1 cell per axis");
  const double dx = (g.x1 - g.x0) / g.nx;
  const double dy = (g.y1 - g.y0) / g.ny;
  std::vector<double> val(static_cast<std::size_t>(g.nx + 1) * (g.ny + 1));
  auto at = [&](int i, int j) -> double& { return val[static_cast<std::size_t>(j) * (g.nx + 1) + i]; };
  for (int j = 0; j <= g.ny; ++j)
    for (int i = 0; i <= g.nx; ++i) at(i, j) = field(g.x0 + i * dx, g.y0 + j * dy);

  auto cross = [](double va, double vb) { return va / (va - vb); };
  std::vector<detail::RawSegment> segs;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double v00 = at(i, j), v10 = at(i + 1, j), v11 = at(i + 1, j + 1), v01 = at(i, j + 1);
      const int mask = (v00 >= 0) | ((v10 >= 0) << 1) | ((v11 >= 0) << 2) | ((v01 >= 0) << 3);
      if (mask == 0 || mask == 15) continue;
      const double x = g.x0 + i * dx, y = g.y0 + j * dy;
      // Crossing points on bottom, right, top, left edges.
      struct E { std::uint64_t key; ContourPoint p; };
      const E bottom{detail::edge_key(i, j, false), {x + dx * cross(v00, v10), y}};
      const E right{detail::edge_key(i + 1, j, true), {x + dx, y + dy * cross(v10, v11)}};
      const E top{detail::edge_key(i, j + 1, false), {x + dx * cross(v01, v11), y + dy}};
      const E left{detail::edge_key(i, j, true), {x, y + dy * cross(v00, v01)}};
      auto add = [&](const E& a, const E& b) { segs.push_back({a.key, b.key, a.p, b.p}); };
      const bool centre_inside = (v00 + v10 + v11 + v01) >= 0;
      switch (mask) {
        case 1: case 14: add(left, bottom); break;
        case 2: case 13: add(bottom, right); break;
        case 3: case 12: add(left, right); break;
        case 4: case 11: add(right, top); break;
        case 6: case 9: add(bottom, top); break;
        case 7: case 8: add(left, top); break;
        case 5:
          if (centre_inside) { add(left, top); add(bottom, right); }
          else { add(left, bottom); add(right, top); }
          break;
        case 10:
          if (centre_inside) { add(left, bottom); add(right, top); }
          else { add(left, top); add(bottom, right); }
          break;
        default: break;
      }
    }
  return detail::stitch(label, segs);
}

/// Sign changes of a scalar field along [x0, x1]; each crossing becomes a
/// one-point polyline with z2 = 0.
inline std::vector<Polyline> zero_contour_1d(const std::string& label,
                                             const std::function<double(double)>& field,
                                             const ScanGrid& g) {
  if (g.nx < 1) throw ContagionError(ErrorCode::InvalidArgument, "grid needs >= 1 cell");
  const double dx = (g.x1 - g.x0) / g.nx;
  std::vector<Polyline> out;
  double prev = field(g.x0);
  if (prev == 0.0) out.push_back({label, 0, {{g.x0, 0.0}}});
  for (int i = 1; i <= g.nx; ++i) {
    const double x = g.x0 + i * dx;
    const double cur = field(x);
    if (cur == 0.0) {
      out.push_back({label, static_cast<int>(out.size()), {{x, 0.0}}});
    } else if (prev != 0.0 && (prev > 0.0) != (cur > 0.0)) {
      const double t = prev / (prev - cur);
      out.push_back({label, static_cast<int>(out.size()), {{x - dx + t * dx, 0.0}}});
    }
    prev = cur;
  }
  return out;
}

/// Root sets of every reduced function of `axes` over the grid. Throws
/// GridTooCoarse when a function shows no zero crossing although the
/// smallest joint root projects into the scanned rectangle.
inline std::vector<Polyline> rootset_scan(const ModelSpec& spec, const ReducedAxes& axes,
                                          const ScanGrid& grid, const SolverOptions& opts = {}) {
  if (axes.free_dims() < 1 || axes.free_dims() > 2)
    throw ContagionError(ErrorCode::InvalidArgument, "axis map must have one or two free coordinates");
  if (axes.functions.empty()) throw ContagionError(ErrorCode::InvalidArgument, "no reduced functions");
  std::vector<Polyline> all;
  for (const auto& fn : axes.functions) {
    std::vector<Polyline> lines;
    if (axes.free_dims() == 2) {
      lines = zero_contour_2d(
          fn.label, [&](double u1, double u2) { return f_eval(spec, axes.embed(spec, u1, u2))[fn.coord]; },
          grid);
    } else {
      lines = zero_contour_1d(
          fn.label, [&](double u1) { return f_eval(spec, axes.embed(spec, u1))[fn.coord]; }, grid);
    }
    if (lines.empty()) {
      const auto [u1, u2] = axes.project(smallest_root(spec, opts).z);
      const bool inside = u1 >= grid.x0 && u1 <= grid.x1 &&
                          (axes.free_dims() == 1 || (u2 >= grid.y0 && u2 <= grid.y1));
      if (inside)
        throw ContagionError(ErrorCode::GridTooCoarse,
                             "no zero crossing found for " + fn.label + " although zhat lies in the grid");
    }
    all.insert(all.end(), lines.begin(), lines.end());
  }
  return all;
}

inline void write_rootset_csv(std::ostream& os, const std::vector<Polyline>& lines) {
  os << "function_label,segment_id,z1,z2\n";
  const auto flags = os.flags();
  os.precision(17);
  for (const auto& pl : lines)
    for (const auto& p : pl.points) os << pl.label << ',' << pl.segment_id << ',' << p.z1 << ',' << p.z2 << '\n';
  os.flags(flags);
}

}  // namespace contagion
