#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "contagion/model.hpp"

namespace contagion {

/// Dense array over V = [R] x [T]^2. Used both for points z (RootVector) and
/// for per-coordinate values such as f(z) or directional derivatives.
class CoordArray {
 public:
  CoordArray() = default;
  CoordArray(int impacts, int types, double fill = 0.0)
      : impacts_(impacts), types_(types),
        values_(static_cast<std::size_t>(impacts) * types * types, fill) {}

  static CoordArray like(const ModelSpec& spec, double fill = 0.0) {
    return CoordArray(spec.impacts(), spec.types(), fill);
  }

  int impacts() const { return impacts_; }
  int types() const { return types_; }
  std::size_t size() const { return values_.size(); }

  double& operator()(int r, int alpha, int beta) { return values_[flat_index({r, alpha, beta}, types_)]; }
  double operator()(int r, int alpha, int beta) const {
    return values_[flat_index({r, alpha, beta}, types_)];
  }
  double& operator[](const Coord& c) { return values_[flat_index(c, types_)]; }
  double operator[](const Coord& c) const { return values_[flat_index(c, types_)]; }
  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  double sup_norm() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
  }

  friend bool operator==(const CoordArray&, const CoordArray&) = default;

 private:
  int impacts_ = 0;
  int types_ = 0;
  std::vector<double> values_;
};

using RootVector = CoordArray;
using DerivativeVector = CoordArray;

inline double sup_distance(const CoordArray& a, const CoordArray& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

/// a <= b + slack in every coordinate.
inline bool componentwise_leq(const CoordArray& a, const CoordArray& b, double slack = 0.0) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] > b[i] + slack) return false;
  return true;
}

}  // namespace contagion
