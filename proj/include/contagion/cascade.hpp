#pragma once

// Default cascade on a realized graph: a vertex defaults once the summed
// impact weights of its defaulted debtors reach its capital. Zero recovery.

#include <algorithm>
#include <cstdint>
#include <vector>

#include "contagion/graph.hpp"

namespace contagion {

struct CascadeResult {
  std::vector<std::uint8_t> defaulted;   // final indicator per vertex
  std::size_t count = 0;
  double fraction = 0.0;                 // |D| / n
  std::vector<double> per_type_fraction; // |D and type beta| / n
  double importance_mass = 0.0;          // sum_{i in D} s_i / n
  std::size_t initial = 0;               // |D_0|
  std::size_t rounds = 0;                // last round that added a default
};

namespace detail {

inline void finish(const Graph& g, CascadeResult& res) {
  const std::size_t n = g.size();
  res.per_type_fraction.assign(static_cast<std::size_t>(g.types), 0.0);
  std::vector<std::size_t> per_type(static_cast<std::size_t>(g.types), 0);
  double imp = 0.0;
  res.count = 0;
  for (std::size_t v = 0; v < n; ++v) {
    if (!res.defaulted[v]) continue;
    ++res.count;
    ++per_type[static_cast<std::size_t>(g.vtype[v])];
    imp += g.population.importance[v];
  }
  const double nd = static_cast<double>(n);
  res.fraction = static_cast<double>(res.count) / nd;
  for (std::size_t b = 0; b < per_type.size(); ++b) res.per_type_fraction[b] = static_cast<double>(per_type[b]) / nd;
  res.importance_mass = imp / nd;
}

}  // namespace detail

/// Work-queue cascade processed in breadth layers; layer k is exactly the
/// set of vertices defaulting in round k.
inline CascadeResult run_cascade(const Graph& g) {
  const std::size_t n = g.size();
  const auto& cap = g.population.capital;
  CascadeResult res;
  res.defaulted.assign(n, 0);
  std::vector<std::int64_t> loss(n, 0);
  std::vector<std::uint32_t> layer, next;
  for (std::size_t v = 0; v < n; ++v)
    if (cap[v] == 0) {
      res.defaulted[v] = 1;
      layer.push_back(static_cast<std::uint32_t>(v));
    }
  res.initial = layer.size();
  std::size_t round = 0;
  while (!layer.empty()) {
    next.clear();
    for (std::uint32_t u : layer) {
      const auto t = g.out_targets(u);
      const auto w = g.out_weights(u);
      for (std::size_t k = 0; k < t.size(); ++k) {
        const std::uint32_t v = t[k];
        if (res.defaulted[v]) continue;
        loss[v] += w[k];
        if (cap[v] != kInfiniteCapital && loss[v] >= cap[v]) {
          res.defaulted[v] = 1;
          next.push_back(v);
        }
      }
    }
    if (!next.empty()) res.rounds = ++round;
    layer.swap(next);
  }
  detail::finish(g, res);
  return res;
}

/// Literal round-by-round evaluation with a full rescan per round.
inline CascadeResult run_cascade_rounds(const Graph& g) {
  const std::size_t n = g.size();
  const auto& cap = g.population.capital;
  CascadeResult res;
  res.defaulted.assign(n, 0);
  for (std::size_t v = 0; v < n; ++v) res.defaulted[v] = cap[v] == 0;
  for (std::size_t v = 0; v < n; ++v) res.initial += res.defaulted[v];
  std::vector<std::int64_t> loss(n);
  for (std::size_t k = 1;; ++k) {
    std::fill(loss.begin(), loss.end(), 0);
    for (std::size_t u = 0; u < n; ++u) {
      if (!res.defaulted[u]) continue;
      const auto t = g.out_targets(u);
      const auto w = g.out_weights(u);
      for (std::size_t e = 0; e < t.size(); ++e) loss[t[e]] += w[e];
    }
    bool changed = false;
    std::vector<std::uint8_t> cur(n);
    for (std::size_t v = 0; v < n; ++v) {
      cur[v] = cap[v] != kInfiniteCapital && cap[v] <= loss[v];
      if (cur[v] != res.defaulted[v]) changed = true;
    }
    if (!changed) break;
    res.defaulted = std::move(cur);
    res.rounds = k;
  }
  detail::finish(g, res);
  return res;
}

}  // namespace contagion
