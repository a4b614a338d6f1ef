#pragma once

// Finite networks drawn from a specification: vertex populations and the
// weighted directed edge law p^r_{ij} = min(1/R, w_i^{+,r,a_j} w_j^{-,r,a_i} / n).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "contagion/error.hpp"
#include "contagion/model.hpp"
#include "contagion/rng.hpp"

namespace contagion {

inline constexpr std::int64_t kInfiniteCapital = std::numeric_limits<std::int64_t>::max();

enum class PopulationMode { Deterministic, Iid };

struct Population {
  std::size_t n = 0;
  std::vector<std::uint32_t> atom;     // atom index per vertex
  std::vector<std::int64_t> capital;   // realized, post-shock; kInfiniteCapital for infinity
  std::vector<double> importance;
  std::vector<std::vector<std::uint32_t>> members;  // vertices per atom, ascending
};

// Stream identifiers for the counter-based generator.
namespace stream {
inline constexpr std::uint64_t kAtoms = 1;
inline constexpr std::uint64_t kShocks = 2;
inline constexpr std::uint64_t kEdges = 3;
}  // namespace stream

/// Largest-remainder apportionment of n over the atom probabilities; ties go
/// to the lower atom index.
inline std::vector<std::size_t> apportion(const ModelSpec& spec, std::size_t n) {
  const auto& atoms = spec.atoms();
  std::vector<std::size_t> counts(atoms.size());
  std::vector<double> rem(atoms.size());
  std::size_t used = 0;
  for (std::size_t a = 0; a < atoms.size(); ++a) {
    const double exact = static_cast<double>(n) * atoms[a].prob;
    counts[a] = static_cast<std::size_t>(std::floor(exact));
    rem[a] = exact - static_cast<double>(counts[a]);
    used += counts[a];
  }
  std::vector<std::size_t> order(atoms.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return rem[x] > rem[y]; });
  for (std::size_t k = 0; used < n; ++k, ++used) ++counts[order[k % order.size()]];
  return counts;
}

/// Assigns atoms to n vertices and realizes shocks per vertex: a solvent
/// vertex defaults initially with its atom's shock probability.
inline Population realize_population(const ModelSpec& spec, std::size_t n,
                                     PopulationMode mode = PopulationMode::Deterministic,
                                     std::uint64_t seed = 0) {
  if (n == 0) throw ContagionError(ErrorCode::InvalidArgument, "population size must be positive");
  if (n > std::numeric_limits<std::uint32_t>::max())
    throw ContagionError(ErrorCode::InvalidArgument, "population size exceeds 32-bit vertex ids");
  const auto& atoms = spec.atoms();
  Population pop;
  pop.n = n;
  pop.atom.resize(n);
  if (mode == PopulationMode::Deterministic) {
    const std::vector<std::size_t> counts = apportion(spec, n);
    std::size_t v = 0;
    for (std::size_t a = 0; a < atoms.size(); ++a)
      for (std::size_t k = 0; k < counts[a]; ++k) pop.atom[v++] = static_cast<std::uint32_t>(a);
  } else {
    std::vector<double> cdf(atoms.size());
    double acc = 0.0;
    for (std::size_t a = 0; a < atoms.size(); ++a) cdf[a] = (acc += atoms[a].prob);
    CounterRng rng(seed, stream::kAtoms);
    for (std::size_t v = 0; v < n; ++v) {
      const double u = rng.uniform01() * acc;
      std::size_t a = static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
      if (a >= atoms.size()) a = atoms.size() - 1;
      while (atoms[a].prob == 0.0 && a > 0) --a;
      pop.atom[v] = static_cast<std::uint32_t>(a);
    }
  }

  pop.capital.resize(n);
  pop.importance.resize(n);
  pop.members.assign(atoms.size(), {});
  CounterRng shocks(seed, stream::kShocks);
  for (std::size_t v = 0; v < n; ++v) {
    const Atom& a = atoms[pop.atom[v]];
    pop.members[pop.atom[v]].push_back(static_cast<std::uint32_t>(v));
    pop.importance[v] = a.importance;
    std::int64_t c = a.capital.is_infinite() ? kInfiniteCapital : static_cast<std::int64_t>(a.capital.value());
    // One draw per vertex keeps the stream aligned across specs.
    const double u = shocks.uniform01();
    if (c > 0 && u < a.shock_prob) c = 0;
    pop.capital[v] = c;
  }
  return pop;
}

/// Directed weighted graph in compressed sparse row form.
struct Graph {
  Population population;
  int impacts = 1;
  int types = 1;
  std::vector<int> vtype;             // per vertex
  std::vector<std::size_t> offsets;   // size n + 1
  std::vector<std::uint32_t> targets;
  std::vector<std::uint8_t> weights;  // impact r in 1..R

  std::size_t size() const { return population.n; }
  std::size_t edge_count() const { return targets.size(); }
  std::span<const std::uint32_t> out_targets(std::size_t v) const {
    return {targets.data() + offsets[v], offsets[v + 1] - offsets[v]};
  }
  std::span<const std::uint8_t> out_weights(std::size_t v) const {
    return {weights.data() + offsets[v], offsets[v + 1] - offsets[v]};
  }
};

struct EdgeTriple {
  std::uint32_t src, dst;
  std::uint8_t r;
};

/// p^1..p^R for an edge from an atom-a vertex to an atom-b vertex.
inline std::vector<double> pair_probabilities(const ModelSpec& spec, std::size_t a, std::size_t b, std::size_t n) {
  const Atom& src = spec.atoms()[a];
  const Atom& dst = spec.atoms()[b];
  const int R = spec.impacts();
  std::vector<double> p(static_cast<std::size_t>(R));
  for (int r = 0; r < R; ++r) {
    const double raw = src.out_weights(r, dst.vtype) * dst.in_weights(r, src.vtype) / static_cast<double>(n);
    p[static_cast<std::size_t>(r)] = std::min(1.0 / R, raw);
  }
  return p;
}

namespace detail {

inline Graph assemble(const Population& pop, const ModelSpec& spec, std::vector<EdgeTriple>& edges) {
  if (spec.impacts() > 255) throw ContagionError(ErrorCode::InvalidArgument, "at most 255 impact levels");
  Graph g;
  g.population = pop;
  g.impacts = spec.impacts();
  g.types = spec.types();
  g.vtype.resize(pop.n);
  for (std::size_t v = 0; v < pop.n; ++v) g.vtype[v] = spec.atoms()[pop.atom[v]].vtype;
  g.offsets.assign(pop.n + 1, 0);
  for (const auto& e : edges) ++g.offsets[e.src + 1];
  for (std::size_t v = 0; v < pop.n; ++v) g.offsets[v + 1] += g.offsets[v];
  g.targets.resize(edges.size());
  g.weights.resize(edges.size());
  std::vector<std::size_t> fill(g.offsets.begin(), g.offsets.end() - 1);
  for (const auto& e : edges) {
    g.targets[fill[e.src]] = e.dst;
    g.weights[fill[e.src]++] = e.r;
  }
  return g;
}

inline std::uint8_t draw_weight(const std::vector<double>& p, double q, CounterRng& rng) {
  double u = rng.uniform01() * q;
  std::size_t last = 0;
  for (std::size_t r = 0; r < p.size(); ++r) {
    if (p[r] == 0.0) continue;
    if (u < p[r]) return static_cast<std::uint8_t>(r + 1);
    u -= p[r];
    last = r;
  }
  return static_cast<std::uint8_t>(last + 1);
}

}  // namespace detail

/// Samples the edge set. Every ordered class pair (a, b) has its own random
/// stream; within it, the pairs carrying an edge are found by geometric
/// skipping over the |a| x |b| lattice and the weight r is drawn with
/// probability p^r / q. Expected cost O(n + #edges).
inline Graph sample_graph(const Population& pop, const ModelSpec& spec, std::uint64_t seed = 0) {
  const std::size_t A = spec.atoms().size();
  std::vector<EdgeTriple> edges;
  for (std::size_t a = 0; a < A; ++a) {
    const auto& src = pop.members[a];
    if (src.empty()) continue;
    for (std::size_t b = 0; b < A; ++b) {
      const auto& dst = pop.members[b];
      if (dst.empty()) continue;
      const std::vector<double> p = pair_probabilities(spec, a, b, pop.n);
      const double q = std::accumulate(p.begin(), p.end(), 0.0);
      if (q <= 0.0) continue;
      CounterRng rng(seed, mix_seed({stream::kEdges, a, b}));
      const std::uint64_t total = static_cast<std::uint64_t>(src.size()) * dst.size();
      std::uint64_t pos = 0;
      bool first = true;
      for (;;) {
        const std::uint64_t skip = rng.geometric(q);
        if (first) {
          pos = skip;
          first = false;
        } else {
          if (skip >= total - pos) break;
          pos += 1 + skip;
        }
        if (pos >= total) break;
        const std::uint32_t i = src[pos / dst.size()];
        const std::uint32_t j = dst[pos % dst.size()];
        const std::uint8_t r = detail::draw_weight(p, q, rng);
        if (i != j) edges.push_back({i, j, r});
      }
    }
  }
  return detail::assemble(pop, spec, edges);
}

/// Reference sampler: one uniform per ordered pair, partitioned into the
/// intervals [sum_{s<r} p^s, sum_{s<=r} p^s). Quadratic; tests only.
inline Graph sample_graph_naive(const Population& pop, const ModelSpec& spec, std::uint64_t seed = 0) {
  std::vector<EdgeTriple> edges;
  CounterRng rng(seed, stream::kEdges);
  for (std::size_t i = 0; i < pop.n; ++i)
    for (std::size_t j = 0; j < pop.n; ++j) {
      if (i == j) continue;
      const std::vector<double> p = pair_probabilities(spec, pop.atom[i], pop.atom[j], pop.n);
      double u = rng.uniform01();
      for (std::size_t r = 0; r < p.size(); ++r) {
        if (u < p[r]) {
          edges.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j),
                           static_cast<std::uint8_t>(r + 1)});
          break;
        }
        u -= p[r];
      }
    }
  return detail::assemble(pop, spec, edges);
}

/// Graph from an explicit edge list; for tests and hand-built instances.
inline Graph graph_from_edges(const ModelSpec& spec, const Population& pop, std::vector<EdgeTriple> edges) {
  for (const auto& e : edges) {
    if (e.src >= pop.n || e.dst >= pop.n)
      throw ContagionError(ErrorCode::InvalidArgument, "edge endpoint out of range");
    if (e.r < 1 || e.r > spec.impacts()) throw ContagionError(ErrorCode::InvalidArgument, "edge weight out of range");
  }
  return detail::assemble(pop, spec, edges);
}

/// Degree histograms split by vertex type beta, impact r and counterparty
/// type alpha: hist[(beta * R + r) * T + alpha][k] = #vertices of type beta
/// with exactly k r-edges to (out) or from (in) type-alpha vertices.
struct DegreeSummary {
  int impacts = 1;
  int types = 1;
  std::vector<std::vector<std::uint64_t>> out_hist;
  std::vector<std::vector<std::uint64_t>> in_hist;
  std::vector<std::uint64_t> type_counts;

  std::size_t slot(int beta, int r, int alpha) const {
    return (static_cast<std::size_t>(beta) * impacts + r) * types + alpha;
  }
  double mean_out(int beta, int r, int alpha) const { return mean(out_hist[slot(beta, r, alpha)]); }
  double mean_in(int beta, int r, int alpha) const { return mean(in_hist[slot(beta, r, alpha)]); }

  static double mean(const std::vector<std::uint64_t>& h) {
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < h.size(); ++k) {
      num += static_cast<double>(k) * h[k];
      den += static_cast<double>(h[k]);
    }
    return den > 0.0 ? num / den : 0.0;
  }
};

inline DegreeSummary degree_summary(const Graph& g) {
  DegreeSummary s;
  s.impacts = g.impacts;
  s.types = g.types;
  const std::size_t slots = static_cast<std::size_t>(g.types) * g.impacts * g.types;
  s.out_hist.assign(slots, {});
  s.in_hist.assign(slots, {});
  s.type_counts.assign(static_cast<std::size_t>(g.types), 0);
  const std::size_t n = g.size();
  const std::size_t per_vertex = static_cast<std::size_t>(g.impacts) * g.types;
  std::vector<std::uint32_t> outdeg(n * per_vertex, 0), indeg(n * per_vertex, 0);
  for (std::size_t v = 0; v < n; ++v) {
    const auto t = g.out_targets(v);
    const auto w = g.out_weights(v);
    for (std::size_t k = 0; k < t.size(); ++k) {
      const std::size_t r = w[k] - 1u;
      ++outdeg[v * per_vertex + r * g.types + g.vtype[t[k]]];
      ++indeg[t[k] * per_vertex + r * g.types + g.vtype[v]];
    }
  }
  auto bump = [](std::vector<std::uint64_t>& h, std::uint32_t k) {
    if (h.size() <= k) h.resize(k + 1, 0);
    ++h[k];
  };
  for (std::size_t v = 0; v < n; ++v) {
    const int beta = g.vtype[v];
    ++s.type_counts[static_cast<std::size_t>(beta)];
    for (int r = 0; r < g.impacts; ++r)
      for (int alpha = 0; alpha < g.types; ++alpha) {
        const std::size_t off = v * per_vertex + static_cast<std::size_t>(r) * g.types + alpha;
        bump(s.out_hist[s.slot(beta, r, alpha)], outdeg[off]);
        bump(s.in_hist[s.slot(beta, r, alpha)], indeg[off]);
      }
  }
  return s;
}

inline void write_edge_list(std::ostream& os, const Graph& g) {
  os << "src,dst,r\n";
  for (std::size_t v = 0; v < g.size(); ++v) {
    const auto t = g.out_targets(v);
    const auto w = g.out_weights(v);
    for (std::size_t k = 0; k < t.size(); ++k) os << v << ',' << t[k] << ',' << static_cast<int>(w[k]) << '\n';
  }
}

inline void write_vertex_table(std::ostream& os, const Graph& g) {
  os << "id,atom,capital,importance\n";
  const auto flags = os.flags();
  os.precision(17);
  const Population& p = g.population;
  for (std::size_t v = 0; v < p.n; ++v) {
    os << v << ',' << p.atom[v] << ',';
    if (p.capital[v] == kInfiniteCapital)
      os << "inf";
    else
      os << p.capital[v];
    os << ',' << p.importance[v] << '\n';
  }
  os.flags(flags);
}

}  // namespace contagion
