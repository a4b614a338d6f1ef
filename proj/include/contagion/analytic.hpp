#pragma once

// Exact atom-sum evaluation of zeta, f^{r,alpha,beta}, g and their
// derivatives for a finitary specification.

#include <cstddef>
#include <vector>

#include "contagion/compound_poisson.hpp"
#include "contagion/model.hpp"
#include "contagion/root_vector.hpp"

namespace contagion {

/// zeta^{r,alpha,beta} = E[W^{+,r,alpha} 1{A = beta}], the upper bound of
/// every coordinate of a root.
inline RootVector zeta(const ModelSpec& spec) {
  RootVector z = RootVector::like(spec);
  for (const Atom& a : spec.atoms())
    for (int r = 0; r < spec.impacts(); ++r)
      for (int alpha = 0; alpha < spec.types(); ++alpha)
        z(r, alpha, a.vtype) += a.prob * a.out_weights(r, alpha);
  return z;
}

/// V-tilde: coordinates with zeta > 0.
inline CoordinateSet support(const ModelSpec& spec) {
  const RootVector z = zeta(spec);
  CoordinateSet s(spec.impacts(), spec.types());
  for (std::size_t i = 0; i < z.size(); ++i)
    if (z[i] > 0.0) s.insert_flat(i);
  return s;
}

/// Poisson rates seen by an institution of type `beta` with in-weights
/// `in`: x_s = sum_gamma in(s, gamma) z^{s, beta, gamma}.
inline std::vector<double> exposure_rates(const WeightMatrix& in, int beta, const RootVector& z) {
  const int R = in.rows();
  const int T = in.cols();
  std::vector<double> x(static_cast<std::size_t>(R), 0.0);
  for (int s = 0; s < R; ++s) {
    double acc = 0.0;
    for (int gamma = 0; gamma < T; ++gamma) acc += in(s, gamma) * z(s, beta, gamma);
    x[static_cast<std::size_t>(s)] = acc;
  }
  return x;
}

/// Default probability of every atom at z: psi_{C}(rates(z)).
inline std::vector<double> atom_default_probabilities(const ModelSpec& spec, const RootVector& z) {
  std::vector<double> out;
  out.reserve(spec.atoms().size());
  for (const Atom& a : spec.atoms())
    out.push_back(psi(a.capital, exposure_rates(a.in_weights, a.vtype, z)));
  return out;
}

/// Phi(z) = f(z) + z, the monotone map whose fixed points are the joint roots.
inline RootVector phi_eval(const ModelSpec& spec, const RootVector& z) {
  RootVector out = RootVector::like(spec);
  const std::vector<double> ps = atom_default_probabilities(spec, z);
  for (std::size_t i = 0; i < spec.atoms().size(); ++i) {
    const Atom& a = spec.atoms()[i];
    const double w = a.prob * ps[i];
    if (w == 0.0) continue;
    for (int r = 0; r < spec.impacts(); ++r)
      for (int alpha = 0; alpha < spec.types(); ++alpha)
        out(r, alpha, a.vtype) += w * a.out_weights(r, alpha);
  }
  return out;
}

inline CoordArray f_eval(const ModelSpec& spec, const RootVector& z) {
  CoordArray out = phi_eval(spec, z);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= z[i];
  return out;
}

/// How defaulted institutions are counted by g.
struct Weighting {
  enum class Kind { Count, PerType, Importance };
  Kind kind = Kind::Count;
  int beta = 0;  // only for PerType

  static Weighting count() { return {}; }
  static Weighting per_type(int beta) { return {Kind::PerType, beta}; }
  static Weighting importance() { return {Kind::Importance, 0}; }
};

/// Asymptotic default mass at z: count weighting gives g, per_type the
/// single-type summand, importance the systemic-importance functional g_S.
inline double g_eval(const ModelSpec& spec, const RootVector& z, Weighting weighting = {}) {
  double total = 0.0;
  for (const Atom& a : spec.atoms()) {
    if (weighting.kind == Weighting::Kind::PerType && a.vtype != weighting.beta) continue;
    const double scale = weighting.kind == Weighting::Kind::Importance ? a.importance : 1.0;
    if (scale == 0.0 || a.prob == 0.0) continue;
    total += a.prob * scale * psi(a.capital, exposure_rates(a.in_weights, a.vtype, z));
  }
  return total;
}

namespace detail {

// P(S in {C - level, ..., C - 1}) for each impact level 1..R, S the atom's
// compound Poisson exposure at z. Zero for infinite or zero capital.
inline std::vector<double> threshold_windows(const Atom& a, const RootVector& z, int impacts) {
  std::vector<double> w(static_cast<std::size_t>(impacts), 0.0);
  if (a.capital.is_infinite() || a.capital.is_zero()) return w;
  const long c = static_cast<long>(a.capital.value());
  const std::vector<double> rates = exposure_rates(a.in_weights, a.vtype, z);
  const std::vector<double> p = compound_poisson_pmf(rates, static_cast<std::size_t>(c - 1));
  // Suffix sums: window for level l covers p[max(c - l, 0)] .. p[c - 1].
  double acc = 0.0;
  for (int level = 1; level <= impacts; ++level) {
    const long k = c - level;
    if (k >= 0) acc += p[static_cast<std::size_t>(k)];
    w[static_cast<std::size_t>(level - 1)] = acc;
  }
  return w;
}

}  // namespace detail

/// Full Jacobian of f at z, row-major over flat coordinate indices:
/// J[c][c'] = df^c / dz^{c'}.
inline std::vector<double> jacobian(const ModelSpec& spec, const RootVector& z) {
  const int R = spec.impacts();
  const int T = spec.types();
  const std::size_t D = spec.dimension();
  std::vector<double> J(D * D, 0.0);
  for (std::size_t i = 0; i < D; ++i) J[i * D + i] = -1.0;
  for (const Atom& a : spec.atoms()) {
    const std::vector<double> win = detail::threshold_windows(a, z, R);
    const int beta = a.vtype;
    for (int r = 0; r < R; ++r)
      for (int alpha = 0; alpha < T; ++alpha) {
        const double wout = a.prob * a.out_weights(r, alpha);
        if (wout == 0.0) continue;
        const std::size_t row = flat_index({r, alpha, beta}, T);
        for (int rp = 0; rp < R; ++rp) {
          const double pw = win[static_cast<std::size_t>(rp)];
          if (pw == 0.0) continue;
          for (int bp = 0; bp < T; ++bp) {
            const std::size_t col = flat_index({rp, beta, bp}, T);
            J[row * D + col] += wout * a.in_weights(rp, bp) * pw;
          }
        }
      }
  }
  return J;
}

/// D_v f^{r,alpha,beta}(z) for a strictly positive direction v.
inline DerivativeVector directional_derivative(const ModelSpec& spec, const RootVector& z,
                                               const CoordArray& v) {
  for (std::size_t i = 0; i < v.size(); ++i)
    if (!(v[i] > 0.0))
      throw ContagionError(ErrorCode::NonPositiveDirection, "direction must be strictly positive");
  const int R = spec.impacts();
  const int T = spec.types();
  DerivativeVector d = DerivativeVector::like(spec);
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = -v[i];
  for (const Atom& a : spec.atoms()) {
    const std::vector<double> win = detail::threshold_windows(a, z, R);
    const int beta = a.vtype;
    double gain = 0.0;  // sum_{r'} (sum_{beta'} v^{r',beta,beta'} W^{-,r',beta'}) P(window r')
    for (int rp = 0; rp < R; ++rp) {
      const double pw = win[static_cast<std::size_t>(rp)];
      if (pw == 0.0) continue;
      double inner = 0.0;
      for (int bp = 0; bp < T; ++bp) inner += v(rp, beta, bp) * a.in_weights(rp, bp);
      gain += inner * pw;
    }
    if (gain == 0.0) continue;
    for (int r = 0; r < R; ++r)
      for (int alpha = 0; alpha < T; ++alpha) d(r, alpha, beta) += a.prob * a.out_weights(r, alpha) * gain;
  }
  return d;
}

}  // namespace contagion
