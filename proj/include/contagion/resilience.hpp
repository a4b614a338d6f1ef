#pragma once

// Root certificates, resilience classification and the subsystem-based
// sufficient conditions for single-impact (R = 1) systems.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "contagion/analytic.hpp"
#include "contagion/model.hpp"
#include "contagion/root_vector.hpp"
#include "contagion/solver.hpp"

namespace contagion {

enum class CertificateMode { Derivative, Integral };

struct RootCertificate {
  bool holds = false;
  CertificateMode mode = CertificateMode::Derivative;
  // Derivative mode: max_c D_v f^c(root) / v^c. Integral mode: the best
  // feasible kappa over the delta grid.
  double score = 0.0;
  double residual = 0.0;
  double margin = 0.0;  // derivative mode: required distance below zero
};

/// 16 log-spaced points in (0, Delta] with Delta = 0.1 * |zeta|_inf.
inline std::vector<double> default_delta_grid(const ModelSpec& spec, int points = 16) {
  double delta = 0.1 * zeta(spec).sup_norm();
  if (delta <= 0.0) delta = 0.1;
  std::vector<double> grid;
  const double lo = std::log(delta * 1e-6);
  const double hi = std::log(delta);
  for (int i = 0; i < points; ++i) {
    const double t = points == 1 ? 1.0 : static_cast<double>(i) / (points - 1);
    grid.push_back(std::exp(lo + t * (hi - lo)));
  }
  return grid;
}

/// Sufficient test that a joint root in S_0 equals z*. `holds == false` is not
/// a refutation. Derivative mode asks for D_v f(root) < 0 in every coordinate,
/// with a margin of 10 * sqrt(residual) so that an approximate root sitting
/// next to a tangency is not mistaken for a transversal one. Integral mode
/// checks the kappa < 1 inequality at every delta of the grid.
inline RootCertificate check_root_is_zstar(const ModelSpec& spec, const RootVector& root,
                                           const CoordArray& v, CertificateMode mode,
                                           const std::vector<double>& delta_grid = {},
                                           double residual_tol = 1e-8) {
  RootCertificate cert;
  cert.mode = mode;
  cert.residual = f_eval(spec, root).sup_norm();
  if (cert.residual > residual_tol)
    throw ContagionError(ErrorCode::NotARoot,
                         "sup |f(root)| = " + std::to_string(cert.residual) + " exceeds " +
                             std::to_string(residual_tol));

  auto worst_ratio = [&](const DerivativeVector& d, double offset) {
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < d.size(); ++i) worst = std::max(worst, (d[i] + offset * v[i]) / v[i]);
    return worst;
  };

  if (mode == CertificateMode::Derivative) {
    cert.score = worst_ratio(directional_derivative(spec, root, v), 0.0);
    cert.margin = 10.0 * std::sqrt(cert.residual);
    cert.holds = cert.score < -cert.margin;
    return cert;
  }

  const std::vector<double> grid = delta_grid.empty() ? default_delta_grid(spec) : delta_grid;
  double kappa = -std::numeric_limits<double>::infinity();
  for (double delta : grid) {
    if (!(delta > 0.0)) throw ContagionError(ErrorCode::InvalidArgument, "delta grid must be positive");
    RootVector shifted = root;
    for (std::size_t i = 0; i < shifted.size(); ++i) shifted[i] += delta * v[i];
    // gain = D_v f + v is the right-hand side of the kappa inequality.
    kappa = std::max(kappa, worst_ratio(directional_derivative(spec, shifted, v), 1.0));
  }
  cert.score = kappa;
  cert.holds = kappa < 1.0;
  return cert;
}

/// Looks for v > 0 with D_v f(0) < 0. The Jacobian at 0 is B - I with B >= 0;
/// such a v exists iff the spectral radius of B is below one, and then the
/// Neumann iterate v = 1 + B v converges to (I - B)^{-1} 1, for which
/// D_v f(0) = -1. The all-ones direction is tried first.
inline std::optional<CoordArray> search_certificate_direction(const ModelSpec& spec,
                                                              std::size_t max_iterations = 10'000) {
  const RootVector origin = RootVector::like(spec);
  const CoordArray ones = CoordArray::like(spec, 1.0);
  if (check_root_is_zstar(spec, origin, ones, CertificateMode::Derivative).holds) return ones;

  const std::size_t D = spec.dimension();
  std::vector<double> B = jacobian(spec, origin);
  for (std::size_t i = 0; i < D; ++i) B[i * D + i] += 1.0;
  CoordArray v = ones;
  for (std::size_t it = 0; it < max_iterations; ++it) {
    CoordArray next = ones;
    for (std::size_t i = 0; i < D; ++i)
      for (std::size_t j = 0; j < D; ++j) next[i] += B[i * D + j] * v[j];
    const double change = sup_distance(next, v);
    v = std::move(next);
    if (v.sup_norm() > 1e12) return std::nullopt;
    if (change <= 1e-12 * v.sup_norm()) break;
  }
  if (check_root_is_zstar(spec, origin, v, CertificateMode::Derivative).holds) return v;
  return std::nullopt;
}

enum class Verdict { Resilient, NonResilient, Inconclusive };

inline std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Resilient: return "Resilient";
    case Verdict::NonResilient: return "NonResilient";
    case Verdict::Inconclusive: return "Inconclusive";
  }
  return "Unknown";
}

struct ShockSetBound {
  CoordinateSet shock_set;
  RootVector z0;
  double lower_bound = 0.0;  // g(z_0(I))
  double cauchy_gap = 0.0;
  bool converged = false;
};

struct ResilienceTolerances {
  double resilience_tol = 1e-6;  // |z*|_inf below this declares S_0 = {0}
  SolverOptions solver;
  EpsilonSchedule schedule;
};

struct ResilienceReport {
  Verdict verdict = Verdict::Inconclusive;
  RootVector z_star;
  RootVector z_hat;
  double cauchy_gap = 0.0;
  std::vector<ScheduleStep> trace;
  std::optional<CoordArray> certificate;            // v with D_v f(0) < 0
  std::optional<DerivativeVector> certificate_derivative;
  double g_star = 0.0;                             // g(z*) = g(z_0(V-tilde))
  std::vector<ShockSetBound> lower_bounds;         // V-tilde first, then caller sets
  ResilienceTolerances tolerances;
};

/// Classifies the unshocked system (shock probabilities are ignored).
/// Resilient iff z* = 0 within tolerance; NonResilient otherwise with the
/// lower bounds g(z_0(I)) for V-tilde and every caller-supplied set I.
inline ResilienceReport classify_resilience(const ModelSpec& input,
                                            const std::vector<CoordinateSet>& shock_sets = {},
                                            const ResilienceTolerances& tol = {}) {
  const ModelSpec spec = without_shocks(input);
  if (initial_default_mass(spec) > 0.0)
    throw ContagionError(ErrorCode::InitialDefaults,
                         "P(C = 0) = " + std::to_string(initial_default_mass(spec)) +
                             "; resilience concerns initially unshocked systems");
  ResilienceReport rep;
  rep.tolerances = tol;
  const EpsilonLimit lim = z_star(spec, tol.solver, tol.schedule);
  rep.z_star = lim.z;
  rep.z_hat = lim.smallest;
  rep.cauchy_gap = lim.cauchy_gap;
  rep.trace = lim.trace;
  rep.g_star = g_eval(spec, lim.z);
  if (!lim.converged) {
    rep.verdict = Verdict::Inconclusive;
    return rep;
  }
  if (lim.z.sup_norm() < tol.resilience_tol) {
    rep.verdict = Verdict::Resilient;
    if (auto v = search_certificate_direction(spec)) {
      rep.certificate_derivative = directional_derivative(spec, RootVector::like(spec), *v);
      rep.certificate = std::move(v);
    }
    return rep;
  }
  rep.verdict = Verdict::NonResilient;
  std::vector<CoordinateSet> sets;
  sets.push_back(support(spec));
  sets.insert(sets.end(), shock_sets.begin(), shock_sets.end());
  for (const auto& I : sets) {
    const EpsilonLimit zl = z_zero(spec, I, tol.solver, tol.schedule);
    rep.lower_bounds.push_back({I, zl.z, g_eval(spec, zl.z), zl.cauchy_gap, zl.converged});
  }
  return rep;
}

/// E[W^{+,alpha} W^{-,alpha} P(Poi(W^{-,alpha} z) = C - 1) 1{A = alpha}] for
/// a single-impact system; the type-alpha block meets the capital condition
/// at level eps iff this stays below eps for all small z > 0.
inline double subsystem_margin(const ModelSpec& spec, int alpha, double z) {
  if (spec.impacts() != 1)
    throw ContagionError(ErrorCode::MultiImpactUnsupported, "subsystem margin needs R = 1");
  if (alpha < 0 || alpha >= spec.types())
    throw ContagionError(ErrorCode::ShapeMismatch, "type index out of range");
  if (!(z > 0.0)) throw ContagionError(ErrorCode::InvalidArgument, "z must be positive");
  double total = 0.0;
  for (const Atom& a : spec.atoms()) {
    if (a.vtype != alpha || a.capital.is_infinite() || a.capital.is_zero()) continue;
    const double win = a.in_weights(0, alpha);
    const double wout = a.out_weights(0, alpha);
    if (win == 0.0 || wout == 0.0) continue;
    const std::uint32_t k = a.capital.value() - 1;
    const double rate = win * z;
    const double pk = std::exp(-rate + k * std::log(rate) - std::lgamma(k + 1.0));
    total += a.prob * wout * win * pk;
  }
  return total;
}

/// Smallest K with W^{+-,beta} <= K W^{+-,vtype} entrywise for every atom and
/// every foreign type beta; infinity when an internal weight is zero while
/// the matching external one is positive.
inline double cross_weight_bound(const ModelSpec& spec) {
  double K = 0.0;
  for (const Atom& a : spec.atoms())
    for (const WeightMatrix* m : {&a.in_weights, &a.out_weights})
      for (int r = 0; r < spec.impacts(); ++r) {
        const double internal = (*m)(r, a.vtype);
        for (int beta = 0; beta < spec.types(); ++beta) {
          if (beta == a.vtype) continue;
          const double external = (*m)(r, beta);
          if (external == 0.0) continue;
          if (internal == 0.0) return std::numeric_limits<double>::infinity();
          K = std::max(K, external / internal);
        }
      }
  return K;
}

struct SubsystemCriterion {
  double cross_bound = 0.0;          // K
  double threshold = 0.0;            // (1 + K^2 (T - 1))^{-1}
  std::vector<double> sup_margins;   // per type, over the probe grid near 0
  bool satisfied = false;            // every margin below the threshold
};

/// Combined-resilience sufficient condition for R = 1: every subsystem's
/// margin near z = 0 stays below (1 + K^2 (T - 1))^{-1}. Margins are probed
/// on a log grid in [z_probe * 1e-4, z_probe].
inline SubsystemCriterion subsystem_resilience_criterion(const ModelSpec& spec, double z_probe = 1e-4,
                                                         int points = 32) {
  SubsystemCriterion out;
  out.cross_bound = cross_weight_bound(spec);
  const double T = spec.types();
  out.threshold = std::isinf(out.cross_bound)
                      ? (spec.types() == 1 ? 1.0 : 0.0)
                      : 1.0 / (1.0 + out.cross_bound * out.cross_bound * (T - 1.0));
  out.satisfied = true;
  for (int alpha = 0; alpha < spec.types(); ++alpha) {
    double sup = 0.0;
    for (int i = 0; i < points; ++i) {
      const double t = static_cast<double>(i) / (points - 1);
      const double z = z_probe * std::pow(1e-4, 1.0 - t);
      sup = std::max(sup, subsystem_margin(spec, alpha, z));
    }
    out.sup_margins.push_back(sup);
    if (!(sup < out.threshold)) out.satisfied = false;
  }
  return out;
}

}  // namespace contagion
