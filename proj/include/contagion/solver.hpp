#pragma once

// Monotone fixed-point solvers for the joint roots of f:
//   least fixed point of z -> Phi(z) + eps * 1_I   (iteration from below),
//   greatest fixed point of Phi                    (iteration from zeta),
// and the eps -> 0+ limits z* = lim zhat(eps, V) and z_0(I) = lim zhat(eps, I).

#include <algorithm>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "contagion/analytic.hpp"
#include "contagion/error.hpp"
#include "contagion/model.hpp"
#include "contagion/root_vector.hpp"

namespace contagion {

struct SolverOptions {
  double tol = 1e-10;                       // sup-norm increment that stops the iteration
  std::size_t max_iterations = 20'000'000;
};

struct FixedPointSolution {
  RootVector z;
  std::size_t iterations = 0;
  double residual = 0.0;  // sup |Phi(z) + shift - z|
  bool monotone = true;   // every iterate stayed ordered and inside [0, zeta + eps]
};

/// Thrown when the iteration budget runs out; carries the last iterate.
class SolverError : public ContagionError {
 public:
  SolverError(ErrorCode code, const std::string& what, FixedPointSolution partial)
      : ContagionError(code, what), partial_(std::move(partial)) {}
  const FixedPointSolution& partial() const { return partial_; }

 private:
  FixedPointSolution partial_;
};

namespace detail {

inline void check_tolerance(double tol) {
  if (!(tol > 0.0)) throw ContagionError(ErrorCode::InvalidTolerance, "tolerance must be positive");
}

inline CoordArray shift_vector(const ModelSpec& spec, double eps, const CoordinateSet* shift_set) {
  CoordArray s = CoordArray::like(spec);
  if (eps == 0.0) return s;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (shift_set == nullptr || shift_set->contains_flat(i)) s[i] = eps;
  return s;
}

// Iterates z <- Phi(z) + shift until the sup-norm step drops below `stop`.
// `direction` is +1 for increasing iterations (from below), -1 for
// decreasing ones (from above).
inline FixedPointSolution iterate(const ModelSpec& spec, const CoordArray& shift, RootVector z,
                                  double stop, std::size_t max_iterations, int direction) {
  const RootVector upper = zeta(spec);
  const double slack = 1e-12;
  FixedPointSolution sol;
  for (std::size_t it = 1; it <= max_iterations; ++it) {
    RootVector next = phi_eval(spec, z);
    double step = 0.0;
    for (std::size_t i = 0; i < next.size(); ++i) {
      next[i] += shift[i];
      const double d = next[i] - z[i];
      step = std::max(step, std::abs(d));
      if (direction * d < -slack) sol.monotone = false;
      if (next[i] < -slack || next[i] > upper[i] + shift[i] + slack) sol.monotone = false;
    }
    z = std::move(next);
    sol.iterations = it;
    if (step < stop) {
      CoordArray r = phi_eval(spec, z);
      double res = 0.0;
      for (std::size_t i = 0; i < r.size(); ++i) res = std::max(res, std::abs(r[i] + shift[i] - z[i]));
      sol.residual = res;
      sol.z = std::move(z);
      return sol;
    }
  }
  sol.z = std::move(z);
  sol.residual = sup_distance(phi_eval(spec, sol.z), sol.z);
  throw SolverError(ErrorCode::MaxIterations,
                    "fixed-point iteration did not settle within " + std::to_string(max_iterations) +
                        " iterations (residual " + std::to_string(sol.residual) + ")",
                    std::move(sol));
}

}  // namespace detail

/// Least fixed point of z -> Phi(z) + eps * 1_{shift_set} by monotone
/// iteration. `start` may be any point below the answer with
/// start <= Phi(start) + shift (for instance a least fixed point for a
/// smaller shift); the default is 0. A null shift_set shifts all of V.
inline FixedPointSolution least_fixed_point(const ModelSpec& spec, double eps,
                                            const CoordinateSet* shift_set,
                                            const SolverOptions& opts = {},
                                            const RootVector* start = nullptr) {
  detail::check_tolerance(opts.tol);
  if (!(eps >= 0.0)) throw ContagionError(ErrorCode::InvalidArgument, "eps must be nonnegative");
  const CoordArray shift = detail::shift_vector(spec, eps, shift_set);
  // Near a touching root the step size is of order eps, so the stopping rule
  // must sit well below eps to avoid halting in the bottleneck.
  const double stop = eps > 0.0 ? std::min(opts.tol, 1e-2 * eps) : opts.tol;
  RootVector z0 = start ? *start : RootVector::like(spec);
  return detail::iterate(spec, shift, std::move(z0), stop, opts.max_iterations, +1);
}

inline FixedPointSolution least_fixed_point(const ModelSpec& spec, double eps,
                                            const CoordinateSet& shift_set,
                                            const SolverOptions& opts = {}) {
  return least_fixed_point(spec, eps, &shift_set, opts);
}

/// Smallest joint root zhat.
inline FixedPointSolution smallest_root(const ModelSpec& spec, const SolverOptions& opts = {}) {
  return least_fixed_point(spec, 0.0, nullptr, opts);
}

/// Largest joint root over all of R_+^V (not restricted to S_0), by
/// decreasing iteration from zeta.
inline FixedPointSolution largest_root(const ModelSpec& spec, const SolverOptions& opts = {}) {
  detail::check_tolerance(opts.tol);
  return detail::iterate(spec, CoordArray::like(spec), zeta(spec), opts.tol, opts.max_iterations, -1);
}

struct EpsilonSchedule {
  double eps_start = 1e-2;
  double eps_floor = 1e-10;
  double gap_tol = 1e-6;  // Cauchy gap between the last two levels

  std::vector<double> levels() const {
    std::vector<double> out;
    for (double e = eps_start; e > eps_floor; e *= 0.5) out.push_back(e);
    out.push_back(eps_floor);
    return out;
  }
};

struct ScheduleStep {
  double eps = 0.0;
  std::size_t iterations = 0;
  double residual = 0.0;
};

struct EpsilonLimit {
  RootVector z;                      // iterate at the floor level
  RootVector previous;               // iterate at the level before the floor
  RootVector smallest;               // zhat, used as warm start
  std::vector<ScheduleStep> trace;
  double cauchy_gap = 0.0;
  double floor_residual = 0.0;       // sup |f(z)| at the floor iterate, no shift
  bool converged = false;
  bool monotone_in_eps = true;
};

/// lim_{eps -> 0+} zhat(eps, I) along a halving schedule. `shift_set` null
/// means all of V.
inline EpsilonLimit epsilon_limit(const ModelSpec& spec, const CoordinateSet* shift_set,
                                  const SolverOptions& opts = {}, const EpsilonSchedule& schedule = {}) {
  detail::check_tolerance(opts.tol);
  if (!(schedule.eps_floor > 0.0) || schedule.eps_start < schedule.eps_floor)
    throw ContagionError(ErrorCode::InvalidArgument, "invalid eps schedule");
  EpsilonLimit out;
  out.smallest = smallest_root(spec, opts).z;
  std::optional<RootVector> prev;
  for (double eps : schedule.levels()) {
    FixedPointSolution s = least_fixed_point(spec, eps, shift_set, opts, &out.smallest);
    out.trace.push_back({eps, s.iterations, s.residual});
    if (prev) {
      if (!componentwise_leq(s.z, *prev, 1e-9)) out.monotone_in_eps = false;
      out.previous = std::move(*prev);
    }
    prev = std::move(s.z);
  }
  out.z = std::move(*prev);
  if (out.previous.size() == 0) out.previous = out.z;
  out.cauchy_gap = sup_distance(out.z, out.previous);
  out.floor_residual = f_eval(spec, out.z).sup_norm();
  out.converged = out.cauchy_gap <= schedule.gap_tol;
  return out;
}

/// z*: the largest joint root in the component S_0 of {f >= 0} containing 0.
inline EpsilonLimit z_star(const ModelSpec& spec, const SolverOptions& opts = {},
                           const EpsilonSchedule& schedule = {}) {
  return epsilon_limit(spec, nullptr, opts, schedule);
}

/// z_0(I): the smallest joint root stable under shocks on I, for
/// nonempty I within V-tilde.
inline EpsilonLimit z_zero(const ModelSpec& spec, const CoordinateSet& shock_set,
                           const SolverOptions& opts = {}, const EpsilonSchedule& schedule = {}) {
  if (shock_set.empty()) throw ContagionError(ErrorCode::EmptyShockSet, "shock set I is empty");
  if (shock_set.impacts() != spec.impacts() || shock_set.types() != spec.types())
    throw ContagionError(ErrorCode::ShapeMismatch, "shock set dimensions do not match the spec");
  if (!shock_set.is_subset_of(support(spec)))
    throw ContagionError(ErrorCode::ShockSetOutsideSupport,
                         "shock set contains coordinates with zeta = 0");
  return epsilon_limit(spec, &shock_set, opts, schedule);
}

/// Throws ScheduleNotConverged unless the limit resolved.
inline const EpsilonLimit& require_converged(const EpsilonLimit& lim) {
  if (!lim.converged)
    throw ContagionError(ErrorCode::ScheduleNotConverged,
                         "Cauchy gap " + std::to_string(lim.cauchy_gap) + " at the eps floor");
  return lim;
}

}  // namespace contagion
