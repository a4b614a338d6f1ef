#pragma once

// Finitary model specification: a finite list of probability-weighted atoms,
// each describing the in/out weight profile, capital, type, shock probability
// and systemic importance of a class of institutions.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "contagion/error.hpp"

namespace contagion {

/// Capital of an institution: a nonnegative integer or infinity.
class Capital {
 public:
  constexpr Capital() = default;
  constexpr explicit Capital(std::uint32_t value) : value_(value) {}

  static constexpr Capital infinite() {
    Capital c;
    c.infinite_ = true;
    return c;
  }

  constexpr bool is_infinite() const { return infinite_; }
  constexpr bool is_zero() const { return !infinite_ && value_ == 0; }
  /// Only meaningful for finite capitals.
  constexpr std::uint32_t value() const { return value_; }

  friend constexpr bool operator==(const Capital& a, const Capital& b) {
    return a.infinite_ == b.infinite_ && (a.infinite_ || a.value_ == b.value_);
  }

 private:
  std::uint32_t value_ = 0;
  bool infinite_ = false;
};

/// Dense R x T matrix of nonnegative weights; entry (r, alpha) is the weight
/// for impact level r toward / from counterparties of type alpha (0-based).
class WeightMatrix {
 public:
  WeightMatrix() = default;
  WeightMatrix(int rows, int cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, fill) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  double& operator()(int r, int a) { return data_[static_cast<std::size_t>(r) * cols_ + a]; }
  double operator()(int r, int a) const { return data_[static_cast<std::size_t>(r) * cols_ + a]; }

  const std::vector<double>& data() const { return data_; }

  friend bool operator==(const WeightMatrix&, const WeightMatrix&) = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

struct Atom {
  double prob = 0.0;
  int vtype = 0;  // 0-based type index
  WeightMatrix in_weights;
  WeightMatrix out_weights;
  Capital capital;
  double shock_prob = 0.0;
  double importance = 1.0;

  friend bool operator==(const Atom&, const Atom&) = default;
};

/// Unvalidated specification, used while assembling systems (parsing,
/// subsystem embedding). Total mass may be below one.
struct SpecDraft {
  int impacts = 1;  // R
  int types = 1;    // T
  std::vector<Atom> atoms;
};

class ModelSpec;
ModelSpec validate_spec(SpecDraft draft);

/// Validated, immutable specification.
class ModelSpec {
 public:
  int impacts() const { return impacts_; }
  int types() const { return types_; }
  const std::vector<Atom>& atoms() const { return atoms_; }

  /// Number of coordinates of a root vector, R * T * T.
  std::size_t dimension() const {
    return static_cast<std::size_t>(impacts_) * types_ * types_;
  }

  std::uint32_t max_finite_capital() const {
    std::uint32_t c = 0;
    for (const auto& a : atoms_)
      if (!a.capital.is_infinite()) c = std::max(c, a.capital.value());
    return c;
  }

  SpecDraft draft() const { return SpecDraft{impacts_, types_, atoms_}; }

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;

 private:
  friend ModelSpec validate_spec(SpecDraft draft);
  friend ModelSpec apply_shock(const ModelSpec& spec);
  friend ModelSpec without_shocks(const ModelSpec& spec);

  ModelSpec(int impacts, int types, std::vector<Atom> atoms)
      : impacts_(impacts), types_(types), atoms_(std::move(atoms)) {}

  int impacts_ = 1;
  int types_ = 1;
  std::vector<Atom> atoms_;
};

inline constexpr double kMassTolerance = 1e-12;

namespace detail {

inline void check_matrix(const WeightMatrix& m, int R, int T, std::size_t atom, const char* which) {
  if (m.rows() != R || m.cols() != T)
    throw ContagionError(ErrorCode::ShapeMismatch,
                         "atom " + std::to_string(atom) + " " + which + " is " +
                             std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                             ", expected " + std::to_string(R) + "x" + std::to_string(T));
  for (double w : m.data()) {
    if (!std::isfinite(w))
      throw ContagionError(ErrorCode::NonFiniteValue,
                           "atom " + std::to_string(atom) + " " + which + " has a non-finite entry");
    if (w < 0.0)
      throw ContagionError(ErrorCode::NegativeValue,
                           "atom " + std::to_string(atom) + " " + which + " has a negative entry");
  }
}

inline void check_probability(double p, std::size_t atom, const char* which) {
  if (!std::isfinite(p))
    throw ContagionError(ErrorCode::NonFiniteValue, "atom " + std::to_string(atom) + " " + which);
  if (p < 0.0)
    throw ContagionError(ErrorCode::NegativeValue,
                         "atom " + std::to_string(atom) + " " + which + " is negative");
}

}  // namespace detail

/// Checks every invariant of a specification and returns the validated spec.
/// Probabilities summing to one within 1e-12 are renormalized exactly.
inline ModelSpec validate_spec(SpecDraft draft) {
  if (draft.impacts < 1 || draft.types < 1)
    throw ContagionError(ErrorCode::ShapeMismatch, "R and T must be positive");
  if (draft.atoms.empty()) throw ContagionError(ErrorCode::EmptyAtomList, "no atoms");

  double mass = 0.0;
  for (std::size_t i = 0; i < draft.atoms.size(); ++i) {
    const Atom& a = draft.atoms[i];
    detail::check_probability(a.prob, i, "prob");
    detail::check_probability(a.shock_prob, i, "shock_prob");
    if (a.shock_prob > 1.0)
      throw ContagionError(ErrorCode::InvalidArgument,
                           "atom " + std::to_string(i) + " shock_prob exceeds 1");
    if (!std::isfinite(a.importance))
      throw ContagionError(ErrorCode::NonFiniteValue, "atom " + std::to_string(i) + " importance");
    if (a.importance < 0.0)
      throw ContagionError(ErrorCode::NegativeValue,
                           "atom " + std::to_string(i) + " importance is negative");
    if (a.vtype < 0 || a.vtype >= draft.types)
      throw ContagionError(ErrorCode::ShapeMismatch,
                           "atom " + std::to_string(i) + " type " + std::to_string(a.vtype + 1) +
                               " outside 1.." + std::to_string(draft.types));
    detail::check_matrix(a.in_weights, draft.impacts, draft.types, i, "in_weights");
    detail::check_matrix(a.out_weights, draft.impacts, draft.types, i, "out_weights");
    mass += a.prob;
  }
  if (std::abs(mass - 1.0) > kMassTolerance)
    throw ContagionError(ErrorCode::NonUnitMass, "atom probabilities sum to " + std::to_string(mass));
  if (mass != 1.0)
    for (auto& a : draft.atoms) a.prob /= mass;

  return ModelSpec(draft.impacts, draft.types, std::move(draft.atoms));
}

/// Realizes per-atom ex-post shocks: every solvent atom with shock
/// probability q is split into a defaulted part of mass prob*q and a solvent
/// part of mass prob*(1-q). All shock probabilities are zero afterwards.
inline ModelSpec apply_shock(const ModelSpec& spec) {
  std::vector<Atom> out;
  out.reserve(spec.atoms().size() * 2);
  for (const Atom& a : spec.atoms()) {
    const double q = a.shock_prob;
    if (q <= 0.0 || a.capital.is_zero()) {
      Atom b = a;
      b.shock_prob = 0.0;
      out.push_back(std::move(b));
      continue;
    }
    Atom hit = a;
    hit.prob = a.prob * q;
    hit.capital = Capital(0);
    hit.shock_prob = 0.0;
    out.push_back(std::move(hit));
    if (q < 1.0) {
      Atom kept = a;
      kept.prob = a.prob * (1.0 - q);
      kept.shock_prob = 0.0;
      out.push_back(std::move(kept));
    }
  }
  return ModelSpec(spec.impacts(), spec.types(), std::move(out));
}

/// The same system with every shock probability set to zero.
inline ModelSpec without_shocks(const ModelSpec& spec) {
  std::vector<Atom> atoms = spec.atoms();
  for (auto& a : atoms) a.shock_prob = 0.0;
  return ModelSpec(spec.impacts(), spec.types(), std::move(atoms));
}

/// P(C = 0), ignoring shock probabilities.
inline double initial_default_mass(const ModelSpec& spec) {
  double m = 0.0;
  for (const auto& a : spec.atoms())
    if (a.capital.is_zero()) m += a.prob;
  return m;
}

/// Inserts a one-type system as type `new_type` of `target`. Masses are
/// scaled by `host_fraction` and out-weights toward the new type are divided
/// by it, so that the embedded block keeps its original edge density.
/// Cross-type weights start at zero.
inline SpecDraft embed_subsystem(const ModelSpec& sub, double host_fraction, int new_type,
                                 SpecDraft target) {
  if (sub.types() != 1)
    throw ContagionError(ErrorCode::ShapeMismatch, "embedded subsystem must have exactly one type");
  if (sub.impacts() != target.impacts)
    throw ContagionError(ErrorCode::ShapeMismatch, "impact levels of subsystem and target differ");
  if (new_type < 0 || new_type >= target.types)
    throw ContagionError(ErrorCode::ShapeMismatch, "new type outside target's type range");
  if (!(host_fraction > 0.0) || host_fraction > 1.0)
    throw ContagionError(ErrorCode::InvalidArgument, "host fraction must lie in (0, 1]");

  double used = 0.0;
  for (const auto& a : target.atoms) {
    if (a.vtype == new_type)
      throw ContagionError(ErrorCode::TypeCollision,
                           "type " + std::to_string(new_type + 1) + " already populated");
    used += a.prob;
  }
  if (used + host_fraction > 1.0 + kMassTolerance)
    throw ContagionError(ErrorCode::MassOverflow, "host fraction exceeds the unassigned mass " +
                                                      std::to_string(1.0 - used));

  for (const Atom& a : sub.atoms()) {
    Atom e;
    e.prob = a.prob * host_fraction;
    e.vtype = new_type;
    e.in_weights = WeightMatrix(target.impacts, target.types);
    e.out_weights = WeightMatrix(target.impacts, target.types);
    for (int r = 0; r < target.impacts; ++r) {
      e.in_weights(r, new_type) = a.in_weights(r, 0);
      e.out_weights(r, new_type) = a.out_weights(r, 0) / host_fraction;
    }
    e.capital = a.capital;
    e.shock_prob = a.shock_prob;
    e.importance = a.importance;
    target.atoms.push_back(std::move(e));
  }
  return target;
}

/// One coordinate (r, alpha, beta) of V = [R] x [T]^2, 0-based.
struct Coord {
  int r = 0;
  int alpha = 0;
  int beta = 0;

  friend auto operator<=>(const Coord&, const Coord&) = default;
};

inline std::size_t flat_index(const Coord& c, int types) {
  return (static_cast<std::size_t>(c.r) * types + c.alpha) * types + c.beta;
}

/// A subset of V, stored as a membership mask over the flat index.
class CoordinateSet {
 public:
  CoordinateSet() = default;
  CoordinateSet(int impacts, int types)
      : impacts_(impacts), types_(types),
        mask_(static_cast<std::size_t>(impacts) * types * types, false) {}

  static CoordinateSet all(int impacts, int types) {
    CoordinateSet s(impacts, types);
    std::fill(s.mask_.begin(), s.mask_.end(), true);
    return s;
  }

  int impacts() const { return impacts_; }
  int types() const { return types_; }

  void insert(const Coord& c) {
    check(c);
    mask_[flat_index(c, types_)] = true;
  }
  bool contains(const Coord& c) const {
    check(c);
    return mask_[flat_index(c, types_)];
  }
  bool contains_flat(std::size_t i) const { return mask_[i]; }
  void insert_flat(std::size_t i) { mask_[i] = true; }

  std::size_t size() const { return static_cast<std::size_t>(std::count(mask_.begin(), mask_.end(), true)); }
  bool empty() const { return size() == 0; }

  std::vector<Coord> members() const {
    std::vector<Coord> out;
    for (int r = 0; r < impacts_; ++r)
      for (int a = 0; a < types_; ++a)
        for (int b = 0; b < types_; ++b)
          if (mask_[flat_index({r, a, b}, types_)]) out.push_back({r, a, b});
    return out;
  }

  bool is_subset_of(const CoordinateSet& other) const {
    for (std::size_t i = 0; i < mask_.size(); ++i)
      if (mask_[i] && !other.mask_[i]) return false;
    return true;
  }

  friend bool operator==(const CoordinateSet&, const CoordinateSet&) = default;

 private:
  void check(const Coord& c) const {
    if (c.r < 0 || c.r >= impacts_ || c.alpha < 0 || c.alpha >= types_ || c.beta < 0 ||
        c.beta >= types_)
      throw ContagionError(ErrorCode::ShapeMismatch, "coordinate out of range");
  }

  int impacts_ = 0;
  int types_ = 0;
  std::vector<bool> mask_;
};

}  // namespace contagion
