#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "contagion/contagion.hpp"
#include "contagion/io.hpp"

namespace testing_support {

using namespace contagion;

inline std::string spec_path(const std::string& name) { return std::string(CONTAGION_SPEC_DIR) + "/" + name + ".json"; }

inline ModelSpec bundled(const std::string& name) { return load_spec(spec_path(name)); }

inline const std::vector<std::string>& bundled_names() {
  static const std::vector<std::string> names{"unique_root", "touching_roots", "resilient_uniform",   "nonresilient_uniform",   "subsystems_a",        "subsystems_b",
                                              "subsystems_c", "subsystems_shocked_a", "subsystems_shocked_b", "subsystems_shocked_c", "core_periphery", "core_periphery_modified"};
  return names;
}

inline ReductionBlock bundled_reduction(const std::string& name) {
  const Json j = read_json_file(spec_path(name));
  const ModelSpec s = parse_spec(j);
  return parse_reduction(j.at("reduction"), s.impacts(), s.types());
}

inline WeightMatrix matrix(int rows, int cols, std::initializer_list<double> values) {
  WeightMatrix m(rows, cols);
  auto it = values.begin();
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = *it++;
  return m;
}

inline Atom make_atom(double prob, int vtype, WeightMatrix in, WeightMatrix out, Capital cap, double shock = 0.0,
                      double importance = 1.0) {
  Atom a;
  a.prob = prob;
  a.vtype = vtype;
  a.in_weights = std::move(in);
  a.out_weights = std::move(out);
  a.capital = cap;
  a.shock_prob = shock;
  a.importance = importance;
  return a;
}

/// One type, R impact levels, every weight w, a single capital value.
inline ModelSpec homogeneous(int R, double w_in, double w_out, Capital cap, double shock = 0.0) {
  SpecDraft d;
  d.impacts = R;
  d.types = 1;
  d.atoms.push_back(make_atom(1.0, 0, WeightMatrix(R, 1, w_in), WeightMatrix(R, 1, w_out), cap, shock));
  return validate_spec(d);
}

struct RandomSpecOptions {
  int max_impacts = 3;
  int max_types = 3;
  int max_atoms = 4;
  double max_weight = 3.0;
  int max_capital = 4;
  bool allow_zero_capital = false;
  bool allow_infinite = true;
  bool shocks = false;
};

inline ModelSpec random_spec(std::mt19937_64& rng, const RandomSpecOptions& o = {}) {
  std::uniform_int_distribution<int> Rd(1, o.max_impacts), Td(1, o.max_types), Ad(1, o.max_atoms);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  SpecDraft d;
  d.impacts = Rd(rng);
  d.types = Td(rng);
  const int A = std::max(Ad(rng), d.types);
  std::vector<double> w(static_cast<std::size_t>(A));
  double total = 0.0;
  for (auto& x : w) total += (x = 0.1 + U(rng));
  for (int a = 0; a < A; ++a) {
    Atom at;
    at.prob = w[static_cast<std::size_t>(a)] / total;
    at.vtype = a < d.types ? a : static_cast<int>(U(rng) * d.types) % d.types;
    at.in_weights = WeightMatrix(d.impacts, d.types);
    at.out_weights = WeightMatrix(d.impacts, d.types);
    for (int r = 0; r < d.impacts; ++r)
      for (int c = 0; c < d.types; ++c) {
        at.in_weights(r, c) = U(rng) < 0.2 ? 0.0 : o.max_weight * U(rng);
        at.out_weights(r, c) = U(rng) < 0.2 ? 0.0 : o.max_weight * U(rng);
      }
    const int lo = o.allow_zero_capital ? 0 : 1;
    std::uniform_int_distribution<int> Cd(lo, o.max_capital);
    at.capital = (o.allow_infinite && U(rng) < 0.1) ? Capital::infinite() : Capital(static_cast<std::uint32_t>(Cd(rng)));
    if (o.shocks) at.shock_prob = 0.2 * U(rng);
    at.importance = 2.0 * U(rng);
    d.atoms.push_back(std::move(at));
  }
  return validate_spec(d);
}

/// Random point in [0, scale * zeta] (coordinates with zeta = 0 get a small
/// positive value so that the point is interior everywhere).
inline RootVector random_point(const ModelSpec& spec, std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> U(0.05, 0.95);
  const RootVector zt = zeta(spec);
  RootVector z = RootVector::like(spec);
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = scale * U(rng) * (zt[i] > 0 ? zt[i] : 0.5);
  return z;
}

/// Poisson pmf from the closed form.
inline double poisson(double lambda, int k) {
  if (lambda == 0.0) return k == 0 ? 1.0 : 0.0;
  return std::exp(-lambda + k * std::log(lambda) - std::lgamma(k + 1.0));
}

/// P(sum_s s X_s = k) by enumerating every count vector.
inline double brute_compound(const std::vector<double>& rates, int k) {
  const int R = static_cast<int>(rates.size());
  double total = 0.0;
  // Recursive enumeration over s = 1..R with the remaining budget.
  std::function<void(int, int, double)> rec = [&](int s, int left, double prob) {
    if (s == R) {
      if (left == 0) total += prob;
      return;
    }
    const int step = s + 1;
    for (int c = 0; c * step <= left; ++c) rec(s + 1, left - c * step, prob * poisson(rates[static_cast<std::size_t>(s)], c));
  };
  rec(0, k, 1.0);
  return total;
}

}  // namespace testing_support
