#pragma once

// JSON ingestion and emission: specification files, experiment configs,
// solver diagnostics and reports. Types and coordinates are 1-based in files.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "contagion/error.hpp"
#include "contagion/model.hpp"
#include "contagion/montecarlo.hpp"
#include "contagion/resilience.hpp"
#include "contagion/rootset.hpp"
#include "contagion/solver.hpp"

namespace contagion {

using Json = nlohmann::ordered_json;

inline constexpr const char* kToolVersion = "0.1.0";

namespace detail {

[[noreturn]] inline void parse_fail(const std::string& where, const std::string& what) {
  throw ContagionError(ErrorCode::ParseError, where + ": " + what);
}

// A number, or a string "p/q" or "p".
inline double read_number(const Json& j, const std::string& where) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    const auto slash = s.find('/');
    try {
      std::size_t used = 0;
      if (slash == std::string::npos) {
        const double v = std::stod(s, &used);
        if (used == s.size()) return v;
      } else {
        const std::string a = s.substr(0, slash), b = s.substr(slash + 1);
        std::size_t ua = 0, ub = 0;
        const double num = std::stod(a, &ua);
        const double den = std::stod(b, &ub);
        if (ua == a.size() && ub == b.size()) return num / den;
      }
    } catch (const std::exception&) {
    }
  }
  parse_fail(where, "expected a number or a \"p/q\" string");
}

inline WeightMatrix read_matrix(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty() || !j.front().is_array())
    parse_fail(where, "expected a nonempty array of rows");
  const int rows = static_cast<int>(j.size());
  const int cols = static_cast<int>(j.front().size());
  WeightMatrix m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    const Json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<int>(row.size()) != cols)
      throw ContagionError(ErrorCode::ShapeMismatch, where + ": ragged weight matrix");
    for (int c = 0; c < cols; ++c)
      m(r, c) = read_number(row[static_cast<std::size_t>(c)], where + "[" + std::to_string(r) + "]");
  }
  return m;
}

inline Capital read_capital(const Json& j, const std::string& where) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf" || s == "Infinity" || s == "infinity") return Capital::infinite();
    parse_fail(where, "capital string must be \"inf\"");
  }
  if (j.is_number_integer() || j.is_number_unsigned()) {
    const auto v = j.get<long long>();
    if (v < 0) throw ContagionError(ErrorCode::NegativeValue, where + ": negative capital");
    if (v > 0xffffffffLL) parse_fail(where, "capital too large");
    return Capital(static_cast<std::uint32_t>(v));
  }
  if (j.is_number_float()) {
    const double v = j.get<double>();
    if (v < 0) throw ContagionError(ErrorCode::NegativeValue, where + ": negative capital");
    if (v != std::floor(v) || v > 4294967295.0) parse_fail(where, "capital must be an integer or \"inf\"");
    return Capital(static_cast<std::uint32_t>(v));
  }
  parse_fail(where, "capital must be an integer or \"inf\"");
}

inline Json write_matrix(const WeightMatrix& m) {
  Json rows = Json::array();
  for (int r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace detail

/// Parses a specification object into an unvalidated draft.
inline SpecDraft parse_spec_draft(const Json& j) {
  if (!j.is_object()) detail::parse_fail("spec", "expected an object");
  SpecDraft d;
  if (!j.contains("R") || !j.contains("T")) detail::parse_fail("spec", "missing R or T");
  d.impacts = j.at("R").get<int>();
  d.types = j.at("T").get<int>();
  if (!j.contains("atoms") || !j.at("atoms").is_array()) detail::parse_fail("spec", "missing atoms array");
  std::size_t idx = 0;
  for (const Json& a : j.at("atoms")) {
    const std::string where = "atoms[" + std::to_string(idx++) + "]";
    if (!a.is_object()) detail::parse_fail(where, "expected an object");
    for (const char* key : {"prob", "vtype", "in_weights", "out_weights", "capital"})
      if (!a.contains(key)) detail::parse_fail(where, std::string("missing field ") + key);
    Atom atom;
    atom.prob = detail::read_number(a.at("prob"), where + ".prob");
    const int vt = a.at("vtype").get<int>();
    atom.vtype = vt - 1;
    atom.in_weights = detail::read_matrix(a.at("in_weights"), where + ".in_weights");
    atom.out_weights = detail::read_matrix(a.at("out_weights"), where + ".out_weights");
    atom.capital = detail::read_capital(a.at("capital"), where + ".capital");
    if (a.contains("shock_prob")) atom.shock_prob = detail::read_number(a.at("shock_prob"), where + ".shock_prob");
    if (a.contains("importance")) atom.importance = detail::read_number(a.at("importance"), where + ".importance");
    d.atoms.push_back(std::move(atom));
  }
  return d;
}

inline ModelSpec parse_spec(const Json& j) { return validate_spec(parse_spec_draft(j)); }

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ContagionError(ErrorCode::IoError, "cannot open " + path);
  try {
    return Json::parse(in, nullptr, true, true);
  } catch (const nlohmann::json::parse_error& e) {
    throw ContagionError(ErrorCode::ParseError, path + ": " + e.what());
  }
}

inline ModelSpec load_spec(const std::string& path) { return parse_spec(read_json_file(path)); }

inline Json serialize_spec(const ModelSpec& spec) {
  Json j;
  j["R"] = spec.impacts();
  j["T"] = spec.types();
  Json atoms = Json::array();
  for (const Atom& a : spec.atoms()) {
    Json o;
    o["prob"] = a.prob;
    o["vtype"] = a.vtype + 1;
    o["in_weights"] = detail::write_matrix(a.in_weights);
    o["out_weights"] = detail::write_matrix(a.out_weights);
    if (a.capital.is_infinite())
      o["capital"] = "inf";
    else
      o["capital"] = a.capital.value();
    o["shock_prob"] = a.shock_prob;
    o["importance"] = a.importance;
    atoms.push_back(std::move(o));
  }
  j["atoms"] = std::move(atoms);
  return j;
}

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

/// Hash of the canonical serialization, stable across formatting of the
/// input file.
inline std::string spec_hash(const ModelSpec& spec) { return hex64(fnv1a(serialize_spec(spec).dump())); }

// ---- coordinates ---------------------------------------------------------

inline Coord parse_coord(const Json& j, int R, int T, const std::string& where) {
  if (!j.is_array() || j.size() != 3) detail::parse_fail(where, "coordinate must be [r, alpha, beta]");
  const Coord c{j[0].get<int>() - 1, j[1].get<int>() - 1, j[2].get<int>() - 1};
  if (c.r < 0 || c.r >= R || c.alpha < 0 || c.alpha >= T || c.beta < 0 || c.beta >= T)
    throw ContagionError(ErrorCode::ShapeMismatch, where + ": coordinate out of range");
  return c;
}

inline Json coord_json(const Coord& c) { return Json::array({c.r + 1, c.alpha + 1, c.beta + 1}); }

/// Parses "r,a,b;r,a,b;..." (1-based) into a coordinate set.
inline CoordinateSet parse_shock_set(const std::string& text, int R, int T) {
  CoordinateSet set(R, T);
  std::stringstream all(text);
  std::string item;
  while (std::getline(all, item, ';')) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    std::stringstream parts(item);
    std::string tok;
    std::vector<int> v;
    while (std::getline(parts, tok, ',')) {
      try {
        std::size_t used = 0;
        v.push_back(std::stoi(tok, &used));
      } catch (const std::exception&) {
        detail::parse_fail("shock set", "bad integer '" + tok + "'");
      }
    }
    if (v.size() != 3) detail::parse_fail("shock set", "each entry needs three indices r,alpha,beta");
    const Coord c{v[0] - 1, v[1] - 1, v[2] - 1};
    if (c.r < 0 || c.r >= R || c.alpha < 0 || c.alpha >= T || c.beta < 0 || c.beta >= T)
      throw ContagionError(ErrorCode::ShapeMismatch, "shock set entry '" + item + "' out of range");
    set.insert(c);
  }
  if (set.empty()) throw ContagionError(ErrorCode::EmptyShockSet, "shock set is empty");
  return set;
}

inline Json coordinate_set_json(const CoordinateSet& s) {
  Json out = Json::array();
  for (const Coord& c : s.members()) out.push_back(coord_json(c));
  return out;
}

inline Json coord_array_json(const CoordArray& a) {
  Json out = Json::array();
  for (int r = 0; r < a.impacts(); ++r)
    for (int al = 0; al < a.types(); ++al)
      for (int b = 0; b < a.types(); ++b) out.push_back({{"coord", coord_json({r, al, b})}, {"value", a(r, al, b)}});
  return out;
}

// ---- reduction blocks ----------------------------------------------------

struct ReductionBlock {
  ReducedAxes axes;
  ScanGrid grid;
  std::vector<std::string> axis_labels;
};

/// Optional "reduction" object of a spec file:
///   {"axes": [[{"coord": [r,a,b], "coef": c}, ...], ...],
///    "functions": [{"label": "f1", "coord": [r,a,b]}, ...],
///    "grid": {"x": [lo, hi], "y": [lo, hi], "nx": 200, "ny": 200}}
inline ReductionBlock parse_reduction(const Json& j, int R, int T) {
  ReductionBlock out;
  if (!j.contains("axes") || !j.at("axes").is_array()) detail::parse_fail("reduction", "missing axes");
  for (const Json& axis : j.at("axes")) {
    std::vector<AxisTerm> terms;
    for (const Json& t : axis)
      terms.push_back({parse_coord(t.at("coord"), R, T, "reduction.axes"),
                       t.contains("coef") ? detail::read_number(t.at("coef"), "reduction.coef") : 1.0});
    out.axes.axes.push_back(std::move(terms));
  }
  if (j.contains("functions"))
    for (const Json& f : j.at("functions"))
      out.axes.functions.push_back({f.at("label").get<std::string>(), parse_coord(f.at("coord"), R, T, "functions")});
  if (j.contains("labels"))
    for (const Json& l : j.at("labels")) out.axis_labels.push_back(l.get<std::string>());
  if (j.contains("grid")) {
    const Json& g = j.at("grid");
    if (g.contains("x")) {
      out.grid.x0 = detail::read_number(g.at("x")[0], "grid.x");
      out.grid.x1 = detail::read_number(g.at("x")[1], "grid.x");
    }
    if (g.contains("y")) {
      out.grid.y0 = detail::read_number(g.at("y")[0], "grid.y");
      out.grid.y1 = detail::read_number(g.at("y")[1], "grid.y");
    }
    if (g.contains("nx")) out.grid.nx = g.at("nx").get<int>();
    if (g.contains("ny")) out.grid.ny = g.at("ny").get<int>();
  }
  return out;
}

// ---- experiment configs --------------------------------------------------

/// Optional "experiment" object: {"n_grid": [...], "trials": N, "seed": S,
/// "mode": "deterministic" | "iid", "threshold": x}.
inline ExperimentConfig parse_experiment(const Json& j, ExperimentConfig cfg = {}) {
  if (j.contains("n_grid")) cfg.n_grid = j.at("n_grid").get<std::vector<std::size_t>>();
  if (j.contains("trials")) cfg.trials = j.at("trials").get<std::size_t>();
  if (j.contains("seed")) cfg.base_seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("threshold")) cfg.resilient_threshold = j.at("threshold").get<double>();
  if (j.contains("mode")) {
    const std::string m = j.at("mode").get<std::string>();
    if (m == "deterministic")
      cfg.mode = PopulationMode::Deterministic;
    else if (m == "iid")
      cfg.mode = PopulationMode::Iid;
    else
      detail::parse_fail("experiment.mode", "expected \"deterministic\" or \"iid\"");
  }
  return cfg;
}

// ---- diagnostics and reports ---------------------------------------------

inline Json provenance_json(const std::string& hash, std::uint64_t seed, double tol, double eps_floor) {
  return {{"tool", "contagion"}, {"version", kToolVersion}, {"spec_hash", hash},
          {"seed", seed},        {"tol", tol},               {"eps_floor", eps_floor}};
}

/// Comment lines prefixed to CSV artifacts.
inline std::string provenance_csv(const std::string& hash, std::uint64_t seed, double tol, double eps_floor) {
  std::ostringstream os;
  os.precision(17);
  os << "# tool: contagion " << kToolVersion << "\n# spec_hash: " << hash << "\n# seed: " << seed
     << "\n# tol: " << tol << "\n# eps_floor: " << eps_floor << "\n";
  return os.str();
}

inline Json solution_json(const FixedPointSolution& s) {
  return {{"iterations", s.iterations}, {"residual", s.residual}, {"monotone", s.monotone},
          {"z", coord_array_json(s.z)}};
}

inline Json epsilon_limit_json(const EpsilonLimit& lim) {
  Json trace = Json::array();
  for (const auto& st : lim.trace)
    trace.push_back({{"eps", st.eps}, {"iterations", st.iterations}, {"residual", st.residual}});
  return {{"converged", lim.converged},
          {"cauchy_gap", lim.cauchy_gap},
          {"floor_residual", lim.floor_residual},
          {"monotone_in_eps", lim.monotone_in_eps},
          {"z", coord_array_json(lim.z)},
          {"trace", std::move(trace)}};
}

inline Json report_json(const ModelSpec& spec, const ResilienceReport& rep) {
  Json j;
  j["verdict"] = to_string(rep.verdict);
  j["z_star"] = coord_array_json(rep.z_star);
  j["z_hat"] = coord_array_json(rep.z_hat);
  j["z_star_minus_z_hat_sup"] = sup_distance(rep.z_star, rep.z_hat);
  j["g_z_hat"] = g_eval(spec, rep.z_hat);
  j["g_z_star"] = rep.g_star;
  j["cauchy_gap"] = rep.cauchy_gap;
  Json trace = Json::array();
  for (const auto& st : rep.trace)
    trace.push_back({{"eps", st.eps}, {"iterations", st.iterations}, {"residual", st.residual}});
  j["eps_trace"] = std::move(trace);
  if (rep.certificate) {
    j["certificate"] = {{"v", coord_array_json(*rep.certificate)},
                        {"D_v_f_at_0", coord_array_json(*rep.certificate_derivative)}};
  } else {
    j["certificate"] = nullptr;
  }
  Json lbs = Json::array();
  for (const auto& lb : rep.lower_bounds)
    lbs.push_back({{"shock_set", coordinate_set_json(lb.shock_set)},
                   {"lower_bound", lb.lower_bound},
                   {"cauchy_gap", lb.cauchy_gap},
                   {"converged", lb.converged},
                   {"z0", coord_array_json(lb.z0)}});
  j["lower_bounds"] = std::move(lbs);
  j["tolerances"] = {{"resilience_tol", rep.tolerances.resilience_tol},
                     {"solver_tol", rep.tolerances.solver.tol},
                     {"eps_start", rep.tolerances.schedule.eps_start},
                     {"eps_floor", rep.tolerances.schedule.eps_floor},
                     {"gap_tol", rep.tolerances.schedule.gap_tol}};
  return j;
}

inline Json summary_json(const std::vector<SizeSummary>& summary) {
  Json out = Json::array();
  for (const auto& s : summary)
    out.push_back({{"n", s.n},
                   {"trials", s.trials},
                   {"mean", s.mean},
                   {"min", s.min},
                   {"max", s.max},
                   {"below_threshold", s.below_threshold}});
  return out;
}

}  // namespace contagion
