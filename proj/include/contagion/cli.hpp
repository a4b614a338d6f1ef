#pragma once

// Command-line driver: analyze, simulate, rootset, convergence, validate.
// run_cli returns the process exit status: 0 success, 1 invalid input or
// failure, 2 when analyze cannot pin down a single final fraction.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "contagion/contagion.hpp"
#include "contagion/io.hpp"

namespace contagion {

struct CliOptions {
  std::string spec_path;
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  double tol = 1e-10;
  double eps_floor = 1e-10;
  std::size_t trials = 0;                 // 0: spec's experiment block or 100
  std::vector<std::size_t> n_grid;        // empty: spec's experiment block or {1000}
  std::vector<std::string> shock_sets;    // "r,a,b;..." per flag
  bool unshocked = false;                 // rootset: drop shock probabilities
  int grid_cells = 0;                     // rootset: override nx = ny
  std::string mode;                       // simulate/convergence: deterministic | iid
};

namespace cli_detail {

inline std::filesystem::path out_file(const CliOptions& o, const std::string& name) {
  std::filesystem::create_directories(o.out_dir);
  return std::filesystem::path(o.out_dir) / name;
}

inline void write_json(const std::filesystem::path& p, const Json& j) {
  std::ofstream f(p);
  if (!f) throw ContagionError(ErrorCode::IoError, "cannot write " + p.string());
  f << j.dump(2) << '\n';
}

inline ExperimentConfig experiment_config(const Json& file, const CliOptions& o) {
  ExperimentConfig cfg;
  if (file.contains("experiment")) cfg = parse_experiment(file.at("experiment"));
  if (o.trials > 0) cfg.trials = o.trials;
  if (!o.n_grid.empty()) cfg.n_grid = o.n_grid;
  cfg.base_seed = o.seed;
  if (o.mode == "iid") cfg.mode = PopulationMode::Iid;
  if (o.mode == "deterministic") cfg.mode = PopulationMode::Deterministic;
  return cfg;
}

inline ResilienceTolerances tolerances(const CliOptions& o) {
  ResilienceTolerances t;
  t.solver.tol = o.tol;
  t.schedule.eps_floor = o.eps_floor;
  if (t.schedule.eps_start < t.schedule.eps_floor) t.schedule.eps_start = t.schedule.eps_floor;
  return t;
}

inline Json base_json(const ModelSpec& spec, const CliOptions& o) {
  Json j;
  j["provenance"] = provenance_json(spec_hash(spec), o.seed, o.tol, o.eps_floor);
  return j;
}

inline int cmd_validate(const CliOptions& o, std::ostream& out) {
  const Json file = read_json_file(o.spec_path);
  const ModelSpec spec = parse_spec(file);
  const ModelSpec shocked = apply_shock(spec);
  Json j = base_json(spec, o);
  j["R"] = spec.impacts();
  j["T"] = spec.types();
  j["atoms"] = spec.atoms().size();
  j["max_finite_capital"] = spec.max_finite_capital();
  j["initial_default_mass"] = initial_default_mass(spec);
  j["initial_default_mass_after_shocks"] = initial_default_mass(shocked);
  j["zeta"] = coord_array_json(zeta(spec));
  j["support"] = coordinate_set_json(support(spec));
  if (file.contains("reduction")) {
    const ReductionBlock rb = parse_reduction(file.at("reduction"), spec.impacts(), spec.types());
    j["reduction_free_coordinates"] = rb.axes.free_dims();
  }
  out << j.dump(2) << '\n';
  return 0;
}

inline int cmd_analyze(const CliOptions& o, std::ostream& out) {
  const ModelSpec spec = load_spec(o.spec_path);
  const ResilienceTolerances tol = tolerances(o);
  Json j = base_json(spec, o);
  bool undetermined = false;

  // Final fraction of the shocked system, when it has initial defaults.
  const ModelSpec shocked = apply_shock(spec);
  if (initial_default_mass(shocked) > 0.0) {
    const EpsilonLimit lim = z_star(shocked, tol.solver, tol.schedule);
    const FixedPointSolution top = largest_root(shocked, tol.solver);
    const double gap = sup_distance(lim.z, lim.smallest);
    const bool bracketed = gap > tol.resilience_tol;
    Json s;
    s["initial_default_mass"] = initial_default_mass(shocked);
    s["z_hat"] = coord_array_json(lim.smallest);
    s["z_star"] = epsilon_limit_json(lim);
    s["z_star_minus_z_hat_sup"] = gap;
    s["g_z_hat"] = g_eval(shocked, lim.smallest);
    s["g_z_star"] = g_eval(shocked, lim.z);
    s["largest_root"] = coord_array_json(top.z);
    s["g_largest_root"] = g_eval(shocked, top.z);
    s["bracketed"] = bracketed;
    j["shocked"] = std::move(s);
    undetermined = undetermined || bracketed || !lim.converged;
    out << "shocked system: g(zhat) = " << g_eval(shocked, lim.smallest)
        << ", g(z*) = " << g_eval(shocked, lim.z) << (bracketed ? "  [zhat != z*, fraction bracketed]" : "")
        << (lim.converged ? "" : "  [eps schedule did not converge]") << '\n';
  }

  // Resilience of the unshocked system.
  const ModelSpec base = without_shocks(spec);
  if (initial_default_mass(base) > 0.0) {
    j["resilience"] = {{"skipped", "initial defaults present without shocks"}};
  } else {
    std::vector<CoordinateSet> sets;
    for (const auto& s : o.shock_sets) sets.push_back(parse_shock_set(s, spec.impacts(), spec.types()));
    const ResilienceReport rep = classify_resilience(base, sets, tol);
    j["resilience"] = report_json(base, rep);
    if (rep.verdict == Verdict::Inconclusive) undetermined = true;
    out << "verdict: " << to_string(rep.verdict) << ", |z*| = " << rep.z_star.sup_norm()
        << ", g(z*) = " << rep.g_star << '\n';
    for (const auto& lb : rep.lower_bounds)
      out << "  lower bound g(z0(I)) = " << lb.lower_bound << " for |I| = " << lb.shock_set.size() << '\n';
  }
  j["status"] = undetermined ? "undetermined" : "ok";
  const auto path = out_file(o, "report.json");
  write_json(path, j);
  out << "report: " << path.string() << '\n';
  return undetermined ? 2 : 0;
}

inline int cmd_simulate(const CliOptions& o, std::ostream& out) {
  const Json file = read_json_file(o.spec_path);
  const ModelSpec spec = parse_spec(file);
  const ExperimentConfig cfg = experiment_config(file, o);
  const TrialsOutput res = run_trials(spec, cfg);
  const std::string hash = spec_hash(spec);
  {
    std::ofstream f(out_file(o, "trials.csv"));
    f << provenance_csv(hash, o.seed, o.tol, o.eps_floor);
    write_trials_csv(f, res.records, spec.types());
  }
  Json j = base_json(spec, o);
  j["trials"] = cfg.trials;
  j["resilient_threshold"] = cfg.resilient_threshold;
  j["summary"] = summary_json(res.summary);
  write_json(out_file(o, "summary.json"), j);
  for (const auto& s : res.summary)
    out << "n = " << s.n << ": mean " << s.mean << ", min " << s.min << ", max " << s.max
        << ", below threshold " << s.below_threshold << '\n';
  return 0;
}

inline int cmd_rootset(const CliOptions& o, std::ostream& out) {
  const Json file = read_json_file(o.spec_path);
  const ModelSpec raw = parse_spec(file);
  if (!file.contains("reduction"))
    throw ContagionError(ErrorCode::InvalidArgument, "spec has no reduction block");
  ReductionBlock rb = parse_reduction(file.at("reduction"), raw.impacts(), raw.types());
  if (o.grid_cells > 0) rb.grid.nx = rb.grid.ny = o.grid_cells;
  const ModelSpec spec = o.unshocked ? without_shocks(raw) : apply_shock(raw);
  SolverOptions so;
  so.tol = o.tol;
  const auto lines = rootset_scan(spec, rb.axes, rb.grid, so);
  const auto path = out_file(o, "rootset.csv");
  std::ofstream f(path);
  f << provenance_csv(spec_hash(raw), o.seed, o.tol, o.eps_floor);
  write_rootset_csv(f, lines);
  out << lines.size() << " polylines written to " << path.string() << '\n';
  return 0;
}

inline int cmd_convergence(const CliOptions& o, std::ostream& out) {
  const Json file = read_json_file(o.spec_path);
  const ModelSpec spec = parse_spec(file);
  const ExperimentConfig cfg = experiment_config(file, o);
  const ModelSpec shocked = apply_shock(spec);
  SolverOptions so;
  so.tol = o.tol;
  EpsilonSchedule sched;
  sched.eps_floor = o.eps_floor;
  if (sched.eps_start < sched.eps_floor) sched.eps_start = sched.eps_floor;
  const FixedPointSolution lo = smallest_root(shocked, so);
  const FixedPointSolution hi = largest_root(shocked, so);
  const EpsilonLimit zs = z_star(shocked, so, sched);
  const double theory = g_eval(shocked, lo.z);
  // Early die-out leaves roughly the initially shocked mass.
  const std::vector<double> candidates{initial_default_mass(shocked), g_eval(shocked, zs.z), g_eval(shocked, hi.z)};
  const ConvergenceOutput res = convergence_experiment(spec, cfg, theory, candidates);
  const std::string hash = spec_hash(spec);
  {
    std::ofstream f(out_file(o, "convergence.csv"));
    f << provenance_csv(hash, o.seed, o.tol, o.eps_floor);
    f << "n,trial,fraction\n";
    f.precision(17);
    for (const auto& r : res.trials.records) f << r.n << ',' << r.trial << ',' << r.fraction << '\n';
  }
  Json j = base_json(spec, o);
  j["theory"] = theory;
  j["candidates"] = res.candidates;
  Json rows = Json::array();
  for (const auto& r : res.rows)
    rows.push_back({{"n", r.n},
                    {"majority_candidate", res.candidates[r.majority_cluster]},
                    {"majority_count", r.majority_count},
                    {"cluster_counts", r.cluster_counts},
                    {"majority_mean", r.majority_mean},
                    {"majority_std", r.majority_std},
                    {"max_deviation", r.max_deviation}});
  j["rows"] = std::move(rows);
  write_json(out_file(o, "convergence_summary.json"), j);
  out << "theory g(zhat) = " << theory << '\n';
  for (const auto& r : res.rows)
    out << "n = " << r.n << ": majority near " << res.candidates[r.majority_cluster] << " (" << r.majority_count
        << "/" << cfg.trials << "), mean " << r.majority_mean << ", max deviation " << r.max_deviation << '\n';
  return 0;
}

}  // namespace cli_detail

inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Default contagion on stochastic block networks"};
  app.require_subcommand(1, 1);
  CliOptions o;

  auto shared = [&](CLI::App* sub) {
    sub->add_option("--spec", o.spec_path, "JSON specification file")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", o.seed, "base seed");
    sub->add_option("--out", o.out_dir, "output directory");
    sub->add_option("--tol", o.tol, "fixed-point stopping tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--eps-floor", o.eps_floor, "smallest eps of the shift schedule")->check(CLI::PositiveNumber);
  };
  auto sim = [&](CLI::App* sub) {
    sub->add_option("--trials", o.trials, "trials per network size")->check(CLI::PositiveNumber);
    sub->add_option("--n-grid", o.n_grid, "network sizes")->delimiter(',');
    sub->add_option("--mode", o.mode, "population mode")->check(CLI::IsMember({"deterministic", "iid"}));
  };
  CLI::App* analyze = app.add_subcommand("analyze", "roots, final fractions and resilience verdict");
  shared(analyze);
  analyze->add_option("--shock-set", o.shock_sets, "coordinate set I as \"r,a,b;r,a,b\" (1-based); repeatable");
  CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo cascades");
  shared(simulate);
  sim(simulate);
  CLI::App* rootset = app.add_subcommand("rootset", "zero contours of the reduced functions");
  shared(rootset);
  rootset->add_flag("--unshocked", o.unshocked, "ignore shock probabilities");
  rootset->add_option("--grid", o.grid_cells, "cells per axis")->check(CLI::PositiveNumber);
  CLI::App* convergence = app.add_subcommand("convergence", "simulated fractions against the analytic value");
  shared(convergence);
  sim(convergence);
  CLI::App* validate = app.add_subcommand("validate", "check a specification");
  shared(validate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }

  try {
    if (*analyze) return cli_detail::cmd_analyze(o, out);
    if (*simulate) return cli_detail::cmd_simulate(o, out);
    if (*rootset) return cli_detail::cmd_rootset(o, out);
    if (*convergence) return cli_detail::cmd_convergence(o, out);
    if (*validate) return cli_detail::cmd_validate(o, out);
  } catch (const ContagionError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace contagion
