#pragma once

// Repeated sample-graph + cascade experiments over a grid of network sizes.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "contagion/cascade.hpp"
#include "contagion/error.hpp"
#include "contagion/graph.hpp"
#include "contagion/model.hpp"
#include "contagion/rng.hpp"

namespace contagion {

struct ExperimentConfig {
  std::vector<std::size_t> n_grid{1000};
  std::size_t trials = 100;
  std::uint64_t base_seed = 0;
  PopulationMode mode = PopulationMode::Deterministic;
  double resilient_threshold = 0.05;  // fractions below count as resilient outcomes
  unsigned threads = 0;               // 0: CONTAGION_THREADS, else hardware
};

struct TrialRecord {
  std::size_t n = 0;
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  double fraction = 0.0;
  std::vector<double> per_type_fraction;
  double importance_mass = 0.0;
  std::size_t rounds = 0;
  double ms = 0.0;
};

struct SizeSummary {
  std::size_t n = 0;
  std::size_t trials = 0;
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  double below_threshold = 0.0;  // share of trials under the resilient threshold
};

struct TrialsOutput {
  std::vector<TrialRecord> records;  // ordered by (n grid position, trial)
  std::vector<SizeSummary> summary;
};

/// Worker count: explicit request, else CONTAGION_THREADS (0 = auto), else
/// hardware concurrency.
inline unsigned worker_count(unsigned requested) {
  unsigned t = requested;
  if (t == 0) {
    if (const char* env = std::getenv("CONTAGION_THREADS")) t = static_cast<unsigned>(std::strtoul(env, nullptr, 10));
  }
  if (t == 0) t = std::max(1u, std::thread::hardware_concurrency());
  return t;
}

inline void check_config(const ExperimentConfig& cfg) {
  if (cfg.n_grid.empty()) throw ContagionError(ErrorCode::InvalidArgument, "n grid is empty");
  for (std::size_t n : cfg.n_grid)
    if (n == 0) throw ContagionError(ErrorCode::InvalidArgument, "network sizes must be positive");
  if (cfg.trials == 0) throw ContagionError(ErrorCode::InvalidArgument, "trials must be positive");
}

/// One trial; a pure function of (spec, n, seed, mode) apart from `ms`.
inline TrialRecord run_single_trial(const ModelSpec& spec, std::size_t n, std::size_t trial, std::uint64_t seed,
                                    PopulationMode mode) {
  const auto t0 = std::chrono::steady_clock::now();
  const Population pop = realize_population(spec, n, mode, seed);
  const Graph g = sample_graph(pop, spec, seed);
  const CascadeResult c = run_cascade(g);
  const auto t1 = std::chrono::steady_clock::now();
  TrialRecord rec;
  rec.n = n;
  rec.trial = trial;
  rec.seed = seed;
  rec.fraction = c.fraction;
  rec.per_type_fraction = c.per_type_fraction;
  rec.importance_mass = c.importance_mass;
  rec.rounds = c.rounds;
  rec.ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  return rec;
}

inline std::vector<SizeSummary> summarize(const std::vector<TrialRecord>& records, const ExperimentConfig& cfg) {
  std::vector<SizeSummary> out;
  for (std::size_t k = 0; k < cfg.n_grid.size(); ++k) {
    SizeSummary s;
    s.n = cfg.n_grid[k];
    s.min = 1.0;
    s.max = 0.0;
    double sum = 0.0;
    std::size_t below = 0;
    for (std::size_t t = 0; t < cfg.trials; ++t) {
      const double f = records[k * cfg.trials + t].fraction;
      sum += f;
      s.min = std::min(s.min, f);
      s.max = std::max(s.max, f);
      below += f < cfg.resilient_threshold;
    }
    s.trials = cfg.trials;
    s.mean = sum / static_cast<double>(cfg.trials);
    s.below_threshold = static_cast<double>(below) / static_cast<double>(cfg.trials);
    out.push_back(s);
  }
  return out;
}

/// Runs every (n, trial) with child seed trial_seed(base, n, trial). Work is
/// handed out through an atomic counter; results land in fixed slots, so
/// the output does not depend on scheduling.
inline TrialsOutput run_trials(const ModelSpec& spec, const ExperimentConfig& cfg) {
  check_config(cfg);
  const std::size_t total = cfg.n_grid.size() * cfg.trials;
  TrialsOutput out;
  out.records.resize(total);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::mutex err_mu;
  std::string err_msg;
  auto work = [&] {
    for (;;) {
      if (failed.load()) return;
      const std::size_t job = next.fetch_add(1);
      if (job >= total) return;
      const std::size_t n = cfg.n_grid[job / cfg.trials];
      const std::size_t trial = job % cfg.trials;
      const std::uint64_t seed = trial_seed(cfg.base_seed, n, trial);
      try {
        out.records[job] = run_single_trial(spec, n, trial, seed, cfg.mode);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (!failed.exchange(true))
          err_msg = "trial n=" + std::to_string(n) + " index=" + std::to_string(trial) +
                    " seed=" + std::to_string(seed) + " failed: " + e.what();
      }
    }
  };
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(worker_count(cfg.threads), total));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (failed) throw ContagionError(ErrorCode::InvalidArgument, err_msg);
  out.summary = summarize(out.records, cfg);
  return out;
}

struct ConvergenceRow {
  std::size_t n = 0;
  std::size_t majority_cluster = 0;   // index into the sorted candidates
  std::size_t majority_count = 0;
  std::vector<std::size_t> cluster_counts;
  double majority_mean = 0.0;
  double majority_std = 0.0;
  double max_deviation = 0.0;         // max |fraction - theory| over the majority
};

struct ConvergenceOutput {
  TrialsOutput trials;
  std::vector<double> candidates;     // sorted, distinct
  double theory = 0.0;
  std::vector<ConvergenceRow> rows;
};

/// Cluster index of a fraction, splitting at midpoints between adjacent
/// candidate values.
inline std::size_t cluster_of(double x, const std::vector<double>& sorted_candidates) {
  std::size_t k = 0;
  while (k + 1 < sorted_candidates.size() && x > 0.5 * (sorted_candidates[k] + sorted_candidates[k + 1])) ++k;
  return k;
}

/// Runs the trials and measures the majority cluster against `theory`.
/// `candidates` are the analytic fractions the outcomes may settle near
/// (for instance g(zhat) and g at a larger root); `theory` is always added.
inline ConvergenceOutput convergence_experiment(const ModelSpec& spec, const ExperimentConfig& cfg, double theory,
                                                std::vector<double> candidates = {}) {
  ConvergenceOutput out;
  out.theory = theory;
  candidates.push_back(theory);
  std::sort(candidates.begin(), candidates.end());
  std::vector<double> distinct;
  for (double c : candidates)
    if (distinct.empty() || c - distinct.back() > 1e-9) distinct.push_back(c);
  out.candidates = distinct;
  out.trials = run_trials(spec, cfg);
  for (std::size_t k = 0; k < cfg.n_grid.size(); ++k) {
    ConvergenceRow row;
    row.n = cfg.n_grid[k];
    row.cluster_counts.assign(distinct.size(), 0);
    std::vector<std::size_t> label(cfg.trials);
    for (std::size_t t = 0; t < cfg.trials; ++t) {
      label[t] = cluster_of(out.trials.records[k * cfg.trials + t].fraction, distinct);
      ++row.cluster_counts[label[t]];
    }
    row.majority_cluster = static_cast<std::size_t>(
        std::max_element(row.cluster_counts.begin(), row.cluster_counts.end()) - row.cluster_counts.begin());
    row.majority_count = row.cluster_counts[row.majority_cluster];
    double sum = 0.0, sq = 0.0;
    for (std::size_t t = 0; t < cfg.trials; ++t) {
      if (label[t] != row.majority_cluster) continue;
      const double f = out.trials.records[k * cfg.trials + t].fraction;
      sum += f;
      sq += f * f;
      row.max_deviation = std::max(row.max_deviation, std::abs(f - theory));
    }
    const double m = static_cast<double>(row.majority_count);
    row.majority_mean = sum / m;
    row.majority_std = row.majority_count > 1 ? std::sqrt(std::max(0.0, (sq - sum * sum / m) / (m - 1.0))) : 0.0;
    out.rows.push_back(row);
  }
  return out;
}

/// Trial CSV. `with_timing = false` writes 0 in the ms column so that files
/// from repeated runs compare byte for byte.
inline void write_trials_csv(std::ostream& os, const std::vector<TrialRecord>& records, int types,
                             bool with_timing = true) {
  os << "n,trial,seed,fraction";
  for (int b = 1; b <= types; ++b) os << ",frac_type_" << b;
  os << ",importance_mass,rounds,ms\n";
  const auto flags = os.flags();
  os.precision(17);
  for (const auto& r : records) {
    os << r.n << ',' << r.trial << ',' << r.seed << ',' << r.fraction;
    for (double f : r.per_type_fraction) os << ',' << f;
    os << ',' << r.importance_mass << ',' << r.rounds << ',';
    if (with_timing)
      os << r.ms;
    else
      os << 0;
    os << '\n';
  }
  os.flags(flags);
}

}  // namespace contagion
