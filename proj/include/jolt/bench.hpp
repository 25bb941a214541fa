#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <limits>
#include <mutex>
#include <numeric>
#include <string>
#include <thread>
#include <vector>

#include "jolt/ersom.hpp"
#include "jolt/errors.hpp"
#include "jolt/framework.hpp"
#include "jolt/io.hpp"
#include "jolt/rng.hpp"
#include "jolt/scenario.hpp"
#include "jolt/tsplib.hpp"

namespace jolt {

// ---- instances -----------------------------------------------------------

inline std::filesystem::path default_data_dir() {
#ifdef JOLT_DATA_DIR
  return JOLT_DATA_DIR;
#else
  return "data";
#endif
}

inline std::vector<std::string> bundled_instances(const std::filesystem::path& dir) {
  std::vector<std::string> names;
  std::error_code ec;
  for (const auto& e : std::filesystem::directory_iterator(dir, ec)) {
    if (e.path().extension() == ".tsp") names.push_back(e.path().stem().string());
  }
  std::sort(names.begin(), names.end());
  return names;
}

inline PointSet random_point_set(std::size_t k, std::uint64_t seed, double side = 1000.0) {
  PointSet set;
  set.name = "random" + std::to_string(k) + "-s" + std::to_string(seed);
  Rng rng = Rng::derive(seed, streams::scenario);
  set.points.resize(k);
  for (auto& p : set.points) {
    p.x = rng.uniform(0.0, side);
    p.y = rng.uniform(0.0, side);
  }
  return set;
}

// Resolves a bundled instance name, a path to a .tsp file, or
// "random:<K>:<seed>" (uniform points in a 1000 m square).
inline PointSet load_instance(const std::string& spec, const std::filesystem::path& dir = default_data_dir()) {
  if (spec.rfind("random:", 0) == 0) {
    const auto second = spec.find(':', 7);
    double k = 0.0, seed = 0.0;
    if (second == std::string::npos || !detail::parse_double(spec.substr(7, second - 7), k) ||
        !detail::parse_double(spec.substr(second + 1), seed) || k < 1 || seed < 0 || k != std::floor(k) ||
        seed != std::floor(seed)) {
      throw LookupError("random instances are written random:<K>:<seed>, got '" + spec + "'");
    }
    return random_point_set(static_cast<std::size_t>(k), static_cast<std::uint64_t>(seed));
  }
  std::filesystem::path p(spec);
  if (p.extension() == ".tsp" && std::filesystem::exists(p)) return load_tsplib_file(p.string());
  const auto bundled = dir / (spec + ".tsp");
  if (std::filesystem::exists(bundled)) return load_tsplib_file(bundled.string());
  std::string list;
  for (const auto& n : bundled_instances(dir)) list += (list.empty() ? "" : ", ") + n;
  throw LookupError("unknown instance '" + spec + "'; bundled instances: " + (list.empty() ? "(none)" : list));
}

// ---- statistics ----------------------------------------------------------

struct Summary {
  double mean = 0.0;
  double stddev = 0.0;  // population form, 0 for a single sample
  double rstd() const { return mean != 0.0 ? stddev / std::fabs(mean) : 0.0; }
};

inline Summary summarize(const std::vector<double>& v) {
  Summary s;
  if (v.empty()) return s;
  for (double x : v) s.mean += x;
  s.mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - s.mean) * (x - s.mean);
  s.stddev = std::sqrt(ss / static_cast<double>(v.size()));
  return s;
}

inline double relative_error(double value, double optimum) {
  if (std::isnan(optimum) || optimum == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return (value - optimum) / optimum;
}

// ---- worker pool ---------------------------------------------------------

// Runs fn(0..n-1) on up to `workers` threads. Results must be stored by index;
// the first exception (lowest index) is rethrown after all workers finish.
template <class Fn>
void parallel_for(std::size_t n, std::size_t workers, Fn&& fn) {
  workers = std::max<std::size_t>(1, std::min(workers, n));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex m;
  std::size_t err_index = n;
  std::exception_ptr err;
  auto body = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(m);
        if (i < err_index) {
          err_index = i;
          err = std::current_exception();
        }
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(body);
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

template <class Fn>
double timed(Fn&& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---- rows ----------------------------------------------------------------

struct BenchmarkRow {
  std::string instance;
  std::string algorithm;
  std::string metric;
  std::size_t reps = 0;
  double mean = 0.0;
  double optimum = std::numeric_limits<double>::quiet_NaN();
  double relative_error = std::numeric_limits<double>::quiet_NaN();
  double rstd = 0.0;
  double wall_clock_s = 0.0;  // mean per repetition; kept out of the main table
  double beta = std::numeric_limits<double>::quiet_NaN();
};

// Deterministic columns only; wall-clock goes to timing_table.
inline CsvTable benchmark_table(const std::vector<BenchmarkRow>& rows) {
  CsvTable t{{"instance", "algorithm", "beta", "metric", "reps", "mean", "optimum", "relative_error", "rstd"}, {}};
  for (const auto& r : rows) {
    t.rows.push_back({r.instance, r.algorithm, csv_number(r.beta), r.metric, std::to_string(r.reps),
                      csv_number(r.mean), csv_number(r.optimum), csv_number(r.relative_error), csv_number(r.rstd)});
  }
  return t;
}

inline std::vector<BenchmarkRow> benchmark_rows_from_table(const CsvTable& t) {
  std::vector<BenchmarkRow> out;
  const std::size_t ci = t.column("instance"), ca = t.column("algorithm"), cb = t.column("beta"),
                    cm = t.column("metric"), cr = t.column("reps"), cmean = t.column("mean"),
                    co = t.column("optimum"), ce = t.column("relative_error"), cs = t.column("rstd");
  for (const auto& r : t.rows) {
    BenchmarkRow b;
    b.instance = r[ci];
    b.algorithm = r[ca];
    b.beta = csv_double(r[cb]);
    b.metric = r[cm];
    b.reps = static_cast<std::size_t>(csv_double(r[cr]));
    b.mean = csv_double(r[cmean]);
    b.optimum = csv_double(r[co]);
    b.relative_error = csv_double(r[ce]);
    b.rstd = csv_double(r[cs]);
    out.push_back(b);
  }
  return out;
}

// ---- TSP benchmark -------------------------------------------------------

struct TspRun {
  std::string instance;
  std::string solver;
  std::uint64_t seed = 0;
  double length = 0.0;
  std::size_t ring_size = 0;
  double wall_clock_s = 0.0;
};

struct TspBenchResult {
  std::vector<BenchmarkRow> rows;
  std::vector<TspRun> runs;
};

inline void check_solver(const std::string& s) {
  if (s != "ersom" && s != "rsom" && s != "brute") {
    throw ParameterError("unknown solver '" + s + "' (expected ersom, rsom or brute)");
  }
}

// Every (instance, solver) pair over `reps` seeds seed, seed+1, ... Ring runs
// use the same per-seed stream for ERSOM and RSOM. Runs execute in
// interleaved order so timing drift affects solvers alike, and the solver
// order flips on odd repetitions so no solver always runs first.
inline TspBenchResult tsp_bench(const std::vector<PointSet>& instances, const std::vector<std::string>& solvers,
                                std::size_t reps, std::uint64_t seed, const ErsomConfig& ersom,
                                std::size_t workers = 1) {
  if (reps < 1) throw ParameterError("reps must be at least 1");
  for (const auto& s : solvers) check_solver(s);
  ersom.validate();
  TspBenchResult res;
  for (const auto& inst : instances) {
    if (inst.size() < 3) throw ParameterError("instance '" + inst.name + "' has fewer than 3 points");
    for (const auto& s : solvers) {
      if (s == "brute" && inst.size() > kBruteForceLimit) {
        throw SizeLimitError("brute solver limited to " + std::to_string(kBruteForceLimit) + " points ('" +
                             inst.name + "' has " + std::to_string(inst.size()) + ")");
      }
    }
  }

  std::vector<TspRun> runs;
  for (const auto& inst : instances) {
    for (std::size_t r = 0; r < reps; ++r) {
      for (const auto& s : solvers) runs.push_back({inst.name, s, seed + r, 0.0, 0, 0.0});
    }
  }
  std::vector<std::size_t> schedule(runs.size());
  std::iota(schedule.begin(), schedule.end(), std::size_t{0});
  for (std::size_t block = 0; block * solvers.size() < runs.size(); ++block) {
    if (block % 2 == 1) {
      const auto first = schedule.begin() + static_cast<std::ptrdiff_t>(block * solvers.size());
      std::reverse(first, first + static_cast<std::ptrdiff_t>(solvers.size()));
    }
  }
  parallel_for(runs.size(), workers, [&](std::size_t i) {
    TspRun& run = runs[schedule[i]];
    const auto& inst = *std::find_if(instances.begin(), instances.end(),
                                     [&](const PointSet& p) { return p.name == run.instance; });
    if (run.solver == "brute") {
      Tour t;
      run.wall_clock_s = timed([&] { t = brute_force_tour(inst); });
      run.length = t.length;
      return;
    }
    ErsomConfig cfg = ersom;
    cfg.deletion_enabled = run.solver == "ersom";
    Rng rng = Rng::derive(run.seed, streams::ring);
    ErsomResult out;
    run.wall_clock_s = timed([&] { out = run_ersom(inst, cfg, rng); });
    run.length = out.tour.length;
    run.ring_size = out.ring.size();
  });

  for (const auto& inst : instances) {
    double optimum = inst.known_optimum.value_or(std::numeric_limits<double>::quiet_NaN());
    if (std::isnan(optimum) && inst.size() <= kBruteForceLimit) optimum = brute_force_tour(inst).length;
    for (const auto& s : solvers) {
      std::vector<double> len, secs;
      for (const auto& run : runs) {
        if (run.instance == inst.name && run.solver == s) {
          len.push_back(run.length);
          secs.push_back(run.wall_clock_s);
        }
      }
      const Summary sum = summarize(len);
      BenchmarkRow row;
      row.instance = inst.name;
      row.algorithm = s;
      row.metric = "tour_length";
      row.reps = reps;
      row.mean = sum.mean;
      row.optimum = optimum;
      row.relative_error = relative_error(sum.mean, optimum);
      row.rstd = sum.rstd();
      row.wall_clock_s = summarize(secs).mean;
      res.rows.push_back(row);
    }
  }
  res.runs = std::move(runs);
  return res;
}

inline CsvTable tsp_runs_table(const std::vector<TspRun>& runs) {
  CsvTable t{{"instance", "solver", "seed", "length", "ring_size"}, {}};
  for (const auto& r : runs) {
    t.rows.push_back({r.instance, r.solver, std::to_string(r.seed), csv_number(r.length), std::to_string(r.ring_size)});
  }
  return t;
}

// ---- search benchmarks ---------------------------------------------------

struct SearchRun {
  std::string instance;
  std::string algorithm;
  double beta = 0.0;
  std::uint64_t seed = 0;
  double initial_objective = 0.0;
  double objective = 0.0;
  double total_energy_j = 0.0;
  std::size_t k = 0;
  double wall_clock_s = 0.0;
};

struct SearchBenchResult {
  std::vector<BenchmarkRow> rows;
  std::vector<SearchRun> runs;
};

inline JoltConfig algorithm_config(const std::string& algorithm, const JoltConfig& base) {
  JoltConfig c = base;
  if (algorithm == "awoa") {
    c.awoa.schedule = Schedule::nonlinear;
    c.awoa.mutation_enabled = true;
  } else if (algorithm == "woa") {
    c.awoa.schedule = Schedule::linear;
    c.awoa.mutation_enabled = false;
  } else {
    throw ParameterError("unknown algorithm '" + algorithm + "' (expected awoa or woa)");
  }
  return c;
}

inline SearchRun run_search(const Scenario& s, const JoltConfig& cfg, std::string instance, std::string algorithm) {
  SearchRun run;
  run.instance = std::move(instance);
  run.algorithm = std::move(algorithm);
  run.beta = cfg.ersom.beta;
  run.seed = cfg.seed;
  Incumbent inc;
  run.wall_clock_s = timed([&] { inc = jolt_run(s, cfg); });
  run.initial_objective = inc.trace.front().objective;
  run.objective = inc.objective();
  run.total_energy_j = inc.solution.report.total_energy();
  run.k = inc.solution.deployment.size();
  return run;
}

inline BenchmarkRow summarize_runs(const std::vector<SearchRun>& runs, const std::string& instance,
                                   const std::string& algorithm, double beta) {
  std::vector<double> ec, secs;
  for (const auto& r : runs) {
    if (r.instance == instance && r.algorithm == algorithm && r.beta == beta) {
      ec.push_back(r.objective);
      secs.push_back(r.wall_clock_s);
    }
  }
  const Summary s = summarize(ec);
  BenchmarkRow row;
  row.instance = instance;
  row.algorithm = algorithm;
  row.metric = "energy_objective";
  row.reps = ec.size();
  row.mean = s.mean;
  row.rstd = s.rstd();
  row.wall_clock_s = summarize(secs).mean;
  row.beta = beta;
  return row;
}

// Each repetition r generates one scenario from seed + r and runs every
// algorithm on it with the same master seed, so paired runs share the
// scenario and the initial deployment.
inline SearchBenchResult compare_algorithms(std::size_t n_devices, const ParameterMap& overrides,
                                            const std::vector<std::string>& algorithms, std::size_t reps,
                                            std::uint64_t seed, const JoltConfig& base, std::size_t workers = 1) {
  if (algorithms.empty()) throw ParameterError("at least one algorithm is required");
  if (reps < 1) throw ParameterError("reps must be at least 1");
  for (const auto& a : algorithms) algorithm_config(a, base);
  const std::string name = "random" + std::to_string(n_devices);
  std::vector<SearchRun> runs(reps * algorithms.size());
  parallel_for(runs.size(), workers, [&](std::size_t i) {
    const std::size_t r = i / algorithms.size();
    const std::string& alg = algorithms[i % algorithms.size()];
    const Scenario s = generate_scenario(n_devices, seed + r, overrides);
    JoltConfig cfg = algorithm_config(alg, base);
    cfg.seed = seed + r;
    runs[i] = run_search(s, cfg, name, alg);
  });
  SearchBenchResult res;
  for (const auto& a : algorithms) res.rows.push_back(summarize_runs(runs, name, a, base.ersom.beta));
  res.runs = std::move(runs);
  return res;
}

enum class PointRole { devices, stops };

inline PointRole parse_point_role(const std::string& s) {
  if (s == "devices") return PointRole::devices;
  if (s == "stops") return PointRole::stops;
  throw ParameterError("point role must be 'devices' or 'stops', got '" + s + "'");
}

// Scenario for a benchmark instance. As devices: the rescaled points are the
// device field. As stops: `n_devices` random devices, and the rescaled points
// become the candidate sites for the initial deployment.
inline Scenario instance_scenario(const PointSet& set, PointRole role, std::size_t n_devices, std::uint64_t seed,
                                  const ParameterMap& overrides, JoltConfig& cfg) {
  if (role == PointRole::devices) return scenario_from_points(set, seed, overrides);
  Scenario s = generate_scenario(n_devices, seed, overrides);
  cfg.init_sites = rescale_points(set, s.area);
  return s;
}

// Mean objective and RStd per (instance, beta) over seeds seed, seed+1, ...
inline SearchBenchResult stability_sweep(const std::vector<PointSet>& instances, const std::vector<double>& betas,
                                         std::size_t reps, std::uint64_t seed, const JoltConfig& base,
                                         PointRole role, std::size_t n_devices, const ParameterMap& overrides,
                                         std::size_t workers = 1) {
  if (reps < 1) throw ParameterError("reps must be at least 1");
  if (betas.empty()) throw ParameterError("at least one beta is required");
  for (double b : betas) {
    if (!(b > 0.0 && b <= 1.0)) throw ParameterError("beta values must lie in (0, 1]");
  }
  const std::size_t per_instance = betas.size() * reps;
  std::vector<SearchRun> runs(instances.size() * per_instance);
  parallel_for(runs.size(), workers, [&](std::size_t i) {
    const PointSet& set = instances[i / per_instance];
    const std::size_t rest = i % per_instance;
    const double beta = betas[rest / reps];
    const std::uint64_t s = seed + rest % reps;
    JoltConfig cfg = base;
    cfg.seed = s;
    cfg.ersom.beta = beta;
    const Scenario sc = instance_scenario(set, role, n_devices, s, overrides, cfg);
    runs[i] = run_search(sc, cfg, set.name, "jolt");
  });
  SearchBenchResult res;
  for (const auto& set : instances) {
    for (double b : betas) res.rows.push_back(summarize_runs(runs, set.name, "jolt", b));
  }
  res.runs = std::move(runs);
  return res;
}

inline CsvTable search_runs_table(const std::vector<SearchRun>& runs) {
  CsvTable t{{"instance", "algorithm", "beta", "seed", "initial_objective", "objective", "total_energy_j", "k"}, {}};
  for (const auto& r : runs) {
    t.rows.push_back({r.instance, r.algorithm, csv_number(r.beta), std::to_string(r.seed),
                      csv_number(r.initial_objective), csv_number(r.objective), csv_number(r.total_energy_j),
                      std::to_string(r.k)});
  }
  return t;
}

template <class Run>
CsvTable timing_table(const std::vector<Run>& runs) {
  CsvTable t{{"instance", "algorithm", "seed", "wall_clock_s"}, {}};
  for (const auto& r : runs) {
    if constexpr (requires { r.solver; }) {
      t.rows.push_back({r.instance, r.solver, std::to_string(r.seed), csv_number(r.wall_clock_s)});
    } else {
      t.rows.push_back({r.instance, r.algorithm, std::to_string(r.seed), csv_number(r.wall_clock_s)});
    }
  }
  return t;
}

}  // namespace jolt
