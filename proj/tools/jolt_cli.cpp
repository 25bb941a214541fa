#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "jolt/jolt.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace jolt;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitIo = 4;

constexpr const char* kOutputDirEnv = "JOLT_OUTPUT_DIR";

std::string dashed(std::string key) {
  for (auto& c : key) {
    if (c == '_') c = '-';
  }
  return key;
}

// Command-line options that can also come from a JSON config file. Flags given
// on the command line win over config values.
class Options {
 public:
  explicit Options(CLI::App* app) : app_(app) {}

  template <class T>
  CLI::Option* add(const std::string& key, T& field, const std::string& help) {
    CLI::Option* opt = app_->add_option("--" + dashed(key), field, help)->capture_default_str();
    if constexpr (requires { field.push_back(field.front()); }) opt->delimiter(',');
    entries_.push_back({key, opt,
                        [&field, key](const json& j) {
                          try {
                            field = j.get<T>();
                          } catch (const json::exception&) {
                            throw ParameterError("config key '" + key + "' has the wrong type");
                          }
                        },
                        [&field] { return json(field); }});
    return opt;
  }

  // Scenario parameters: `--param key=value` on the command line, a "params"
  // object in the config file.
  void add_params() {
    app_->add_option("--param", param_flags_, "scenario parameter override key=value (repeatable)");
  }

  void add_config_flag() { app_->add_option("--config", config_path_, "JSON config file"); }

  void apply(const std::string& command) {
    if (config_path_.empty()) {
      resolve_params({});
      return;
    }
    const json cfg = read_json(config_path_);
    if (!cfg.is_object()) throw ParameterError("config file must hold a JSON object");
    json params = json::object();
    for (const auto& [key, value] : cfg.items()) {
      if (key == "schema_version") continue;
      if (key == "command") {
        if (value != command) throw ParameterError("config was written for command '" + value.dump() + "'");
        continue;
      }
      if (key == "params" && has_params()) {
        if (!value.is_object()) throw ParameterError("'params' must be an object");
        params = value;
        continue;
      }
      auto it = std::find_if(entries_.begin(), entries_.end(), [&](const Entry& e) { return e.key == key; });
      if (it == entries_.end()) throw ParameterError("unknown config key '" + key + "'");
      if (it->option->count() == 0) it->load(value);
    }
    resolve_params(params);
  }

  json resolved(const std::string& command) const {
    json j = {{"schema_version", kOutputSchemaVersion}, {"command", command}};
    for (const auto& e : entries_) {
      if (e.key != "out") j[e.key] = e.dump();
    }
    if (has_params()) j["params"] = params_;
    return j;
  }

  const ParameterMap& params() const { return params_; }

 private:
  struct Entry {
    std::string key;
    CLI::Option* option;
    std::function<void(const json&)> load;
    std::function<json()> dump;
  };

  bool has_params() const { return app_->get_option_no_throw("--param") != nullptr; }

  void resolve_params(const json& from_config) {
    params_.clear();
    for (const auto& [k, v] : from_config.items()) {
      if (!v.is_number()) throw ParameterError("parameter '" + k + "' must be a number");
      params_[k] = v.get<double>();
    }
    for (const auto& kv : param_flags_) {
      const auto eq = kv.find('=');
      double value = 0.0;
      if (eq == std::string::npos || !jolt::detail::parse_double(kv.substr(eq + 1), value)) {
        throw ParameterError("--param expects key=value, got '" + kv + "'");
      }
      params_[kv.substr(0, eq)] = value;
    }
    // Reject unknown keys up front.
    ScenarioParams::with(params_);
  }

  CLI::App* app_;
  std::vector<Entry> entries_;
  std::vector<std::string> param_flags_;
  std::string config_path_;
  ParameterMap params_;
};

fs::path output_dir(const std::string& flag, const std::string& command) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv(kOutputDirEnv); env && *env) return fs::path(env) / command;
  return fs::path("jolt_output") / command;
}

// Search settings shared by run, compare and stability.
struct SearchSettings {
  std::size_t t_max = 300;
  std::size_t pop_size = 100;
  double b = 1.0;
  std::size_t tau = 30;
  double rho = 1.0;
  double mutation_fraction = 0.3;
  double mu = 4.0;
  std::string schedule = "nonlinear";
  bool mutation = true;
  std::size_t init_attempts = 10000;

  void bind(Options& o, bool algorithm_fixed) {
    o.add("t_max", t_max, "search iterations");
    o.add("pop_size", pop_size, "upper bound of the initial stop count");
    o.add("b", b, "spiral constant");
    o.add("tau", tau, "stagnation iterations before mutation");
    o.add("rho", rho, "mutation scale (m)");
    o.add("mutation_fraction", mutation_fraction, "share of stops mutated");
    o.add("mu", mu, "logistic map control factor");
    if (!algorithm_fixed) {
      o.add("schedule", schedule, "linear | nonlinear");
      o.add("mutation", mutation, "enable the partial mutation rule");
    }
    o.add("init_attempts", init_attempts, "initial deployment sampling attempts");
  }

  JoltConfig config(const ErsomConfig& ersom) const {
    JoltConfig c;
    c.t_max = t_max;
    c.awoa.pop_size = pop_size;
    c.awoa.spiral_b = b;
    c.awoa.stagnation_limit = tau;
    c.awoa.mutation_scale = rho;
    c.awoa.mutation_fraction = mutation_fraction;
    c.awoa.chaos_mu = mu;
    c.awoa.schedule = parse_schedule(schedule);
    c.awoa.mutation_enabled = mutation;
    c.init_attempts = init_attempts;
    c.ersom = ersom;
    c.validate();
    return c;
  }
};

struct RingSettings {
  double beta = 0.1;
  std::size_t insert_period = 5;
  std::size_t deletion_factor = 3;
  std::size_t max_epochs = 300;
  bool deletion = true;

  void bind(Options& o, bool with_beta = true, bool with_deletion = true) {
    if (with_beta) o.add("beta", beta, "ring learning rate");
    o.add("insert_period", insert_period, "epochs between cell insertions");
    o.add("deletion_factor", deletion_factor, "deletion every deletion_factor * insert_period epochs");
    o.add("max_epochs", max_epochs, "ring training epochs");
    if (with_deletion) o.add("deletion", deletion, "enable cell deletion (false gives RSOM)");
  }

  ErsomConfig config() const {
    ErsomConfig c;
    c.beta = beta;
    c.insert_period = insert_period;
    c.deletion_factor = deletion_factor;
    c.max_epochs = max_epochs;
    c.deletion_enabled = deletion;
    c.validate();
    return c;
  }
};

void print_rows(const std::vector<BenchmarkRow>& rows) {
  std::printf("%-14s %-10s %-8s %5s %16s %14s %12s %10s %12s\n", "instance", "algorithm", "beta", "reps", "mean",
              "optimum", "rel_error", "rstd", "mean_ct_s");
  for (const auto& r : rows) {
    std::printf("%-14s %-10s %-8.3g %5zu %16.6g %14.6g %12.4g %10.4g %12.4g\n", r.instance.c_str(),
                r.algorithm.c_str(), r.beta, r.reps, r.mean, r.optimum, r.relative_error, r.rstd, r.wall_clock_s);
  }
}

std::vector<PointSet> load_instances(const std::vector<std::string>& names, const std::string& data_dir) {
  std::vector<PointSet> sets;
  for (const auto& n : names) {
    PointSet s = load_instance(n, data_dir.empty() ? default_data_dir() : fs::path(data_dir));
    if (s.name.empty()) s.name = n;
    sets.push_back(std::move(s));
  }
  return sets;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joint UAV deployment and trajectory optimization"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "write a random scenario as JSON");
  Options gen_opts(gen);
  std::size_t gen_devices = 100;
  std::uint64_t gen_seed = 0;
  std::string gen_instance, gen_out, gen_data_dir;
  gen_opts.add("devices", gen_devices, "number of IoT devices");
  gen_opts.add("seed", gen_seed, "scenario seed");
  gen_opts.add("instance", gen_instance, "place devices at a TSPLIB instance's points instead");
  gen_opts.add("data_dir", gen_data_dir, "directory of bundled instances");
  gen_opts.add("out", gen_out, "output file (default <output dir>/scenario.json)");
  gen_opts.add_params();
  gen_opts.add_config_flag();

  // run
  auto* run = app.add_subcommand("run", "optimize one scenario and write a run artifact directory");
  Options run_opts(run);
  std::string run_scenario, run_instance, run_out, run_data_dir;
  std::size_t run_devices = 100;
  std::uint64_t run_seed = 0;
  SearchSettings run_search;
  RingSettings run_ring;
  run_opts.add("scenario", run_scenario, "scenario JSON file (otherwise one is generated)");
  run_opts.add("instance", run_instance, "generate devices from a TSPLIB instance");
  run_opts.add("data_dir", run_data_dir, "directory of bundled instances");
  run_opts.add("devices", run_devices, "number of devices for a generated scenario");
  run_opts.add("seed", run_seed, "master seed");
  run_search.bind(run_opts, false);
  run_ring.bind(run_opts);
  run_opts.add("out", run_out, "artifact directory");
  run_opts.add_params();
  run_opts.add_config_flag();

  // tsp-bench
  auto* tsp = app.add_subcommand("tsp-bench", "tour-length benchmark on TSPLIB instances");
  Options tsp_opts(tsp);
  std::vector<std::string> tsp_instances{"att48", "eil101"};
  std::vector<std::string> tsp_solvers{"ersom", "rsom"};
  std::size_t tsp_reps = 10, tsp_workers = 1;
  std::uint64_t tsp_seed = 0;
  std::string tsp_out, tsp_data_dir;
  RingSettings tsp_ring;
  tsp_ring.max_epochs = 1000;
  tsp_opts.add("instances", tsp_instances, "instance names, .tsp paths or random:<K>:<seed>");
  tsp_opts.add("solvers", tsp_solvers, "ersom, rsom, brute");
  tsp_opts.add("reps", tsp_reps, "repetitions (seeds seed..seed+reps-1)");
  tsp_opts.add("seed", tsp_seed, "first seed");
  tsp_opts.add("workers", tsp_workers, "parallel repetitions");
  tsp_opts.add("data_dir", tsp_data_dir, "directory of bundled instances");
  tsp_ring.bind(tsp_opts, true, false);
  tsp_opts.add("out", tsp_out, "output directory");
  tsp_opts.add_config_flag();

  // compare
  auto* cmp = app.add_subcommand("compare", "AWOA vs WOA on paired random scenarios");
  Options cmp_opts(cmp);
  std::vector<std::string> cmp_algorithms{"awoa", "woa"};
  std::size_t cmp_devices = 100, cmp_reps = 10, cmp_workers = 1;
  std::uint64_t cmp_seed = 0;
  std::string cmp_out;
  SearchSettings cmp_search;
  RingSettings cmp_ring;
  cmp_opts.add("algorithms", cmp_algorithms, "awoa, woa");
  cmp_opts.add("devices", cmp_devices, "devices per scenario");
  cmp_opts.add("reps", cmp_reps, "paired scenarios");
  cmp_opts.add("seed", cmp_seed, "first seed");
  cmp_opts.add("workers", cmp_workers, "parallel runs");
  cmp_search.bind(cmp_opts, true);
  cmp_ring.bind(cmp_opts);
  cmp_opts.add("out", cmp_out, "output directory");
  cmp_opts.add_params();
  cmp_opts.add_config_flag();

  // stability
  auto* stab = app.add_subcommand("stability", "objective spread over seeds for several ring learning rates");
  Options stab_opts(stab);
  std::vector<std::string> stab_instances{"eil101"};
  std::vector<double> stab_betas{0.02, 0.1, 0.5};
  std::size_t stab_reps = 10, stab_workers = 1, stab_devices = 100;
  std::uint64_t stab_seed = 0;
  std::string stab_out, stab_data_dir, stab_role = "devices";
  SearchSettings stab_search;
  RingSettings stab_ring;
  stab_opts.add("instances", stab_instances, "instance names or .tsp paths");
  stab_opts.add("betas", stab_betas, "ring learning rates");
  stab_opts.add("reps", stab_reps, "seeds per cell");
  stab_opts.add("seed", stab_seed, "first seed");
  stab_opts.add("point_role", stab_role, "devices | stops: what the instance points stand for");
  stab_opts.add("devices", stab_devices, "random devices when point_role=stops");
  stab_opts.add("workers", stab_workers, "parallel runs");
  stab_opts.add("data_dir", stab_data_dir, "directory of bundled instances");
  stab_search.bind(stab_opts, false);
  stab_ring.bind(stab_opts, false);
  stab_opts.add("out", stab_out, "output directory");
  stab_opts.add_params();
  stab_opts.add_config_flag();

  // ring
  auto* ring = app.add_subcommand("ring", "train one ring and dump per-epoch snapshots and the tour");
  Options ring_opts(ring);
  std::string ring_instance = "att48", ring_out, ring_data_dir;
  std::uint64_t ring_seed = 0;
  std::size_t ring_every = 10;
  RingSettings ring_ring;
  ring_opts.add("instance", ring_instance, "instance name, .tsp path or random:<K>:<seed>");
  ring_opts.add("seed", ring_seed, "seed");
  ring_opts.add("every", ring_every, "snapshot every N epochs (first and last always kept)");
  ring_opts.add("data_dir", ring_data_dir, "directory of bundled instances");
  ring_ring.bind(ring_opts);
  ring_opts.add("out", ring_out, "output directory");
  ring_opts.add_config_flag();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (gen->parsed()) {
      gen_opts.apply("generate");
      const Scenario s = gen_instance.empty()
                             ? generate_scenario(gen_devices, gen_seed, gen_opts.params())
                             : scenario_from_points(load_instances({gen_instance}, gen_data_dir).front(), gen_seed,
                                                    gen_opts.params());
      const fs::path out = gen_out.empty() ? output_dir("", "generate") / "scenario.json" : fs::path(gen_out);
      if (out.has_parent_path()) ensure_directory(out.parent_path());
      save_scenario_file(out, s);
      std::printf("wrote %s (%zu devices)\n", out.string().c_str(), s.device_count());
    } else if (run->parsed()) {
      run_opts.apply("run");
      Scenario s;
      if (!run_scenario.empty()) {
        s = load_scenario_file(run_scenario);
      } else if (!run_instance.empty()) {
        s = scenario_from_points(load_instances({run_instance}, run_data_dir).front(), run_seed, run_opts.params());
      } else {
        s = generate_scenario(run_devices, run_seed, run_opts.params());
      }
      JoltConfig cfg = run_search.config(run_ring.config());
      cfg.seed = run_seed;
      const Incumbent inc = jolt_run(s, cfg);
      const auto violations = check_constraints(s, inc.solution);
      if (!violations.empty()) {
        throw InfeasibleError(violations.front().constraint, violations.front().detail);
      }
      const fs::path dir = output_dir(run_out, "run");
      json resolved = run_opts.resolved("run");
      write_run_artifacts(dir, resolved, inc);
      std::printf("objective %.10g J  K %zu  tour %.6g m  (artifacts in %s)\n", inc.objective(),
                  inc.solution.deployment.size(), inc.solution.report.tour_length_m, dir.string().c_str());
    } else if (tsp->parsed()) {
      tsp_opts.apply("tsp-bench");
      const auto sets = load_instances(tsp_instances, tsp_data_dir);
      const auto res = tsp_bench(sets, tsp_solvers, tsp_reps, tsp_seed, tsp_ring.config(), tsp_workers);
      const fs::path dir = output_dir(tsp_out, "tsp-bench");
      ensure_directory(dir);
      write_json(dir / "config.json", tsp_opts.resolved("tsp-bench"));
      write_csv_file(dir / "tsp_bench.csv", benchmark_table(res.rows));
      write_csv_file(dir / "tsp_runs.csv", tsp_runs_table(res.runs));
      write_csv_file(dir / "timings.csv", timing_table(res.runs));
      print_rows(res.rows);
    } else if (cmp->parsed()) {
      cmp_opts.apply("compare");
      const JoltConfig base = cmp_search.config(cmp_ring.config());
      const auto res = compare_algorithms(cmp_devices, cmp_opts.params(), cmp_algorithms, cmp_reps, cmp_seed, base,
                                          cmp_workers);
      const fs::path dir = output_dir(cmp_out, "compare");
      ensure_directory(dir);
      write_json(dir / "config.json", cmp_opts.resolved("compare"));
      write_csv_file(dir / "compare.csv", benchmark_table(res.rows));
      write_csv_file(dir / "compare_runs.csv", search_runs_table(res.runs));
      write_csv_file(dir / "timings.csv", timing_table(res.runs));
      print_rows(res.rows);
    } else if (stab->parsed()) {
      stab_opts.apply("stability");
      const auto sets = load_instances(stab_instances, stab_data_dir);
      const JoltConfig base = stab_search.config(stab_ring.config());
      const auto res = stability_sweep(sets, stab_betas, stab_reps, stab_seed, base, parse_point_role(stab_role),
                                       stab_devices, stab_opts.params(), stab_workers);
      const fs::path dir = output_dir(stab_out, "stability");
      ensure_directory(dir);
      write_json(dir / "config.json", stab_opts.resolved("stability"));
      write_csv_file(dir / "stability.csv", benchmark_table(res.rows));
      write_csv_file(dir / "stability_runs.csv", search_runs_table(res.runs));
      write_csv_file(dir / "timings.csv", timing_table(res.runs));
      print_rows(res.rows);
    } else if (ring->parsed()) {
      ring_opts.apply("ring");
      if (ring_every < 1) throw ParameterError("every must be at least 1");
      const PointSet set = load_instances({ring_instance}, ring_data_dir).front();
      const ErsomConfig cfg = ring_ring.config();
      Rng rng = Rng::derive(ring_seed, streams::ring);
      std::vector<RingSnapshotRow> snaps;
      const auto res = run_ersom(set, cfg, rng, [&](std::size_t epoch, const Ring& r) {
        if (epoch % ring_every == 0 || epoch == cfg.max_epochs) append_snapshot(snaps, epoch, r);
      });
      const fs::path dir = output_dir(ring_out, "ring");
      ensure_directory(dir);
      write_json(dir / "config.json", ring_opts.resolved("ring"));
      write_csv_file(dir / "ring_snapshots.csv", snapshot_table(snaps));
      write_csv_file(dir / "tour.csv", tour_table(std::span<const Point2>(set.points), res.tour.order));
      std::printf("tour length %.10g  cells %zu  (artifacts in %s)\n", res.tour.length, res.ring.size(),
                  dir.string().c_str());
    }
  } catch (const IoError& e) {
    std::fprintf(stderr, "I/O error: %s\n", e.what());
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    std::fprintf(stderr, "I/O error: %s\n", e.what());
    return kExitIo;
  } catch (const InfeasibleError& e) {
    std::fprintf(stderr, "infeasible: %s\n", e.what());
    return kExitInfeasible;
  } catch (const InitializationError& e) {
    std::fprintf(stderr, "infeasible: %s\n", e.what());
    return kExitInfeasible;
  } catch (const UnreachableDeviceError& e) {
    std::fprintf(stderr, "infeasible: %s\n", e.what());
    return kExitInfeasible;
  } catch (const Error& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInternal;
  }
  return kExitOk;
}
