#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "jolt/awoa.hpp"
#include "jolt/energy.hpp"
#include "jolt/ersom.hpp"
#include "jolt/errors.hpp"
#include "jolt/rng.hpp"
#include "jolt/scenario.hpp"

// Outer search loop: AWOA proposes stop points, neighbours are formed by
// inserting, replacing or deleting one stop, ERSOM orders each feasible
// neighbour and the best strict improvement replaces the incumbent.
namespace jolt {

enum class Move { initial, insert, replace, remove, none };

inline std::string_view move_name(Move m) {
  switch (m) {
    case Move::initial: return "initial";
    case Move::insert: return "insert";
    case Move::replace: return "replace";
    case Move::remove: return "delete";
    case Move::none: return "none";
  }
  return "?";
}

struct JoltConfig {
  std::size_t t_max = 300;
  AwoaConfig awoa;
  ErsomConfig ersom;
  std::uint64_t seed = 0;
  std::size_t init_attempts = 10000;
  // When non-empty, initial stops are drawn from these sites instead of
  // uniformly over the area.
  std::vector<Point2> init_sites;

  void validate() const {
    awoa.validate();
    ersom.validate();
    if (init_attempts < 1) throw ParameterError("init_attempts must be at least 1");
  }
};

struct Neighbor {
  Move move = Move::none;
  Deployment deployment;
};

// Insert, replace and delete neighbours of the incumbent, in that order. The
// insert and delete moves are skipped at k_max and k_min respectively.
inline std::vector<Neighbor> propose_neighbors(const Deployment& incumbent, const Deployment& q, std::size_t k_min,
                                               std::size_t k_max, Rng& rng) {
  if (incumbent.empty() || q.empty()) throw ParameterError("empty deployment");
  const std::size_t k = incumbent.size();
  std::vector<Neighbor> out;
  if (k < k_max) {
    Neighbor n{Move::insert, incumbent};
    n.deployment.stops.push_back(q.stops[rng.index(q.size())]);
    out.push_back(std::move(n));
  }
  {
    Neighbor n{Move::replace, incumbent};
    const std::size_t j = rng.index(k);
    n.deployment.stops[j] = q.stops[std::min(j, q.size() - 1)];
    out.push_back(std::move(n));
  }
  if (k > k_min) {
    Neighbor n{Move::remove, incumbent};
    n.deployment.stops.erase(n.deployment.stops.begin() + static_cast<std::ptrdiff_t>(rng.index(k)));
    out.push_back(std::move(n));
  }
  return out;
}

// Feasibility gate, ERSOM tour and full evaluation for one deployment.
inline Evaluation evaluate_candidate(const Scenario& scenario, const Deployment& d, const ErsomConfig& ersom,
                                     Rng ring_rng) {
  if (auto v = check_deployment(scenario, d)) return *v;
  Assignment a;
  try {
    a = assign_devices(scenario, d);
  } catch (const InfeasibleError& e) {
    return ConstraintViolation{e.constraint(), e.what()};
  }
  auto tour = run_ersom(std::span<const Point2>(d.stops), ersom, ring_rng).tour;
  return evaluate_assigned(scenario, d, std::move(a), std::move(tour.order));
}

struct TraceRow {
  std::size_t iteration = 0;
  double objective = 0.0;
  std::size_t k = 0;
  Move move = Move::none;
};

struct Incumbent {
  Solution solution;
  std::size_t iteration = 0;  // iteration of the last accepted move
  std::vector<TraceRow> trace;
  std::size_t evaluations = 0;
  std::size_t init_attempts = 0;

  double objective() const { return solution.report.objective; }
};

using EvaluationObserver = std::function<void(const Evaluation&)>;

namespace detail {

// Per-evaluation ERSOM stream, disjoint from the fixed component streams.
inline Rng ring_stream(std::uint64_t seed, std::uint64_t evaluation) {
  return Rng::derive(seed, streams::ring + 8 * (evaluation + 1));
}

inline std::size_t initial_count_upper(const Scenario& s, const JoltConfig& c) {
  return std::min(s.k_max, std::max(s.k_min, c.awoa.pop_size));
}

}  // namespace detail

// Rejection-samples a feasible starting deployment: a stop count uniform in
// [k_min, min(k_max, max(k_min, pop_size))] and uniformly placed stops.
inline Solution initial_solution(const Scenario& scenario, const JoltConfig& config, std::size_t& attempts,
                                 std::size_t& evaluations, const EvaluationObserver& observer = {}) {
  Rng rng = Rng::derive(config.seed, streams::init);
  const std::size_t hi = detail::initial_count_upper(scenario, config);
  const auto& area = scenario.area;
  for (attempts = 1; attempts <= config.init_attempts; ++attempts) {
    Deployment d;
    d.stops.resize(rng.between(scenario.k_min, hi));
    for (auto& p : d.stops) {
      if (config.init_sites.empty()) {
        p.x = rng.uniform(area.x_min, area.x_max);
        p.y = rng.uniform(area.y_min, area.y_max);
      } else {
        p = area.clamp(config.init_sites[rng.index(config.init_sites.size())]);
      }
    }
    Evaluation ev = evaluate_candidate(scenario, d, config.ersom, detail::ring_stream(config.seed, evaluations++));
    if (observer) observer(ev);
    if (ev.feasible()) return std::move(ev.solution());
  }
  attempts = config.init_attempts;
  throw InitializationError("no feasible deployment found in " + std::to_string(config.init_attempts) + " attempts");
}

inline Incumbent jolt_run(const Scenario& scenario, const JoltConfig& config, const EvaluationObserver& observer = {}) {
  scenario.validate();
  config.validate();
  Incumbent inc;
  inc.solution = initial_solution(scenario, config, inc.init_attempts, inc.evaluations, observer);
  inc.trace.push_back({0, inc.objective(), inc.solution.deployment.size(), Move::initial});

  SearchState state;
  state.rng = Rng::derive(config.seed, streams::search);
  state.chaos = fresh_chaos(state.rng);
  state.population = inc.solution.deployment;
  state.best = inc.solution.deployment;
  state.best_objective = inc.objective();
  Rng neighbor_rng = Rng::derive(config.seed, streams::neighbors);

  for (std::size_t t = 1; t <= config.t_max; ++t) {
    state.iteration = t;
    Deployment q = awoa_step(state, config.awoa, config.t_max, scenario.area);
    auto neighbors = propose_neighbors(inc.solution.deployment, q, scenario.k_min, scenario.k_max, neighbor_rng);

    std::optional<Evaluation> chosen;
    Move chosen_move = Move::none;
    for (auto& n : neighbors) {
      Evaluation ev = evaluate_candidate(scenario, n.deployment, config.ersom,
                                         detail::ring_stream(config.seed, inc.evaluations++));
      if (observer) observer(ev);
      if (!ev.feasible()) continue;
      const double bar = chosen ? chosen->objective() : inc.objective();
      if (ev.objective() < bar) {
        chosen = std::move(ev);
        chosen_move = n.move;
      }
    }

    if (chosen) {
      inc.solution = std::move(chosen->solution());
      inc.iteration = t;
      state.population = inc.solution.deployment;
      state.best = inc.solution.deployment;
      state.best_objective = inc.objective();
      state.stagnation = 0;
    } else {
      state.population = std::move(q);
      ++state.stagnation;
    }
    inc.trace.push_back({t, inc.objective(), inc.solution.deployment.size(), chosen_move});
  }
  return inc;
}

}  // namespace jolt
