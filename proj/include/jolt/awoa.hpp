#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "jolt/energy.hpp"
#include "jolt/errors.hpp"
#include "jolt/geometry.hpp"
#include "jolt/rng.hpp"
#include "jolt/scenario.hpp"

// Whale-optimization search over a variable-length population: every individual
// is one stop point and the population as a whole is one deployment.
namespace jolt {

enum class Schedule { linear, nonlinear };

inline std::string_view schedule_name(Schedule s) { return s == Schedule::linear ? "linear" : "nonlinear"; }

inline Schedule parse_schedule(std::string_view s) {
  if (s == "linear") return Schedule::linear;
  if (s == "nonlinear") return Schedule::nonlinear;
  throw ParameterError("schedule must be 'linear' or 'nonlinear', got '" + std::string(s) + "'");
}

inline void check_iteration(double t, double t_max) {
  if (!(t_max >= 1.0)) throw RangeError("t_max must be at least 1");
  if (t < 0.0 || t > t_max) throw RangeError("iteration outside [0, t_max]");
}

// Slow start, fast finish: (2 - 2 t^3 / T^3) * cos(pi t / 2T).
inline double nonlinear_a(double t, double t_max) {
  check_iteration(t, t_max);
  const double r = t / t_max;
  return (2.0 - 2.0 * r * r * r) * std::cos(0.5 * kPi * r);
}

inline double linear_a(double t, double t_max) {
  check_iteration(t, t_max);
  return 2.0 * (1.0 - t / t_max);
}

inline double schedule_a(Schedule s, double t, double t_max) {
  return s == Schedule::linear ? linear_a(t, t_max) : nonlinear_a(t, t_max);
}

struct AwoaConfig {
  std::size_t pop_size = 100;  // upper end of the initial stop count
  double spiral_b = 1.0;
  std::size_t stagnation_limit = 30;
  double mutation_scale = 1.0;
  double mutation_fraction = 0.3;
  double chaos_mu = 4.0;
  Schedule schedule = Schedule::nonlinear;
  bool mutation_enabled = true;

  // Plain WOA: linear schedule, no mutation.
  static AwoaConfig standard_woa() {
    AwoaConfig c;
    c.schedule = Schedule::linear;
    c.mutation_enabled = false;
    return c;
  }

  void validate() const {
    if (pop_size < 1) throw ParameterError("pop_size must be at least 1");
    if (!std::isfinite(spiral_b)) throw ParameterError("b must be finite");
    if (!(mutation_scale >= 0.0) || !std::isfinite(mutation_scale)) throw ParameterError("rho must be non-negative");
    if (!(mutation_fraction >= 0.0 && mutation_fraction <= 1.0)) {
      throw ParameterError("mutation_fraction must lie in [0, 1]");
    }
    if (!(chaos_mu > 0.0 && chaos_mu <= 4.0)) throw ParameterError("mu must lie in (0, 4]");
  }
};

// Per-individual random coefficients.
struct Coefficients {
  double a = 0.0;
  Point2 A;
  Point2 C;
  double p = 0.0;
  double l = 0.0;
  double b = 1.0;

  double a_norm() const { return std::max(std::fabs(A.x), std::fabs(A.y)); }
};

inline Coefficients draw_coefficients(Rng& rng, double a, double b) {
  Coefficients c;
  c.a = a;
  c.b = b;
  const double rx = rng.uniform();
  const double ry = rng.uniform();
  const double cx = rng.uniform();
  const double cy = rng.uniform();
  c.A = {2.0 * a * rx - a, 2.0 * a * ry - a};
  c.C = {2.0 * cx, 2.0 * cy};
  c.p = rng.uniform();
  c.l = rng.uniform(-1.0, 1.0);
  return c;
}

inline double spiral_factor(double b, double l) { return std::exp(b * l) * std::cos(kTwoPi * l); }

// Move toward a reference individual: X_ref - A * |C * X_ref - X|.
inline Point2 encircle(Point2 x, Point2 ref, const Coefficients& c) {
  return {ref.x - c.A.x * std::fabs(c.C.x * ref.x - x.x), ref.y - c.A.y * std::fabs(c.C.y * ref.y - x.y)};
}

inline Point2 spiral(Point2 x, Point2 best, const Coefficients& c) {
  const double f = spiral_factor(c.b, c.l);
  return {std::fabs(c.C.x * best.x - x.x) * f + best.x, std::fabs(c.C.y * best.y - x.y) * f + best.y};
}

// One unclamped position update. `random_peer` is only read on the global
// branch (|A| > 1).
inline Point2 update_individual(Point2 x, Point2 best, Point2 random_peer, const Coefficients& c) {
  if (c.a_norm() > 1.0) return encircle(x, random_peer, c);
  if (c.p < 0.5) return encircle(x, best, c);
  return spiral(x, best, c);
}

struct SearchState {
  Deployment population;
  Deployment best;
  double best_objective = std::numeric_limits<double>::infinity();
  std::size_t iteration = 0;
  std::size_t stagnation = 0;
  double chaos = 0.3;
  Rng rng;
};

inline bool degenerate_chaos(double w) {
  return !(w > 0.0 && w < 1.0) || w == 0.25 || w == 0.5 || w == 0.75;
}

inline double fresh_chaos(Rng& rng) {
  double w = rng.uniform();
  while (degenerate_chaos(w)) w = rng.uniform();
  return w;
}

// One logistic-map step; degenerate orbits are reseeded from the RNG.
inline double logistic_step(double w, double mu, Rng& rng) {
  if (degenerate_chaos(w)) w = fresh_chaos(rng);
  double next = mu * w * (1.0 - w);
  if (degenerate_chaos(next)) next = fresh_chaos(rng);
  return next;
}

// Candidate population Q from the current population, without mutation.
inline Deployment woa_update(SearchState& state, double a, double b, const AreaBounds& area) {
  const auto& pop = state.population.stops;
  const auto& best = state.best.stops;
  if (pop.empty()) throw ParameterError("empty population");
  if (best.empty()) throw ParameterError("no best deployment");
  Deployment q;
  q.stops.resize(pop.size());
  for (std::size_t j = 0; j < pop.size(); ++j) {
    const Coefficients c = draw_coefficients(state.rng, a, b);
    const Point2 ref = best[std::min(j, best.size() - 1)];
    Point2 peer = ref;
    if (c.a_norm() > 1.0) peer = pop[state.rng.index(pop.size())];
    q.stops[j] = area.clamp(update_individual(pop[j], ref, peer, c));
  }
  return q;
}

// Shift ceil(fraction * K) distinct, uniformly chosen individuals by
// rho * w_c on each coordinate, stepping the chaotic state once per coordinate.
inline std::vector<std::size_t> partial_mutation(Deployment& q, SearchState& state, double fraction, double rho,
                                                 double mu, const AreaBounds& area) {
  const std::size_t k = q.size();
  const auto count = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(k) - 1e-12));
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  const std::size_t m = std::min(count, k);
  for (std::size_t i = 0; i < m; ++i) std::swap(idx[i], idx[i + state.rng.index(k - i)]);
  idx.resize(m);
  for (std::size_t j : idx) {
    Point2& p = q.stops[j];
    state.chaos = logistic_step(state.chaos, mu, state.rng);
    p.x += rho * state.chaos;
    state.chaos = logistic_step(state.chaos, mu, state.rng);
    p.y += rho * state.chaos;
    p = area.clamp(p);
  }
  return idx;
}

// One search step at iteration state.iteration: schedule, coefficient draws,
// position update and, once stagnated, the partial mutation.
inline Deployment awoa_step(SearchState& state, const AwoaConfig& config, std::size_t t_max, const AreaBounds& area) {
  const double a = schedule_a(config.schedule, static_cast<double>(state.iteration), static_cast<double>(t_max));
  Deployment q = woa_update(state, a, config.spiral_b, area);
  if (config.mutation_enabled && state.stagnation >= config.stagnation_limit) {
    partial_mutation(q, state, config.mutation_fraction, config.mutation_scale, config.chaos_mu, area);
  }
  return q;
}

}  // namespace jolt
