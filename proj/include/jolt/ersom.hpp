#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "jolt/errors.hpp"
#include "jolt/geometry.hpp"
#include "jolt/rng.hpp"
#include "jolt/tsplib.hpp"

// Elastic ring self-organizing map for closed tours over a small point set.
namespace jolt {

struct Cell {
  Point2 weight;
  std::size_t counter = 0;
};

// Cells in ring order; cell i neighbours i-1 and i+1 modulo size().
struct Ring {
  std::vector<Cell> cells;

  std::size_t size() const { return cells.size(); }
  std::size_t prev(std::size_t i) const { return i == 0 ? cells.size() - 1 : i - 1; }
  std::size_t next(std::size_t i) const { return i + 1 == cells.size() ? 0 : i + 1; }
  std::size_t counter_sum() const {
    std::size_t s = 0;
    for (const auto& c : cells) s += c.counter;
    return s;
  }
};

struct ErsomConfig {
  double beta = 0.1;
  std::size_t insert_period = 5;
  std::size_t deletion_factor = 3;
  std::size_t max_epochs = 300;
  bool deletion_enabled = true;

  // Same run without the deletion step.
  static ErsomConfig rsom() {
    ErsomConfig c;
    c.deletion_enabled = false;
    return c;
  }

  void validate() const {
    if (!(beta > 0.0 && beta <= 1.0)) throw ParameterError("beta must lie in (0, 1]");
    if (insert_period < 1) throw ParameterError("T_r must be at least 1");
    if (deletion_factor < 1) throw ParameterError("zeta must be at least 1");
  }
};

// max(3, ceil(K/2)) cells evenly spaced on a circle around the centroid, with
// radius a quarter of the bounding-box diagonal.
inline Ring initial_ring(std::span<const Point2> stops) {
  if (stops.empty()) throw ParameterError("no stop points");
  const std::size_t k = stops.size();
  const std::size_t n = std::max<std::size_t>(3, (k + 1) / 2);
  Point2 centroid{0.0, 0.0};
  Point2 lo = stops[0], hi = stops[0];
  for (auto p : stops) {
    centroid.x += p.x;
    centroid.y += p.y;
    lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
    hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
  }
  centroid.x /= static_cast<double>(k);
  centroid.y /= static_cast<double>(k);
  const double radius = 0.25 * distance(lo, hi);
  Ring ring;
  ring.cells.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double ang = kTwoPi * static_cast<double>(i) / static_cast<double>(n);
    ring.cells[i].weight = {centroid.x + radius * std::cos(ang), centroid.y + radius * std::sin(ang)};
  }
  return ring;
}

inline std::size_t find_winner(const Ring& ring, Point2 stop) {
  if (ring.cells.empty()) throw ParameterError("empty ring");
  std::size_t best = 0;
  double best_d = squared_distance(ring.cells[0].weight, stop);
  for (std::size_t i = 1; i < ring.size(); ++i) {
    const double d = squared_distance(ring.cells[i].weight, stop);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

// Pull the winner and its two ring neighbours toward the stop; each distinct
// cell moves once even on rings of fewer than three cells.
inline void update_weights(Ring& ring, std::size_t winner, Point2 stop, double beta) {
  std::size_t targets[3] = {ring.prev(winner), winner, ring.next(winner)};
  std::size_t count = 0;
  std::size_t distinct[3];
  for (std::size_t t : targets) {
    if (std::find(distinct, distinct + count, t) == distinct + count) distinct[count++] = t;
  }
  for (std::size_t i = 0; i < count; ++i) {
    Point2& w = ring.cells[distinct[i]].weight;
    w.x += beta * (stop.x - w.x);
    w.y += beta * (stop.y - w.y);
  }
  ++ring.cells[winner].counter;
}

// Split the edge next to the busiest cell p. The new cell goes toward p-1 when
// that neighbour is at least as far from p as p+1. Returns the new cell's index.
inline std::size_t insert_cell(Ring& ring, Rng& rng) {
  if (ring.cells.empty()) throw ParameterError("empty ring");
  std::size_t top = 0;
  for (const auto& c : ring.cells) top = std::max(top, c.counter);
  std::vector<std::size_t> tied;
  for (std::size_t i = 0; i < ring.size(); ++i) {
    if (ring.cells[i].counter == top) tied.push_back(i);
  }
  const std::size_t p = tied.size() == 1 ? tied[0] : tied[rng.index(tied.size())];
  const std::size_t before = ring.prev(p);
  const std::size_t after = ring.next(p);
  const Point2 wp = ring.cells[p].weight;
  const bool toward_prev = distance(ring.cells[before].weight, wp) >= distance(ring.cells[after].weight, wp);
  const std::size_t q = toward_prev ? before : after;
  const Point2 wq = ring.cells[q].weight;
  const std::size_t pos = toward_prev ? p : p + 1;
  ring.cells.insert(ring.cells.begin() + static_cast<std::ptrdiff_t>(pos),
                    Cell{{0.5 * (wp.x + wq.x), 0.5 * (wp.y + wq.y)}, 0});
  return pos;
}

// Remove the least-used cell when the ring holds more than twice as many
// cells as there are stops. Returns false (ring untouched) otherwise.
inline bool delete_cell(Ring& ring, std::size_t k_stops) {
  if (ring.size() <= 2 * k_stops || ring.cells.empty()) return false;
  std::size_t d = 0;
  for (std::size_t i = 1; i < ring.size(); ++i) {
    if (ring.cells[i].counter < ring.cells[d].counter) d = i;
  }
  ring.cells.erase(ring.cells.begin() + static_cast<std::ptrdiff_t>(d));
  return true;
}

struct Tour {
  std::vector<std::size_t> order;
  double length = 0.0;
};

// Stops sorted by the ring position of their nearest cell, ties by stop index.
inline std::vector<std::size_t> extract_order(const Ring& ring, std::span<const Point2> stops) {
  std::vector<std::size_t> cell_of(stops.size());
  for (std::size_t j = 0; j < stops.size(); ++j) cell_of[j] = find_winner(ring, stops[j]);
  std::vector<std::size_t> order(stops.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return cell_of[a] < cell_of[b]; });
  return order;
}

struct ErsomResult {
  Tour tour;
  Ring ring;
  std::size_t insertions = 0;
  std::size_t deletions = 0;
  std::size_t wins = 0;
  std::size_t removed_counts = 0;  // counter mass dropped with deleted cells
};

// Called after every epoch with the epoch number (1-based) and the ring.
using RingObserver = std::function<void(std::size_t, const Ring&)>;

inline ErsomResult run_ersom(std::span<const Point2> stops, const ErsomConfig& config, Rng& rng,
                             const RingObserver& observer = {}) {
  config.validate();
  ErsomResult out;
  out.ring = initial_ring(stops);
  if (observer) observer(0, out.ring);
  const std::size_t k = stops.size();
  const std::size_t delete_period = config.insert_period * config.deletion_factor;
  Ring& ring = out.ring;

  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    for (std::size_t j = 0; j < k; ++j) {
      update_weights(ring, find_winner(ring, stops[j]), stops[j], config.beta);
      ++out.wins;
    }
    if (epoch % config.insert_period == 0) {
      insert_cell(ring, rng);
      ++out.insertions;
    }
    if (config.deletion_enabled && epoch % delete_period == 0 && ring.size() > 2 * k) {
      std::size_t d = 0;
      for (std::size_t i = 1; i < ring.size(); ++i) {
        if (ring.cells[i].counter < ring.cells[d].counter) d = i;
      }
      out.removed_counts += ring.cells[d].counter;
      delete_cell(ring, k);
      ++out.deletions;
    }
    if (observer) observer(epoch, ring);
  }

  out.tour.order = extract_order(ring, stops);
  out.tour.length = tour_length(stops, out.tour.order);
  return out;
}

inline ErsomResult run_ersom(const PointSet& set, const ErsomConfig& config, Rng& rng,
                             const RingObserver& observer = {}) {
  return run_ersom(std::span<const Point2>(set.points), config, rng, observer);
}

inline constexpr std::size_t kBruteForceLimit = 11;

// Exact minimum closed tour. City 0 is fixed first and each reversal pair is
// enumerated once, (K-1)!/2 tours in total.
inline Tour brute_force_tour(std::span<const Point2> stops) {
  const std::size_t k = stops.size();
  if (k > kBruteForceLimit) throw SizeLimitError("brute force limited to " + std::to_string(kBruteForceLimit) + " stops");
  Tour best;
  best.order.resize(k);
  std::iota(best.order.begin(), best.order.end(), std::size_t{0});
  if (k <= 3) {
    best.length = tour_length(stops, best.order);
    return best;
  }
  std::vector<std::size_t> perm = best.order;
  best.length = std::numeric_limits<double>::infinity();
  do {
    if (perm[1] > perm[k - 1]) continue;
    double len = 0.0;
    for (std::size_t i = 0; i < k; ++i) len += distance(stops[perm[i]], stops[perm[i + 1 == k ? 0 : i + 1]]);
    if (len < best.length) {
      best.length = len;
      best.order = perm;
    }
  } while (std::next_permutation(perm.begin() + 1, perm.end()));
  return best;
}

inline Tour brute_force_tour(const PointSet& set) { return brute_force_tour(std::span<const Point2>(set.points)); }

}  // namespace jolt
