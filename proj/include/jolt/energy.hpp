#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "jolt/channel.hpp"
#include "jolt/errors.hpp"
#include "jolt/geometry.hpp"
#include "jolt/scenario.hpp"
#include "jolt/tsplib.hpp"

namespace jolt {

// A set of UAV stop points; the UAV altitude comes from the scenario.
struct Deployment {
  std::vector<Point2> stops;

  std::size_t size() const { return stops.size(); }
  bool empty() const { return stops.empty(); }
  friend bool operator==(const Deployment&, const Deployment&) = default;
};

// Rates and quantized phases for every (device, stop) pair, row-major N x K.
struct RateTable {
  std::size_t devices = 0;
  std::size_t stops = 0;
  std::vector<double> rates;
  std::vector<channel::PhaseVector> phases;

  double rate(std::size_t i, std::size_t j) const { return rates[i * stops + j]; }
  const channel::PhaseVector& phase(std::size_t i, std::size_t j) const { return phases[i * stops + j]; }
};

inline RateTable compute_rates(const Scenario& scenario, const Deployment& deployment) {
  RateTable t;
  t.devices = scenario.device_count();
  t.stops = deployment.size();
  t.rates.resize(t.devices * t.stops);
  t.phases.resize(t.devices * t.stops);

  std::vector<channel::ArrayResponse> uav(t.stops);
  for (std::size_t j = 0; j < t.stops; ++j) {
    uav[j] = channel::uav_response(lift(deployment.stops[j], scenario.uav_altitude_m), scenario.irs, scenario.radio);
  }
  for (std::size_t i = 0; i < t.devices; ++i) {
    const auto dev = channel::device_response(scenario.devices[i].position, scenario.irs, scenario.radio);
    for (std::size_t j = 0; j < t.stops; ++j) {
      auto thetas = channel::quantize_phases(uav[j], dev, scenario.radio.phase_levels);
      const double gain = channel::cascaded_gain(uav[j], dev, thetas);
      t.rates[i * t.stops + j] = channel::rate_bps(gain, scenario.radio.tx_power_w, scenario.radio);
      t.phases[i * t.stops + j] = std::move(thetas);
    }
  }
  return t;
}

// Device-to-stop incidence in sparse row form, with the full rate matrix and
// the phase configuration of every assigned link.
struct Assignment {
  std::size_t devices = 0;
  std::size_t stops = 0;
  std::vector<std::size_t> stop_of;
  std::vector<double> rates;
  std::vector<channel::PhaseVector> phases;  // phases[i] configures link (i, stop_of[i])

  bool incidence(std::size_t i, std::size_t j) const { return stop_of[i] == j; }
  double rate(std::size_t i, std::size_t j) const { return rates[i * stops + j]; }
  double assigned_rate(std::size_t i) const { return rate(i, stop_of[i]); }

  std::vector<std::size_t> loads() const {
    std::vector<std::size_t> l(stops, 0);
    for (std::size_t j : stop_of) ++l[j];
    return l;
  }
};

namespace detail {

inline std::size_t row_argmax(const RateTable& t, std::size_t i) {
  std::size_t best = 0;
  for (std::size_t j = 1; j < t.stops; ++j) {
    if (t.rate(i, j) > t.rate(i, best)) best = j;
  }
  return best;
}

}  // namespace detail

// Fastest-rate assignment. Devices first pick their maximum-rate stop; while a
// stop is over capacity, the device on it that loses the least rate by moving
// to its best non-full stop is moved (ties by device index). A stop left
// without devices makes the deployment infeasible.
inline Assignment assign_devices(const Scenario& scenario, const Deployment& deployment, RateTable table) {
  const std::size_t n = scenario.device_count();
  const std::size_t k = deployment.size();
  const std::size_t cap = scenario.capacity;
  if (k == 0) throw InfeasibleError(Constraint::C7_StopCount, "deployment has no stop points");
  if (n > k * cap) {
    throw InfeasibleError(Constraint::C3_StopLoad, std::to_string(n) + " devices exceed " + std::to_string(k) +
                                                       " stops x capacity " + std::to_string(cap));
  }
  if (k > n) {
    throw InfeasibleError(Constraint::C3_StopLoad,
                          std::to_string(k) + " stops cannot each serve one of " + std::to_string(n) + " devices");
  }

  Assignment a;
  a.devices = n;
  a.stops = k;
  a.stop_of.resize(n);
  std::vector<std::size_t> load(k, 0);
  for (std::size_t i = 0; i < n; ++i) {
    a.stop_of[i] = detail::row_argmax(table, i);
    ++load[a.stop_of[i]];
  }

  for (;;) {
    std::size_t over = k;
    for (std::size_t j = 0; j < k; ++j) {
      if (load[j] > cap) {
        over = j;
        break;
      }
    }
    if (over == k) break;

    std::size_t mover = n, target = k;
    double best_gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      if (a.stop_of[i] != over) continue;
      std::size_t alt = k;
      for (std::size_t j = 0; j < k; ++j) {
        if (j == over || load[j] >= cap) continue;
        if (alt == k || table.rate(i, j) > table.rate(i, alt)) alt = j;
      }
      if (alt == k) continue;
      const double gap = table.rate(i, over) - table.rate(i, alt);
      if (gap < best_gap) {
        best_gap = gap;
        mover = i;
        target = alt;
      }
    }
    if (mover == n) throw InfeasibleError(Constraint::C3_StopLoad, "capacity repair found no free stop");
    --load[over];
    ++load[target];
    a.stop_of[mover] = target;
  }

  for (std::size_t j = 0; j < k; ++j) {
    if (load[j] == 0) throw InfeasibleError(Constraint::C3_StopLoad, "stop " + std::to_string(j) + " serves no device");
  }

  a.phases.reserve(n);
  for (std::size_t i = 0; i < n; ++i) a.phases.push_back(table.phase(i, a.stop_of[i]));
  a.rates = std::move(table.rates);
  return a;
}

inline Assignment assign_devices(const Scenario& scenario, const Deployment& deployment) {
  return assign_devices(scenario, deployment, compute_rates(scenario, deployment));
}

struct TransmissionEnergy {
  std::vector<double> per_device_j;
  double total_j = 0.0;
};

inline TransmissionEnergy transmission_energy(const Scenario& scenario, const Assignment& a) {
  TransmissionEnergy e;
  e.per_device_j.resize(a.devices);
  for (std::size_t i = 0; i < a.devices; ++i) {
    const double r = a.assigned_rate(i);
    if (!(r > 0.0)) throw UnreachableDeviceError(i, a.stop_of[i]);
    e.per_device_j[i] = scenario.radio.tx_power_w * scenario.devices[i].data_bits / r;
    e.total_j += e.per_device_j[i];
  }
  return e;
}

struct HoverEnergy {
  std::vector<double> hover_times_s;
  double total_j = 0.0;
};

inline HoverEnergy hover_energy(const Scenario& scenario, const Assignment& a) {
  HoverEnergy h;
  h.hover_times_s.assign(a.stops, 0.0);
  for (std::size_t i = 0; i < a.devices; ++i) {
    const double r = a.assigned_rate(i);
    if (!(r > 0.0)) throw UnreachableDeviceError(i, a.stop_of[i]);
    double& t = h.hover_times_s[a.stop_of[i]];
    t = std::max(t, scenario.devices[i].data_bits / r);
  }
  double sum = 0.0;
  for (double t : h.hover_times_s) sum += t;
  h.total_j = scenario.power.hover_power_w * sum;
  return h;
}

struct FlightEnergy {
  double length_m = 0.0;
  double energy_j = 0.0;
};

inline FlightEnergy flight_energy(const Scenario& scenario, const Deployment& deployment,
                                  std::span<const std::size_t> tour) {
  FlightEnergy f;
  f.length_m = tour_length(std::span<const Point2>(deployment.stops), tour);
  f.energy_j = scenario.power.flight_power_w * f.length_m;
  return f;
}

struct EnergyReport {
  std::vector<double> e_iot_j;  // per device
  double e_iot = 0.0;
  std::vector<double> hover_times_s;  // per stop
  double e_hov = 0.0;
  double tour_length_m = 0.0;
  double e_fly = 0.0;
  double weight_hover = 0.0;
  double weight_fly = 0.0;
  double objective = 0.0;

  double recomposed() const { return e_iot + weight_hover * e_hov + weight_fly * e_fly; }
  // Unweighted system energy.
  double total_energy() const { return e_iot + e_hov + e_fly; }
};

struct ConstraintViolation {
  Constraint constraint;
  std::string detail;
};

struct Solution {
  Deployment deployment;
  std::vector<std::size_t> tour;
  Assignment assignment;
  EnergyReport report;
};

class Evaluation {
 public:
  Evaluation(Solution s) : value_(std::move(s)) {}
  Evaluation(ConstraintViolation v) : value_(std::move(v)) {}

  bool feasible() const { return std::holds_alternative<Solution>(value_); }
  const Solution& solution() const { return std::get<Solution>(value_); }
  Solution& solution() { return std::get<Solution>(value_); }
  const ConstraintViolation& violation() const { return std::get<ConstraintViolation>(value_); }
  double objective() const {
    return feasible() ? solution().report.objective : std::numeric_limits<double>::infinity();
  }

 private:
  std::variant<Solution, ConstraintViolation> value_;
};

// C5-C7 on the stop points alone.
inline std::optional<ConstraintViolation> check_deployment(const Scenario& scenario, const Deployment& d) {
  for (std::size_t j = 0; j < d.size(); ++j) {
    const Point2 p = d.stops[j];
    if (!(p.x >= scenario.area.x_min && p.x <= scenario.area.x_max)) {
      return ConstraintViolation{Constraint::C5_XBounds, "stop " + std::to_string(j) + " x out of bounds"};
    }
    if (!(p.y >= scenario.area.y_min && p.y <= scenario.area.y_max)) {
      return ConstraintViolation{Constraint::C6_YBounds, "stop " + std::to_string(j) + " y out of bounds"};
    }
  }
  if (d.size() < scenario.k_min || d.size() > scenario.k_max) {
    return ConstraintViolation{Constraint::C7_StopCount, "K = " + std::to_string(d.size()) + " outside [" +
                                                             std::to_string(scenario.k_min) + ", " +
                                                             std::to_string(scenario.k_max) + "]"};
  }
  return std::nullopt;
}

inline Evaluation evaluate_assigned(const Scenario& scenario, const Deployment& deployment, Assignment assignment,
                                    std::vector<std::size_t> tour) {
  try {
    validate_permutation(tour, deployment.size());
  } catch (const InvalidPermutationError& e) {
    return ConstraintViolation{Constraint::C8_TourPermutation, e.what()};
  }
  EnergyReport r;
  try {
    auto tx = transmission_energy(scenario, assignment);
    auto hov = hover_energy(scenario, assignment);
    r.e_iot_j = std::move(tx.per_device_j);
    r.e_iot = tx.total_j;
    r.hover_times_s = std::move(hov.hover_times_s);
    r.e_hov = hov.total_j;
  } catch (const UnreachableDeviceError& e) {
    return ConstraintViolation{Constraint::C4_AllServed, e.what()};
  }
  const FlightEnergy fly = flight_energy(scenario, deployment, tour);
  r.tour_length_m = fly.length_m;
  r.e_fly = fly.energy_j;
  r.weight_hover = scenario.power.weight_hover;
  r.weight_fly = scenario.power.weight_fly;
  r.objective = r.recomposed();
  return Solution{deployment, std::move(tour), std::move(assignment), std::move(r)};
}

// Full objective for a deployment and a visiting order; constraint failures
// come back as a named violation instead of a report.
inline Evaluation evaluate(const Scenario& scenario, const Deployment& deployment, std::vector<std::size_t> tour) {
  if (auto v = check_deployment(scenario, deployment)) return *v;
  Assignment a;
  try {
    a = assign_devices(scenario, deployment);
  } catch (const InfeasibleError& e) {
    return ConstraintViolation{e.constraint(), e.what()};
  }
  return evaluate_assigned(scenario, deployment, std::move(a), std::move(tour));
}

// Independent check of C1-C9 for a finished solution. Rates are recomputed
// link by link through the channel model. C1 is checked in its capacity-aware
// form: any stop offering a device a strictly higher rate must be full.
inline std::vector<ConstraintViolation> check_constraints(const Scenario& scenario, const Solution& s) {
  std::vector<ConstraintViolation> out;
  const auto& d = s.deployment;
  const auto& a = s.assignment;
  const std::size_t n = scenario.device_count();
  const std::size_t k = d.size();

  if (auto v = check_deployment(scenario, d)) out.push_back(*v);
  if (a.devices != n || a.stops != k || a.stop_of.size() != n) {
    out.push_back({Constraint::C2_SingleStop, "assignment shape does not match the instance"});
    return out;
  }
  std::vector<std::size_t> load(k, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (a.stop_of[i] >= k) {
      out.push_back({Constraint::C2_SingleStop, "device " + std::to_string(i) + " has no stop"});
      return out;
    }
    ++load[a.stop_of[i]];
  }
  std::size_t total = 0;
  for (std::size_t j = 0; j < k; ++j) {
    total += load[j];
    if (load[j] > scenario.capacity || load[j] == 0) {
      out.push_back({Constraint::C3_StopLoad, "stop " + std::to_string(j) + " serves " + std::to_string(load[j])});
    }
  }
  if (total != n) out.push_back({Constraint::C4_AllServed, "served " + std::to_string(total) + " of " + std::to_string(n)});

  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> rate(k);
    for (std::size_t j = 0; j < k; ++j) {
      rate[j] = channel::best_link(lift(d.stops[j], scenario.uav_altitude_m), scenario.devices[i].position,
                                   scenario.irs, scenario.radio)
                    .first.rate_bps;
    }
    const double own = rate[a.stop_of[i]];
    if (!(own > 0.0)) out.push_back({Constraint::C4_AllServed, "device " + std::to_string(i) + " unreachable"});
    for (std::size_t j = 0; j < k; ++j) {
      if (rate[j] > own && load[j] < scenario.capacity) {
        out.push_back({Constraint::C1_FastestRate, "device " + std::to_string(i) + " prefers non-full stop " +
                                                       std::to_string(j)});
        break;
      }
    }
    const auto& ph = a.phases.at(i);
    if (ph.size() != static_cast<std::size_t>(scenario.radio.num_elements) ||
        ph.levels != scenario.radio.phase_levels || !ph.valid()) {
      out.push_back({Constraint::C9_PhaseLevels, "device " + std::to_string(i) + " phase outside the level set"});
    }
  }

  try {
    validate_permutation(s.tour, k);
  } catch (const InvalidPermutationError& e) {
    out.push_back({Constraint::C8_TourPermutation, e.what()});
  }
  return out;
}

}  // namespace jolt
