#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "jolt/errors.hpp"
#include "jolt/geometry.hpp"
#include "jolt/rng.hpp"
#include "jolt/tsplib.hpp"

namespace jolt {

inline constexpr int kScenarioSchemaVersion = 1;
inline constexpr double kBitsPerMegabyte = 8.0e6;

inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watts_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }

struct RadioParams {
  double bandwidth_hz = 1.0e6;
  // -250 dBm. Implausibly low, but it is the published simulation value.
  double noise_power_w = dbm_to_watts(-250.0);
  double tx_power_w = 0.1;
  double path_loss_1 = 0.01;
  double path_loss_2 = 0.01;
  double wavelength_m = 0.1;
  double element_spacing_m = 0.05;
  int num_elements = 16;
  int phase_levels = 8;

  void validate() const {
    auto positive = [](double v, const char* what) {
      if (!(v > 0.0) || !std::isfinite(v)) throw ParameterError(std::string(what) + " must be positive");
    };
    positive(bandwidth_hz, "bandwidth_hz");
    positive(noise_power_w, "noise_power_w");
    positive(tx_power_w, "tx_power_w");
    positive(path_loss_1, "path_loss_1");
    positive(path_loss_2, "path_loss_2");
    positive(wavelength_m, "wavelength_m");
    positive(element_spacing_m, "element_spacing_m");
    if (num_elements < 1) throw ParameterError("num_elements must be a positive integer");
    if (phase_levels < 2) throw ParameterError("phase_levels must be at least 2");
    if (element_spacing_m > wavelength_m) throw ParameterError("element_spacing_m must not exceed wavelength_m");
  }
};

struct PowerParams {
  double hover_power_w = 1000.0;
  double flight_power_w = 1283.0;
  double weight_hover = 10000.0;
  double weight_fly = 0.5;

  void validate() const {
    if (!(hover_power_w > 0.0)) throw ParameterError("hover_power_w must be positive");
    if (!(flight_power_w > 0.0)) throw ParameterError("flight_power_w must be positive");
    if (!(weight_hover >= 0.0)) throw ParameterError("weight_hover must be non-negative");
    if (!(weight_fly >= 0.0)) throw ParameterError("weight_fly must be non-negative");
  }
};

struct AreaBounds {
  double x_min = 0.0;
  double x_max = 1000.0;
  double y_min = 0.0;
  double y_max = 1000.0;

  bool contains(Point2 p) const { return p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max; }
  Point2 clamp(Point2 p) const { return {std::clamp(p.x, x_min, x_max), std::clamp(p.y, y_min, y_max)}; }
  Point2 center() const { return {0.5 * (x_min + x_max), 0.5 * (y_min + y_max)}; }
};

struct Device {
  Point2 position;
  double data_bits = 0.0;
};

struct Scenario {
  std::vector<Device> devices;
  Point3 irs;
  double uav_altitude_m = 200.0;
  AreaBounds area;
  std::size_t k_min = 1;
  std::size_t k_max = 1;
  std::size_t capacity = 5;
  RadioParams radio;
  PowerParams power;

  std::size_t device_count() const { return devices.size(); }

  void validate() const {
    radio.validate();
    power.validate();
    if (devices.empty()) throw ParameterError("scenario has no devices");
    if (!(area.x_max > area.x_min) || !(area.y_max > area.y_min)) throw ParameterError("empty area");
    for (std::size_t i = 0; i < devices.size(); ++i) {
      if (!area.contains(devices[i].position)) {
        throw ParameterError("device " + std::to_string(i) + " lies outside the area");
      }
      if (!(devices[i].data_bits > 0.0)) throw ParameterError("device " + std::to_string(i) + " has no data");
    }
    if (capacity < 1) throw ParameterError("capacity must be positive");
    const std::size_t needed = (devices.size() + capacity - 1) / capacity;
    if (k_max < needed) {
      throw InfeasibleError(Constraint::C4_AllServed, "k_max = " + std::to_string(k_max) + " stops cannot serve " +
                                                          std::to_string(devices.size()) + " devices at capacity " +
                                                          std::to_string(capacity));
    }
    if (k_min < 1 || k_min > k_max) throw ParameterError("need 1 <= k_min <= k_max");
    if (!(irs.z >= 0.0) || !(uav_altitude_m > irs.z)) throw ParameterError("need altitude > irs height >= 0");
  }
};

using ParameterMap = std::map<std::string, double>;

// Generator parameters. Every field can be overridden by name.
struct ScenarioParams {
  double area_size_m = 1000.0;
  double uav_altitude_m = 200.0;
  double irs_height_m = 100.0;
  double capacity = 5;
  double data_min_mb = 1.0;
  double data_max_mb = 1000.0;
  double noise_power_dbm = -250.0;
  double k_min = 0;  // 0: ceil(N / capacity)
  double k_max = 0;  // 0: N
  RadioParams radio;
  PowerParams power;

  static const std::vector<std::string>& keys() {
    static const std::vector<std::string> k = {
        "area_size_m",  "uav_altitude_m", "irs_height_m",   "capacity",       "data_min_mb",
        "data_max_mb",  "noise_power_dbm", "k_min",          "k_max",          "bandwidth_hz",
        "tx_power_w",   "path_loss_1",     "path_loss_2",    "wavelength_m",   "element_spacing_m",
        "num_elements", "phase_levels",    "hover_power_w",  "flight_power_w", "weight_hover",
        "weight_fly"};
    return k;
  }

  void set(const std::string& key, double value) {
    if (!std::isfinite(value)) throw ParameterError("parameter '" + key + "' is not finite");
    auto positive = [&] {
      if (!(value > 0.0)) throw ParameterError("parameter '" + key + "' must be positive");
    };
    auto integral = [&] {
      if (value != std::floor(value)) throw ParameterError("parameter '" + key + "' must be an integer");
    };
    if (key == "noise_power_dbm") {
      noise_power_dbm = value;
    } else if (key == "irs_height_m") {
      if (value < 0.0) throw ParameterError("parameter 'irs_height_m' must be non-negative");
      irs_height_m = value;
    } else if (key == "weight_hover" || key == "weight_fly") {
      if (value < 0.0) throw ParameterError("parameter '" + key + "' must be non-negative");
      (key == "weight_hover" ? power.weight_hover : power.weight_fly) = value;
    } else {
      positive();
      if (key == "area_size_m") area_size_m = value;
      else if (key == "uav_altitude_m") uav_altitude_m = value;
      else if (key == "capacity") { integral(); capacity = value; }
      else if (key == "data_min_mb") data_min_mb = value;
      else if (key == "data_max_mb") data_max_mb = value;
      else if (key == "k_min") { integral(); k_min = value; }
      else if (key == "k_max") { integral(); k_max = value; }
      else if (key == "bandwidth_hz") radio.bandwidth_hz = value;
      else if (key == "tx_power_w") radio.tx_power_w = value;
      else if (key == "path_loss_1") radio.path_loss_1 = value;
      else if (key == "path_loss_2") radio.path_loss_2 = value;
      else if (key == "wavelength_m") radio.wavelength_m = value;
      else if (key == "element_spacing_m") radio.element_spacing_m = value;
      else if (key == "num_elements") { integral(); radio.num_elements = static_cast<int>(value); }
      else if (key == "phase_levels") { integral(); radio.phase_levels = static_cast<int>(value); }
      else if (key == "hover_power_w") power.hover_power_w = value;
      else if (key == "flight_power_w") power.flight_power_w = value;
      else throw ParameterError("unknown parameter '" + key + "'");
    }
  }

  static ScenarioParams with(const ParameterMap& overrides) {
    ScenarioParams p;
    // wavelength first so a lone wavelength override keeps d = lambda / 2
    if (auto it = overrides.find("wavelength_m"); it != overrides.end()) {
      p.set(it->first, it->second);
      p.radio.element_spacing_m = 0.5 * p.radio.wavelength_m;
    }
    for (const auto& [k, v] : overrides) {
      if (k != "wavelength_m") p.set(k, v);
    }
    if (p.data_max_mb < p.data_min_mb) throw ParameterError("data_max_mb below data_min_mb");
    return p;
  }
};

namespace detail {

inline Scenario assemble(const ScenarioParams& p, std::vector<Device> devices, AreaBounds area) {
  Scenario s;
  s.devices = std::move(devices);
  s.area = area;
  s.irs = lift(area.center(), p.irs_height_m);
  s.uav_altitude_m = p.uav_altitude_m;
  s.capacity = static_cast<std::size_t>(p.capacity);
  s.radio = p.radio;
  s.radio.noise_power_w = dbm_to_watts(p.noise_power_dbm);
  s.power = p.power;
  const std::size_t n = s.devices.size();
  s.k_min = p.k_min > 0 ? static_cast<std::size_t>(p.k_min) : (n + s.capacity - 1) / s.capacity;
  s.k_max = p.k_max > 0 ? static_cast<std::size_t>(p.k_max) : n;
  s.validate();
  return s;
}

}  // namespace detail

// Devices uniform over a square area, data sizes uniform in
// [data_min_mb, data_max_mb], IRS at the area center.
inline Scenario generate_scenario(std::size_t n_devices, std::uint64_t seed, const ParameterMap& overrides = {}) {
  if (n_devices < 1) throw ParameterError("n_devices must be at least 1");
  const ScenarioParams p = ScenarioParams::with(overrides);
  const AreaBounds area{0.0, p.area_size_m, 0.0, p.area_size_m};
  Rng rng = Rng::derive(seed, streams::scenario);
  std::vector<Device> devices(n_devices);
  for (auto& d : devices) {
    d.position.x = rng.uniform(area.x_min, area.x_max);
    d.position.y = rng.uniform(area.y_min, area.y_max);
    d.data_bits = rng.uniform(p.data_min_mb, p.data_max_mb) * kBitsPerMegabyte;
  }
  return detail::assemble(p, std::move(devices), area);
}

// Uniform rescale (aspect ratio kept) of a point set into a square area
// anchored at its lower-left corner.
inline std::vector<Point2> rescale_points(const PointSet& set, const AreaBounds& area) {
  if (set.points.empty()) throw ParameterError("point set is empty");
  double lo_x = set.points[0].x, hi_x = lo_x, lo_y = set.points[0].y, hi_y = lo_y;
  for (auto q : set.points) {
    lo_x = std::min(lo_x, q.x);
    hi_x = std::max(hi_x, q.x);
    lo_y = std::min(lo_y, q.y);
    hi_y = std::max(hi_y, q.y);
  }
  const double span = std::max(hi_x - lo_x, hi_y - lo_y);
  const double side = std::min(area.x_max - area.x_min, area.y_max - area.y_min);
  const double scale = span > 0.0 ? side / span : 0.0;
  std::vector<Point2> out(set.points.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const Point2 q = set.points[i];
    out[i] = area.clamp({area.x_min + (q.x - lo_x) * scale, area.y_min + (q.y - lo_y) * scale});
  }
  return out;
}

// Devices placed at the rescaled coordinates of a point set; data sizes drawn
// from `seed`.
inline Scenario scenario_from_points(const PointSet& set, std::uint64_t seed, const ParameterMap& overrides = {}) {
  const ScenarioParams p = ScenarioParams::with(overrides);
  const AreaBounds area{0.0, p.area_size_m, 0.0, p.area_size_m};
  const auto positions = rescale_points(set, area);
  Rng rng = Rng::derive(seed, streams::scenario);
  std::vector<Device> devices(positions.size());
  for (std::size_t i = 0; i < devices.size(); ++i) {
    devices[i].position = positions[i];
    devices[i].data_bits = rng.uniform(p.data_min_mb, p.data_max_mb) * kBitsPerMegabyte;
  }
  return detail::assemble(p, std::move(devices), area);
}

inline nlohmann::json to_json(const Scenario& s) {
  nlohmann::json devices = nlohmann::json::array();
  for (const auto& d : s.devices) {
    devices.push_back({{"x_m", d.position.x}, {"y_m", d.position.y}, {"data_bits", d.data_bits}});
  }
  return {
      {"schema_version", kScenarioSchemaVersion},
      {"uav_altitude_m", s.uav_altitude_m},
      {"irs_position_m", {{"x", s.irs.x}, {"y", s.irs.y}, {"z", s.irs.z}}},
      {"area_m", {{"x_min", s.area.x_min}, {"x_max", s.area.x_max}, {"y_min", s.area.y_min}, {"y_max", s.area.y_max}}},
      {"k_min", s.k_min},
      {"k_max", s.k_max},
      {"capacity_devices", s.capacity},
      {"radio",
       {{"bandwidth_hz", s.radio.bandwidth_hz},
        {"noise_power_w", s.radio.noise_power_w},
        {"tx_power_w", s.radio.tx_power_w},
        {"path_loss_1", s.radio.path_loss_1},
        {"path_loss_2", s.radio.path_loss_2},
        {"wavelength_m", s.radio.wavelength_m},
        {"element_spacing_m", s.radio.element_spacing_m},
        {"num_elements", s.radio.num_elements},
        {"phase_levels", s.radio.phase_levels}}},
      {"power",
       {{"hover_power_w", s.power.hover_power_w},
        {"flight_power_w", s.power.flight_power_w},
        {"weight_hover", s.power.weight_hover},
        {"weight_fly", s.power.weight_fly}}},
      {"devices", devices},
  };
}

inline Scenario scenario_from_json(const nlohmann::json& j) {
  try {
    if (j.at("schema_version").get<int>() != kScenarioSchemaVersion) {
      throw ParameterError("unsupported scenario schema_version");
    }
    Scenario s;
    s.uav_altitude_m = j.at("uav_altitude_m").get<double>();
    const auto& irs = j.at("irs_position_m");
    s.irs = {irs.at("x").get<double>(), irs.at("y").get<double>(), irs.at("z").get<double>()};
    const auto& a = j.at("area_m");
    s.area = {a.at("x_min").get<double>(), a.at("x_max").get<double>(), a.at("y_min").get<double>(),
              a.at("y_max").get<double>()};
    s.k_min = j.at("k_min").get<std::size_t>();
    s.k_max = j.at("k_max").get<std::size_t>();
    s.capacity = j.at("capacity_devices").get<std::size_t>();
    const auto& r = j.at("radio");
    s.radio.bandwidth_hz = r.at("bandwidth_hz").get<double>();
    s.radio.noise_power_w = r.at("noise_power_w").get<double>();
    s.radio.tx_power_w = r.at("tx_power_w").get<double>();
    s.radio.path_loss_1 = r.at("path_loss_1").get<double>();
    s.radio.path_loss_2 = r.at("path_loss_2").get<double>();
    s.radio.wavelength_m = r.at("wavelength_m").get<double>();
    s.radio.element_spacing_m = r.at("element_spacing_m").get<double>();
    s.radio.num_elements = r.at("num_elements").get<int>();
    s.radio.phase_levels = r.at("phase_levels").get<int>();
    const auto& pw = j.at("power");
    s.power.hover_power_w = pw.at("hover_power_w").get<double>();
    s.power.flight_power_w = pw.at("flight_power_w").get<double>();
    s.power.weight_hover = pw.at("weight_hover").get<double>();
    s.power.weight_fly = pw.at("weight_fly").get<double>();
    for (const auto& d : j.at("devices")) {
      s.devices.push_back({{d.at("x_m").get<double>(), d.at("y_m").get<double>()}, d.at("data_bits").get<double>()});
    }
    s.validate();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError(std::string("malformed scenario document: ") + e.what());
  }
}

}  // namespace jolt
