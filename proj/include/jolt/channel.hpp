#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <utility>
#include <vector>

#include "jolt/errors.hpp"
#include "jolt/geometry.hpp"
#include "jolt/scenario.hpp"

// IRS-reflected link model. The UAV hovers at a stop point (x, y, H), the IRS is
// a uniform linear array of M elements at (X, Y, H_irs) and every device sits on
// the ground. Only the cascaded UAV-IRS-device path is modelled.
namespace jolt::channel {

struct LinkDistances {
  double uav_irs_m = 0.0;
  double irs_device_m = 0.0;
};

inline LinkDistances distances(Point3 stop, Point2 device, Point3 irs) {
  LinkDistances d;
  d.uav_irs_m = distance(stop, irs);
  d.irs_device_m = distance(lift(device, 0.0), irs);
  if (!(d.uav_irs_m > 0.0)) throw DegenerateGeometryError("stop point coincides with the IRS");
  if (!(d.irs_device_m > 0.0)) throw DegenerateGeometryError("device coincides with the IRS");
  if (!std::isfinite(d.uav_irs_m) || !std::isfinite(d.irs_device_m)) {
    throw DegenerateGeometryError("non-finite link distance");
  }
  return d;
}

// Per-element amplitude plus the M element phases, each in [0, 2*pi).
struct ArrayResponse {
  double magnitude = 0.0;
  std::vector<double> phases;

  std::size_t size() const { return phases.size(); }
};

// ULA response with amplitude sqrt(alpha) / dist and element phases
// -(2*pi / lambda) * spacing * m * cos_angle, m = 0..M-1.
inline ArrayResponse ula_response(double path_loss, double dist, double cos_angle, const RadioParams& radio) {
  ArrayResponse r;
  r.magnitude = std::sqrt(path_loss) / dist;
  r.phases.resize(static_cast<std::size_t>(radio.num_elements));
  const double step = -kTwoPi / radio.wavelength_m * radio.element_spacing_m * cos_angle;
  for (std::size_t m = 0; m < r.phases.size(); ++m) r.phases[m] = wrap_angle(step * static_cast<double>(m));
  return r;
}

inline ArrayResponse uav_response(Point3 stop, Point3 irs, const RadioParams& radio) {
  const double d = distance(stop, irs);
  if (!(d > 0.0)) throw DegenerateGeometryError("stop point coincides with the IRS");
  return ula_response(radio.path_loss_1, d, (irs.x - stop.x) / d, radio);
}

inline ArrayResponse device_response(Point2 device, Point3 irs, const RadioParams& radio) {
  const double d = distance(lift(device, 0.0), irs);
  if (!(d > 0.0)) throw DegenerateGeometryError("device coincides with the IRS");
  return ula_response(radio.path_loss_2, d, (irs.x - device.x) / d, radio);
}

inline std::pair<ArrayResponse, ArrayResponse> array_responses(Point3 stop, Point2 device, Point3 irs,
                                                               const RadioParams& radio) {
  return {uav_response(stop, irs, radio), device_response(device, irs, radio)};
}

// Element phase shifts, each an index k into {2*pi*k / levels}.
struct PhaseVector {
  std::vector<int> indices;
  int levels = 2;

  std::size_t size() const { return indices.size(); }
  double angle(std::size_t m) const { return kTwoPi * indices[m] / levels; }
  std::vector<double> angles() const {
    std::vector<double> out(indices.size());
    for (std::size_t m = 0; m < out.size(); ++m) out[m] = angle(m);
    return out;
  }
  bool valid() const {
    for (int k : indices) {
      if (k < 0 || k >= levels) return false;
    }
    return levels >= 2;
  }
  static PhaseVector zeros(std::size_t m, int levels) { return {std::vector<int>(m, 0), levels}; }
};

// Nearest discrete level to the wrapped target angle; equidistant levels go to
// the smaller index.
inline int nearest_level(double target, int levels) {
  const double t = wrap_angle(target);
  // Only the two levels bracketing t can be nearest.
  int lo = static_cast<int>(std::floor(t * levels / kTwoPi));
  lo = ((lo % levels) + levels) % levels;
  const int hi = (lo + 1) % levels;
  const double d_lo = circular_distance(t, kTwoPi * lo / levels);
  const double d_hi = circular_distance(t, kTwoPi * hi / levels);
  if (d_lo < d_hi) return lo;
  if (d_hi < d_lo) return hi;
  return std::min(lo, hi);
}

inline PhaseVector quantize_phases(const ArrayResponse& uav, const ArrayResponse& device, int levels) {
  if (uav.size() != device.size()) throw ParameterError("array responses differ in element count");
  if (levels < 2) throw ParameterError("phase_levels must be at least 2");
  PhaseVector out;
  out.levels = levels;
  out.indices.resize(uav.size());
  for (std::size_t m = 0; m < uav.size(); ++m) {
    out.indices[m] = nearest_level(uav.phases[m] + device.phases[m], levels);
  }
  return out;
}

// |h_uav^H . Theta . h_dev|: the element phasors combine as
// exp(j(theta_m - w_uav_m - w_dev_m)), so theta_m = w_uav_m + w_dev_m adds them
// coherently.
inline double cascaded_gain(const ArrayResponse& uav, const ArrayResponse& device, const PhaseVector& thetas) {
  if (uav.size() != device.size() || uav.size() != thetas.size()) {
    throw ParameterError("inconsistent element count");
  }
  double re = 0.0, im = 0.0;
  for (std::size_t m = 0; m < uav.size(); ++m) {
    const double residual = thetas.angle(m) - uav.phases[m] - device.phases[m];
    re += std::cos(residual);
    im += std::sin(residual);
  }
  return uav.magnitude * device.magnitude * std::hypot(re, im);
}

inline double rate_bps(double gain, double tx_power_w, const RadioParams& radio) {
  return radio.bandwidth_hz * std::log2(1.0 + tx_power_w * gain * gain / radio.noise_power_w);
}

struct LinkBudget {
  double distance_uav_irs_m = 0.0;
  double distance_irs_device_m = 0.0;
  double effective_gain = 0.0;
  double rate_bps = 0.0;
};

// Upper bound on the cascaded gain: all M phasors aligned.
inline double gain_bound(const RadioParams& radio, double d_uav_irs, double d_irs_device) {
  return radio.num_elements * std::sqrt(radio.path_loss_1 * radio.path_loss_2) / (d_uav_irs * d_irs_device);
}

inline LinkBudget link_budget(Point3 stop, Point2 device, Point3 irs, const RadioParams& radio,
                              const PhaseVector& thetas) {
  const LinkDistances d = distances(stop, device, irs);
  const auto [h_uav, h_dev] = array_responses(stop, device, irs, radio);
  LinkBudget b;
  b.distance_uav_irs_m = d.uav_irs_m;
  b.distance_irs_device_m = d.irs_device_m;
  b.effective_gain = cascaded_gain(h_uav, h_dev, thetas);
  b.rate_bps = rate_bps(b.effective_gain, radio.tx_power_w, radio);
  return b;
}

// Link budget with the quantized phase configuration for this link.
inline std::pair<LinkBudget, PhaseVector> best_link(Point3 stop, Point2 device, Point3 irs, const RadioParams& radio) {
  const auto [h_uav, h_dev] = array_responses(stop, device, irs, radio);
  PhaseVector thetas = quantize_phases(h_uav, h_dev, radio.phase_levels);
  return {link_budget(stop, device, irs, radio, thetas), std::move(thetas)};
}

}  // namespace jolt::channel
