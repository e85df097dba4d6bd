#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

namespace metanets {

/// Piecewise-constant step schedule, e.g. for metering rates or splitting
/// rates. An empty schedule evaluates to 1 at every step.
class Schedule {
 public:
  Schedule() = default;

  static Schedule constant(double value) {
    Schedule s;
    s.points_.emplace_back(0, value);
    return s;
  }

  static Schedule piecewise(std::vector<std::pair<std::int64_t, double>> points) {
    Schedule s;
    s.points_ = std::move(points);
    return s;
  }

  double at(std::int64_t k) const {
    if (points_.empty()) return 1.0;
    double v = points_.front().second;
    for (const auto& [step, value] : points_) {
      if (step > k) break;
      v = value;
    }
    return v;
  }

  bool empty() const { return points_.empty(); }
  bool is_constant() const { return points_.size() <= 1; }
  const std::vector<std::pair<std::int64_t, double>>& points() const { return points_; }

 private:
  std::vector<std::pair<std::int64_t, double>> points_;  // ascending steps
};

/// Origin traffic demand as a function of the step index.
/// The peak form is a tent profile with a floor:
///   d(k) = max(floor, peak - |k - center| / slope_den).
struct DemandProfile {
  enum class Kind { constant, peak };

  Kind kind = Kind::peak;
  double value = 0.0;          // constant form [veh/h]
  double floor_veh_h = 500.0;  // peak form
  double peak_veh_h = 2500.0;
  std::int64_t center_step = 30000;
  double slope_den = 9.0;      // steps per veh/h of ramp

  double at(std::int64_t k) const {
    if (kind == Kind::constant) return value;
    return std::max(floor_veh_h,
                    peak_veh_h - std::abs(static_cast<double>(k - center_step)) / slope_den);
  }
};

}  // namespace metanets
