#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "metanets/queue_link.hpp"

namespace metanets {

/// Mutable state of a service station: current occupancy, the queue of
/// vehicles done with their stop and waiting to merge back, and the ring of
/// past admitted inflows realizing the dwell delay.
///
/// Invariants maintained by the update functions below:
///   0 <= exit_queue <= occupancy <= max_occupancy.
struct StationState {
  double occupancy = 0.0;   // vehicles currently at the station [veh]
  double exit_queue = 0.0;  // vehicles past their dwell, waiting to merge [veh]

  // inflow admitted delay_steps..1 steps ago; ring[head] is the oldest.
  // Empty when delay_steps == 0.
  std::vector<double> ring;
  std::size_t head = 0;

  static StationState initial(std::int64_t delay_steps, double occupancy0 = 0.0,
                              double exit_queue0 = 0.0,
                              std::vector<double> history = {}) {
    StationState st;
    st.occupancy = occupancy0;
    st.exit_queue = exit_queue0;
    st.ring.assign(static_cast<std::size_t>(delay_steps), 0.0);
    // history is oldest-first and may be shorter than the delay; it fills the
    // most recent slots.
    const std::size_t n = std::min(history.size(), st.ring.size());
    for (std::size_t i = 0; i < n; ++i)
      st.ring[st.ring.size() - n + i] = history[history.size() - n + i];
    return st;
  }

  /// Inflow admitted delay_steps ago. With zero dwell that is the current
  /// step's inflow, which the caller must supply.
  double delayed_inflow(double current_inflow) const {
    return ring.empty() ? current_inflow : ring[head];
  }
};

/// Flow admitted into the station this step: the ramp's nominal discharge
/// (same rho * v * lanes definition as freeway sections) capped by the space
/// left. Never negative.
inline double station_inflow(double rho, double v, int lanes, double occupancy,
                             double max_occupancy, double step_h) {
  const double space_flow = std::max(max_occupancy - occupancy, 0.0) / step_h;
  const double nominal = rho * v * static_cast<double>(lanes);
  return std::max(std::min(nominal, space_flow), 0.0);
}

/// Merge-back capacity of the station: the full capacity while the downstream
/// ramp's first section is below critical density, otherwise scaled by the
/// permit (same structure as queue links).
inline double station_capacity(double capacity, const DownstreamView& dv) {
  return max_outflow(capacity, dv);
}

/// Flow merging back into the mainstream this step: the dwell-delayed inflow
/// plus the exit queue, capped at the station capacity and metered.
inline double station_outflow(double delayed_inflow, double exit_queue, double step_h,
                              double q_max, double meter) {
  return meter * std::min(delayed_inflow + exit_queue / step_h, q_max);
}

/// Advances occupancy, exit queue and the inflow ring by one step.
/// inflow and outflow must be the values computed for this step.
inline void step_station(StationState& st, double inflow, double outflow, double step_h) {
  const double delayed = st.delayed_inflow(inflow);
  st.occupancy += step_h * (inflow - outflow);
  st.exit_queue += step_h * (delayed - outflow);
  if (!st.ring.empty()) {
    st.ring[st.head] = inflow;
    st.head = (st.head + 1) % st.ring.size();
  }
  // The recursions keep 0 <= exit_queue <= occupancy exactly in real
  // arithmetic; rounding of the w/T and space/T terms can leave ulp-scale
  // excursions, which are squeezed out here.
  st.occupancy = std::max(st.occupancy, 0.0);
  st.exit_queue = std::min(std::max(st.exit_queue, 0.0), st.occupancy);
}

/// Caps the occupancy at the station size; rounding of the space-constrained
/// inflow can overshoot by an ulp.
inline void restore_bounds(StationState& st, double max_occupancy) {
  st.occupancy = std::min(st.occupancy, max_occupancy);
  st.exit_queue = std::min(st.exit_queue, st.occupancy);
}

}  // namespace metanets
