#pragma once

#include <algorithm>
#include <span>

#include "metanets/params.hpp"

namespace metanets {

// Store-and-forward queue links (and origin links, which are queue links fed
// by an exogenous demand). A queue has no spatial extent: vehicles accumulate
// and discharge up to a capacity scaled by downstream congestion.

/// Density view of the first section of the link downstream of a queue.
struct DownstreamView {
  double rho = 0.0;
  double rho_crit = 20.0;
  double rho_jam = 30.0;
};

/// Fraction of the queue capacity admitted by the downstream link, in [0, 1].
inline double permit(const DownstreamView& dv) {
  const double p = (dv.rho_jam - dv.rho) / (dv.rho_jam - dv.rho_crit);
  return std::clamp(p, 0.0, 1.0);
}

/// Maximum outflow of a queue link: full capacity while the downstream first
/// section is below critical density, otherwise scaled by the permit.
inline double max_outflow(double capacity, const DownstreamView& dv) {
  if (dv.rho < dv.rho_crit) return capacity;
  return capacity * permit(dv);
}

/// Discharge of a queue link this step: arriving flow plus the stored queue,
/// capped at q_max and scaled by the metering rate.
inline double queue_outflow(double q_in, double w, double step_h, double q_max, double meter) {
  return meter * std::min(q_in + w / step_h, q_max);
}

/// Queue length conservation update.
inline double step_queue(double w, double q_in, double q_out, double step_h) {
  return w + step_h * (q_in - q_out);
}

/// Partial-queue conservation update, one destination slot per call.
inline double step_partial_queue(double wj, double gamma_in, double q_in,
                                 double gamma_out, double q_out, double step_h) {
  return std::max(wj + step_h * (gamma_in * q_in - gamma_out * q_out), 0.0);
}

/// Composition of the flow leaving a queue. A non-empty queue discharges with
/// the stored composition w_j / w; an empty queue passes the inflow
/// composition through unchanged (the w -> 0 limit of the outflow).
inline void queue_exit_composition(std::span<const double> wj, double w,
                                   std::span<const double> gamma_in,
                                   std::span<double> out) {
  if (w < kEpsQueue) {
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = gamma_in[j];
    return;
  }
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = wj[j] / w;
}

}  // namespace metanets
