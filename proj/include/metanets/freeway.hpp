#pragma once

#include <algorithm>
#include <cmath>
#include <span>

#include "metanets/params.hpp"

namespace metanets {

// Second-order per-section dynamics of freeway links. All functions are pure;
// callers advance every section of a step from step-k values only (synchronous
// update), so sections may be evaluated in any order or in parallel.

/// Equilibrium (desired) speed for a given density, floored at v_min.
inline double desired_speed(double rho, const FreewayParams& p) {
  const double x = rho / p.rho_crit;
  const double v = p.v_free * std::exp(-std::pow(x, p.exponent) / p.exponent);
  return std::max(v, p.v_min);
}

/// Total section flow across all lanes [veh/h].
inline double section_flow(double rho, double v, int lanes) {
  return rho * v * static_cast<double>(lanes);
}

struct DensityUpdate {
  double rho = 0.0;
  bool clamped = false;  // negative result clamped to zero (should not occur under CFL)
};

/// Density conservation update. Flows are total veh/h.
inline DensityUpdate step_density(double rho, double q_in, double q_out,
                                  double length_km, int lanes, double step_h) {
  const double next = rho + step_h / (length_km * static_cast<double>(lanes)) * (q_in - q_out);
  if (next < 0.0) return {0.0, true};
  return {next, false};
}

/// Speed update: relaxation toward the equilibrium speed, convection from the
/// upstream speed, anticipation of the downstream density. Floored at v_min
/// after the full update, not per term.
inline double step_speed(double v, double v_up, double rho, double rho_down,
                         const FreewayParams& p, double length_km, double step_h) {
  const double relax = (step_h / p.tau) * (desired_speed(rho, p) - v);
  const double convect = (step_h / length_km) * v * (v_up - v);
  const double anticip = p.anticipation * step_h * (rho_down - rho) /
                         (p.tau * length_km * (rho + p.stability));
  return std::max(v + relax + convect - anticip, p.v_min);
}

/// Per-destination density conservation update (one destination slot).
inline double step_partial_density(double partial, double gamma_in, double q_in,
                                   double gamma_out, double q_out,
                                   double length_km, int lanes, double step_h) {
  const double next = partial + step_h / (length_km * static_cast<double>(lanes)) *
                                    (gamma_in * q_in - gamma_out * q_out);
  return std::max(next, 0.0);
}

/// Recompute composition rates from partial densities. When the total density
/// is degenerate the previous composition is kept (avoids 0/0).
inline void compositions_from_partials(std::span<const double> partials, double rho,
                                       std::span<double> gamma_inout) {
  if (rho < kEpsDensity) return;
  for (std::size_t j = 0; j < partials.size(); ++j) gamma_inout[j] = partials[j] / rho;
}

}  // namespace metanets
