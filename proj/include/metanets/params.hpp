#pragma once

namespace metanets {

// Numerical guards shared across the model modules.
inline constexpr double kEpsDensity = 1e-9;   // veh/km/lane; below this a composition is degenerate
inline constexpr double kEpsQueue = 1e-12;    // veh; queue considered empty
inline constexpr double kEpsFlow = 1e-12;     // veh/h

/// Per-link fundamental-diagram and relaxation parameters of a freeway link.
/// All speeds in km/h, densities in veh/km/lane, times in hours.
struct FreewayParams {
  double v_free = 102.0;       // free-flow speed
  double rho_crit = 20.0;      // critical density per lane
  double rho_jam = 30.0;       // jam density per lane
  double exponent = 2.34;      // exponent of the equilibrium speed curve
  double tau = 0.005;          // relaxation time [h]
  double anticipation = 60.0;  // anticipation constant [km^2/h]
  double stability = 40.0;     // numerical stability offset [veh/km]
  double v_min = 7.0;          // speed floor; keeps the anticipation term from driving v negative
};

}  // namespace metanets
