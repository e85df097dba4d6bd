#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "metanets/engine.hpp"

namespace metanets {

// First-order baseline: cell-transmission dynamics on the same network, with
// the service-station block (dwell delay, occupancy cap, capacity limit)
// expressed through demand/supply flows. Cells map one-to-one onto the
// second-order sections. Triangular fundamental diagram calibrated so the
// free-flow speed and critical density match the link parameters, hence
// cell capacity Q = v_free * rho_crit * lanes and congestion wave speed
// w_c = v_free * rho_crit / (rho_jam - rho_crit).

/// Sending capability of a cell [veh/h].
inline double cell_demand(double rho, const FreewayParams& p, int lanes) {
  const double q_cap = p.v_free * p.rho_crit * lanes;
  return std::min(p.v_free * rho * lanes, q_cap);
}

/// Receiving capability of a cell [veh/h]; zero at jam density.
inline double cell_supply(double rho, const FreewayParams& p, int lanes) {
  const double q_cap = p.v_free * p.rho_crit * lanes;
  const double w_c = p.v_free * p.rho_crit / (p.rho_jam - p.rho_crit);
  return std::min(q_cap, w_c * (p.rho_jam - rho) * lanes);
}

/// First-order engine sharing SimState, trace sinks and the summary format
/// with the second-order Simulator. Speeds are not modeled; the speed span in
/// records is empty.
class CtmSimulator {
 public:
  explicit CtmSimulator(const CompiledNetwork& net);

  void reset();
  void set_state(const SimState& s) {
    state_ = s;
    flows_ready_ = false;
  }
  const SimState& state() const { return state_; }
  const StepFlows& flows() const { return flows_; }

  void step();
  void compute_flows_only();
  RecordView record_view() const;
  double stored_vehicles() const;

 private:
  void phase_flows();
  void phase_update();

  const CompiledNetwork& net_;
  bool flows_ready_ = false;
  SimState state_;  // fw.speed unused
  StepFlows flows_;
  std::vector<double> demand_, supply_;   // per section
  std::vector<double> link_inflow_comp_;  // per (link,dest)
  std::vector<double> node_in_flow_, node_in_comp_, node_dest_flow_, node_beta_,
      node_out_flow_, node_out_comp_;
};

/// Structural restrictions of the baseline (simple junctions only) plus its
/// own CFL condition step_h * max(v_free, w_c) <= length.
ValidationReport validate_ctm(const NetworkSpec& spec);

}  // namespace metanets
