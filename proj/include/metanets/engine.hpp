#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "metanets/compiled.hpp"
#include "metanets/kernels.hpp"
#include "metanets/station.hpp"

namespace metanets {

enum class Model { metanet_s, ctm_s };

enum class Exec { automatic, serial, parallel };

struct SimOptions {
  Exec exec = Exec::automatic;
  // Section count at or above which `automatic` picks the OpenMP path.
  // Results are bit-identical either way.
  int parallel_threshold = 4096;
};

/// Queue-link state: total queue plus per-destination partial queues.
struct QueueState {
  double w = 0.0;
  std::vector<double> wj;
};

/// Full mutable simulation state at step k. Copyable; restoring a copy and
/// stepping reproduces the original run exactly (the dynamics are Markovian).
struct SimState {
  std::int64_t k = 0;
  FlatState fw;
  std::vector<QueueState> queues;
  std::vector<StationState> stations;
  double entered = 0.0;  // cumulative vehicles injected by demand
  double exited = 0.0;   // cumulative vehicles absorbed by destination links
  std::int64_t density_clamps = 0;
};

/// Step-k derived flows, exposed to trace sinks.
struct StepFlows {
  std::vector<double> section_flow;     // per section, after station entry caps
  std::vector<double> link_inflow;      // per freeway link
  std::vector<double> queue_in, queue_out;
  std::vector<double> queue_exit_comp;  // per (queue,dest)
  std::vector<double> queue_in_comp;    // per (queue,dest)
  std::vector<double> station_in, station_out, station_qmax;
  std::vector<double> dest_in;          // per destination label
  std::vector<double> origin_demand;    // per queue (zero for plain saf)
};

/// One recorded instant handed to sinks: state and flows at step k, before
/// the update to k+1. `speed` is empty for the first-order baseline.
struct RecordView {
  std::int64_t k = 0;
  double time_h = 0.0;
  Model model = Model::metanet_s;
  const CompiledNetwork* net = nullptr;
  std::span<const double> rho;
  std::span<const double> speed;
  std::span<const double> flow;
  std::span<const double> queue_w;
  std::span<const double> queue_out;
  std::span<const StationState> stations;
  std::span<const double> station_in;
  std::span<const double> station_out;
  std::span<const double> station_qmax;
};

class TraceSink {
 public:
  virtual ~TraceSink() = default;
  virtual void on_record(const RecordView& rec) = 0;
};

/// Run-level digest: conservation bookkeeping, per-link peaks and the event
/// markers used by the service-station experiments.
struct RunSummary {
  Model model = Model::metanet_s;
  std::int64_t steps = 0;
  double step_h = 0.0;
  double entered = 0.0;
  double exited = 0.0;
  double stored_initial = 0.0;
  double stored_final = 0.0;
  double residual = 0.0;  // |entered - exited - (stored_final - stored_initial)|
  std::int64_t density_clamps = 0;

  struct Peak {
    double value = 0.0;
    std::int64_t step = -1;
  };
  std::map<LinkId, Peak> peak_exit_flow;      // per freeway link, total veh/h
  std::map<LinkId, Peak> peak_density;        // per freeway link, first section
  std::map<LinkId, Peak> peak_queue;          // per queue link

  struct StationEvents {
    std::int64_t congestion_onset_step = -1;  // first step with rho_{s2,1} >= rho_crit
    std::int64_t capacity_cut_step = -1;      // first step with q_max < capacity_flow
    Peak occupancy;
    Peak exit_queue;
  };
  std::map<LinkId, StationEvents> stations;
};

std::string format_summary(const RunSummary& s);

/// Second-order engine. Owns a SimState and advances it with the synchronous
/// step: flows and node routing from step-k values, then all updates.
class Simulator {
 public:
  Simulator(const CompiledNetwork& net, SimOptions opt = {});

  void reset();
  void set_state(const SimState& s) {
    state_ = s;
    flows_ready_ = false;
  }
  const SimState& state() const { return state_; }
  const StepFlows& flows() const { return flows_; }
  const CompiledNetwork& net() const { return net_; }

  /// Computes step-k flows (visible through flows()) and advances to k+1.
  /// Throws std::runtime_error with the step index on an invariant breach.
  void step();

  /// Flows for the current step without advancing; used when recording the
  /// state at k together with its flows.
  void compute_flows_only();

  RecordView record_view() const;
  double stored_vehicles() const;

 private:
  void phase_flows();
  void phase_update();
  void check_finite() const;

  const CompiledNetwork& net_;
  SimOptions opt_;
  bool use_parallel_ = false;
  bool flows_ready_ = false;
  SimState state_;
  FlatState next_;
  StepFlows flows_;
  LinkBoundary boundary_;
  // node scratch, sized once
  std::vector<double> node_in_flow_, node_in_comp_, node_dest_flow_, node_beta_,
      node_out_flow_, node_out_comp_;
};

struct RunOptions {
  SimOptions sim;
  std::int64_t stride = 0;  // 0 = take the spec's output_stride
  std::vector<TraceSink*> sinks;
  std::int64_t horizon_override = -1;
};

/// Validates, runs the chosen model over the horizon and returns the digest.
RunSummary run(const NetworkSpec& spec, Model model, const RunOptions& opt = {});

SimState initial_state(const CompiledNetwork& net);

}  // namespace metanets
