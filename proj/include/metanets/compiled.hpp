#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "metanets/network.hpp"

namespace metanets {

// Dense, index-based view of a validated NetworkSpec. Built once per run;
// immutable afterwards and safely shareable across threads.

struct CompiledFreeway {
  int spec_index = 0;
  int first_section = 0;  // into the global section arrays
  int n_sections = 1;
  int last_section = 0;
  int n_dest = 1;
  int partial_offset = 0;  // into the global per-(section,dest) arrays
  int dest_offset = 0;     // into the global per-(link,dest) arrays
  std::vector<int> dest_global;  // local destination slot -> global label id
  double length_km = 0.3;
  int lanes = 1;
  FreewayParams params;

  int up_node = -1;    // node feeding section 1, if any
  int down_node = -1;  // node fed by the last section, if any
  int station_out = -1;  // station consuming the last section's flow (upstream ramp)
  int station_in = -1;   // station feeding section 1 (downstream ramp)
};

struct CompiledQueue {
  int spec_index = 0;
  QueueKind kind = QueueKind::saf;
  double max_flow = 0.0;
  int n_dest = 1;
  int dest_offset = 0;
  std::vector<int> dest_global;
  std::vector<double> inflow_comp;  // origin demand composition (local slots)
  Schedule metering;
  DemandProfile demand;
  double demand_scale = 1.0;
  double init_queue = 0.0;
  int up_node = -1;          // node assigning this queue's inflow (saf only)
  int downstream_fw = -1;    // freeway link whose first section gates the outflow; -1 = uncongested
};

struct CompiledStation {
  int spec_index = 0;
  std::int64_t dwell_steps = 0;
  double capacity_flow = 0.0;
  double max_occupancy = 0.0;
  Schedule exit_metering;
  int ramp_in = -1;   // compiled freeway index of the upstream ramp
  int ramp_out = -1;  // compiled freeway index of the downstream ramp
  std::vector<double> exit_comp;  // over ramp_out's destination slots
  double init_occupancy = 0.0;
  double init_exit_queue = 0.0;
  std::vector<double> init_history;
};

struct CompiledNode {
  int spec_index = 0;
  struct In {
    bool is_queue = false;
    int index = 0;                 // compiled freeway or queue index
    std::vector<int> dest_map;     // link-local dest slot -> node dest slot
  };
  enum class OutKind { freeway, queue, destination };
  struct Out {
    OutKind kind = OutKind::freeway;
    int index = 0;                 // compiled index, or destination label id
    std::vector<int> dest_map;     // node dest slot -> out-link-local slot (-1 if absent)
  };
  std::vector<In> ins;
  std::vector<Out> outs;
  std::vector<int> dest_global;    // node dest slot -> global label id
  std::vector<Schedule> beta;      // row-major [n_dest x n_out]
};

struct CompiledNetwork {
  NetworkSpec spec;

  std::vector<CompiledFreeway> freeways;
  std::vector<CompiledQueue> queues;
  std::vector<CompiledStation> stations;
  std::vector<CompiledNode> nodes;
  std::vector<int> node_order;  // evaluation order resolving queue-link chains

  // global destination labels (destination links and stations)
  std::vector<std::string> dest_names;
  std::vector<bool> dest_is_station;

  int n_sections = 0;
  int n_partial = 0;   // sum over links of n_sections * n_dest
  int n_link_dest = 0; // sum over links of n_dest

  // per-section lookup tables
  std::vector<std::int32_t> sec_link;
  std::vector<std::int32_t> sec_partial_offset;

  double step_h = 0.0;
  std::int64_t horizon_steps = 0;

  int freeway_index(const LinkId& id) const;  // -1 if absent
  int queue_index(const LinkId& id) const;
  int station_index(const LinkId& id) const;
  int dest_label(const std::string& name) const;
};

/// Builds the dense runtime view. The spec must validate cleanly; throws
/// std::runtime_error otherwise.
CompiledNetwork compile(const NetworkSpec& spec);

/// Dense composition vector over `dests` from a (possibly empty) label map;
/// empty means uniform.
std::vector<double> resolve_composition(const std::map<LinkId, double>& comp,
                                        const std::vector<LinkId>& dests);

}  // namespace metanets
