#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "metanets/params.hpp"
#include "metanets/schedule.hpp"

namespace metanets {

using LinkId = std::string;

/// Freeway link: a homogeneous stretch divided into sections.
struct FreewayLink {
  LinkId id;
  int n_sections = 1;
  double length_km = 0.3;  // per section
  int lanes = 1;
  FreewayParams params;
  std::string params_ref;             // named parameter set in the scenario file
  std::vector<LinkId> destinations;   // reachable destination labels

  std::vector<double> init_density;   // scalar broadcast or one value per section
  std::vector<double> init_speed;     // empty = equilibrium speed of init density
  std::map<LinkId, double> init_composition;  // empty = uniform over destinations
};

enum class QueueKind { saf, origin };

/// Store-and-forward link, or an origin link fed by a demand profile.
struct QueueLinkSpec {
  LinkId id;
  QueueKind kind = QueueKind::saf;
  double max_flow = 2000.0;  // Q_s [veh/h]
  std::vector<LinkId> destinations;
  std::map<LinkId, double> composition;  // inflow split for origins; empty = uniform
  Schedule metering;                     // r(k), defaults to 1
  DemandProfile demand;                  // origins only
  double demand_scale = 1.0;
  double init_queue = 0.0;
};

/// Junction/bifurcation routing: per destination, the share of its node
/// inflow sent through each out-link.
struct NodeSpec {
  std::string id;
  std::vector<LinkId> in_links;
  std::vector<LinkId> out_links;
  struct Route {
    LinkId destination;
    LinkId out_link;
    Schedule share;
  };
  std::vector<Route> routes;  // optional when there is a single out-link
};

/// Service station reached through an off-ramp and merging back through an
/// on-ramp. Vehicles dwell for a fixed number of steps; the merge-back flow
/// is capacity- and congestion-limited, the admitted flow is space-limited.
struct StationSpec {
  LinkId id;
  LinkId upstream_ramp;    // freeway link whose last section feeds the station
  LinkId downstream_ramp;  // freeway link fed by the station outflow
  std::int64_t dwell_steps = 0;
  double capacity_flow = 1800.0;  // Q_st [veh/h]
  double max_occupancy = 125.0;   // l_max [veh]
  double station_length_km = 0.0;         // optional; used to derive max_occupancy
  double avg_vehicle_length_m = 8.0;      // used with station_length_km
  bool explicit_max_occupancy = false;
  Schedule exit_metering;  // r_st(k), defaults to 1
  std::map<LinkId, double> exit_split;  // composition of merged-back traffic; empty = uniform
  double init_occupancy = 0.0;
  double init_exit_queue = 0.0;
  std::vector<double> init_history;  // oldest first, at most dwell_steps entries
};

/// Immutable network description: typed links, nodes, stations, declared
/// destinations, step length and horizon.
struct NetworkSpec {
  double step_h = 1.6 / 60000.0;
  std::int64_t horizon_steps = 60000;
  std::int64_t output_stride = 50;

  std::vector<FreewayLink> freeways;
  std::vector<QueueLinkSpec> queues;
  std::vector<NodeSpec> nodes;
  std::vector<StationSpec> stations;
  std::vector<LinkId> destination_links;

  std::vector<std::string> default_series;  // quantities emitted by default
  std::map<std::string, FreewayParams> param_sets;  // named sets for serialization
};

struct Violation {
  std::string where;
  std::string what;
};

struct ValidationReport {
  std::vector<Violation> violations;
  std::vector<std::string> warnings;
  bool ok() const { return violations.empty(); }
};

/// Checks every structural and numeric invariant of the spec, including the
/// CFL-style condition step_h * v_free <= section length on every freeway
/// link. Pure: the same spec always yields the same report.
ValidationReport validate(const NetworkSpec& spec);

std::string format_report(const ValidationReport& report);

}  // namespace metanets
