#pragma once

// Shared helpers for the test suites: deterministic random numbers and a
// random-but-valid scenario generator (chain topologies with optional
// store-and-forward links and a service-station detour).

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "metanets/freeway.hpp"
#include "metanets/network.hpp"

namespace metanets::testing {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : rng_(seed) {}
  double u01() { return (rng_() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * u01(); }
  int range(int a, int b) {  // inclusive
    return a + static_cast<int>(u01() * (b - a + 1)) % (b - a + 1);
  }
  bool chance(double p) { return u01() < p; }

 private:
  std::mt19937_64 rng_;
};

inline NetworkSpec random_scenario(std::uint64_t seed, std::int64_t horizon = 10000,
                                   bool allow_station = true) {
  Rng rng(seed);
  NetworkSpec spec;

  FreewayParams p;
  p.v_free = rng.uniform(80.0, 120.0);
  p.rho_crit = rng.uniform(15.0, 25.0);
  p.rho_jam = p.rho_crit + rng.uniform(8.0, 20.0);
  p.exponent = rng.uniform(1.5, 4.0);
  p.tau = rng.uniform(0.003, 0.01);
  p.anticipation = rng.uniform(30.0, 90.0);
  p.stability = rng.uniform(10.0, 60.0);
  p.v_min = rng.uniform(4.0, 9.0);
  spec.param_sets["main"] = p;

  const bool with_station = allow_station && rng.chance(0.5);
  const int n_main = with_station ? rng.range(3, 6) : rng.range(1, 6);
  const bool with_saf = rng.chance(0.3);
  const double length = rng.uniform(0.2, 0.6);
  const int lanes = rng.range(1, 4);
  const int sections = rng.range(1, 4);

  const double wave_speed = p.v_free * p.rho_crit / (p.rho_jam - p.rho_crit);
  spec.step_h = 0.5 * length / std::max(p.v_free, wave_speed);
  spec.horizon_steps = horizon;
  spec.output_stride = 100;

  const std::string dest = "d";
  spec.destination_links.push_back(dest);

  std::vector<LinkId> main_dests;
  const double station_share = rng.uniform(0.1, 0.5);
  if (with_station)
    main_dests = {"st", dest};
  else
    main_dests = {dest};

  const int diverge_after = with_station ? rng.range(1, n_main - 2) : 0;

  auto add_freeway = [&](const std::string& id, const std::vector<LinkId>& dests) {
    FreewayLink f;
    f.id = id;
    f.n_sections = sections;
    f.length_km = length;
    f.lanes = lanes;
    f.params = p;
    f.params_ref = "main";
    f.destinations = dests;
    f.init_density = {rng.uniform(0.5, 5.0)};
    if (dests.size() == 2)
      f.init_composition = {{dests[0], station_share}, {dests[1], 1.0 - station_share}};
    spec.freeways.push_back(f);
  };

  for (int i = 1; i <= n_main; ++i)
    add_freeway("f" + std::to_string(i),
                (with_station && i > diverge_after) ? std::vector<LinkId>{dest} : main_dests);

  const double capacity =
      lanes * p.rho_crit * desired_speed(p.rho_crit, p);  // peak of the flow curve

  QueueLinkSpec o;
  o.id = "o";
  o.kind = QueueKind::origin;
  o.max_flow = rng.uniform(0.5, 1.5) * capacity;
  o.destinations = main_dests;
  if (main_dests.size() == 2)
    o.composition = {{main_dests[0], station_share}, {main_dests[1], 1.0 - station_share}};
  if (rng.chance(0.5)) {
    o.demand.kind = DemandProfile::Kind::constant;
    o.demand.value = rng.uniform(100.0, 0.5 * std::min(capacity, o.max_flow));
  } else {
    o.demand.kind = DemandProfile::Kind::peak;
    o.demand.floor_veh_h = rng.uniform(50.0, 200.0);
    o.demand.peak_veh_h = rng.uniform(300.0, 0.5 * std::min(capacity, o.max_flow));
    o.demand.center_step = horizon / 2;
    o.demand.slope_den = horizon / (4.0 * std::max(o.demand.peak_veh_h, 1.0));
  }
  if (rng.chance(0.2))
    o.metering = Schedule::piecewise({{0, 1.0}, {horizon / 3, rng.uniform(0.4, 1.0)}});
  spec.queues.push_back(o);

  spec.nodes.push_back({"n_in", {"o"}, {"f1"}, {}});

  int node_id = 0;
  auto node_name = [&] { return "n" + std::to_string(node_id++); };

  // saf insertion point (never at the station diverge or merge)
  int saf_after = 0;
  if (with_saf && n_main >= 2) {
    saf_after = rng.range(1, n_main - 1);
    if (with_station && (saf_after == diverge_after || saf_after == diverge_after + 1))
      saf_after = 0;
  }

  for (int i = 1; i < n_main; ++i) {
    const std::string up = "f" + std::to_string(i);
    const std::string down = "f" + std::to_string(i + 1);
    if (with_station && i == diverge_after) {
      NodeSpec n;
      n.id = node_name();
      n.in_links = {up};
      n.out_links = {down, "s1"};
      n.routes = {{"st", "s1", Schedule::constant(1.0)},
                  {dest, down, Schedule::constant(1.0)}};
      spec.nodes.push_back(n);
      continue;
    }
    if (saf_after == i) {
      QueueLinkSpec s;
      s.id = "buf";
      s.kind = QueueKind::saf;
      s.max_flow = rng.uniform(0.4, 1.2) * capacity;
      s.destinations = (with_station && i <= diverge_after) ? main_dests
                                                            : std::vector<LinkId>{dest};
      spec.queues.push_back(s);
      spec.nodes.push_back({node_name(), {up}, {"buf"}, {}});
      spec.nodes.push_back({node_name(), {"buf"}, {down}, {}});
      continue;
    }
    spec.nodes.push_back({node_name(), {up}, {down}, {}});
  }
  spec.nodes.push_back({node_name(), {"f" + std::to_string(n_main)}, {dest}, {}});

  if (with_station) {
    add_freeway("s1", {"st"});
    add_freeway("s2", {dest});
    StationSpec st;
    st.id = "st";
    st.upstream_ramp = "s1";
    st.downstream_ramp = "s2";
    st.dwell_steps = rng.range(0, 1500);
    st.capacity_flow = rng.uniform(600.0, 2500.0);
    st.max_occupancy = rng.uniform(40.0, 400.0);
    st.explicit_max_occupancy = true;
    if (rng.chance(0.2)) st.exit_metering = Schedule::constant(rng.uniform(0.5, 1.0));
    spec.stations.push_back(st);

    // rewire the merge: the diverge's mainstream successor and s2 join the
    // link after it
    const std::string a = "f" + std::to_string(diverge_after + 1);
    const std::string b = "f" + std::to_string(diverge_after + 2);
    for (auto& n : spec.nodes)
      if (n.in_links.size() == 1 && n.in_links[0] == a && n.out_links.size() == 1 &&
          n.out_links[0] == b) {
        n.in_links = {a, "s2"};
        break;
      }
  }
  return spec;
}

}  // namespace metanets::testing
