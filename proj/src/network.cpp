#include "metanets/network.hpp"

#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace metanets {

namespace {

constexpr double kSumTol = 1e-9;

struct Checker {
  const NetworkSpec& spec;
  ValidationReport report;

  std::unordered_map<std::string, char> entity_kind;  // id -> f/q/s/d
  std::unordered_set<std::string> dest_labels;        // destination links and stations

  void fail(const std::string& where, const std::string& what) {
    report.violations.push_back({where, what});
  }
  void warn(const std::string& msg) { report.warnings.push_back(msg); }

  void register_ids() {
    auto add = [&](const std::string& id, char kind, const char* what) {
      if (id.empty()) {
        fail(std::string(what), "entity with empty id");
        return;
      }
      if (!entity_kind.emplace(id, kind).second)
        fail(id, "duplicate entity id");
    };
    for (const auto& f : spec.freeways) add(f.id, 'f', "freeway");
    for (const auto& q : spec.queues) add(q.id, 'q', "queue link");
    for (const auto& s : spec.stations) add(s.id, 's', "station");
    for (const auto& d : spec.destination_links) add(d, 'd', "destination");
    for (const auto& d : spec.destination_links) dest_labels.insert(d);
    for (const auto& s : spec.stations) dest_labels.insert(s.id);
  }

  void check_params(const std::string& where, const FreewayParams& p) {
    if (!(p.rho_crit > 0.0 && p.rho_crit < p.rho_jam))
      fail(where, "critical density must satisfy 0 < rho_crit < rho_jam");
    if (!(p.v_free > 0.0)) fail(where, "free-flow speed must be positive");
    if (!(p.exponent > 0.0)) fail(where, "speed exponent must be positive");
    if (!(p.tau > 0.0)) fail(where, "relaxation time must be positive");
    if (!(p.stability > 0.0)) fail(where, "stability constant must be positive");
    if (!(p.anticipation > 0.0)) fail(where, "anticipation constant must be positive");
    if (!(p.v_min >= 0.0 && p.v_min < p.v_free))
      fail(where, "speed floor must satisfy 0 <= v_min < v_free");
  }

  void check_destinations(const std::string& where, const std::vector<LinkId>& dests) {
    if (dests.empty()) fail(where, "destination set must be non-empty");
    std::set<LinkId> seen;
    for (const auto& d : dests) {
      if (!seen.insert(d).second) fail(where, "duplicate destination label '" + d + "'");
      if (!dest_labels.count(d))
        fail(where, "destination '" + d + "' is not a declared destination link or station");
    }
  }

  void check_composition(const std::string& where, const std::map<LinkId, double>& comp,
                         const std::vector<LinkId>& dests) {
    if (comp.empty()) return;  // uniform default
    double sum = 0.0;
    for (const auto& [label, frac] : comp) {
      bool known = false;
      for (const auto& d : dests) known |= (d == label);
      if (!known) fail(where, "composition names unknown destination '" + label + "'");
      if (frac < 0.0) fail(where, "composition fractions must be non-negative");
      sum += frac;
    }
    if (std::abs(sum - 1.0) > kSumTol) fail(where, "composition fractions must sum to 1");
  }

  void check_schedule_unit(const std::string& where, const Schedule& s, const char* what) {
    for (const auto& [k, v] : s.points()) {
      (void)k;
      if (v < 0.0 || v > 1.0) {
        fail(where, std::string(what) + " must stay within [0, 1]");
        return;
      }
    }
  }

  void check_freeways() {
    for (const auto& f : spec.freeways) {
      check_params(f.id, f.params);
      if (f.n_sections < 1) fail(f.id, "needs at least one section");
      if (!(f.length_km > 0.0)) fail(f.id, "section length must be positive");
      if (f.lanes < 1) fail(f.id, "needs at least one lane");
      check_destinations(f.id, f.destinations);
      if (spec.step_h * f.params.v_free > f.length_km) {
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "CFL violation: step_h * v_free = %g km exceeds section length %g km",
                      spec.step_h * f.params.v_free, f.length_km);
        fail(f.id, buf);
      }
      if (!f.init_density.empty() && f.init_density.size() != 1 &&
          f.init_density.size() != static_cast<std::size_t>(f.n_sections))
        fail(f.id, "init_density needs one value or one per section");
      for (double r : f.init_density)
        if (r < 0.0) fail(f.id, "initial density must be non-negative");
      if (!f.init_speed.empty() && f.init_speed.size() != 1 &&
          f.init_speed.size() != static_cast<std::size_t>(f.n_sections))
        fail(f.id, "init_speed needs one value or one per section");
      for (double v : f.init_speed)
        if (v < 0.0) fail(f.id, "initial speed must be non-negative");
      check_composition(f.id, f.init_composition, f.destinations);
    }
  }

  void check_queues() {
    for (const auto& q : spec.queues) {
      if (!(q.max_flow > 0.0)) fail(q.id, "queue capacity must be positive");
      check_destinations(q.id, q.destinations);
      check_composition(q.id, q.composition, q.destinations);
      check_schedule_unit(q.id, q.metering, "metering rate");
      if (q.init_queue < 0.0) fail(q.id, "initial queue must be non-negative");
      if (q.kind == QueueKind::origin) {
        if (q.demand.kind == DemandProfile::Kind::constant && q.demand.value < 0.0)
          fail(q.id, "demand must be non-negative");
        if (q.demand_scale < 0.0) fail(q.id, "demand scale must be non-negative");
      }
    }
  }

  void check_stations() {
    for (const auto& st : spec.stations) {
      if (st.dwell_steps < 0) fail(st.id, "dwell must be non-negative");
      if (!(st.capacity_flow > 0.0)) fail(st.id, "station capacity flow must be positive");
      if (!(st.max_occupancy > 0.0)) fail(st.id, "station maximum occupancy must be positive");
      check_schedule_unit(st.id, st.exit_metering, "exit metering rate");
      auto ramp_ok = [&](const LinkId& ramp, const char* role) {
        auto it = entity_kind.find(ramp);
        if (it == entity_kind.end() || it->second != 'f') {
          fail(st.id, std::string(role) + " '" + ramp + "' must be a freeway link");
          return false;
        }
        return true;
      };
      const bool in_ok = ramp_ok(st.upstream_ramp, "upstream ramp");
      ramp_ok(st.downstream_ramp, "downstream ramp");
      if (in_ok) {
        for (const auto& f : spec.freeways)
          if (f.id == st.upstream_ramp &&
              (f.destinations.size() != 1 || f.destinations[0] != st.id))
            fail(st.id, "upstream ramp '" + st.upstream_ramp +
                            "' must have exactly the station as destination");
      }
      if (st.init_occupancy < 0.0 || st.init_exit_queue < 0.0 ||
          st.init_exit_queue > st.init_occupancy || st.init_occupancy > st.max_occupancy)
        fail(st.id, "initial state must satisfy 0 <= exit queue <= occupancy <= max occupancy");
      if (st.init_history.size() > static_cast<std::size_t>(st.dwell_steps))
        fail(st.id, "initial history longer than the dwell");
      double history_mass = 0.0;
      for (double q : st.init_history) {
        if (q < 0.0) fail(st.id, "initial history flows must be non-negative");
        history_mass += spec.step_h * q;
      }
      if (st.init_occupancy + kSumTol < st.init_exit_queue + history_mass)
        fail(st.id, "initial occupancy must cover the exit queue plus the dwelling history mass");
      if (!st.exit_split.empty()) {
        const FreewayLink* down = nullptr;
        for (const auto& f : spec.freeways)
          if (f.id == st.downstream_ramp) down = &f;
        if (down) check_composition(st.id, st.exit_split, down->destinations);
      }
    }
  }

  const std::vector<LinkId>* destinations_of(const LinkId& id) const {
    for (const auto& f : spec.freeways)
      if (f.id == id) return &f.destinations;
    for (const auto& q : spec.queues)
      if (q.id == id) return &q.destinations;
    return nullptr;
  }

  void check_nodes() {
    std::unordered_set<std::string> node_ids;
    for (const auto& n : spec.nodes) {
      if (!node_ids.insert(n.id).second) fail(n.id, "duplicate node id");
      if (n.in_links.empty() || n.out_links.empty()) {
        fail(n.id, "node needs at least one in-link and one out-link");
        continue;
      }
      bool links_ok = true;
      for (const auto& in : n.in_links) {
        auto it = entity_kind.find(in);
        if (it == entity_kind.end() || (it->second != 'f' && it->second != 'q')) {
          fail(n.id, "in-link '" + in + "' must be a freeway or queue link");
          links_ok = false;
        }
      }
      for (const auto& out : n.out_links) {
        auto it = entity_kind.find(out);
        if (it == entity_kind.end() || it->second == 's') {
          fail(n.id, "out-link '" + out + "' must be a freeway, queue or destination link");
          links_ok = false;
        } else if (it->second == 'q') {
          for (const auto& q : spec.queues)
            if (q.id == out && q.kind == QueueKind::origin)
              fail(n.id, "origin link '" + out + "' cannot be a node out-link");
        }
      }
      if (!links_ok) continue;

      // Destinations present at the node: union over in-links.
      std::set<LinkId> node_dests;
      for (const auto& in : n.in_links)
        if (const auto* d = destinations_of(in)) node_dests.insert(d->begin(), d->end());

      // Routing rows must sum to 1 per destination at every breakpoint, and
      // may only send a destination into an out-link that can carry it.
      for (const auto& r : n.routes) {
        if (!node_dests.count(r.destination))
          fail(n.id, "route for destination '" + r.destination + "' not present at this node");
        bool out_known = false;
        for (const auto& o : n.out_links) out_known |= (o == r.out_link);
        if (!out_known) fail(n.id, "route targets unknown out-link '" + r.out_link + "'");
        for (const auto& [k, v] : r.share.points()) {
          (void)k;
          if (v < 0.0) fail(n.id, "splitting rates must be non-negative");
        }
        if (out_known) {
          auto it = entity_kind.find(r.out_link);
          if (it->second == 'd' && r.out_link != r.destination)
            fail(n.id, "destination '" + r.destination + "' routed into destination link '" +
                           r.out_link + "'");
          if (it->second == 'f' || it->second == 'q') {
            const auto* jd = destinations_of(r.out_link);
            bool carry = false;
            if (jd)
              for (const auto& d : *jd) carry |= (d == r.destination);
            if (!carry)
              fail(n.id, "out-link '" + r.out_link + "' cannot carry destination '" +
                             r.destination + "'");
          }
        }
      }
      for (const auto& j : node_dests) {
        std::vector<const NodeSpec::Route*> rows;
        for (const auto& r : n.routes)
          if (r.destination == j) rows.push_back(&r);
        if (rows.empty()) {
          if (n.out_links.size() == 1) continue;  // implicit beta = 1
          fail(n.id, "no route given for destination '" + j + "'");
          continue;
        }
        std::set<std::int64_t> breakpoints{0};
        for (const auto* r : rows)
          for (const auto& [k, v] : r->share.points()) {
            (void)v;
            breakpoints.insert(k);
          }
        for (std::int64_t k : breakpoints) {
          double sum = 0.0;
          for (const auto* r : rows) sum += r->share.at(k);
          if (std::abs(sum - 1.0) > kSumTol) {
            char buf[128];
            std::snprintf(buf, sizeof buf,
                          "splitting rates for destination '%s' must sum to 1 (got %g at step %lld)",
                          j.c_str(), sum, static_cast<long long>(k));
            fail(n.id, buf);
            break;
          }
        }
      }
    }
  }

  void check_topology() {
    if (!(spec.step_h > 0.0)) fail("sim", "step length must be positive");
    if (spec.horizon_steps < 0) fail("sim", "horizon must be non-negative");
    if (spec.output_stride < 1) fail("sim", "output stride must be at least 1");

    // Each link may be fed and drained at most once; station ramps are wired
    // to their station, not to nodes.
    std::unordered_map<std::string, int> fed, drained;
    for (const auto& n : spec.nodes) {
      for (const auto& in : n.in_links) drained[in]++;
      for (const auto& out : n.out_links) fed[out]++;
    }
    for (const auto& st : spec.stations) {
      drained[st.upstream_ramp]++;
      fed[st.downstream_ramp]++;
    }
    for (const auto& [id, count] : fed)
      if (count > 1) fail(id, "link is fed by more than one node or station");
    for (const auto& [id, count] : drained)
      if (count > 1) fail(id, "link is drained by more than one node or station");
    // Every discharge must land somewhere, or vehicles would vanish
    // unaccounted.
    for (const auto& f : spec.freeways)
      if (drained[f.id] == 0) fail(f.id, "outflow is not consumed by any node or station");
    for (const auto& q : spec.queues)
      if (drained[q.id] == 0) fail(q.id, "outflow is not consumed by any node");

    // A queue link's capacity is gated by the first section of the link it
    // feeds; chains of queue links must be resolvable in one pass.
    std::unordered_set<std::string> known;  // links with step-k exit flow
    for (const auto& f : spec.freeways) known.insert(f.id);
    for (const auto& q : spec.queues)
      if (q.kind == QueueKind::origin || fed[q.id] == 0) known.insert(q.id);
    std::vector<const NodeSpec*> pending;
    for (const auto& n : spec.nodes) pending.push_back(&n);
    bool progress = true;
    while (progress && !pending.empty()) {
      progress = false;
      for (auto it = pending.begin(); it != pending.end();) {
        bool ready = true;
        for (const auto& in : (*it)->in_links) ready &= known.count(in) > 0;
        if (ready) {
          for (const auto& out : (*it)->out_links) known.insert(out);
          it = pending.erase(it);
          progress = true;
        } else {
          ++it;
        }
      }
    }
    if (!pending.empty())
      fail(pending.front()->id, "unresolvable chain of store-and-forward links through nodes");
  }

  ValidationReport run() {
    register_ids();
    check_freeways();
    check_queues();
    check_stations();
    check_nodes();
    check_topology();
    return std::move(report);
  }
};

}  // namespace

ValidationReport validate(const NetworkSpec& spec) {
  Checker checker{spec};
  return checker.run();
}

std::string format_report(const ValidationReport& report) {
  std::ostringstream os;
  for (const auto& v : report.violations) os << "error: " << v.where << ": " << v.what << "\n";
  for (const auto& w : report.warnings) os << "warning: " << w << "\n";
  if (report.ok() && report.warnings.empty()) os << "ok\n";
  return os.str();
}

}  // namespace metanets
