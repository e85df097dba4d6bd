#include "metanets/compiled.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>

namespace metanets {

namespace {

int find_label(const std::vector<std::string>& names, const std::string& name) {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return static_cast<int>(i);
  return -1;
}

}  // namespace

std::vector<double> resolve_composition(const std::map<LinkId, double>& comp,
                                        const std::vector<LinkId>& dests) {
  std::vector<double> out(dests.size(), 0.0);
  if (comp.empty()) {
    const double u = dests.empty() ? 0.0 : 1.0 / static_cast<double>(dests.size());
    std::fill(out.begin(), out.end(), u);
    return out;
  }
  for (std::size_t j = 0; j < dests.size(); ++j) {
    auto it = comp.find(dests[j]);
    out[j] = it == comp.end() ? 0.0 : it->second;
  }
  return out;
}

int CompiledNetwork::freeway_index(const LinkId& id) const {
  for (std::size_t i = 0; i < freeways.size(); ++i)
    if (spec.freeways[freeways[i].spec_index].id == id) return static_cast<int>(i);
  return -1;
}

int CompiledNetwork::queue_index(const LinkId& id) const {
  for (std::size_t i = 0; i < queues.size(); ++i)
    if (spec.queues[queues[i].spec_index].id == id) return static_cast<int>(i);
  return -1;
}

int CompiledNetwork::station_index(const LinkId& id) const {
  for (std::size_t i = 0; i < stations.size(); ++i)
    if (spec.stations[stations[i].spec_index].id == id) return static_cast<int>(i);
  return -1;
}

int CompiledNetwork::dest_label(const std::string& name) const {
  return find_label(dest_names, name);
}

CompiledNetwork compile(const NetworkSpec& spec) {
  const ValidationReport report = validate(spec);
  if (!report.ok())
    throw std::runtime_error("scenario does not validate:\n" + format_report(report));

  CompiledNetwork net;
  net.spec = spec;
  net.step_h = spec.step_h;
  net.horizon_steps = spec.horizon_steps;

  // Global destination labels in declaration order: destination links first,
  // then stations.
  for (const auto& d : spec.destination_links) {
    net.dest_names.push_back(d);
    net.dest_is_station.push_back(false);
  }
  for (const auto& st : spec.stations) {
    net.dest_names.push_back(st.id);
    net.dest_is_station.push_back(true);
  }

  // Freeway links and the flat section layout.
  for (std::size_t i = 0; i < spec.freeways.size(); ++i) {
    const auto& f = spec.freeways[i];
    CompiledFreeway cf;
    cf.spec_index = static_cast<int>(i);
    cf.first_section = net.n_sections;
    cf.n_sections = f.n_sections;
    cf.last_section = cf.first_section + f.n_sections - 1;
    cf.n_dest = static_cast<int>(f.destinations.size());
    cf.partial_offset = net.n_partial;
    cf.dest_offset = net.n_link_dest;
    for (const auto& d : f.destinations) cf.dest_global.push_back(net.dest_label(d));
    cf.length_km = f.length_km;
    cf.lanes = f.lanes;
    cf.params = f.params;
    net.n_sections += f.n_sections;
    net.n_partial += f.n_sections * cf.n_dest;
    net.n_link_dest += cf.n_dest;
    net.freeways.push_back(std::move(cf));
  }
  net.sec_link.resize(net.n_sections);
  net.sec_partial_offset.resize(net.n_sections);
  for (std::size_t m = 0; m < net.freeways.size(); ++m) {
    const auto& cf = net.freeways[m];
    for (int i = 0; i < cf.n_sections; ++i) {
      net.sec_link[cf.first_section + i] = static_cast<std::int32_t>(m);
      net.sec_partial_offset[cf.first_section + i] =
          static_cast<std::int32_t>(cf.partial_offset + i * cf.n_dest);
    }
  }

  // Queue links.
  for (std::size_t i = 0; i < spec.queues.size(); ++i) {
    const auto& q = spec.queues[i];
    CompiledQueue cq;
    cq.spec_index = static_cast<int>(i);
    cq.kind = q.kind;
    cq.max_flow = q.max_flow;
    cq.n_dest = static_cast<int>(q.destinations.size());
    cq.dest_offset = net.n_link_dest;
    net.n_link_dest += cq.n_dest;
    for (const auto& d : q.destinations) cq.dest_global.push_back(net.dest_label(d));
    cq.inflow_comp = resolve_composition(q.composition, q.destinations);
    cq.metering = q.metering;
    cq.demand = q.demand;
    cq.demand_scale = q.demand_scale;
    cq.init_queue = q.init_queue;
    net.queues.push_back(std::move(cq));
  }

  // Stations and their ramp wiring.
  for (std::size_t i = 0; i < spec.stations.size(); ++i) {
    const auto& st = spec.stations[i];
    CompiledStation cs;
    cs.spec_index = static_cast<int>(i);
    cs.dwell_steps = st.dwell_steps;
    cs.capacity_flow = st.capacity_flow;
    cs.max_occupancy = st.max_occupancy;
    cs.exit_metering = st.exit_metering;
    cs.ramp_in = net.freeway_index(st.upstream_ramp);
    cs.ramp_out = net.freeway_index(st.downstream_ramp);
    const auto& down = spec.freeways[net.freeways[cs.ramp_out].spec_index];
    cs.exit_comp = resolve_composition(st.exit_split, down.destinations);
    cs.init_occupancy = st.init_occupancy;
    cs.init_exit_queue = st.init_exit_queue;
    cs.init_history = st.init_history;
    net.freeways[cs.ramp_in].station_out = static_cast<int>(i);
    net.freeways[cs.ramp_out].station_in = static_cast<int>(i);
    net.stations.push_back(std::move(cs));
  }

  // Nodes: map link-local destination slots onto node-local slots and build
  // the dense splitting-rate table.
  for (std::size_t ni = 0; ni < spec.nodes.size(); ++ni) {
    const auto& n = spec.nodes[ni];
    CompiledNode cn;
    cn.spec_index = static_cast<int>(ni);

    std::vector<int> node_dests;  // global ids, in global order
    auto add_dest = [&](int g) {
      if (std::find(node_dests.begin(), node_dests.end(), g) == node_dests.end())
        node_dests.push_back(g);
    };
    for (const auto& in : n.in_links) {
      int fw = net.freeway_index(in);
      if (fw >= 0)
        for (int g : net.freeways[fw].dest_global) add_dest(g);
      int qu = net.queue_index(in);
      if (qu >= 0)
        for (int g : net.queues[qu].dest_global) add_dest(g);
    }
    std::sort(node_dests.begin(), node_dests.end());
    cn.dest_global = node_dests;
    const int n_dest = static_cast<int>(node_dests.size());
    auto node_slot = [&](int g) {
      for (int s = 0; s < n_dest; ++s)
        if (node_dests[s] == g) return s;
      return -1;
    };

    for (const auto& in : n.in_links) {
      CompiledNode::In cin;
      int fw = net.freeway_index(in);
      if (fw >= 0) {
        cin.is_queue = false;
        cin.index = fw;
        for (int g : net.freeways[fw].dest_global) cin.dest_map.push_back(node_slot(g));
        net.freeways[fw].down_node = static_cast<int>(ni);
      } else {
        int qu = net.queue_index(in);
        cin.is_queue = true;
        cin.index = qu;
        for (int g : net.queues[qu].dest_global) cin.dest_map.push_back(node_slot(g));
      }
      cn.ins.push_back(std::move(cin));
    }

    for (const auto& out : n.out_links) {
      CompiledNode::Out cout_ref;
      int fw = net.freeway_index(out);
      int qu = fw >= 0 ? -1 : net.queue_index(out);
      if (fw >= 0) {
        cout_ref.kind = CompiledNode::OutKind::freeway;
        cout_ref.index = fw;
        net.freeways[fw].up_node = static_cast<int>(ni);
        cout_ref.dest_map.assign(n_dest, -1);
        const auto& dg = net.freeways[fw].dest_global;
        for (std::size_t j = 0; j < dg.size(); ++j) {
          int s = node_slot(dg[j]);
          if (s >= 0) cout_ref.dest_map[s] = static_cast<int>(j);
        }
      } else if (qu >= 0) {
        cout_ref.kind = CompiledNode::OutKind::queue;
        cout_ref.index = qu;
        net.queues[qu].up_node = static_cast<int>(ni);
        cout_ref.dest_map.assign(n_dest, -1);
        const auto& dg = net.queues[qu].dest_global;
        for (std::size_t j = 0; j < dg.size(); ++j) {
          int s = node_slot(dg[j]);
          if (s >= 0) cout_ref.dest_map[s] = static_cast<int>(j);
        }
      } else {
        cout_ref.kind = CompiledNode::OutKind::destination;
        cout_ref.index = net.dest_label(out);
        cout_ref.dest_map.assign(n_dest, -1);
      }
      cn.outs.push_back(std::move(cout_ref));
    }

    const int n_out = static_cast<int>(n.out_links.size());
    cn.beta.assign(static_cast<std::size_t>(n_dest) * n_out, Schedule());
    if (n_out == 1 && n.routes.empty()) {
      for (int s = 0; s < n_dest; ++s) cn.beta[s * n_out] = Schedule::constant(1.0);
    } else {
      for (int s = 0; s < n_dest; ++s)
        for (int d = 0; d < n_out; ++d) cn.beta[s * n_out + d] = Schedule::constant(0.0);
      for (const auto& r : n.routes) {
        const int s = node_slot(net.dest_label(r.destination));
        int d = -1;
        for (int o = 0; o < n_out; ++o)
          if (n.out_links[o] == r.out_link) d = o;
        if (s >= 0 && d >= 0) cn.beta[s * n_out + d] = r.share;
      }
    }
    net.nodes.push_back(std::move(cn));
  }

  // Resolve the permit target of each queue link: the freeway link fed by its
  // node, looked up through the unique out-link. Non-freeway targets leave
  // the outflow uncapped beyond the queue capacity.
  for (auto& cq : net.queues) {
    const auto& id = spec.queues[cq.spec_index].id;
    for (const auto& n : spec.nodes) {
      bool drains = false;
      for (const auto& in : n.in_links) drains |= (in == id);
      if (!drains) continue;
      if (n.out_links.size() == 1) {
        cq.downstream_fw = net.freeway_index(n.out_links[0]);
      } else {
        // Multiple out-links: gate on the densest routed freeway at runtime
        // would be ambiguous; use the first routed freeway out-link.
        for (const auto& out : n.out_links) {
          int fw = net.freeway_index(out);
          if (fw >= 0) {
            cq.downstream_fw = fw;
            break;
          }
        }
      }
    }
  }

  // Node evaluation order (queue-link chains resolved first-ready-first).
  std::vector<bool> link_known_fw(net.freeways.size(), true);
  std::vector<bool> link_known_qu(net.queues.size(), false);
  for (std::size_t i = 0; i < net.queues.size(); ++i)
    if (net.queues[i].kind == QueueKind::origin || net.queues[i].up_node < 0)
      link_known_qu[i] = true;
  std::vector<bool> done(net.nodes.size(), false);
  for (;;) {
    bool progress = false;
    for (std::size_t ni = 0; ni < net.nodes.size(); ++ni) {
      if (done[ni]) continue;
      bool ready = true;
      for (const auto& in : net.nodes[ni].ins)
        ready &= in.is_queue ? link_known_qu[in.index] : link_known_fw[in.index];
      if (!ready) continue;
      for (const auto& out : net.nodes[ni].outs)
        if (out.kind == CompiledNode::OutKind::queue) link_known_qu[out.index] = true;
      net.node_order.push_back(static_cast<int>(ni));
      done[ni] = true;
      progress = true;
    }
    if (!progress) break;
  }
  if (net.node_order.size() != net.nodes.size())
    throw std::runtime_error("unresolvable store-and-forward chain");  // caught by validate already

  return net;
}

}  // namespace metanets
