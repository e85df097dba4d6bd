#include "metanets/ctm.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "metanets/freeway.hpp"
#include "metanets/node.hpp"
#include "metanets/queue_link.hpp"

namespace metanets {

namespace {

[[noreturn]] void abort_at(const char* what, std::int64_t k) {
  std::ostringstream os;
  os << what << " at step " << k;
  throw std::runtime_error(os.str());
}

constexpr double kNoSupply = 1e30;  // queue links and destinations accept anything

}  // namespace

ValidationReport validate_ctm(const NetworkSpec& spec) {
  ValidationReport report;
  for (const auto& f : spec.freeways) {
    const double w_c = f.params.v_free * f.params.rho_crit / (f.params.rho_jam - f.params.rho_crit);
    if (spec.step_h * std::max(f.params.v_free, w_c) > f.length_km)
      report.violations.push_back(
          {f.id, "first-order CFL violation: step_h * max(v_free, wave speed) exceeds the "
                 "section length"});
  }
  for (const auto& n : spec.nodes)
    if (n.in_links.size() > 1 && n.out_links.size() > 1)
      report.violations.push_back(
          {n.id, "the first-order baseline supports merge or diverge junctions, not both at once"});
  return report;
}

CtmSimulator::CtmSimulator(const CompiledNetwork& net) : net_(net) {
  flows_.section_flow.assign(net_.n_sections, 0.0);
  flows_.link_inflow.assign(net_.freeways.size(), 0.0);
  flows_.queue_in.assign(net_.queues.size(), 0.0);
  flows_.queue_out.assign(net_.queues.size(), 0.0);
  flows_.queue_exit_comp.assign(net_.n_link_dest, 0.0);
  flows_.queue_in_comp.assign(net_.n_link_dest, 0.0);
  flows_.station_in.assign(net_.stations.size(), 0.0);
  flows_.station_out.assign(net_.stations.size(), 0.0);
  flows_.station_qmax.assign(net_.stations.size(), 0.0);
  flows_.dest_in.assign(net_.dest_names.size(), 0.0);
  flows_.origin_demand.assign(net_.queues.size(), 0.0);

  demand_.assign(net_.n_sections, 0.0);
  supply_.assign(net_.n_sections, 0.0);
  link_inflow_comp_.assign(net_.n_link_dest, 0.0);

  std::size_t max_in = 1, max_out = 1, max_dest = 1;
  for (const auto& n : net_.nodes) {
    max_in = std::max(max_in, n.ins.size());
    max_out = std::max(max_out, n.outs.size());
    max_dest = std::max(max_dest, n.dest_global.size());
  }
  node_in_flow_.assign(max_in, 0.0);
  node_in_comp_.assign(max_in * max_dest, 0.0);
  node_dest_flow_.assign(max_dest, 0.0);
  node_beta_.assign(max_dest * max_out, 0.0);
  node_out_flow_.assign(max_out, 0.0);
  node_out_comp_.assign(max_out * max_dest, 0.0);

  reset();
}

void CtmSimulator::reset() {
  state_ = initial_state(net_);
  flows_ready_ = false;
}

double CtmSimulator::stored_vehicles() const {
  double total = 0.0;
  for (const auto& cf : net_.freeways)
    for (int i = 0; i < cf.n_sections; ++i)
      total += state_.fw.rho[cf.first_section + i] * cf.length_km * cf.lanes;
  for (const auto& q : state_.queues) total += q.w;
  for (const auto& st : state_.stations) total += st.occupancy;
  return total;
}

void CtmSimulator::phase_flows() {
  const double T = net_.step_h;
  const std::int64_t k = state_.k;

  for (int i = 0; i < net_.n_sections; ++i) {
    const auto& cf = net_.freeways[net_.sec_link[i]];
    const double rho = state_.fw.rho[i];
    demand_[i] = cell_demand(rho, cf.params, cf.lanes);
    supply_[i] = std::max(cell_supply(rho, cf.params, cf.lanes), 0.0);
    const int off = net_.sec_partial_offset[i];
    compositions_from_partials({&state_.fw.partial[off], static_cast<std::size_t>(cf.n_dest)},
                               rho, {&state_.fw.gamma[off], static_cast<std::size_t>(cf.n_dest)});
  }

  // Interfaces interior to a link.
  for (const auto& cf : net_.freeways)
    for (int i = cf.first_section; i < cf.last_section; ++i)
      flows_.section_flow[i] = std::min(demand_[i], supply_[i + 1]);

  // Stations: space-capped entry, capacity- and supply-capped merge-back.
  for (std::size_t si = 0; si < net_.stations.size(); ++si) {
    const auto& cs = net_.stations[si];
    const StationState& st = state_.stations[si];
    const auto& ramp = net_.freeways[cs.ramp_in];
    const double space_flow = std::max(cs.max_occupancy - st.occupancy, 0.0) / T;
    const double q_in = std::min(demand_[ramp.last_section], space_flow);
    flows_.station_in[si] = q_in;
    flows_.section_flow[ramp.last_section] = q_in;

    const auto& out_ramp = net_.freeways[cs.ramp_out];
    const double q_max = std::min(cs.capacity_flow, supply_[out_ramp.first_section]);
    flows_.station_qmax[si] = q_max;
    flows_.station_out[si] = station_outflow(st.delayed_inflow(q_in), st.exit_queue, T,
                                             q_max, cs.exit_metering.at(k));
  }

  std::fill(flows_.queue_in.begin(), flows_.queue_in.end(), 0.0);
  std::fill(flows_.queue_out.begin(), flows_.queue_out.end(), 0.0);
  std::fill(flows_.queue_in_comp.begin(), flows_.queue_in_comp.end(), 0.0);
  std::fill(flows_.queue_exit_comp.begin(), flows_.queue_exit_comp.end(), 0.0);
  std::fill(flows_.dest_in.begin(), flows_.dest_in.end(), 0.0);
  std::fill(flows_.origin_demand.begin(), flows_.origin_demand.end(), 0.0);
  std::fill(flows_.link_inflow.begin(), flows_.link_inflow.end(), 0.0);
  std::fill(link_inflow_comp_.begin(), link_inflow_comp_.end(), 0.0);

  // Exit demand of a link: what it would discharge if unconstrained downstream.
  auto exit_demand = [&](const CompiledNode::In& in) {
    if (in.is_queue) {
      const auto& cq = net_.queues[in.index];
      const QueueState& qs = state_.queues[in.index];
      double q_in = flows_.queue_in[in.index];
      if (cq.kind == QueueKind::origin) {
        q_in = cq.demand.at(k) * cq.demand_scale;
        flows_.origin_demand[in.index] = q_in;
        flows_.queue_in[in.index] = q_in;
        for (int j = 0; j < cq.n_dest; ++j)
          flows_.queue_in_comp[cq.dest_offset + j] = cq.inflow_comp[static_cast<std::size_t>(j)];
      }
      return queue_outflow(q_in, qs.w, T, cq.max_flow, cq.metering.at(k));
    }
    return demand_[net_.freeways[in.index].last_section];
  };
  auto entry_supply = [&](const CompiledNode::Out& out) {
    if (out.kind == CompiledNode::OutKind::freeway)
      return supply_[net_.freeways[out.index].first_section];
    return kNoSupply;
  };
  auto in_composition = [&](const CompiledNode::In& in, double* comp, int n_dest) {
    std::fill_n(comp, n_dest, 0.0);
    if (in.is_queue) {
      const auto& cq = net_.queues[in.index];
      const QueueState& qs = state_.queues[in.index];
      queue_exit_composition(
          qs.wj, qs.w,
          {&flows_.queue_in_comp[cq.dest_offset], static_cast<std::size_t>(cq.n_dest)},
          {&flows_.queue_exit_comp[cq.dest_offset], static_cast<std::size_t>(cq.n_dest)});
      for (int j = 0; j < cq.n_dest; ++j)
        comp[in.dest_map[j]] = flows_.queue_exit_comp[cq.dest_offset + j];
    } else {
      const auto& cf = net_.freeways[in.index];
      const int off = net_.sec_partial_offset[cf.last_section];
      for (int j = 0; j < cf.n_dest; ++j) comp[in.dest_map[j]] = state_.fw.gamma[off + j];
    }
  };

  for (int ni : net_.node_order) {
    const auto& n = net_.nodes[ni];
    const int n_in = static_cast<int>(n.ins.size());
    const int n_out = static_cast<int>(n.outs.size());
    const int n_dest = static_cast<int>(n.dest_global.size());

    for (int s = 0; s < n_dest; ++s)
      for (int d = 0; d < n_out; ++d)
        node_beta_[static_cast<std::size_t>(s) * n_out + d] = n.beta[s * n_out + d].at(k);

    if (n_in == 1) {
      // Diverge (or plain connection): shares follow the exit composition and
      // the splitting rates; the tightest downstream supply sets the flow.
      in_composition(n.ins[0], node_in_comp_.data(), n_dest);
      const double D = exit_demand(n.ins[0]);
      double q = D;
      for (int d = 0; d < n_out; ++d) {
        double share = 0.0;
        for (int s = 0; s < n_dest; ++s)
          share += node_in_comp_[s] * node_beta_[static_cast<std::size_t>(s) * n_out + d];
        if (share > kEpsFlow) q = std::min(q, entry_supply(n.outs[d]) / share);
      }
      node_in_flow_[0] = q;
    } else {
      // Merge: demands are rationed proportionally to the single out-link's
      // supply.
      double total = 0.0;
      for (int m = 0; m < n_in; ++m) {
        node_in_flow_[m] = exit_demand(n.ins[m]);
        in_composition(n.ins[m], &node_in_comp_[static_cast<std::size_t>(m) * n_dest], n_dest);
        total += node_in_flow_[m];
      }
      const double s_out = entry_supply(n.outs[0]);
      if (total > s_out && total > kEpsFlow) {
        const double ratio = s_out / total;
        for (int m = 0; m < n_in; ++m) node_in_flow_[m] *= ratio;
      }
    }

    // Book the realized discharges on the in-links.
    for (int m = 0; m < n_in; ++m) {
      const auto& in = n.ins[m];
      if (in.is_queue)
        flows_.queue_out[in.index] = node_in_flow_[m];
      else
        flows_.section_flow[net_.freeways[in.index].last_section] = node_in_flow_[m];
    }

    gather({node_in_flow_.data(), static_cast<std::size_t>(n_in)},
           {node_in_comp_.data(), static_cast<std::size_t>(n_in) * n_dest}, n_dest,
           {node_dest_flow_.data(), static_cast<std::size_t>(n_dest)});
    scatter({node_dest_flow_.data(), static_cast<std::size_t>(n_dest)},
            {node_beta_.data(), static_cast<std::size_t>(n_dest) * n_out}, n_dest, n_out,
            {node_out_flow_.data(), static_cast<std::size_t>(n_out)},
            {node_out_comp_.data(), static_cast<std::size_t>(n_out) * n_dest});

    for (int d = 0; d < n_out; ++d) {
      const auto& out = n.outs[d];
      const double q = node_out_flow_[d];
      const double* comp = &node_out_comp_[static_cast<std::size_t>(d) * n_dest];
      switch (out.kind) {
        case CompiledNode::OutKind::freeway: {
          const auto& cf = net_.freeways[out.index];
          flows_.link_inflow[out.index] = q;
          for (int s = 0; s < n_dest; ++s)
            if (out.dest_map[s] >= 0)
              link_inflow_comp_[cf.dest_offset + out.dest_map[s]] = comp[s];
          break;
        }
        case CompiledNode::OutKind::queue: {
          const auto& cq = net_.queues[out.index];
          flows_.queue_in[out.index] = q;
          for (int s = 0; s < n_dest; ++s)
            if (out.dest_map[s] >= 0)
              flows_.queue_in_comp[cq.dest_offset + out.dest_map[s]] = comp[s];
          break;
        }
        case CompiledNode::OutKind::destination:
          flows_.dest_in[out.index] += q;
          break;
      }
    }
  }

  // Dangling queues (fed by no node) still discharge nothing; queues whose
  // outflow feeds no node are rejected by validation.
  for (std::size_t qi = 0; qi < net_.queues.size(); ++qi) {
    const auto& cq = net_.queues[qi];
    if (cq.kind == QueueKind::saf && cq.up_node < 0) {
      const QueueState& qs = state_.queues[qi];
      queue_exit_composition(
          qs.wj, qs.w,
          {&flows_.queue_in_comp[cq.dest_offset], static_cast<std::size_t>(cq.n_dest)},
          {&flows_.queue_exit_comp[cq.dest_offset], static_cast<std::size_t>(cq.n_dest)});
    }
  }

  for (std::size_t si = 0; si < net_.stations.size(); ++si) {
    const auto& cs = net_.stations[si];
    const auto& out_ramp = net_.freeways[cs.ramp_out];
    flows_.link_inflow[cs.ramp_out] = flows_.station_out[si];
    for (int j = 0; j < out_ramp.n_dest; ++j)
      link_inflow_comp_[out_ramp.dest_offset + j] = cs.exit_comp[static_cast<std::size_t>(j)];
  }

  // Last cells feeding a destination without a node shortfall are covered by
  // validation; destination-bound node flows were booked above.
}

void CtmSimulator::phase_update() {
  const double T = net_.step_h;

  for (const auto& cf : net_.freeways) {
    for (int i = cf.first_section; i <= cf.last_section; ++i) {
      const bool first = i == cf.first_section;
      const double q_in = first ? flows_.link_inflow[net_.sec_link[i]]
                                : flows_.section_flow[i - 1];
      const double q_out = flows_.section_flow[i];
      const int off = net_.sec_partial_offset[i];
      const double* gin =
          first ? &link_inflow_comp_[cf.dest_offset] : &state_.fw.gamma[off - cf.n_dest];
      // Two-pass update: partials from step-k gamma, then the density.
      for (int j = 0; j < cf.n_dest; ++j)
        state_.fw.partial[off + j] = step_partial_density(
            state_.fw.partial[off + j], gin[j], q_in, state_.fw.gamma[off + j], q_out,
            cf.length_km, cf.lanes, T);
      const double rho =
          state_.fw.rho[i] + T / (cf.length_km * cf.lanes) * (q_in - q_out);
      state_.fw.rho[i] = std::clamp(rho, 0.0, cf.params.rho_jam);
      if (!std::isfinite(rho)) abort_at("non-finite cell state", state_.k);
    }
  }

  for (std::size_t qi = 0; qi < net_.queues.size(); ++qi) {
    const auto& cq = net_.queues[qi];
    QueueState& qs = state_.queues[qi];
    const double q_in = flows_.queue_in[qi];
    const double q_out = flows_.queue_out[qi];
    for (int j = 0; j < cq.n_dest; ++j)
      qs.wj[static_cast<std::size_t>(j)] = step_partial_queue(
          qs.wj[static_cast<std::size_t>(j)], flows_.queue_in_comp[cq.dest_offset + j], q_in,
          flows_.queue_exit_comp[cq.dest_offset + j], q_out, T);
    qs.w = std::max(step_queue(qs.w, q_in, q_out, T), 0.0);
    if (!std::isfinite(qs.w)) abort_at("non-finite queue state", state_.k);
  }

  for (std::size_t si = 0; si < net_.stations.size(); ++si) {
    StationState& st = state_.stations[si];
    step_station(st, flows_.station_in[si], flows_.station_out[si], T);
    restore_bounds(st, net_.stations[si].max_occupancy);
  }

  double demand_total = 0.0;
  for (double d : flows_.origin_demand) demand_total += d;
  state_.entered += T * demand_total;
  double exit_total = 0.0;
  for (double q : flows_.dest_in) exit_total += q;
  state_.exited += T * exit_total;
  ++state_.k;
}

void CtmSimulator::compute_flows_only() {
  phase_flows();
  flows_ready_ = true;
}

void CtmSimulator::step() {
  if (!flows_ready_) phase_flows();
  phase_update();
  flows_ready_ = false;
}

RecordView CtmSimulator::record_view() const {
  RecordView rec;
  rec.k = state_.k;
  rec.time_h = static_cast<double>(state_.k) * net_.step_h;
  rec.model = Model::ctm_s;
  rec.net = &net_;
  rec.rho = state_.fw.rho;
  rec.speed = {};  // no speed dynamics in the baseline
  rec.flow = flows_.section_flow;
  rec.queue_out = flows_.queue_out;
  rec.stations = state_.stations;
  rec.station_in = flows_.station_in;
  rec.station_out = flows_.station_out;
  rec.station_qmax = flows_.station_qmax;
  return rec;
}

}  // namespace metanets
