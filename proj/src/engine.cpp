#include "metanets/engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "metanets/ctm.hpp"
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

}  // namespace

SimState initial_state(const CompiledNetwork& net) {
  SimState s;
  s.fw.rho.assign(net.n_sections, 0.0);
  s.fw.speed.assign(net.n_sections, 0.0);
  s.fw.partial.assign(net.n_partial, 0.0);
  s.fw.gamma.assign(net.n_partial, 0.0);

  for (const auto& cf : net.freeways) {
    const auto& f = net.spec.freeways[cf.spec_index];
    const std::vector<double> gamma0 = resolve_composition(f.init_composition, f.destinations);
    for (int i = 0; i < cf.n_sections; ++i) {
      const int sec = cf.first_section + i;
      double rho0 = 1.0;
      if (!f.init_density.empty())
        rho0 = f.init_density.size() == 1 ? f.init_density[0]
                                          : f.init_density[static_cast<std::size_t>(i)];
      double v0;
      if (!f.init_speed.empty())
        v0 = f.init_speed.size() == 1 ? f.init_speed[0]
                                      : f.init_speed[static_cast<std::size_t>(i)];
      else
        v0 = desired_speed(rho0, cf.params);
      s.fw.rho[sec] = rho0;
      s.fw.speed[sec] = v0;
      const int off = net.sec_partial_offset[sec];
      for (int j = 0; j < cf.n_dest; ++j) {
        s.fw.partial[off + j] = rho0 * gamma0[static_cast<std::size_t>(j)];
        s.fw.gamma[off + j] = gamma0[static_cast<std::size_t>(j)];
      }
    }
  }

  s.queues.resize(net.queues.size());
  for (std::size_t qi = 0; qi < net.queues.size(); ++qi) {
    const auto& cq = net.queues[qi];
    s.queues[qi].w = cq.init_queue;
    s.queues[qi].wj.resize(static_cast<std::size_t>(cq.n_dest));
    for (int j = 0; j < cq.n_dest; ++j)
      s.queues[qi].wj[static_cast<std::size_t>(j)] =
          cq.init_queue * cq.inflow_comp[static_cast<std::size_t>(j)];
  }

  for (const auto& cs : net.stations)
    s.stations.push_back(StationState::initial(cs.dwell_steps, cs.init_occupancy,
                                               cs.init_exit_queue, cs.init_history));
  return s;
}

Simulator::Simulator(const CompiledNetwork& net, SimOptions opt) : net_(net), opt_(opt) {
  switch (opt_.exec) {
    case Exec::serial:
      use_parallel_ = false;
      break;
    case Exec::parallel:
      use_parallel_ = openmp_enabled();
      break;
    case Exec::automatic:
      use_parallel_ = openmp_enabled() && net_.n_sections >= opt_.parallel_threshold;
      break;
  }

  next_.rho.assign(net_.n_sections, 0.0);
  next_.speed.assign(net_.n_sections, 0.0);
  next_.partial.assign(net_.n_partial, 0.0);

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

  boundary_.inflow.assign(net_.freeways.size(), 0.0);
  boundary_.inflow_comp.assign(net_.n_link_dest, 0.0);
  boundary_.v_up.assign(net_.freeways.size(), 0.0);
  boundary_.rho_down.assign(net_.freeways.size(), 0.0);

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

void Simulator::reset() {
  state_ = initial_state(net_);
  flows_ready_ = false;
}

double Simulator::stored_vehicles() const {
  double total = 0.0;
  for (const auto& cf : net_.freeways)
    for (int i = 0; i < cf.n_sections; ++i)
      total += state_.fw.rho[cf.first_section + i] * cf.length_km * cf.lanes;
  for (const auto& q : state_.queues) total += q.w;
  for (const auto& st : state_.stations) total += st.occupancy;
  return total;
}

void Simulator::phase_flows() {
  const double T = net_.step_h;
  const std::int64_t k = state_.k;

  compute_flows(net_, state_.fw, flows_.section_flow, use_parallel_);

  // Station entry caps and merge-back outflows, from step-k state.
  for (std::size_t si = 0; si < net_.stations.size(); ++si) {
    const auto& cs = net_.stations[si];
    const StationState& st = state_.stations[si];
    const auto& ramp = net_.freeways[cs.ramp_in];
    const int sec = ramp.last_section;
    const double q_in = station_inflow(state_.fw.rho[sec], state_.fw.speed[sec], ramp.lanes,
                                       st.occupancy, cs.max_occupancy, T);
    flows_.station_in[si] = q_in;
    flows_.section_flow[sec] = q_in;  // the withheld flow stays on the ramp

    const auto& out_ramp = net_.freeways[cs.ramp_out];
    const DownstreamView dv{state_.fw.rho[out_ramp.first_section],
                            out_ramp.params.rho_crit, out_ramp.params.rho_jam};
    const double q_max = station_capacity(cs.capacity_flow, dv);
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
  std::fill(boundary_.inflow.begin(), boundary_.inflow.end(), 0.0);
  std::fill(boundary_.inflow_comp.begin(), boundary_.inflow_comp.end(), 0.0);

  auto queue_q_max = [&](const CompiledQueue& cq) {
    if (cq.downstream_fw < 0) return cq.max_flow;
    const auto& fw = net_.freeways[cq.downstream_fw];
    const DownstreamView dv{state_.fw.rho[fw.first_section], fw.params.rho_crit,
                            fw.params.rho_jam};
    return max_outflow(cq.max_flow, dv);
  };

  auto resolve_queue_outflow = [&](std::size_t qi) {
    const auto& cq = net_.queues[qi];
    const QueueState& qs = state_.queues[qi];
    flows_.queue_out[qi] = queue_outflow(flows_.queue_in[qi], qs.w, T, queue_q_max(cq),
                                         cq.metering.at(k));
    queue_exit_composition(
        qs.wj, qs.w,
        {&flows_.queue_in_comp[cq.dest_offset], static_cast<std::size_t>(cq.n_dest)},
        {&flows_.queue_exit_comp[cq.dest_offset], static_cast<std::size_t>(cq.n_dest)});
  };

  // Origins discharge from the exogenous demand; stand-alone queues from a
  // zero inflow. Node-fed queues are resolved while walking the node order.
  for (std::size_t qi = 0; qi < net_.queues.size(); ++qi) {
    const auto& cq = net_.queues[qi];
    if (cq.kind == QueueKind::origin) {
      const double d = cq.demand.at(k) * cq.demand_scale;
      flows_.origin_demand[qi] = d;
      flows_.queue_in[qi] = d;
      for (int j = 0; j < cq.n_dest; ++j)
        flows_.queue_in_comp[cq.dest_offset + j] = cq.inflow_comp[static_cast<std::size_t>(j)];
      resolve_queue_outflow(qi);
    } else if (cq.up_node < 0) {
      resolve_queue_outflow(qi);
    }
  }

  // Node routing in an order that resolves store-and-forward chains.
  for (int ni : net_.node_order) {
    const auto& n = net_.nodes[ni];
    const int n_in = static_cast<int>(n.ins.size());
    const int n_out = static_cast<int>(n.outs.size());
    const int n_dest = static_cast<int>(n.dest_global.size());

    std::fill_n(node_in_comp_.begin(), static_cast<std::size_t>(n_in) * n_dest, 0.0);
    for (int m = 0; m < n_in; ++m) {
      const auto& in = n.ins[m];
      double* comp = &node_in_comp_[static_cast<std::size_t>(m) * n_dest];
      if (in.is_queue) {
        const auto& cq = net_.queues[in.index];
        node_in_flow_[m] = flows_.queue_out[in.index];
        for (int j = 0; j < cq.n_dest; ++j)
          comp[in.dest_map[j]] = flows_.queue_exit_comp[cq.dest_offset + j];
      } else {
        const auto& cf = net_.freeways[in.index];
        node_in_flow_[m] = flows_.section_flow[cf.last_section];
        const int off = net_.sec_partial_offset[cf.last_section];
        for (int j = 0; j < cf.n_dest; ++j) comp[in.dest_map[j]] = state_.fw.gamma[off + j];
      }
    }

    gather({node_in_flow_.data(), static_cast<std::size_t>(n_in)},
           {node_in_comp_.data(), static_cast<std::size_t>(n_in) * n_dest}, n_dest,
           {node_dest_flow_.data(), static_cast<std::size_t>(n_dest)});
    for (int s = 0; s < n_dest; ++s)
      for (int d = 0; d < n_out; ++d)
        node_beta_[static_cast<std::size_t>(s) * n_out + d] = n.beta[s * n_out + d].at(k);
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
          boundary_.inflow[out.index] = q;
          for (int s = 0; s < n_dest; ++s)
            if (out.dest_map[s] >= 0)
              boundary_.inflow_comp[cf.dest_offset + out.dest_map[s]] = comp[s];
          break;
        }
        case CompiledNode::OutKind::queue: {
          const auto& cq = net_.queues[out.index];
          flows_.queue_in[out.index] = q;
          for (int s = 0; s < n_dest; ++s)
            if (out.dest_map[s] >= 0)
              flows_.queue_in_comp[cq.dest_offset + out.dest_map[s]] = comp[s];
          resolve_queue_outflow(static_cast<std::size_t>(out.index));
          break;
        }
        case CompiledNode::OutKind::destination:
          flows_.dest_in[out.index] += q;
          break;
      }
    }
  }

  // Station outflows feed the downstream ramps directly.
  for (std::size_t si = 0; si < net_.stations.size(); ++si) {
    const auto& cs = net_.stations[si];
    const auto& out_ramp = net_.freeways[cs.ramp_out];
    boundary_.inflow[cs.ramp_out] = flows_.station_out[si];
    for (int j = 0; j < out_ramp.n_dest; ++j)
      boundary_.inflow_comp[out_ramp.dest_offset + j] =
          cs.exit_comp[static_cast<std::size_t>(j)];
  }

  // Virtual boundary conditions. Upstream speed: flow-weighted mean over the
  // freeway links entering the feeding node (queue links carry no speed).
  // Downstream density: flow-weighted quadratic mean over the freeway links
  // leaving the drained node, so a congested branch dominates; both collapse
  // to the plain neighbour value on a chain.
  for (std::size_t m = 0; m < net_.freeways.size(); ++m) {
    const auto& cf = net_.freeways[m];
    double v_up = state_.fw.speed[cf.first_section];
    if (cf.up_node >= 0) {
      double num = 0.0, den = 0.0;
      for (const auto& in : net_.nodes[cf.up_node].ins) {
        if (in.is_queue) continue;
        const auto& up = net_.freeways[in.index];
        const double q = flows_.section_flow[up.last_section];
        num += q * state_.fw.speed[up.last_section];
        den += q;
      }
      if (den > kEpsFlow) v_up = num / den;
    }
    boundary_.v_up[m] = v_up;

    double rho_down = state_.fw.rho[cf.last_section];
    if (cf.down_node >= 0) {
      double num = 0.0, den = 0.0, plain = 0.0;
      int count = 0;
      for (const auto& out : net_.nodes[cf.down_node].outs) {
        if (out.kind != CompiledNode::OutKind::freeway) continue;
        const auto& down = net_.freeways[out.index];
        const double w = boundary_.inflow[out.index];
        const double r = state_.fw.rho[down.first_section];
        num += w * r * r;
        den += w * r;
        plain += r;
        ++count;
      }
      if (den > kEpsFlow)
        rho_down = num / den;
      else if (count > 0)
        rho_down = plain / count;
    }
    boundary_.rho_down[m] = rho_down;
  }
}

void Simulator::phase_update() {
  const double T = net_.step_h;

  const KernelDiag diag =
      advance_sections(net_, state_.fw, flows_.section_flow, boundary_, next_, use_parallel_);
  state_.density_clamps += diag.density_clamps;
  if (diag.non_finite > 0) abort_at("non-finite section state", state_.k);

  state_.fw.rho.swap(next_.rho);
  state_.fw.speed.swap(next_.speed);
  state_.fw.partial.swap(next_.partial);
  // gamma stays in place: it is refreshed from the new partials at the start
  // of the next step, holding its value where the density is degenerate.

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
    if (!std::isfinite(st.occupancy)) abort_at("non-finite station state", state_.k);
  }

  double demand_total = 0.0;
  for (double d : flows_.origin_demand) demand_total += d;
  state_.entered += T * demand_total;
  double exit_total = 0.0;
  for (double q : flows_.dest_in) exit_total += q;
  state_.exited += T * exit_total;
  ++state_.k;
}

void Simulator::compute_flows_only() {
  phase_flows();
  flows_ready_ = true;
}

void Simulator::step() {
  if (!flows_ready_) phase_flows();
  phase_update();
  flows_ready_ = false;
}

RecordView Simulator::record_view() const {
  RecordView rec;
  rec.k = state_.k;
  rec.time_h = static_cast<double>(state_.k) * net_.step_h;
  rec.model = Model::metanet_s;
  rec.net = &net_;
  rec.rho = state_.fw.rho;
  rec.speed = state_.fw.speed;
  rec.flow = flows_.section_flow;
  rec.queue_out = flows_.queue_out;
  rec.stations = state_.stations;
  rec.station_in = flows_.station_in;
  rec.station_out = flows_.station_out;
  rec.station_qmax = flows_.station_qmax;
  return rec;
}

namespace {

// Queue lengths are stored per queue link inside SimState; RecordView wants a
// dense span. Both engines keep this scratch updated per record.
thread_local std::vector<double> g_queue_w_scratch;

std::span<const double> queue_w_span(const SimState& s) {
  g_queue_w_scratch.resize(s.queues.size());
  for (std::size_t i = 0; i < s.queues.size(); ++i) g_queue_w_scratch[i] = s.queues[i].w;
  return g_queue_w_scratch;
}

class SummaryTracker {
 public:
  SummaryTracker(const CompiledNetwork& net, Model model) : net_(net) {
    summary_.model = model;
    summary_.step_h = net.step_h;
    for (const auto& cf : net.freeways) {
      const auto& id = net.spec.freeways[cf.spec_index].id;
      summary_.peak_exit_flow[id] = {};
      summary_.peak_density[id] = {};
    }
    for (const auto& cq : net.queues) summary_.peak_queue[net.spec.queues[cq.spec_index].id] = {};
    for (const auto& cs : net.stations)
      summary_.stations[net.spec.stations[cs.spec_index].id] = {};
  }

  void observe(const RecordView& rec, const SimState& state) {
    for (const auto& cf : net_.freeways) {
      const auto& id = net_.spec.freeways[cf.spec_index].id;
      bump(summary_.peak_exit_flow[id], rec.flow[cf.last_section], rec.k);
      bump(summary_.peak_density[id], rec.rho[cf.first_section], rec.k);
    }
    for (std::size_t qi = 0; qi < net_.queues.size(); ++qi)
      bump(summary_.peak_queue[net_.spec.queues[net_.queues[qi].spec_index].id],
           state.queues[qi].w, rec.k);
    for (std::size_t si = 0; si < net_.stations.size(); ++si) {
      const auto& cs = net_.stations[si];
      auto& ev = summary_.stations[net_.spec.stations[cs.spec_index].id];
      const auto& out_ramp = net_.freeways[cs.ramp_out];
      if (ev.congestion_onset_step < 0 &&
          rec.rho[out_ramp.first_section] >= out_ramp.params.rho_crit)
        ev.congestion_onset_step = rec.k;
      if (ev.capacity_cut_step < 0 && rec.station_qmax[si] < cs.capacity_flow)
        ev.capacity_cut_step = rec.k;
      bump(ev.occupancy, state.stations[si].occupancy, rec.k);
      bump(ev.exit_queue, state.stations[si].exit_queue, rec.k);
    }
  }

  RunSummary take() { return std::move(summary_); }

 private:
  static void bump(RunSummary::Peak& p, double value, std::int64_t k) {
    if (p.step < 0 || value > p.value) {
      p.value = value;
      p.step = k;
    }
  }

  const CompiledNetwork& net_;
  RunSummary summary_;
};

void verify_partitions(const CompiledNetwork& net, const SimState& state) {
  for (const auto& cf : net.freeways)
    for (int i = 0; i < cf.n_sections; ++i) {
      const int sec = cf.first_section + i;
      const int off = net.sec_partial_offset[sec];
      double sum = 0.0;
      for (int j = 0; j < cf.n_dest; ++j) sum += state.fw.partial[off + j];
      const double rho = state.fw.rho[sec];
      if (std::abs(sum - rho) > 1e-9 * std::max(1.0, rho))
        abort_at("destination partition invariant violated", state.k);
    }
  for (const auto& qs : state.queues) {
    double sum = 0.0;
    for (double wj : qs.wj) sum += wj;
    if (std::abs(sum - qs.w) > 1e-9 * std::max(1.0, qs.w))
      abort_at("partial queue partition invariant violated", state.k);
  }
}

template <class Sim>
RunSummary run_loop(Sim& sim, const CompiledNetwork& net, Model model,
                    const RunOptions& opt) {
  const std::int64_t horizon =
      opt.horizon_override >= 0 ? opt.horizon_override : net.horizon_steps;
  const std::int64_t stride = opt.stride > 0 ? opt.stride : net.spec.output_stride;

  SummaryTracker tracker(net, model);
  const double stored_initial = sim.stored_vehicles();

  for (std::int64_t k = 0; k < horizon; ++k) {
    sim.compute_flows_only();
    RecordView rec = sim.record_view();
    rec.queue_w = queue_w_span(sim.state());
    tracker.observe(rec, sim.state());
    if (k % stride == 0) {
      verify_partitions(net, sim.state());
      for (TraceSink* sink : opt.sinks) sink->on_record(rec);
    }
    sim.step();
  }

  RunSummary summary = tracker.take();
  summary.steps = horizon;
  summary.entered = sim.state().entered;
  summary.exited = sim.state().exited;
  summary.stored_initial = stored_initial;
  summary.stored_final = sim.stored_vehicles();
  summary.residual =
      std::abs(summary.entered - summary.exited - (summary.stored_final - summary.stored_initial));
  summary.density_clamps = sim.state().density_clamps;
  return summary;
}

}  // namespace

RunSummary run(const NetworkSpec& spec, Model model, const RunOptions& opt) {
  const ValidationReport report = validate(spec);
  if (!report.ok())
    throw std::runtime_error("scenario does not validate:\n" + format_report(report));
  const CompiledNetwork net = compile(spec);
  if (model == Model::ctm_s) {
    const ValidationReport ctm_report = validate_ctm(spec);
    if (!ctm_report.ok())
      throw std::runtime_error("scenario not usable with the first-order baseline:\n" +
                               format_report(ctm_report));
    CtmSimulator sim(net);
    return run_loop(sim, net, model, opt);
  }
  Simulator sim(net, opt.sim);
  return run_loop(sim, net, model, opt);
}

std::string format_summary(const RunSummary& s) {
  std::ostringstream os;
  char buf[256];
  auto line = [&](const char* key, const std::string& value) {
    os << key << ": " << value << "\n";
  };
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return std::string(buf);
  };
  line("model", s.model == Model::metanet_s ? "metanet_s" : "ctm_s");
  line("steps", std::to_string(s.steps));
  line("step_h", num(s.step_h));
  line("entered_veh", num(s.entered));
  line("exited_veh", num(s.exited));
  line("stored_initial_veh", num(s.stored_initial));
  line("stored_final_veh", num(s.stored_final));
  line("conservation_residual_veh", num(s.residual));
  line("density_clamp_events", std::to_string(s.density_clamps));
  auto peak = [&](const RunSummary::Peak& p) {
    std::snprintf(buf, sizeof buf, "%.12g @ step %lld (t=%.6g h)", p.value,
                  static_cast<long long>(p.step), static_cast<double>(p.step) * s.step_h);
    return std::string(buf);
  };
  for (const auto& [id, p] : s.peak_exit_flow) line(("peak_exit_flow[" + id + "]").c_str(), peak(p));
  for (const auto& [id, p] : s.peak_density) line(("peak_density[" + id + "]").c_str(), peak(p));
  for (const auto& [id, p] : s.peak_queue) line(("peak_queue[" + id + "]").c_str(), peak(p));
  for (const auto& [id, ev] : s.stations) {
    std::snprintf(buf, sizeof buf, "%lld (t=%.6g h)",
                  static_cast<long long>(ev.congestion_onset_step),
                  static_cast<double>(ev.congestion_onset_step) * s.step_h);
    line(("station[" + id + "].congestion_onset_step").c_str(), buf);
    std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(ev.capacity_cut_step));
    line(("station[" + id + "].capacity_cut_step").c_str(), buf);
    line(("station[" + id + "].occupancy_peak").c_str(), peak(ev.occupancy));
    line(("station[" + id + "].exit_queue_peak").c_str(), peak(ev.exit_queue));
  }
  return os.str();
}

}  // namespace metanets
