#include "metanets/kernels.hpp"

#include <cmath>

#include "metanets/freeway.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace metanets {

namespace {

inline void flows_body(const CompiledNetwork& net, FlatState& s, double* flow, int i) {
  const CompiledFreeway& fw = net.freeways[net.sec_link[i]];
  const double rho = s.rho[i];
  flow[i] = section_flow(rho, s.speed[i], fw.lanes);
  const int off = net.sec_partial_offset[i];
  compositions_from_partials({&s.partial[off], static_cast<std::size_t>(fw.n_dest)}, rho,
                             {&s.gamma[off], static_cast<std::size_t>(fw.n_dest)});
}

inline void advance_body(const CompiledNetwork& net, const FlatState& s,
                         const double* flow, const LinkBoundary& b, FlatState& n,
                         std::int64_t& clamps, std::int64_t& bad, int i) {
  const int m = net.sec_link[i];
  const CompiledFreeway& fw = net.freeways[m];
  const bool first = i == fw.first_section;
  const bool last = i == fw.last_section;
  const double q_in = first ? b.inflow[m] : flow[i - 1];
  const double q_out = flow[i];
  const double v_up = first ? b.v_up[m] : s.speed[i - 1];
  const double rho_down = last ? b.rho_down[m] : s.rho[i + 1];

  const DensityUpdate du =
      step_density(s.rho[i], q_in, q_out, fw.length_km, fw.lanes, net.step_h);
  n.rho[i] = du.rho;
  if (du.clamped) ++clamps;

  const int off = net.sec_partial_offset[i];
  const double* gin = first ? &b.inflow_comp[fw.dest_offset] : &s.gamma[off - fw.n_dest];
  for (int j = 0; j < fw.n_dest; ++j)
    n.partial[off + j] = step_partial_density(s.partial[off + j], gin[j], q_in,
                                              s.gamma[off + j], q_out, fw.length_km,
                                              fw.lanes, net.step_h);

  const double v =
      step_speed(s.speed[i], v_up, s.rho[i], rho_down, fw.params, fw.length_km, net.step_h);
  n.speed[i] = v;
  if (!std::isfinite(v) || !std::isfinite(du.rho)) ++bad;
}

}  // namespace

bool openmp_enabled() {
#ifdef _OPENMP
  return true;
#else
  return false;
#endif
}

void compute_flows(const CompiledNetwork& net, FlatState& state, std::span<double> flow,
                   bool parallel) {
  const int n = net.n_sections;
  double* f = flow.data();
#ifdef _OPENMP
  if (parallel) {
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) flows_body(net, state, f, i);
    return;
  }
#else
  (void)parallel;
#endif
  for (int i = 0; i < n; ++i) flows_body(net, state, f, i);
}

KernelDiag advance_sections(const CompiledNetwork& net, const FlatState& state,
                            std::span<const double> flow, const LinkBoundary& boundary,
                            FlatState& next, bool parallel) {
  const int n = net.n_sections;
  const double* f = flow.data();
  std::int64_t clamps = 0;
  std::int64_t bad = 0;
#ifdef _OPENMP
  if (parallel) {
#pragma omp parallel for schedule(static) reduction(+ : clamps, bad)
    for (int i = 0; i < n; ++i) advance_body(net, state, f, boundary, next, clamps, bad, i);
    return {clamps, bad};
  }
#else
  (void)parallel;
#endif
  for (int i = 0; i < n; ++i) advance_body(net, state, f, boundary, next, clamps, bad, i);
  return {clamps, bad};
}

}  // namespace metanets
