#pragma once

#include <span>

#include "metanets/params.hpp"

namespace metanets {

// Algebraic node model: routes destination-oriented flows between links.
// Destinations are indexed node-locally; the caller maps link-local
// composition slots onto node slots.

/// Total flow entering a node.
inline double total_node_flow(std::span<const double> in_flows) {
  double q = 0.0;
  for (double f : in_flows) q += f;
  return q;
}

/// Per-destination totals entering a node.
/// in_comp is row-major [n_in x n_dest]; dest_flow has n_dest slots.
inline void gather(std::span<const double> in_flows, std::span<const double> in_comp,
                   int n_dest, std::span<double> dest_flow) {
  for (int j = 0; j < n_dest; ++j) dest_flow[j] = 0.0;
  for (std::size_t m = 0; m < in_flows.size(); ++m) {
    const double q = in_flows[m];
    const double* g = in_comp.data() + m * static_cast<std::size_t>(n_dest);
    for (int j = 0; j < n_dest; ++j) dest_flow[j] += q * g[j];
  }
}

/// Distributes per-destination node flows over the outgoing links.
/// beta is row-major [n_dest x n_out] with rows summing to 1.
/// out_flow gets n_out slots; out_comp is row-major [n_out x n_dest].
/// A zero-flow out-link gets a uniform composition over the destinations
/// routed to it.
inline void scatter(std::span<const double> dest_flow, std::span<const double> beta,
                    int n_dest, int n_out, std::span<double> out_flow,
                    std::span<double> out_comp) {
  for (int d = 0; d < n_out; ++d) {
    double q = 0.0;
    for (int j = 0; j < n_dest; ++j) q += beta[j * n_out + d] * dest_flow[j];
    out_flow[d] = q;
    double* g = out_comp.data() + d * static_cast<std::size_t>(n_dest);
    if (q >= kEpsFlow) {
      for (int j = 0; j < n_dest; ++j) g[j] = beta[j * n_out + d] * dest_flow[j] / q;
    } else {
      int routed = 0;
      for (int j = 0; j < n_dest; ++j)
        if (beta[j * n_out + d] > 0.0) ++routed;
      for (int j = 0; j < n_dest; ++j)
        g[j] = (routed > 0 && beta[j * n_out + d] > 0.0) ? 1.0 / routed
               : (routed == 0 && n_dest > 0)             ? 1.0 / n_dest
                                                         : 0.0;
    }
  }
}

}  // namespace metanets
