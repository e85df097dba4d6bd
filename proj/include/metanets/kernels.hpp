#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "metanets/compiled.hpp"

namespace metanets {

/// Flat per-section state of all freeway links. partial and gamma are the
/// ragged per-(section,destination) arrays addressed through
/// CompiledNetwork::sec_partial_offset.
struct FlatState {
  std::vector<double> rho;
  std::vector<double> speed;
  std::vector<double> partial;
  std::vector<double> gamma;  // composition rates; persistent so degenerate sections hold their last value
};

/// Per-link boundary values assembled by the engine before the section update.
struct LinkBoundary {
  std::vector<double> inflow;       // per link, total veh/h into section 1
  std::vector<double> inflow_comp;  // per (link,dest), composition of that inflow
  std::vector<double> v_up;         // virtual upstream speed for section 1
  std::vector<double> rho_down;     // virtual downstream density for the last section
};

struct KernelDiag {
  std::int64_t density_clamps = 0;
  std::int64_t non_finite = 0;
};

// The two data-parallel kernels of a simulation step. Each section writes
// only its own slots and reads step-k arrays, so the serial and OpenMP paths
// are bit-identical; the serial path is the reference the tests compare
// against.

/// Section exit flows and refreshed composition rates from step-k state.
void compute_flows(const CompiledNetwork& net, FlatState& state,
                   std::span<double> flow, bool parallel);

/// Density, partial-density and speed updates into `next`.
KernelDiag advance_sections(const CompiledNetwork& net, const FlatState& state,
                            std::span<const double> flow, const LinkBoundary& boundary,
                            FlatState& next, bool parallel);

/// True when this build can actually run the kernels with OpenMP threads.
bool openmp_enabled();

}  // namespace metanets
