#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "metanets/node.hpp"

using namespace metanets;

namespace {
bool close(double a, double b, double rel = 1e-12) {
  return std::abs(a - b) <= rel * std::max(1.0, std::abs(b));
}
}  // namespace

TEST_CASE("total node flow") {
  std::vector<double> one{3600.0};
  std::vector<double> two{1200.0, 2400.0};
  CHECK(total_node_flow(one) == 3600.0);
  CHECK(total_node_flow(two) == 3600.0);
  CHECK(total_node_flow({}) == 0.0);
}

TEST_CASE("gather: destination totals") {
  // one in-link split 30/70
  std::vector<double> flows{3600.0};
  std::vector<double> comp{0.3, 0.7};
  std::vector<double> dest(2);
  gather(flows, comp, 2, dest);
  CHECK(close(dest[0], 1080.0));
  CHECK(close(dest[1], 2520.0));

  // zero inflow
  flows[0] = 0.0;
  gather(flows, comp, 2, dest);
  CHECK(dest[0] == 0.0);
  CHECK(dest[1] == 0.0);

  // two in-links with disjoint destinations concatenate
  std::vector<double> flows2{1000.0, 500.0};
  std::vector<double> comp2{1.0, 0.0, 0.0, 1.0};
  gather(flows2, comp2, 2, dest);
  CHECK(close(dest[0], 1000.0));
  CHECK(close(dest[1], 500.0));
}

TEST_CASE("scatter: indicator split at a station off-ramp") {
  // destination 0 = station via out-link 1, destination 1 = mainstream via out-link 0
  std::vector<double> dest{1080.0, 2520.0};
  std::vector<double> beta{0.0, 1.0,   // station traffic -> out 1
                           1.0, 0.0};  // through traffic -> out 0
  std::vector<double> out_flow(2);
  std::vector<double> out_comp(4);
  scatter(dest, beta, 2, 2, out_flow, out_comp);
  CHECK(close(out_flow[0], 2520.0));
  CHECK(close(out_flow[1], 1080.0));
  CHECK(close(out_comp[0 * 2 + 1], 1.0));  // out 0 carries destination 1 only
  CHECK(out_comp[0 * 2 + 0] == 0.0);
  CHECK(close(out_comp[1 * 2 + 0], 1.0));
  CHECK(out_comp[1 * 2 + 1] == 0.0);
}

TEST_CASE("scatter: single out-link and degenerate flows") {
  std::vector<double> dest{1080.0, 2520.0};
  std::vector<double> beta{1.0, 1.0};
  std::vector<double> out_flow(1);
  std::vector<double> out_comp(2);
  scatter(dest, beta, 2, 1, out_flow, out_comp);
  CHECK(close(out_flow[0], 3600.0));
  CHECK(close(out_comp[0], 0.3));
  CHECK(close(out_comp[1], 0.7));

  // all-zero flow: uniform over the routed destinations
  std::vector<double> zero{0.0, 0.0};
  scatter(zero, beta, 2, 1, out_flow, out_comp);
  CHECK(out_flow[0] == 0.0);
  CHECK(close(out_comp[0], 0.5));
  CHECK(close(out_comp[1], 0.5));
}

TEST_CASE("properties: node conservation and linearity") {
  std::mt19937_64 rng(11);
  auto u01 = [&] { return (rng() >> 11) * 0x1.0p-53; };
  for (int trial = 0; trial < 200; ++trial) {
    const int n_in = 1 + static_cast<int>(u01() * 3);
    const int n_dest = 1 + static_cast<int>(u01() * 3);
    const int n_out = 1 + static_cast<int>(u01() * 3);

    std::vector<double> flows(n_in);
    std::vector<double> comp(static_cast<std::size_t>(n_in) * n_dest, 0.0);
    for (int m = 0; m < n_in; ++m) {
      flows[m] = 5000.0 * u01();
      double sum = 0.0;
      for (int j = 0; j < n_dest; ++j) sum += (comp[m * n_dest + j] = 0.01 + u01());
      for (int j = 0; j < n_dest; ++j) comp[m * n_dest + j] /= sum;
    }
    std::vector<double> beta(static_cast<std::size_t>(n_dest) * n_out, 0.0);
    for (int j = 0; j < n_dest; ++j) {
      double sum = 0.0;
      for (int d = 0; d < n_out; ++d) sum += (beta[j * n_out + d] = 0.01 + u01());
      for (int d = 0; d < n_out; ++d) beta[j * n_out + d] /= sum;
    }

    std::vector<double> dest(n_dest), out_flow(n_out),
        out_comp(static_cast<std::size_t>(n_out) * n_dest);
    gather(flows, comp, n_dest, dest);
    scatter(dest, beta, n_dest, n_out, out_flow, out_comp);

    // conservation: what enters the node leaves it
    double in_total = total_node_flow(flows), out_total = 0.0, dest_total = 0.0;
    for (double q : out_flow) out_total += q;
    for (double q : dest) dest_total += q;
    CHECK(close(out_total, in_total, 1e-9));
    CHECK(close(dest_total, in_total, 1e-9));

    // out compositions sum to one wherever flow moves
    for (int d = 0; d < n_out; ++d) {
      double s = 0.0;
      for (int j = 0; j < n_dest; ++j) s += out_comp[d * n_dest + j];
      CHECK(close(s, 1.0, 1e-9));
    }

    // homogeneity: scaling the inflows scales everything
    std::vector<double> flows2(flows);
    for (double& f : flows2) f *= 3.0;
    std::vector<double> dest2(n_dest), out_flow2(n_out),
        out_comp2(static_cast<std::size_t>(n_out) * n_dest);
    gather(flows2, comp, n_dest, dest2);
    scatter(dest2, beta, n_dest, n_out, out_flow2, out_comp2);
    for (int d = 0; d < n_out; ++d) CHECK(close(out_flow2[d], 3.0 * out_flow[d], 1e-9));
  }
}
