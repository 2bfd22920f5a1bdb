#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rbffd/node_layout.hpp"
#include "rbffd/stencil_builder.hpp"

namespace rbffd {

// Fourth-order smoothing kernel: a piecewise cubic on [-3, 3] with unit mass
// and vanishing first three moments.
double phi4(double s);

// Integral of s^k phi4(s) over [-3, 3], exact up to rounding.
double phi4_moment(int k);

// Gauss-Legendre points per polynomial piece; 8 integrates every piece
// exactly, 16 is available for cross-checking.
enum class GaussOrder { standard = 8, doubled = 16 };

// Integral over [-3, 3]^2 of phi4(x1) phi4(x2) (alpha - x1 - x2), restricted
// to the half plane where the ramp is positive when `clip` is true.
double smoothed_ramp(double alpha, bool clip = true, GaussOrder order = GaussOrder::standard);

// Kernel-smoothed basket call payoff with smoothing length ds.
double smoothed_payoff(double s1, double s2, double ds, double K, GaussOrder order = GaussOrder::standard);

struct SmoothedPayoff {
  std::vector<double> values;
  std::vector<double> ds;  // per-node smoothing length
  std::size_t modified = 0;  // nodes within the 6 ds band of the kink
};

// Per-node smoothing, ds_i being the distance from node i to its nearest
// stencil neighbor. Dirichlet nodes borrow ds from the nearest PDE node.
SmoothedPayoff smooth_nodeset(const NodeSet& ns, std::span<const Stencil> stencils, double K);

}  // namespace rbffd
