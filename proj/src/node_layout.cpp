#include "rbffd/node_layout.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>

namespace rbffd {

std::string_view to_string(NodeRole role) {
  switch (role) {
    case NodeRole::interior: return "interior";
    case NodeRole::axis: return "axis";
    case NodeRole::corner: return "corner";
    case NodeRole::far_field: return "far_field";
  }
  return "unknown";
}

namespace {

// Fills diagonal d (1-based) with d evenly spaced nodes between (level, 0)
// and (0, level).
// Positions along a diagonal with d nodes, ordered from the middle outwards
// and with each mirrored pair adjacent. Nearest-neighbor ties go to the lower
// index, so this keeps stencils of mirrored nodes mirrored.
std::vector<int> diagonal_order(int d) {
  std::vector<int> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [d](int a, int b) { return std::abs(2 * a - (d - 1)) < std::abs(2 * b - (d - 1)); });
  return order;
}

void push_diagonal(NodeSet& ns, int d, double level) {
  if (d == 1) {
    ns.coords.push_back({0.0, 0.0});
    ns.diag_index.push_back(1);
    return;
  }
  const double last = d - 1;
  for (int k : diagonal_order(d)) {
    ns.coords.push_back({level * ((last - k) / last), level * (k / last)});
    ns.diag_index.push_back(d);
  }
}

// Both layouts place mirrored nodes at bitwise swapped coordinates.
std::vector<std::size_t> mirror_map(const NodeSet& ns) {
  std::map<std::pair<double, double>, std::size_t> where;
  for (std::size_t i = 0; i < ns.size(); ++i) where.emplace(std::pair{ns.coords[i].s1, ns.coords[i].s2}, i);
  std::vector<std::size_t> mirror(ns.size());
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const auto it = where.find({ns.coords[i].s2, ns.coords[i].s1});
    if (it == where.end()) return {};
    mirror[i] = it->second;
  }
  return mirror;
}

}  // namespace

NodeSet uniform_triangle(int Ns, double s_max) {
  if (Ns < 2) throw std::invalid_argument("node_layout: Ns must be at least 2");
  if (!(s_max > 0.0)) throw std::invalid_argument("node_layout: s_max must be positive");
  NodeSet ns;
  ns.Ns = Ns;
  ns.s_max = s_max;
  ns.coords.reserve(triangle_count(Ns));
  ns.diag_index.reserve(triangle_count(Ns));
  const double h = s_max / (Ns - 1);
  for (int d = 1; d <= Ns; ++d) {
    // i + j = d - 1, written as integer multiples of h so that mirrored
    // nodes are bitwise mirrored.
    for (int j : diagonal_order(d)) {
      const int i = d - 1 - j;
      const double s1 = (i == Ns - 1) ? s_max : i * h;
      const double s2 = (j == Ns - 1) ? s_max : j * h;
      ns.coords.push_back({s1, s2});
      ns.diag_index.push_back(d);
    }
  }
  classify_boundary(ns, s_max);
  ns.mirror = mirror_map(ns);
  return ns;
}

std::vector<double> sinh_axis(int N1, double K, double c, double s_max) {
  if (N1 < 2) throw std::invalid_argument("node_layout: N1 must be at least 2");
  if (!(c > 0.0)) throw std::invalid_argument("node_layout: clustering constant must be positive");
  if (!(K > 0.0 && K < s_max)) throw std::invalid_argument("node_layout: need 0 < K < s_max");

  const double x_lo = std::asinh(-K / c);
  const double x_hi = std::asinh((s_max - K) / c);
  // Step chosen so the last node lands on s_max.
  const double dx = (x_hi - x_lo) / (N1 - 1);

  std::vector<double> s(N1);
  for (int i = 0; i < N1; ++i) s[i] = K + c * std::sinh(x_lo + i * dx);
  s.front() = 0.0;
  s.back() = s_max;
  return s;
}

NodeSet nonuniform_triangle(int Ns, double K, double c, double s_max) {
  const std::vector<double> axis = sinh_axis(Ns, K, c, s_max);
  NodeSet ns;
  ns.Ns = Ns;
  ns.s_max = s_max;
  ns.coords.reserve(triangle_count(Ns));
  ns.diag_index.reserve(triangle_count(Ns));
  for (int d = 1; d <= Ns; ++d) push_diagonal(ns, d, axis[d - 1]);
  classify_boundary(ns, s_max);
  ns.mirror = mirror_map(ns);
  return ns;
}

void classify_boundary(NodeSet& ns, double s_max, double tol) {
  ns.roles.assign(ns.coords.size(), NodeRole::interior);
  const double slack = tol * s_max;
  for (std::size_t i = 0; i < ns.coords.size(); ++i) {
    const auto [s1, s2] = ns.coords[i];
    if (s1 < -slack || s2 < -slack || s1 + s2 > s_max + slack)
      throw std::invalid_argument("node_layout: node " + std::to_string(i) +
                                  " lies outside the triangle");
    const bool on1 = std::abs(s1) <= slack;
    const bool on2 = std::abs(s2) <= slack;
    if (on1 && on2)
      ns.roles[i] = NodeRole::corner;
    else if (std::abs(s1 + s2 - s_max) <= slack)
      ns.roles[i] = NodeRole::far_field;
    else if (on1 || on2)
      ns.roles[i] = NodeRole::axis;
  }
}

void write_nodeset(std::ostream& out, const NodeSet& ns) {
  out << "s1,s2,role,diag_index\n" << std::setprecision(17);
  for (std::size_t i = 0; i < ns.size(); ++i)
    out << ns.coords[i].s1 << ',' << ns.coords[i].s2 << ',' << to_string(ns.roles[i]) << ','
        << ns.diag_index[i] << '\n';
}

}  // namespace rbffd
