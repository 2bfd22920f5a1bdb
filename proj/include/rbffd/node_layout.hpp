#pragma once

#include <cstddef>
#include <iosfwd>
#include <string_view>
#include <vector>

namespace rbffd {

struct Point {
  double s1 = 0.0;
  double s2 = 0.0;
};

enum class NodeRole { interior, axis, corner, far_field };

std::string_view to_string(NodeRole role);

// Nodes on the triangle s1, s2 >= 0, s1 + s2 <= s_max. Nodes are stored
// diagonal by diagonal (d = 1..Ns), each diagonal running from the s1 axis
// to the s2 axis.
struct NodeSet {
  std::vector<Point> coords;
  std::vector<NodeRole> roles;
  std::vector<int> diag_index;
  int Ns = 0;
  double s_max = 0.0;
  // Index of the node at (s2, s1); empty when the set has no such symmetry.
  std::vector<std::size_t> mirror;

  std::size_t size() const { return coords.size(); }
  bool is_dirichlet(std::size_t i) const {
    return roles[i] == NodeRole::corner || roles[i] == NodeRole::far_field;
  }
};

constexpr std::size_t triangle_count(int Ns) {
  return static_cast<std::size_t>(Ns) * static_cast<std::size_t>(Ns + 1) / 2;
}

NodeSet uniform_triangle(int Ns, double s_max);

// One-dimensional grid on [0, s_max] clustered around K; smaller c clusters harder.
std::vector<double> sinh_axis(int N1, double K, double c, double s_max);

NodeSet nonuniform_triangle(int Ns, double K, double c, double s_max);

// Assigns roles in place. Far field takes precedence over axis at (s_max, 0)
// and (0, s_max). Throws std::invalid_argument for nodes outside the triangle.
void classify_boundary(NodeSet& ns, double s_max, double tol = 1e-9);

// Columns: s1,s2,role,diag_index
void write_nodeset(std::ostream& out, const NodeSet& ns);

}  // namespace rbffd
