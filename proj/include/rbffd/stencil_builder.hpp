#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rbffd/node_layout.hpp"

namespace rbffd {

// Static 2-d tree over a point cloud. Queries are exact and ordered by
// (squared distance, point index), so ties resolve to the lower index.
class KdTree {
 public:
  explicit KdTree(std::span<const Point> points);

  std::size_t size() const { return points_.size(); }

  // The m nearest points to `center`, nearest first.
  std::vector<std::size_t> nearest(Point center, std::size_t m) const;

 private:
  struct Node {
    std::size_t begin = 0;  // range into order_
    std::size_t end = 0;
    int axis = 0;
    double split = 0.0;
    int left = -1;
    int right = -1;
  };

  int build(std::size_t begin, std::size_t end, int depth);

  std::vector<Point> points_;
  std::vector<std::size_t> order_;
  std::vector<Node> nodes_;
};

KdTree build_kdtree(std::span<const Point> points);

std::vector<std::size_t> nearest_neighbors(const KdTree& index, Point center, std::size_t m);

struct Stencil {
  std::size_t center = 0;
  std::vector<std::size_t> neighbors;  // center first
  double radius = 0.0;
};

// One stencil per PDE node (interior and axis), in node order. Candidates are
// drawn from the full node set, Dirichlet nodes included.
std::vector<Stencil> build_stencils(const NodeSet& ns, std::size_t m);

}  // namespace rbffd
