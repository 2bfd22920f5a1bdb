#include "rbffd/stencil_builder.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>

namespace rbffd {

namespace {

constexpr std::size_t kLeafSize = 8;

double coord(const Point& p, int axis) { return axis == 0 ? p.s1 : p.s2; }

double dist2(const Point& a, const Point& b) {
  const double d1 = a.s1 - b.s1;
  const double d2 = a.s2 - b.s2;
  return d1 * d1 + d2 * d2;
}

struct Candidate {
  double d2;
  std::size_t index;
  bool operator<(const Candidate& o) const {
    return d2 < o.d2 || (d2 == o.d2 && index < o.index);
  }
};

}  // namespace

KdTree::KdTree(std::span<const Point> points) : points_(points.begin(), points.end()) {
  if (points_.empty()) throw std::invalid_argument("stencil_builder: empty point set");
  for (const auto& p : points_)
    if (!std::isfinite(p.s1) || !std::isfinite(p.s2))
      throw std::invalid_argument("stencil_builder: non-finite coordinate");
  order_.resize(points_.size());
  for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = i;
  nodes_.reserve(2 * points_.size() / kLeafSize + 1);
  build(0, points_.size(), 0);
}

int KdTree::build(std::size_t begin, std::size_t end, int depth) {
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back({begin, end, depth % 2, 0.0, -1, -1});
  if (end - begin <= kLeafSize) return id;

  const int axis = depth % 2;
  const std::size_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](std::size_t a, std::size_t b) {
                     const double ca = coord(points_[a], axis);
                     const double cb = coord(points_[b], axis);
                     return ca < cb || (ca == cb && a < b);
                   });
  const double split = coord(points_[order_[mid]], axis);
  const int left = build(begin, mid, depth + 1);
  const int right = build(mid, end, depth + 1);
  nodes_[id].split = split;
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

std::vector<std::size_t> KdTree::nearest(Point center, std::size_t m) const {
  if (m > points_.size())
    throw std::invalid_argument("stencil_builder: requested more neighbors than points");
  // Max-heap holding the best m candidates seen so far.
  std::priority_queue<Candidate> best;

  auto visit = [&](auto&& self, int id) -> void {
    const Node& node = nodes_[id];
    if (node.left < 0) {
      for (std::size_t k = node.begin; k < node.end; ++k) {
        const Candidate c{dist2(points_[order_[k]], center), order_[k]};
        if (best.size() < m) {
          best.push(c);
        } else if (c < best.top()) {
          best.pop();
          best.push(c);
        }
      }
      return;
    }
    const double diff = coord(center, node.axis) - node.split;
    const int near = diff < 0.0 ? node.left : node.right;
    const int far = diff < 0.0 ? node.right : node.left;
    self(self, near);
    // Equal distances must still be explored for the index tie-break.
    if (best.size() < m || diff * diff <= best.top().d2) self(self, far);
  };
  if (m > 0) visit(visit, 0);

  std::vector<std::size_t> out(best.size());
  for (std::size_t k = out.size(); k-- > 0;) {
    out[k] = best.top().index;
    best.pop();
  }
  return out;
}

KdTree build_kdtree(std::span<const Point> points) { return KdTree(points); }

std::vector<std::size_t> nearest_neighbors(const KdTree& index, Point center, std::size_t m) {
  return index.nearest(center, m);
}

std::vector<Stencil> build_stencils(const NodeSet& ns, std::size_t m) {
  if (m > ns.size()) throw std::invalid_argument("stencil_builder: stencil size exceeds node count");
  const KdTree tree(ns.coords);

  std::vector<std::size_t> owners;
  for (std::size_t i = 0; i < ns.size(); ++i)
    if (!ns.is_dirichlet(i)) owners.push_back(i);

  std::vector<Stencil> stencils(owners.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(owners.size()); ++k) {
    Stencil& st = stencils[k];
    st.center = owners[k];
    st.neighbors = tree.nearest(ns.coords[st.center], m);
    // The node itself is at distance zero; put it first regardless of duplicates.
    auto it = std::find(st.neighbors.begin(), st.neighbors.end(), st.center);
    if (it == st.neighbors.end()) {
      st.neighbors.back() = st.center;
      it = st.neighbors.end() - 1;
    }
    std::rotate(st.neighbors.begin(), it, it + 1);
    double r2 = 0.0;
    for (std::size_t j : st.neighbors) r2 = std::max(r2, dist2(ns.coords[j], ns.coords[st.center]));
    st.radius = std::sqrt(r2);
  }
  return stencils;
}

}  // namespace rbffd
