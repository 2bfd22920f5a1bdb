#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "rbffd/node_layout.hpp"

using namespace rbffd;

namespace {

std::map<NodeRole, std::size_t> role_counts(const NodeSet& ns) {
  std::map<NodeRole, std::size_t> out;
  for (auto r : ns.roles) ++out[r];
  return out;
}

bool contains(const NodeSet& ns, Point p) {
  return std::any_of(ns.coords.begin(), ns.coords.end(), [&](Point q) {
    return std::abs(q.s1 - p.s1) < 1e-12 && std::abs(q.s2 - p.s2) < 1e-12;
  });
}

}  // namespace

TEST_CASE("smallest uniform triangles") {
  const NodeSet two = uniform_triangle(2, 8.0);
  REQUIRE(two.size() == 3);
  CHECK(contains(two, {0, 0}));
  CHECK(contains(two, {8, 0}));
  CHECK(contains(two, {0, 8}));

  const NodeSet three = uniform_triangle(3, 8.0);
  REQUIRE(three.size() == 6);
  for (Point p : {Point{0, 0}, Point{4, 0}, Point{8, 0}, Point{0, 4}, Point{4, 4}, Point{0, 8}}) CHECK(contains(three, p));
  // (4, 4) sits on the far-field diagonal.
  for (std::size_t i = 0; i < three.size(); ++i)
    if (three.coords[i].s1 == 4 && three.coords[i].s2 == 4) CHECK(three.roles[i] == NodeRole::far_field);

  CHECK(triangle_count(110) == 6105);
  CHECK(uniform_triangle(110, 8.0).size() == 6105);
  CHECK_THROWS_AS(uniform_triangle(1, 8.0), std::invalid_argument);
}

TEST_CASE("sinh axis") {
  for (int N1 : {2, 5, 40})
    for (double c : {0.1, 0.8, 3.0}) {
      const auto s = sinh_axis(N1, 1.0, c, 8.0);
      CHECK(s.front() == 0.0);
      CHECK(s.back() == 8.0);
      for (std::size_t i = 1; i < s.size(); ++i) CHECK(s[i] > s[i - 1]);
    }

  const auto s = sinh_axis(5, 1.0, 0.8, 8.0);
  std::size_t bracket = 0;
  while (!(s[bracket] <= 1.0 && s[bracket + 1] >= 1.0)) ++bracket;
  CHECK(s[bracket + 1] - s[bracket] < s[4] - s[3]);

  // The smallest gap brackets the strike.
  const auto fine = sinh_axis(60, 1.0, 0.8, 8.0);
  std::size_t best = 0;
  for (std::size_t i = 1; i + 1 < fine.size(); ++i)
    if (fine[i + 1] - fine[i] < fine[best + 1] - fine[best]) best = i;
  CHECK(fine[best] <= 1.0 + 1e-12);
  CHECK(fine[best + 1] >= 1.0 - (fine[best + 1] - fine[best]));

  CHECK_THROWS_AS(sinh_axis(5, 1.0, 0.0, 8.0), std::invalid_argument);
  CHECK_THROWS_AS(sinh_axis(5, 1.0, -1.0, 8.0), std::invalid_argument);
}

TEST_CASE("nonuniform triangle diagonals") {
  const int Ns = 12;
  const NodeSet ns = nonuniform_triangle(Ns, 1.0, 0.8, 8.0);
  const auto axis = sinh_axis(Ns, 1.0, 0.8, 8.0);
  REQUIRE(ns.size() == triangle_count(Ns));

  std::map<int, std::vector<Point>> diag;
  for (std::size_t i = 0; i < ns.size(); ++i) diag[ns.diag_index[i]].push_back(ns.coords[i]);
  CHECK(diag[1].size() == 1);
  CHECK(diag[1][0].s1 == 0.0);
  CHECK(diag[1][0].s2 == 0.0);
  REQUIRE(diag[2].size() == 2);
  CHECK(contains(ns, {axis[1], 0}));
  CHECK(contains(ns, {0, axis[1]}));
  for (int d = 1; d <= Ns; ++d) {
    REQUIRE(diag[d].size() == static_cast<std::size_t>(d));
    for (Point p : diag[d]) CHECK(std::abs(p.s1 + p.s2 - axis[d - 1]) <= 1e-14 * 8.0);
    // Evenly spaced along the diagonal.
    std::sort(diag[d].begin(), diag[d].end(), [](Point a, Point b) { return a.s2 < b.s2; });
    for (int k = 2; k < d; ++k) {
      const double a = std::hypot(diag[d][k].s1 - diag[d][k - 1].s1, diag[d][k].s2 - diag[d][k - 1].s2);
      const double b = std::hypot(diag[d][1].s1 - diag[d][0].s1, diag[d][1].s2 - diag[d][0].s2);
      CHECK(a == doctest::Approx(b).epsilon(1e-12));
    }
  }
}

TEST_CASE("role counts and triangle constraint") {
  for (int Ns : {3, 7, 40}) {
    const std::size_t N = triangle_count(Ns);
    for (const NodeSet& ns : {uniform_triangle(Ns, 8.0), nonuniform_triangle(Ns, 1.0, 0.8, 8.0)}) {
      auto counts = role_counts(ns);
      CHECK(counts[NodeRole::corner] == 1);
      CHECK(counts[NodeRole::far_field] == static_cast<std::size_t>(Ns));
      CHECK(counts[NodeRole::axis] == static_cast<std::size_t>(2 * (Ns - 2)));
      CHECK(counts[NodeRole::interior] == N - 3 * Ns + 3);
      for (std::size_t i = 0; i < ns.size(); ++i) {
        CHECK(ns.coords[i].s1 >= 0.0);
        CHECK(ns.coords[i].s2 >= 0.0);
        CHECK(ns.coords[i].s1 + ns.coords[i].s2 <= 8.0 * (1 + 1e-14));
        if (ns.roles[i] != NodeRole::far_field) CHECK(ns.coords[i].s1 + ns.coords[i].s2 < 8.0 * (1 - 1e-9));
      }
    }
  }
}

TEST_CASE("weak clustering reproduces the uniform layout") {
  const int Ns = 15;
  const NodeSet u = uniform_triangle(Ns, 8.0);
  const NodeSet n = nonuniform_triangle(Ns, 1.0, 1e6, 8.0);
  REQUIRE(u.size() == n.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    CHECK(std::abs(u.coords[i].s1 - n.coords[i].s1) <= 1e-6 * 8.0);
    CHECK(std::abs(u.coords[i].s2 - n.coords[i].s2) <= 1e-6 * 8.0);
  }
}

TEST_CASE("mirror map") {
  for (const NodeSet& ns : {uniform_triangle(17, 8.0), nonuniform_triangle(17, 1.0, 0.8, 8.0)}) {
    REQUIRE(ns.mirror.size() == ns.size());
    for (std::size_t i = 0; i < ns.size(); ++i) {
      const std::size_t m = ns.mirror[i];
      CHECK(ns.mirror[m] == i);
      CHECK(ns.coords[m].s1 == ns.coords[i].s2);
      CHECK(ns.coords[m].s2 == ns.coords[i].s1);
      CHECK(ns.roles[m] == ns.roles[i]);
      CHECK(ns.diag_index[m] == ns.diag_index[i]);
    }
  }
}

TEST_CASE("classification") {
  NodeSet ns;
  ns.coords = {{0, 0}, {8, 0}, {0, 4}, {2, 3}, {0, 8}};
  classify_boundary(ns, 8.0);
  CHECK(ns.roles[0] == NodeRole::corner);
  CHECK(ns.roles[1] == NodeRole::far_field);
  CHECK(ns.roles[2] == NodeRole::axis);
  CHECK(ns.roles[3] == NodeRole::interior);
  CHECK(ns.roles[4] == NodeRole::far_field);

  ns.coords.push_back({5, 5});
  CHECK_THROWS_AS(classify_boundary(ns, 8.0), std::invalid_argument);
  ns.coords.back() = {-1, 2};
  CHECK_THROWS_AS(classify_boundary(ns, 8.0), std::invalid_argument);
}

TEST_CASE("node table export") {
  std::ostringstream out;
  write_nodeset(out, uniform_triangle(3, 8.0));
  const std::string text = out.str();
  CHECK(text.rfind("s1,s2,role,diag_index\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 7);
  CHECK(text.find("0,0,corner,1") != std::string::npos);
  CHECK(text.find("4,4,far_field,3") != std::string::npos);
}
