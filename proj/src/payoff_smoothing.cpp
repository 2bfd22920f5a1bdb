#include "rbffd/payoff_smoothing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/math/quadrature/gauss.hpp>

#include "rbffd/market_model.hpp"

namespace rbffd {

namespace {

// sgn(0) = 0; the matching term vanishes there anyway.
double signed_cube(double x) { return x * x * std::abs(x); }

template <class F>
double gauss(F&& f, double a, double b, GaussOrder order) {
  using boost::math::quadrature::gauss;
  if (b <= a) return 0.0;
  return order == GaussOrder::doubled ? gauss<double, 16>::integrate(f, a, b)
                                      : gauss<double, 8>::integrate(f, a, b);
}

// Splits [lo, hi] at the integers and at `extra`, returning sorted breakpoints.
std::vector<double> breakpoints(double lo, double hi, std::span<const double> extra) {
  std::vector<double> pts{lo, hi};
  for (int j = -3; j <= 3; ++j)
    if (j > lo && j < hi) pts.push_back(j);
  for (double e : extra)
    if (e > lo && e < hi) pts.push_back(e);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

}  // namespace

double phi4(double s) {
  if (std::abs(s) >= 3.0) return 0.0;
  return (-signed_cube(s - 3.0) - signed_cube(s + 3.0) + 12.0 * signed_cube(s - 2.0) +
          12.0 * signed_cube(s + 2.0) - 39.0 * signed_cube(s - 1.0) - 39.0 * signed_cube(s + 1.0) +
          56.0 * signed_cube(s)) /
         72.0;
}

double phi4_moment(int k) {
  if (k < 0) throw std::invalid_argument("payoff_smoothing: negative moment order");
  double sum = 0.0;
  for (int j = -3; j < 3; ++j)
    sum += gauss([k](double s) { return std::pow(s, k) * phi4(s); }, j, j + 1.0, GaussOrder::doubled);
  return sum;
}

double smoothed_ramp(double alpha, bool clip, GaussOrder order) {
  // The kink x2 = alpha - x1 crosses integer x2 = j at x1 = alpha - j.
  std::vector<double> kinks;
  if (clip)
    for (int j = -3; j <= 3; ++j) kinks.push_back(alpha - j);
  const std::vector<double> outer = breakpoints(-3.0, 3.0, kinks);

  auto inner = [&](double x1) {
    const double upper = clip ? std::min(3.0, alpha - x1) : 3.0;
    if (upper <= -3.0) return 0.0;
    const std::vector<double> cuts = breakpoints(-3.0, upper, {});
    double sum = 0.0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k)
      sum += gauss([&](double x2) { return phi4(x2) * (alpha - x1 - x2); }, cuts[k], cuts[k + 1], order);
    return phi4(x1) * sum;
  };

  double total = 0.0;
  for (std::size_t k = 0; k + 1 < outer.size(); ++k) total += gauss(inner, outer[k], outer[k + 1], order);
  return total;
}

double smoothed_payoff(double s1, double s2, double ds, double K, GaussOrder order) {
  if (!(ds > 0.0)) throw std::invalid_argument("payoff_smoothing: smoothing length must be positive");
  const double alpha = (s1 + s2 - 2.0 * K) / ds;
  // Outside this band the kernel window never reaches the kink.
  if (std::abs(alpha) >= 6.0) return payoff(s1, s2, K);
  return 0.5 * ds * smoothed_ramp(alpha, true, order);
}

SmoothedPayoff smooth_nodeset(const NodeSet& ns, std::span<const Stencil> stencils, double K) {
  const std::size_t n = ns.size();
  SmoothedPayoff out;
  out.values.resize(n);
  out.ds.assign(n, 0.0);

  std::vector<Point> pde_points;
  std::vector<double> pde_ds;
  for (const Stencil& st : stencils) {
    double best = std::numeric_limits<double>::infinity();
    const Point c = ns.coords[st.center];
    for (std::size_t j : st.neighbors)
      if (j != st.center) best = std::min(best, std::hypot(ns.coords[j].s1 - c.s1, ns.coords[j].s2 - c.s2));
    out.ds[st.center] = best;
    pde_points.push_back(c);
    pde_ds.push_back(best);
  }
  if (pde_points.empty()) throw std::invalid_argument("payoff_smoothing: no stencils supplied");

  const KdTree pde_tree(pde_points);
  for (std::size_t i = 0; i < n; ++i)
    if (ns.is_dirichlet(i)) out.ds[i] = pde_ds[pde_tree.nearest(ns.coords[i], 1).front()];

#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    const auto [s1, s2] = ns.coords[i];
    out.values[i] = smoothed_payoff(s1, s2, out.ds[i], K);
  }
  for (std::size_t i = 0; i < n; ++i)
    if (std::abs(ns.coords[i].s1 + ns.coords[i].s2 - 2.0 * K) < 6.0 * out.ds[i]) ++out.modified;
  return out;
}

}  // namespace rbffd
