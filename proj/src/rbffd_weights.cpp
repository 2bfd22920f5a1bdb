#include "rbffd/rbffd_weights.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace rbffd {

PhsValues phs_derivatives(double d1, double d2, int q) {
  if (q < 3) throw std::invalid_argument("rbffd_weights: PHS exponent q must be at least 3");
  const int beta = 2 * q - 1;
  const double r2 = d1 * d1 + d2 * d2;
  PhsValues v;
  if (r2 == 0.0) return v;
  const double r = std::sqrt(r2);
  const double rb4 = std::pow(r, beta - 4);  // r^(beta-4)
  const double rb2 = rb4 * r2;
  v.phi = rb2 * r2;
  v.d1 = beta * rb2 * d1;
  v.d2 = beta * rb2 * d2;
  const double cross = beta * (beta - 2) * rb4;
  v.d11 = beta * rb2 + cross * d1 * d1;
  v.d22 = beta * rb2 + cross * d2 * d2;
  v.d12 = cross * d1 * d2;
  return v;
}

std::vector<std::pair<int, int>> monomial_exponents(int p) {
  if (p < 0) throw std::invalid_argument("rbffd_weights: polynomial degree must be non-negative");
  std::vector<std::pair<int, int>> e;
  e.reserve(static_cast<std::size_t>(monomial_count(p)));
  for (int deg = 0; deg <= p; ++deg)
    for (int a = deg; a >= 0; --a) e.emplace_back(a, deg - a);
  return e;
}

namespace {

double ipow(double x, int n) {
  double out = 1.0;
  for (int k = 0; k < n; ++k) out *= x;
  return out;
}

}  // namespace

LocalSystem::LocalSystem(std::span<const Point> points, Point center, int p, int q)
    : exponents_(monomial_exponents(p)), q_(q), radius_(0.0) {
  if (q < 3) throw std::invalid_argument("rbffd_weights: PHS exponent q must be at least 3");
  const auto m = static_cast<Eigen::Index>(points.size());
  const auto nu = static_cast<Eigen::Index>(exponents_.size());
  if (m < nu) throw std::invalid_argument("rbffd_weights: stencil smaller than the polynomial space");

  for (const auto& pt : points)
    radius_ = std::max(radius_, std::hypot(pt.s1 - center.s1, pt.s2 - center.s2));
  if (radius_ == 0.0) radius_ = 1.0;
  local_.reserve(points.size());
  for (const auto& pt : points) local_.push_back({(pt.s1 - center.s1) / radius_, (pt.s2 - center.s2) / radius_});

  matrix_ = Eigen::MatrixXd::Zero(m + nu, m + nu);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < i; ++j) {
      const double v = phs_derivatives(local_[i].s1 - local_[j].s1, local_[i].s2 - local_[j].s2, q).phi;
      matrix_(i, j) = v;
      matrix_(j, i) = v;
    }
    for (Eigen::Index k = 0; k < nu; ++k) {
      const auto [a, b] = exponents_[static_cast<std::size_t>(k)];
      const double v = ipow(local_[i].s1, a) * ipow(local_[i].s2, b);
      matrix_(i, m + k) = v;
      matrix_(m + k, i) = v;
    }
  }
  lu_.compute(matrix_);
  const double rc = lu_.rcond();
  condition_ = rc > 0.0 ? 1.0 / rc : std::numeric_limits<double>::infinity();
}

Eigen::VectorXd LocalSystem::derivative_rhs(Derivative d) const {
  const auto m = static_cast<Eigen::Index>(local_.size());
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m + static_cast<Eigen::Index>(exponents_.size()));
  for (Eigen::Index k = 0; k < m; ++k) {
    // Displacement from node k to the center, which sits at the origin.
    const PhsValues v = phs_derivatives(-local_[k].s1, -local_[k].s2, q_);
    switch (d) {
      case Derivative::d1: rhs(k) = v.d1; break;
      case Derivative::d2: rhs(k) = v.d2; break;
      case Derivative::d11: rhs(k) = v.d11; break;
      case Derivative::d22: rhs(k) = v.d22; break;
      case Derivative::d12: rhs(k) = v.d12; break;
    }
  }
  // Derivatives of monomials at the origin survive only for one exponent each.
  std::pair<int, int> hit;
  double value = 1.0;
  switch (d) {
    case Derivative::d1: hit = {1, 0}; break;
    case Derivative::d2: hit = {0, 1}; break;
    case Derivative::d11: hit = {2, 0}; value = 2.0; break;
    case Derivative::d22: hit = {0, 2}; value = 2.0; break;
    case Derivative::d12: hit = {1, 1}; break;
  }
  for (std::size_t k = 0; k < exponents_.size(); ++k)
    if (exponents_[k] == hit) rhs(m + static_cast<Eigen::Index>(k)) = value;
  return rhs;
}

Eigen::VectorXd LocalSystem::evaluation_rhs() const {
  const auto m = static_cast<Eigen::Index>(local_.size());
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m + static_cast<Eigen::Index>(exponents_.size()));
  for (Eigen::Index k = 0; k < m; ++k) rhs(k) = phs_derivatives(-local_[k].s1, -local_[k].s2, q_).phi;
  rhs(m) = 1.0;  // the constant monomial; all others vanish at the origin
  return rhs;
}

Eigen::MatrixXd LocalSystem::solve(const Eigen::MatrixXd& rhs) const { return lu_.solve(rhs); }

LocalWeights local_weights(std::span<const Point> points, Point center, int p, int q) {
  const LocalSystem sys(points, center, p, q);
  if (!(sys.condition() < kConditionFailure)) {
    std::ostringstream msg;
    msg << "rbffd_weights: singular local system (condition estimate " << sys.condition() << ")";
    throw std::runtime_error(msg.str());
  }

  const auto m = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd rhs(sys.matrix().rows(), 5);
  for (Derivative d : kAllDerivatives) rhs.col(static_cast<int>(d)) = sys.derivative_rhs(d);
  const Eigen::MatrixXd sol = sys.solve(rhs);
  if (!sol.allFinite()) throw std::runtime_error("rbffd_weights: non-finite weights");

  LocalWeights out;
  out.condition = sys.condition();
  out.w = sol.topRows(m);
  for (Derivative d : kAllDerivatives)
    out.w.col(static_cast<int>(d)) /= std::pow(sys.radius(), derivative_order(d));
  return out;
}

AssembledOperator assemble_W(const NodeSet& ns, std::span<const Stencil> stencils, const ModelParams& model,
                             int p, int q) {
  const std::size_t n = ns.size();
  // On mirrored node sets the stencil of a mirrored node is the mirror image
  // of the original, so its weights follow by swapping s1 and s2 derivatives.
  const bool mirrored = ns.mirror.size() == n;
  std::vector<std::ptrdiff_t> stencil_of(n, -1);
  for (std::size_t s = 0; s < stencils.size(); ++s) stencil_of[stencils[s].center] = static_cast<std::ptrdiff_t>(s);
  auto mirror_of = [&](const std::vector<std::size_t>& members) {
    std::vector<std::size_t> image;
    image.reserve(members.size());
    for (std::size_t j : members) image.push_back(ns.mirror[j]);
    return image;
  };
  auto same_set = [](std::vector<std::size_t> a, std::vector<std::size_t> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    return a == b;
  };
  std::vector<std::ptrdiff_t> source(stencils.size(), -1);
  if (mirrored)
    for (std::size_t s = 0; s < stencils.size(); ++s) {
      const std::size_t c = stencils[s].center;
      const std::size_t mc = ns.mirror[c];
      if (mc < c && stencil_of[mc] >= 0 &&
          same_set(stencils[s].neighbors, mirror_of(stencils[stencil_of[mc]].neighbors)))
        source[s] = stencil_of[mc];
    }

  std::vector<LocalWeights> local(stencils.size());
  std::vector<std::string> errors(stencils.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t s = 0; s < static_cast<std::ptrdiff_t>(stencils.size()); ++s) {
    if (source[s] >= 0) continue;
    const Stencil& st = stencils[s];
    std::vector<Point> pts;
    pts.reserve(st.neighbors.size());
    for (std::size_t j : st.neighbors) pts.push_back(ns.coords[j]);
    try {
      local[s] = local_weights(pts, ns.coords[st.center], p, q);
    } catch (const std::exception& e) {
      errors[s] = e.what();
    }
  }
  for (std::size_t s = 0; s < stencils.size(); ++s)
    if (!errors[s].empty()) {
      std::ostringstream msg;
      msg << errors[s] << " at node " << stencils[s].center;
      throw std::runtime_error(msg.str());
    }

  auto swapped = [](const LocalWeights& lw) {
    LocalWeights out = lw;
    out.w.col(0) = lw.w.col(1);
    out.w.col(1) = lw.w.col(0);
    out.w.col(2) = lw.w.col(3);
    out.w.col(3) = lw.w.col(2);
    return out;
  };

  std::vector<std::vector<Triplet>> rows(stencils.size());
  std::vector<double> conditions(stencils.size(), 0.0);
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t s = 0; s < static_cast<std::ptrdiff_t>(stencils.size()); ++s) {
    const Stencil& st = stencils[s];
    const Point c = ns.coords[st.center];
    const OperatorCoefficients k = operator_coefficients(c.s1, c.s2, model);
    auto add_row = [&](const std::vector<std::size_t>& members, const LocalWeights& lw, double scale) {
      for (std::size_t j = 0; j < members.size(); ++j) {
        const auto jj = static_cast<Eigen::Index>(j);
        double v = k.c11 * lw.w(jj, 2) + k.c22 * lw.w(jj, 3) + k.c12 * lw.w(jj, 4) + k.c1 * lw.w(jj, 0) +
                   k.c2 * lw.w(jj, 1);
        if (members[j] == st.center) v += k.c0;
        rows[s].push_back({st.center, members[j], scale * v});
      }
      conditions[s] = lw.condition;
    };
    if (source[s] >= 0) {
      add_row(mirror_of(stencils[source[s]].neighbors), swapped(local[source[s]]), 1.0);
    } else if (mirrored && ns.mirror[st.center] == st.center) {
      // Center on the symmetry line: average the stencil with its mirror
      // image, which also covers stencils cut through a mirrored pair.
      add_row(st.neighbors, local[s], 0.5);
      add_row(mirror_of(st.neighbors), swapped(local[s]), 0.5);
    } else {
      add_row(st.neighbors, local[s], 1.0);
    }
  }

  AssembledOperator out;
  std::vector<Triplet> triplets;
  triplets.reserve(stencils.size() * (stencils.empty() ? 0 : stencils[0].neighbors.size()) + n);
  std::vector<bool> owned(n, false);
  for (std::size_t s = 0; s < stencils.size(); ++s) {
    const Stencil& st = stencils[s];
    owned[st.center] = true;
    triplets.insert(triplets.end(), rows[s].begin(), rows[s].end());
    out.max_condition = std::max(out.max_condition, conditions[s]);
    if (conditions[s] > kConditionWarning) out.ill_conditioned.push_back(st.center);
  }
  for (std::size_t i = 0; i < n; ++i)
    if (!owned[i]) triplets.push_back({i, i, 0.0});
  out.W = csr_from_triplets(n, n, std::move(triplets));
  return out;
}

void write_triplets(std::ostream& out, const CsrMatrix& A) {
  out << std::setprecision(17);
  for (std::size_t i = 0; i < A.rows; ++i)
    for (std::size_t k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k)
      out << i << ' ' << A.col_idx[k] << ' ' << A.values[k] << '\n';
}

}  // namespace rbffd
