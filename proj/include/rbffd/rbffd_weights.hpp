#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "rbffd/market_model.hpp"
#include "rbffd/node_layout.hpp"
#include "rbffd/sparse.hpp"
#include "rbffd/stencil_builder.hpp"

namespace rbffd {

// Polyharmonic spline phi(r) = r^(2q-1) and its partial derivatives with
// respect to the evaluation point, at displacement (d1, d2).
struct PhsValues {
  double phi = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
  double d11 = 0.0;
  double d22 = 0.0;
  double d12 = 0.0;
};

PhsValues phs_derivatives(double d1, double d2, int q);

// Number of bivariate monomials of total degree <= p.
constexpr int monomial_count(int p) { return (p + 2) * (p + 1) / 2; }

// Exponent pairs (a, b), a + b <= p, in graded order: 1, x, y, x^2, xy, y^2, ...
std::vector<std::pair<int, int>> monomial_exponents(int p);

// Stencil size used throughout: five times the polynomial space dimension.
constexpr std::size_t default_stencil_size(int p) { return 5 * static_cast<std::size_t>(monomial_count(p)); }

enum class Derivative { d1 = 0, d2, d11, d22, d12 };
inline constexpr std::array<Derivative, 5> kAllDerivatives{Derivative::d1, Derivative::d2, Derivative::d11,
                                                           Derivative::d22, Derivative::d12};
constexpr int derivative_order(Derivative d) { return d == Derivative::d1 || d == Derivative::d2 ? 1 : 2; }

// The local RBF + polynomial saddle-point system of one stencil, assembled
// in coordinates shifted to the center and scaled by the stencil radius,
// and factored once.
class LocalSystem {
 public:
  LocalSystem(std::span<const Point> points, Point center, int p, int q);

  // Right-hand side for a pure derivative, in scaled coordinates.
  Eigen::VectorXd derivative_rhs(Derivative d) const;
  // Right-hand side for point evaluation at the center.
  Eigen::VectorXd evaluation_rhs() const;

  // Full solution (weights followed by polynomial multipliers).
  Eigen::MatrixXd solve(const Eigen::MatrixXd& rhs) const;

  const Eigen::MatrixXd& matrix() const { return matrix_; }
  double radius() const { return radius_; }
  // Reciprocal-condition estimate of the factored matrix, inverted.
  double condition() const { return condition_; }

 private:
  std::vector<Point> local_;  // shifted and scaled coordinates
  std::vector<std::pair<int, int>> exponents_;
  int q_;
  double radius_;
  Eigen::MatrixXd matrix_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
  double condition_;
};

struct LocalWeights {
  // Columns ordered as Derivative; rows follow the stencil members.
  Eigen::Matrix<double, Eigen::Dynamic, 5> w;
  double condition = 0.0;

  auto column(Derivative d) const { return w.col(static_cast<int>(d)); }
};

// Throws std::runtime_error when the local system is numerically singular.
LocalWeights local_weights(std::span<const Point> points, Point center, int p, int q);

struct AssembledOperator {
  // PDE rows carry m weights; Dirichlet rows hold a single explicit zero on
  // the diagonal. A node on the symmetry line of a mirrored node set gets the
  // mean of the rows from its stencil and from the stencil's mirror image.
  CsrMatrix W;
  double max_condition = 0.0;
  std::vector<std::size_t> ill_conditioned;  // nodes above the warning threshold
};

inline constexpr double kConditionWarning = 1e14;
// Above this the local system is treated as singular.
inline constexpr double kConditionFailure = 1e16;

AssembledOperator assemble_W(const NodeSet& ns, std::span<const Stencil> stencils, const ModelParams& model,
                             int p, int q);

// One "row col value" line per stored entry.
void write_triplets(std::ostream& out, const CsrMatrix& A);

}  // namespace rbffd
