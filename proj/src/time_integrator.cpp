#include "rbffd/time_integrator.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

namespace rbffd {

TimeGrid build_time_grid(int M, double T) {
  if (M < 1) throw std::invalid_argument("time_integrator: need at least one step");
  if (!(T > 0.0)) throw std::invalid_argument("time_integrator: horizon must be positive");

  TimeGrid g;
  g.M = M;
  g.omega.assign(M, 0.0);
  // Keeping beta0 fixed gives omega^2 + (1 - 2c) omega - c = 0 where c is the
  // previous step's beta0 / dt ratio; BDF1 has c = 1.
  double c = 1.0;
  for (int k = 1; k < M; ++k) {
    const double b = 1.0 - 2.0 * c;
    const double w = 0.5 * (-b + std::sqrt(b * b + 4.0 * c));
    g.omega[k] = w;
    c = (1.0 + w) / (1.0 + 2.0 * w);
  }

  // dt_k = dt_1 * prod(omega_2..omega_k)
  std::vector<double> rel(M, 1.0);
  double total = 1.0;
  for (int k = 1; k < M; ++k) {
    rel[k] = rel[k - 1] * g.omega[k];
    total += rel[k];
  }
  const double dt1 = T / total;

  g.dt.resize(M);
  g.beta0.resize(M);
  g.beta1.resize(M);
  g.beta2.resize(M);
  g.tau.resize(M);
  double tau = 0.0;
  for (int k = 0; k < M; ++k) {
    g.dt[k] = dt1 * rel[k];
    if (k == 0) {
      g.beta0[k] = dt1;
      g.beta1[k] = 1.0;
      g.beta2[k] = 0.0;
    } else {
      const double w = g.omega[k];
      g.beta0[k] = g.dt[k] * (1.0 + w) / (1.0 + 2.0 * w);
      g.beta1[k] = (1.0 + w) * (1.0 + w) / (1.0 + 2.0 * w);
      g.beta2[k] = w * w / (1.0 + 2.0 * w);
    }
    tau += g.dt[k];
    g.tau[k] = tau;
  }
  g.tau.back() = T;
  return g;
}

CsrMatrix system_matrix(const CsrMatrix& W, const TimeGrid& grid) {
  if (W.rows != W.cols) throw std::invalid_argument("time_integrator: W must be square");
  const double dt1 = grid.first_step();
  std::vector<Triplet> t;
  t.reserve(W.nnz() + W.rows);
  for (std::size_t i = 0; i < W.rows; ++i) {
    t.push_back({i, i, 1.0});
    for (std::size_t k = W.row_ptr[i]; k < W.row_ptr[i + 1]; ++k) t.push_back({i, W.col_idx[k], -dt1 * W.values[k]});
  }
  return csr_from_triplets(W.rows, W.cols, std::move(t));
}

int IntegrationResult::total_iterations() const {
  int n = 0;
  for (const auto& s : steps) n += s.iterations;
  return n;
}

SolverError::SolverError(int step_, double residual_)
    : std::runtime_error("time_integrator: linear solve did not converge at step " + std::to_string(step_) +
                         " (relative residual " + std::to_string(residual_) + ")"),
      step(step_),
      residual(residual_) {}

TimeStepper::TimeStepper(const CsrMatrix& W, TimeGrid grid, GmresOptions opts)
    : grid_(std::move(grid)), A_(system_matrix(W, grid_)), ilu_(A_), opts_(opts) {}

IntegrationResult TimeStepper::integrate(std::span<const double> u0, const DirichletData& bc,
                                         std::ostream* trace) const {
  const std::size_t n = A_.rows;
  if (u0.size() != n) throw std::invalid_argument("time_integrator: initial vector has wrong length");

  IntegrationResult out;
  std::vector<double> prev2(u0.begin(), u0.end());
  std::vector<double> prev1 = prev2;
  std::vector<double> rhs(n);
  std::vector<double> x(n);

  for (int k = 0; k < grid_.M; ++k) {
    const double tau = grid_.tau[k];
    for (std::size_t i = 0; i < n; ++i) rhs[i] = grid_.beta1[k] * prev1[i] - grid_.beta2[k] * prev2[i];
    for (std::size_t node : bc.nodes) rhs[node] = bc.value(node, tau);

    x = prev1;  // warm start from the previous level
    const SolveStats stats = gmres(A_, rhs, x, &ilu_, opts_);
    if (!stats.converged) throw SolverError(k + 1, stats.residual);
    for (std::size_t node : bc.nodes) x[node] = bc.value(node, tau);

    out.steps.push_back({k + 1, tau, stats.iterations, stats.residual});
    if (trace) *trace << k + 1 << ' ' << tau << ' ' << stats.iterations << ' ' << stats.residual << '\n';
    prev2.swap(prev1);
    prev1.swap(x);
  }
  out.u = std::move(prev1);
  return out;
}

}  // namespace rbffd
