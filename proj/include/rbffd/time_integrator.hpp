#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <vector>

#include "rbffd/sparse.hpp"

namespace rbffd {

// Variable-step BDF2 schedule whose implicit coefficient beta0 equals the
// first (BDF1) step length at every step, so I - dt1 W never changes.
// Index k = 0 is the BDF1 startup step (beta1 = 1, beta2 = 0, omega = 0).
struct TimeGrid {
  int M = 0;
  std::vector<double> dt;
  std::vector<double> omega;
  std::vector<double> beta0;
  std::vector<double> beta1;
  std::vector<double> beta2;
  std::vector<double> tau;  // time to maturity after each step; tau.back() == T

  double first_step() const { return dt.front(); }
};

TimeGrid build_time_grid(int M, double T);

// A = I - dt1 W.
CsrMatrix system_matrix(const CsrMatrix& W, const TimeGrid& grid);

struct DirichletData {
  std::vector<std::size_t> nodes;
  std::function<double(std::size_t node, double tau)> value;
};

struct StepRecord {
  int step = 0;
  double tau = 0.0;
  int iterations = 0;
  double residual = 0.0;
};

struct IntegrationResult {
  std::vector<double> u;
  std::vector<StepRecord> steps;
  int total_iterations() const;
};

class SolverError : public std::runtime_error {
 public:
  SolverError(int step, double residual);
  int step;
  double residual;
};

// Holds the constant system matrix and its ILU(0) preconditioner.
class TimeStepper {
 public:
  TimeStepper(const CsrMatrix& W, TimeGrid grid, GmresOptions opts = {});

  // Advances u0 to tau = T. Boundary values are written into the right-hand
  // side before every solve and into the solution after it.
  IntegrationResult integrate(std::span<const double> u0, const DirichletData& bc,
                              std::ostream* trace = nullptr) const;

  const CsrMatrix& matrix() const { return A_; }
  const TimeGrid& grid() const { return grid_; }

 private:
  TimeGrid grid_;
  CsrMatrix A_;
  IluFactors ilu_;
  GmresOptions opts_;
};

}  // namespace rbffd
