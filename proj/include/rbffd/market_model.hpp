#pragma once

#include <algorithm>
#include <cmath>

namespace rbffd {

// Two-asset Black-Scholes market and basket call contract.
struct ModelParams {
  double r = 0.03;
  double sigma1 = 0.15;
  double sigma2 = 0.15;
  double rho = 0.5;
  double K = 1.0;
  double T = 0.2;
  double s_max = 8.0;

  // Throws std::invalid_argument when an invariant is violated.
  void validate() const;
};

// Coefficients of the spatial operator
//   L u = c11 u_11 + c22 u_22 + c12 u_12 + c1 u_1 + c2 u_2 + c0 u
// evaluated at a single point.
struct OperatorCoefficients {
  double c11 = 0.0;
  double c22 = 0.0;
  double c12 = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double c0 = 0.0;
};

// Basket call payoff max((s1 + s2) / 2 - K, 0).
inline double payoff(double s1, double s2, double K) {
  return std::max(0.5 * (s1 + s2) - K, 0.0);
}

OperatorCoefficients operator_coefficients(double s1, double s2, const ModelParams& p);

// Asymptotic value on the far-field diagonal; tau is time to maturity.
inline double far_field_value(double s1, double s2, double tau, const ModelParams& p) {
  return 0.5 * (s1 + s2) - p.K * std::exp(-p.r * tau);
}

// Value imposed at the origin for every tau.
constexpr double close_field_value() { return 0.0; }

struct ScaledProblem {
  ModelParams params;
  // Original s_max; u_orig(s) = factor * u_scaled(s / factor).
  double factor = 1.0;
};

// Rescale prices so that s_max becomes 1.
ScaledProblem scale_problem(const ModelParams& p);

// Closed-form Black-Scholes call on a single asset.
double bs_call_1d(double S, double K, double r, double sigma, double tau);

}  // namespace rbffd
