#include "rbffd/market_model.hpp"

#include <stdexcept>

namespace rbffd {

void ModelParams::validate() const {
  if (!(sigma1 > 0.0) || !(sigma2 > 0.0))
    throw std::invalid_argument("market_model: volatilities must be positive");
  if (!(std::abs(rho) <= 1.0))
    throw std::invalid_argument("market_model: |rho| must not exceed 1");
  if (!(K > 0.0)) throw std::invalid_argument("market_model: strike must be positive");
  if (!(T > 0.0)) throw std::invalid_argument("market_model: maturity must be positive");
  if (!(s_max > K)) throw std::invalid_argument("market_model: s_max must exceed the strike");
}

OperatorCoefficients operator_coefficients(double s1, double s2, const ModelParams& p) {
  OperatorCoefficients c;
  c.c11 = 0.5 * p.sigma1 * p.sigma1 * s1 * s1;
  c.c22 = 0.5 * p.sigma2 * p.sigma2 * s2 * s2;
  c.c12 = p.rho * p.sigma1 * p.sigma2 * s1 * s2;
  c.c1 = p.r * s1;
  c.c2 = p.r * s2;
  c.c0 = -p.r;
  return c;
}

ScaledProblem scale_problem(const ModelParams& p) {
  p.validate();
  ScaledProblem out;
  out.factor = p.s_max;
  out.params = p;
  out.params.K = p.K / p.s_max;
  out.params.s_max = 1.0;
  return out;
}

double bs_call_1d(double S, double K, double r, double sigma, double tau) {
  if (S <= 0.0) return 0.0;
  if (tau <= 0.0) return std::max(S - K, 0.0);
  const double vol = sigma * std::sqrt(tau);
  const double d1 = (std::log(S / K) + (r + 0.5 * sigma * sigma) * tau) / vol;
  const double d2 = d1 - vol;
  auto ncdf = [](double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); };
  return S * ncdf(d1) - K * std::exp(-r * tau) * ncdf(d2);
}

}  // namespace rbffd
