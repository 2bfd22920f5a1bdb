#include "rbffd/harness.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>
#include <string>

#include "rbffd/payoff_smoothing.hpp"
#include "rbffd/rbffd_weights.hpp"
#include "rbffd/stencil_builder.hpp"
#include "rbffd/time_integrator.hpp"

namespace rbffd {

std::string_view to_string(Layout layout) { return layout == Layout::uniform ? "uniform" : "nonuniform"; }

std::string_view to_string(Method method) { return method == Method::rbffd_phs ? "RBF-FD-PHS" : "FD"; }

Layout parse_layout(std::string_view text) {
  if (text == "uniform") return Layout::uniform;
  if (text == "nonuniform") return Layout::nonuniform;
  throw std::invalid_argument("harness: unknown layout '" + std::string(text) + "'");
}

Method parse_method(std::string_view text) {
  if (text == "rbffd" || text == "RBF-FD-PHS") return Method::rbffd_phs;
  if (text == "fd" || text == "FD") return Method::fd;
  throw std::invalid_argument("harness: unknown method '" + std::string(text) + "'");
}

std::size_t RunConfig::stencil_size() const { return default_stencil_size(p); }

void RunConfig::validate() const {
  model.validate();
  if (Ns < 2) throw std::invalid_argument("harness: Ns must be at least 2");
  if (p < 0) throw std::invalid_argument("harness: polynomial degree must be non-negative");
  if (q < 3) throw std::invalid_argument("harness: PHS exponent q must be at least 3");
  if (!(c > 0.0)) throw std::invalid_argument("harness: clustering constant must be positive");
  if (M < 0) throw std::invalid_argument("harness: step count must be non-negative");
  if (stencil_size() > triangle_count(Ns))
    throw std::invalid_argument("harness: stencil size " + std::to_string(stencil_size()) + " exceeds node count " +
                                std::to_string(triangle_count(Ns)));
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

PricingResult run_pricing(const RunConfig& cfg) {
  cfg.validate();
  const ScaledProblem scaled = scale_problem(cfg.model);
  const ModelParams& sp = scaled.params;
  const double factor = scaled.factor;

  PricingResult out;
  auto t0 = Clock::now();
  NodeSet nodes = cfg.layout == Layout::uniform ? uniform_triangle(cfg.Ns, sp.s_max)
                                                : nonuniform_triangle(cfg.Ns, sp.K, cfg.c / factor, sp.s_max);
  const std::vector<Stencil> stencils = build_stencils(nodes, cfg.stencil_size());
  out.timing.stencils = seconds_since(t0);

  t0 = Clock::now();
  const AssembledOperator op = assemble_W(nodes, stencils, sp, cfg.p, cfg.q);
  out.timing.weights = seconds_since(t0);
  out.max_condition = op.max_condition;
  out.ill_conditioned = op.ill_conditioned.size();

  t0 = Clock::now();
  std::vector<double> u0(nodes.size());
  if (cfg.smoothing) {
    SmoothedPayoff sm = smooth_nodeset(nodes, stencils, sp.K);
    u0 = std::move(sm.values);
    out.smoothed_nodes = sm.modified;
  } else {
    for (std::size_t i = 0; i < nodes.size(); ++i) u0[i] = payoff(nodes.coords[i].s1, nodes.coords[i].s2, sp.K);
  }
  out.timing.smoothing = seconds_since(t0);

  t0 = Clock::now();
  DirichletData bc;
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (nodes.is_dirichlet(i)) bc.nodes.push_back(i);
  bc.value = [&](std::size_t i, double tau) {
    if (nodes.roles[i] == NodeRole::corner) return close_field_value();
    return far_field_value(nodes.coords[i].s1, nodes.coords[i].s2, tau, sp);
  };
  const TimeStepper stepper(op.W, build_time_grid(cfg.steps(), sp.T), cfg.gmres);
  IntegrationResult integ = stepper.integrate(u0, bc);
  out.timing.stepping = seconds_since(t0);
  out.iterations = integ.total_iterations();
  for (const auto& s : integ.steps) out.max_step_iterations = std::max(out.max_step_iterations, s.iterations);

  for (auto& p : nodes.coords) {
    p.s1 *= factor;
    p.s2 *= factor;
  }
  nodes.s_max = factor;
  for (double& v : u0) v *= factor;
  for (double& v : integ.u) v *= factor;
  out.nodes = std::move(nodes);
  out.initial = std::move(u0);
  out.u = std::move(integ.u);
  return out;
}

CartesianGrid build_reference(const RunConfig& cfg) {
  const ScaledProblem scaled = scale_problem(cfg.model);
  const ReferenceSettings& ref = cfg.reference;
  const int M = ref.M > 0 ? ref.M : ref.n - 1;
  CartesianGrid fine = reference_cache(scaled.params, ref.n, M, ref.cache_dir).grid;

  if (ref.richardson) {
    if (ref.n % 2 == 0 || M % 2 != 0)
      throw std::invalid_argument("harness: Richardson reference needs odd n and even M");
    const int nc = (ref.n + 1) / 2;
    const CartesianGrid coarse = reference_cache(scaled.params, nc, M / 2, ref.cache_dir).grid;
    // Difference on the coarse points, interpolated back to the fine grid.
    CartesianGrid diff = coarse;
    for (int j = 0; j < nc; ++j)
      for (int i = 0; i < nc; ++i) diff.at(i, j) = fine.at(2 * i, 2 * j) - coarse.at(i, j);
    const double h = fine.h();
    for (int j = 0; j < fine.n; ++j)
      for (int i = 0; i < fine.n; ++i) fine.at(i, j) += interpolate(diff, {i * h, j * h}) / 3.0;
  }

  fine.s_max *= scaled.factor;
  for (double& v : fine.values) v *= scaled.factor;
  return fine;
}

bool in_error_region(Point p, double K) {
  const double lo = K / 3.0;
  const double hi = 5.0 * K / 3.0;
  return p.s1 >= lo && p.s1 <= hi && p.s2 >= lo && p.s2 <= hi;
}

ErrorField error_metrics(std::span<const double> u, const NodeSet& nodes, const CartesianGrid& reference,
                         double K) {
  if (u.size() != nodes.size()) throw std::invalid_argument("harness: solution and node set sizes differ");
  ErrorField out;
  out.du.resize(u.size());
  out.in_region.resize(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    out.du[i] = std::abs(u[i] - interpolate(reference, nodes.coords[i]));
    out.in_region[i] = in_error_region(nodes.coords[i], K);
    if (out.in_region[i]) {
      out.du_max = std::max(out.du_max, out.du[i]);
      ++out.count;
    }
  }
  if (out.count == 0) throw std::invalid_argument("harness: no nodes inside the error region");
  return out;
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw std::invalid_argument("harness: need at least two points to fit");
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double rss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = y[i] - (fit.intercept + fit.slope * x[i]);
    rss += e * e;
  }
  fit.residual = std::sqrt(rss);
  return fit;
}

namespace {

ConvergenceRow fd_row(const RunConfig& cfg, int Ns, const CartesianGrid& reference) {
  const ScaledProblem scaled = scale_problem(cfg.model);
  const auto t0 = Clock::now();
  const CartesianGrid g = fd_solve(scaled.params, Ns, cfg.M > 0 ? cfg.M : Ns, FdOptions{cfg.gmres, cfg.smoothing});
  ConvergenceRow row;
  row.cpu_seconds = seconds_since(t0);
  row.Ns = Ns;
  row.N = static_cast<std::size_t>(Ns) * Ns;
  row.h_hat = 1.0 / std::sqrt(static_cast<double>(row.N));
  const double h = g.h() * scaled.factor;
  for (int j = 0; j < Ns; ++j)
    for (int i = 0; i < Ns; ++i) {
      const Point p{i * h, j * h};
      if (!in_error_region(p, cfg.model.K)) continue;
      row.du_max = std::max(row.du_max, std::abs(g.at(i, j) * scaled.factor - interpolate(reference, p)));
    }
  return row;
}

}  // namespace

ConvergenceReport convergence_sweep(const RunConfig& cfg, std::span<const int> Ns_list,
                                    const CartesianGrid& reference, Method method) {
  if (Ns_list.size() < 3) throw std::invalid_argument("harness: a sweep needs at least three resolutions");
  ConvergenceReport report;
  report.method = method;
  report.layout = cfg.layout;
  report.smoothed = cfg.smoothing;

  for (int Ns : Ns_list) {
    if (method == Method::fd) {
      report.rows.push_back(fd_row(cfg, Ns, reference));
      continue;
    }
    RunConfig run = cfg;
    run.Ns = Ns;
    const PricingResult res = run_pricing(run);
    const ErrorField err = error_metrics(res.u, res.nodes, reference, cfg.model.K);
    ConvergenceRow row;
    row.Ns = Ns;
    row.N = res.nodes.size();
    row.h_hat = 1.0 / std::sqrt(static_cast<double>(row.N));
    row.du_max = err.du_max;
    row.cpu_seconds = res.timing.total();
    row.iterations = res.iterations;
    report.rows.push_back(row);
  }

  std::vector<double> lx;
  std::vector<double> ly;
  for (const auto& row : report.rows) {
    lx.push_back(std::log(row.h_hat));
    ly.push_back(std::log(row.du_max));
  }
  const LineFit fit = fit_line(lx, ly);
  report.slope = fit.slope;
  report.intercept = fit.intercept;
  report.residual = fit.residual;
  return report;
}

void write_convergence_csv(std::ostream& out, const ConvergenceReport& report, bool header) {
  if (header) out << "method,layout,smoothed,N_s,N,h_hat,du_max,cpu_seconds\n";
  out << std::setprecision(10);
  for (const auto& row : report.rows)
    out << to_string(report.method) << ',' << to_string(report.layout) << ',' << (report.smoothed ? 1 : 0) << ','
        << row.Ns << ',' << row.N << ',' << row.h_hat << ',' << row.du_max << ',' << row.cpu_seconds << '\n';
}

std::size_t emit_heatmap_data(std::ostream& out, std::span<const double> du, const NodeSet& nodes, double K,
                              Bounds bounds) {
  const double lo = K / 3.0;
  const double hi = 5.0 * K / 3.0;
  out << std::setprecision(17);
  for (const auto& [a, b] : {std::pair{lo, lo}, {hi, lo}, {hi, hi}, {lo, hi}})
    out << "# omega_hat_corner," << a << ',' << b << '\n';
  out << "s1,s2,du\n";
  std::size_t rows = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto [s1, s2] = nodes.coords[i];
    if (s1 < bounds.lo || s1 > bounds.hi || s2 < bounds.lo || s2 > bounds.hi) continue;
    out << s1 << ',' << s2 << ',' << du[i] << '\n';
    ++rows;
  }
  return rows;
}

void write_solution_csv(std::ostream& out, const PricingResult& result) {
  out << "s1,s2,role,u\n" << std::setprecision(17);
  for (std::size_t i = 0; i < result.nodes.size(); ++i)
    out << result.nodes.coords[i].s1 << ',' << result.nodes.coords[i].s2 << ',' << to_string(result.nodes.roles[i])
        << ',' << result.u[i] << '\n';
}

}  // namespace rbffd
