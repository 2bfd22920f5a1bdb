// Command-line front end: price, converge, reference, heatmap, kernel.

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rbffd/fd_reference.hpp"
#include "rbffd/harness.hpp"
#include "rbffd/payoff_smoothing.hpp"

using namespace rbffd;

namespace {

struct Options {
  RunConfig cfg;
  std::string layout = "uniform";
  std::string cache_dir = "fd_cache";
  std::string out;
  bool richardson = true;

  // converge
  std::vector<int> Ns_list{20, 28, 40, 56, 80};
  std::string method = "rbffd";

  // kernel
  int samples = 121;
};

// Writes to the --out file, or stdout when none is given.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw std::runtime_error("cli: cannot open " + path);
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

RunConfig finish(Options& o) {
  o.cfg.layout = parse_layout(o.layout);
  o.cfg.reference.cache_dir = o.cache_dir;
  o.cfg.reference.richardson = o.richardson;
  o.cfg.validate();
  return o.cfg;
}

void print_timing(const PricingResult& r) {
  std::fprintf(stderr, "nodes %zu, setup %.3f s (stencils %.3f, weights %.3f, smoothing %.3f), stepping %.3f s\n",
               r.nodes.size(), r.timing.setup(), r.timing.stencils, r.timing.weights, r.timing.smoothing,
               r.timing.stepping);
  std::fprintf(stderr, "gmres iterations %d (max %d per step), max local condition %.3e", r.iterations,
               r.max_step_iterations, r.max_condition);
  if (r.ill_conditioned) std::fprintf(stderr, ", %zu stencils above warning threshold", r.ill_conditioned);
  std::fprintf(stderr, "\n");
}

int cmd_price(Options& o) {
  const RunConfig cfg = finish(o);
  const PricingResult res = run_pricing(cfg);
  print_timing(res);
  Output out(o.out);
  write_solution_csv(out.stream(), res);
  return 0;
}

int cmd_converge(Options& o) {
  const RunConfig cfg = finish(o);
  const CartesianGrid ref = build_reference(cfg);
  const ConvergenceReport rep = convergence_sweep(cfg, o.Ns_list, ref, parse_method(o.method));
  Output out(o.out);
  write_convergence_csv(out.stream(), rep);
  std::fprintf(stderr, "fitted slope %.4f (residual %.3e)\n", rep.slope, rep.residual);
  return 0;
}

int cmd_reference(Options& o) {
  const RunConfig cfg = finish(o);
  const CartesianGrid ref = build_reference(cfg);
  std::fprintf(stderr, "reference n=%d, value at (K, K) = %.10f\n", ref.n,
               interpolate(ref, {cfg.model.K, cfg.model.K}));
  if (!o.out.empty()) {
    Output out(o.out);
    auto& s = out.stream();
    s << "s1,s2,u\n" << std::setprecision(17);
    for (int j = 0; j < ref.n; ++j)
      for (int i = 0; i < ref.n; ++i) s << i * ref.h() << ',' << j * ref.h() << ',' << ref.at(i, j) << '\n';
  }
  return 0;
}

int cmd_heatmap(Options& o) {
  const RunConfig cfg = finish(o);
  const CartesianGrid ref = build_reference(cfg);
  const PricingResult res = run_pricing(cfg);
  const ErrorField err = error_metrics(res.u, res.nodes, ref, cfg.model.K);
  Output out(o.out);
  emit_heatmap_data(out.stream(), err.du, res.nodes, cfg.model.K);
  std::fprintf(stderr, "du_max %.6e over %zu nodes\n", err.du_max, err.count);
  return 0;
}

int cmd_kernel(Options& o) {
  if (o.samples < 2) throw std::invalid_argument("cli: need at least two samples");
  Output out(o.out);
  auto& s = out.stream();
  s << "s,phi4\n" << std::setprecision(17);
  for (int k = 0; k < o.samples; ++k) {
    const double x = -4.0 + 8.0 * k / (o.samples - 1);
    s << x << ',' << phi4(x) << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"RBF-FD pricing of two-asset basket call options"};
  app.set_config("--config", "", "flat key = value file; every key is also a flag");
  app.require_subcommand(1);
  app.fallthrough();

  auto& m = o.cfg.model;
  app.add_option("--r", m.r, "risk-free rate")->capture_default_str();
  app.add_option("--sigma1", m.sigma1, "volatility of asset 1")->capture_default_str();
  app.add_option("--sigma2", m.sigma2, "volatility of asset 2")->capture_default_str();
  app.add_option("--rho", m.rho, "correlation")->capture_default_str();
  app.add_option("--K", m.K, "strike")->capture_default_str();
  app.add_option("--T", m.T, "maturity")->capture_default_str();
  app.add_option("--s_max", m.s_max, "far-field level")->capture_default_str();
  app.add_option("--layout", o.layout, "uniform or nonuniform")->capture_default_str();
  app.add_option("--smoothing", o.cfg.smoothing, "smooth the payoff")->capture_default_str();
  app.add_option("--Ns", o.cfg.Ns, "nodes per axis")->capture_default_str();
  app.add_option("--p", o.cfg.p, "polynomial degree")->capture_default_str();
  app.add_option("--q", o.cfg.q, "PHS exponent, phi = r^(2q-1)")->capture_default_str();
  app.add_option("--c", o.cfg.c, "clustering constant")->capture_default_str();
  app.add_option("--M", o.cfg.M, "time steps, 0 for Ns")->capture_default_str();
  app.add_option("--gmres_tol", o.cfg.gmres.tol)->capture_default_str();
  app.add_option("--gmres_restart", o.cfg.gmres.restart)->capture_default_str();
  app.add_option("--gmres_maxit", o.cfg.gmres.max_iterations)->capture_default_str();
  app.add_option("--ref_n", o.cfg.reference.n, "reference grid points per side")->capture_default_str();
  app.add_option("--ref_M", o.cfg.reference.M, "reference time steps, 0 for ref_n - 1")->capture_default_str();
  app.add_option("--richardson", o.richardson, "extrapolate the reference")->capture_default_str();
  app.add_option("--cache_dir", o.cache_dir, "reference cache directory")->capture_default_str();
  app.add_option("--out", o.out, "output CSV, stdout when empty");

  auto* price = app.add_subcommand("price", "single pricing run, writes s1,s2,role,u");
  auto* converge = app.add_subcommand("converge", "convergence sweep against the reference");
  converge->add_option("--Ns_list", o.Ns_list, "resolutions")->delimiter(',')->capture_default_str();
  converge->add_option("--method", o.method, "rbffd or fd")->capture_default_str();
  auto* reference = app.add_subcommand("reference", "build or load the cached finite-difference reference");
  auto* heatmap = app.add_subcommand("heatmap", "error field over [0, 4]^2");
  auto* kernel = app.add_subcommand("kernel", "samples of the smoothing kernel");
  kernel->add_option("--samples", o.samples)->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (price->parsed()) return cmd_price(o);
    if (converge->parsed()) return cmd_converge(o);
    if (reference->parsed()) return cmd_reference(o);
    if (heatmap->parsed()) return cmd_heatmap(o);
    if (kernel->parsed()) return cmd_kernel(o);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
