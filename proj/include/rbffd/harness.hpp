#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rbffd/fd_reference.hpp"
#include "rbffd/market_model.hpp"
#include "rbffd/node_layout.hpp"
#include "rbffd/sparse.hpp"

namespace rbffd {

enum class Layout { uniform, nonuniform };
enum class Method { rbffd_phs, fd };

std::string_view to_string(Layout layout);
std::string_view to_string(Method method);
Layout parse_layout(std::string_view text);
Method parse_method(std::string_view text);

struct ReferenceSettings {
  int n = 641;
  int M = 0;  // 0 selects n - 1
  std::filesystem::path cache_dir = "fd_cache";
  // Combine the n and (n + 1) / 2 solutions by Richardson extrapolation.
  bool richardson = true;
};

struct RunConfig {
  ModelParams model;
  Layout layout = Layout::uniform;
  bool smoothing = true;
  int Ns = 40;
  int p = 4;
  int q = 5;
  double c = 0.8;  // clustering constant, in the same currency units as K
  int M = 0;       // 0 selects Ns
  GmresOptions gmres;
  ReferenceSettings reference;

  std::size_t stencil_size() const;
  int steps() const { return M > 0 ? M : Ns; }
  void validate() const;
};

struct Timing {
  double stencils = 0.0;
  double weights = 0.0;
  double smoothing = 0.0;
  double stepping = 0.0;

  double setup() const { return stencils + weights + smoothing; }
  double total() const { return setup() + stepping; }
};

struct PricingResult {
  NodeSet nodes;                // original coordinates
  std::vector<double> initial;  // tau = 0 vector, original units
  std::vector<double> u;        // tau = T, original units
  Timing timing;
  int iterations = 0;
  int max_step_iterations = 0;
  double max_condition = 0.0;
  std::size_t ill_conditioned = 0;
  std::size_t smoothed_nodes = 0;
};

PricingResult run_pricing(const RunConfig& cfg);

// The finite-difference oracle for cfg.model, in original coordinates.
CartesianGrid build_reference(const RunConfig& cfg);

// Measurement region [K/3, 5K/3]^2.
bool in_error_region(Point p, double K);

struct ErrorField {
  std::vector<double> du;  // |u - reference| at every node
  std::vector<bool> in_region;
  double du_max = 0.0;
  std::size_t count = 0;
};

ErrorField error_metrics(std::span<const double> u, const NodeSet& nodes, const CartesianGrid& reference,
                         double K);

struct ConvergenceRow {
  int Ns = 0;
  std::size_t N = 0;
  double h_hat = 0.0;
  double du_max = 0.0;
  double cpu_seconds = 0.0;
  int iterations = 0;
};

struct ConvergenceReport {
  Method method = Method::rbffd_phs;
  Layout layout = Layout::uniform;
  bool smoothed = false;
  std::vector<ConvergenceRow> rows;
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // 2-norm of the least-squares residual
};

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;
};

LineFit fit_line(std::span<const double> x, std::span<const double> y);

ConvergenceReport convergence_sweep(const RunConfig& cfg, std::span<const int> Ns_list,
                                    const CartesianGrid& reference, Method method = Method::rbffd_phs);

// Columns: method,layout,smoothed,N_s,N,h_hat,du_max,cpu_seconds
void write_convergence_csv(std::ostream& out, const ConvergenceReport& report, bool header = true);

struct Bounds {
  double lo = 0.0;
  double hi = 4.0;
};

// Rows "s1,s2,du" for nodes inside the bounds; the measurement-region corners
// are written as leading '#' comment lines.
std::size_t emit_heatmap_data(std::ostream& out, std::span<const double> du, const NodeSet& nodes, double K,
                              Bounds bounds = {});

// Writes "s1,s2,role,u" for every node.
void write_solution_csv(std::ostream& out, const PricingResult& result);

}  // namespace rbffd
