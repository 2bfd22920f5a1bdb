#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "rbffd/market_model.hpp"
#include "rbffd/node_layout.hpp"
#include "rbffd/sparse.hpp"

namespace rbffd {

// Values on the uniform n x n grid over [0, s_max]^2, stored row-major with
// s1 varying fastest: value(i, j) at (i h, j h).
struct CartesianGrid {
  int n = 0;
  double s_max = 0.0;
  std::vector<double> values;

  double h() const { return s_max / (n - 1); }
  double& at(int i, int j) { return values[static_cast<std::size_t>(j) * n + i]; }
  double at(int i, int j) const { return values[static_cast<std::size_t>(j) * n + i]; }
};

struct FdOptions {
  GmresOptions gmres{1e-10, 30, 2000};
  // Start from the kernel-smoothed payoff (smoothing length h) instead of the
  // raw payoff.
  bool smooth_payoff = false;
};

// Second-order central differences on the full square with BDF2 in time.
// Edges s1 = s_max and s2 = s_max carry the far-field value, the origin the
// close-field value, and the axes the degenerate one-dimensional operator.
CartesianGrid fd_solve(const ModelParams& model, int n, int M, const FdOptions& opts = {});

// The payoff sampled on the grid, i.e. the tau = 0 state.
CartesianGrid fd_initial(const ModelParams& model, int n, const FdOptions& opts = {});

// Tensor-product cubic Lagrange interpolation on the local 4 x 4 block.
double interpolate(const CartesianGrid& grid, Point p);
std::vector<double> interpolate(const CartesianGrid& grid, std::span<const Point> points);

std::uint64_t reference_key(const ModelParams& model, int n, int M, const FdOptions& opts = {});

struct CachedReference {
  CartesianGrid grid;
  bool hit = false;
};

// Loads the grid for (model, n, M) from `dir` or computes and stores it.
// Unreadable or mismatching files are recomputed.
CachedReference reference_cache(const ModelParams& model, int n, int M, const std::filesystem::path& dir,
                                const FdOptions& opts = {});

void save_grid(const std::filesystem::path& file, std::uint64_t key, int M, const CartesianGrid& grid);
// Returns false when the file is missing, corrupt or carries another key.
bool load_grid(const std::filesystem::path& file, std::uint64_t key, CartesianGrid& grid);

}  // namespace rbffd
