#include "rbffd/fd_reference.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "rbffd/payoff_smoothing.hpp"
#include "rbffd/time_integrator.hpp"

namespace rbffd {

namespace {

bool is_far_field(int i, int j, int n) { return i == n - 1 || j == n - 1; }

}  // namespace

CartesianGrid fd_initial(const ModelParams& model, int n, const FdOptions& opts) {
  if (n < 3) throw std::invalid_argument("fd_reference: need at least 3 grid points per axis");
  CartesianGrid g;
  g.n = n;
  g.s_max = model.s_max;
  g.values.resize(static_cast<std::size_t>(n) * n);
  const double h = g.h();
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      g.at(i, j) = opts.smooth_payoff ? smoothed_payoff(i * h, j * h, h, model.K) : payoff(i * h, j * h, model.K);
  return g;
}

CartesianGrid fd_solve(const ModelParams& model, int n, int M, const FdOptions& opts) {
  model.validate();
  CartesianGrid g = fd_initial(model, n, opts);
  const double h = g.h();
  const double h2 = h * h;
  auto id = [n](int i, int j) { return static_cast<std::size_t>(j) * n + i; };

  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(n) * n * 9);
  DirichletData bc;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const std::size_t row = id(i, j);
      if ((i == 0 && j == 0) || is_far_field(i, j, n)) {
        t.push_back({row, row, 0.0});
        bc.nodes.push_back(row);
        continue;
      }
      const OperatorCoefficients k = operator_coefficients(i * h, j * h, model);
      double diag = k.c0;
      if (i > 0) {
        diag -= 2.0 * k.c11 / h2;
        t.push_back({row, id(i + 1, j), k.c11 / h2 + k.c1 / (2.0 * h)});
        t.push_back({row, id(i - 1, j), k.c11 / h2 - k.c1 / (2.0 * h)});
      }
      if (j > 0) {
        diag -= 2.0 * k.c22 / h2;
        t.push_back({row, id(i, j + 1), k.c22 / h2 + k.c2 / (2.0 * h)});
        t.push_back({row, id(i, j - 1), k.c22 / h2 - k.c2 / (2.0 * h)});
      }
      if (i > 0 && j > 0 && k.c12 != 0.0) {
        const double c = k.c12 / (4.0 * h2);
        t.push_back({row, id(i + 1, j + 1), c});
        t.push_back({row, id(i - 1, j - 1), c});
        t.push_back({row, id(i + 1, j - 1), -c});
        t.push_back({row, id(i - 1, j + 1), -c});
      }
      t.push_back({row, row, diag});
    }
  }
  const std::size_t N = static_cast<std::size_t>(n) * n;
  const CsrMatrix W = csr_from_triplets(N, N, std::move(t));

  bc.value = [&](std::size_t node, double tau) {
    const int i = static_cast<int>(node % n);
    const int j = static_cast<int>(node / n);
    if (i == 0 && j == 0) return close_field_value();
    return far_field_value(i * h, j * h, tau, model);
  };

  const TimeStepper stepper(W, build_time_grid(M, model.T), opts.gmres);
  g.values = stepper.integrate(g.values, bc).u;
  return g;
}

double interpolate(const CartesianGrid& grid, Point p) {
  const double h = grid.h();
  const double slack = 1e-12 * grid.s_max;
  if (p.s1 < -slack || p.s2 < -slack || p.s1 > grid.s_max + slack || p.s2 > grid.s_max + slack)
    throw std::invalid_argument("fd_reference: interpolation point outside the grid");

  auto basis = [&](double s, int& first) {
    double t = s / h;
    const double nearest = std::round(t);
    if (std::abs(t - nearest) < 1e-12) t = nearest;
    first = std::clamp(static_cast<int>(std::floor(t)) - 1, 0, grid.n - 4);
    const double x = t - first;  // local coordinate; nodes at 0, 1, 2, 3
    return std::array<double, 4>{-(x - 1) * (x - 2) * (x - 3) / 6.0, x * (x - 2) * (x - 3) / 2.0,
                                 -x * (x - 1) * (x - 3) / 2.0, x * (x - 1) * (x - 2) / 6.0};
  };
  int i0 = 0;
  int j0 = 0;
  const auto wx = basis(p.s1, i0);
  const auto wy = basis(p.s2, j0);
  double sum = 0.0;
  for (int b = 0; b < 4; ++b) {
    double row = 0.0;
    for (int a = 0; a < 4; ++a) row += wx[a] * grid.at(i0 + a, j0 + b);
    sum += wy[b] * row;
  }
  return sum;
}

std::vector<double> interpolate(const CartesianGrid& grid, std::span<const Point> points) {
  std::vector<double> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(interpolate(grid, p));
  return out;
}

std::uint64_t reference_key(const ModelParams& model, int n, int M, const FdOptions& opts) {
  // FNV-1a over the raw bytes of every input that affects the grid.
  std::uint64_t hash = 14695981039346656037ull;
  auto mix = [&](const auto& v) {
    unsigned char bytes[sizeof(v)];
    std::memcpy(bytes, &v, sizeof(v));
    for (unsigned char b : bytes) {
      hash ^= b;
      hash *= 1099511628211ull;
    }
  };
  for (double v : {model.r, model.sigma1, model.sigma2, model.rho, model.K, model.T, model.s_max,
                   opts.gmres.tol})
    mix(v);
  mix(n);
  mix(M);
  mix(static_cast<int>(opts.smooth_payoff));
  return hash;
}

namespace {

constexpr std::array<char, 8> kMagic{'R', 'B', 'F', 'D', 'G', 'R', 'D', '1'};

}  // namespace

void save_grid(const std::filesystem::path& file, std::uint64_t key, int M, const CartesianGrid& grid) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("fd_reference: cannot write " + file.string());
  const std::uint64_t count = grid.values.size();
  out.write(kMagic.data(), kMagic.size());
  out.write(reinterpret_cast<const char*>(&key), sizeof key);
  out.write(reinterpret_cast<const char*>(&grid.n), sizeof grid.n);
  out.write(reinterpret_cast<const char*>(&M), sizeof M);
  out.write(reinterpret_cast<const char*>(&grid.s_max), sizeof grid.s_max);
  out.write(reinterpret_cast<const char*>(&count), sizeof count);
  out.write(reinterpret_cast<const char*>(grid.values.data()), static_cast<std::streamsize>(count * sizeof(double)));
}

bool load_grid(const std::filesystem::path& file, std::uint64_t key, CartesianGrid& grid) {
  std::ifstream in(file, std::ios::binary);
  if (!in) return false;
  std::array<char, 8> magic{};
  std::uint64_t stored_key = 0;
  std::uint64_t count = 0;
  int n = 0;
  int M = 0;
  double s_max = 0.0;
  in.read(magic.data(), magic.size());
  in.read(reinterpret_cast<char*>(&stored_key), sizeof stored_key);
  in.read(reinterpret_cast<char*>(&n), sizeof n);
  in.read(reinterpret_cast<char*>(&M), sizeof M);
  in.read(reinterpret_cast<char*>(&s_max), sizeof s_max);
  in.read(reinterpret_cast<char*>(&count), sizeof count);
  if (!in || magic != kMagic || stored_key != key || n < 3 || count != static_cast<std::uint64_t>(n) * n)
    return false;
  std::vector<double> values(count);
  in.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(count * sizeof(double)));
  if (!in || in.peek() != std::char_traits<char>::eof()) return false;
  grid.n = n;
  grid.s_max = s_max;
  grid.values = std::move(values);
  return true;
}

CachedReference reference_cache(const ModelParams& model, int n, int M, const std::filesystem::path& dir,
                                const FdOptions& opts) {
  const std::uint64_t key = reference_key(model, n, M, opts);
  std::ostringstream name;
  name << "fdref_" << std::hex << std::setw(16) << std::setfill('0') << key << ".bin";
  const auto file = dir / name.str();

  CachedReference out;
  if (load_grid(file, key, out.grid)) {
    out.hit = true;
    return out;
  }
  out.grid = fd_solve(model, n, M, opts);
  save_grid(file, key, M, out.grid);
  return out;
}

}  // namespace rbffd
