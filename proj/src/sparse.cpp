#include "rbffd/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace rbffd {

double CsrMatrix::at(std::size_t i, std::size_t j) const {
  const auto first = col_idx.begin() + static_cast<std::ptrdiff_t>(row_ptr[i]);
  const auto last = col_idx.begin() + static_cast<std::ptrdiff_t>(row_ptr[i + 1]);
  const auto it = std::lower_bound(first, last, j);
  return (it != last && *it == j) ? values[static_cast<std::size_t>(it - col_idx.begin())] : 0.0;
}

CsrMatrix CsrMatrix::identity(std::size_t n) {
  CsrMatrix I;
  I.rows = I.cols = n;
  I.row_ptr.resize(n + 1);
  I.col_idx.resize(n);
  I.values.assign(n, 1.0);
  for (std::size_t i = 0; i <= n; ++i) I.row_ptr[i] = i;
  for (std::size_t i = 0; i < n; ++i) I.col_idx[i] = i;
  return I;
}

CsrMatrix csr_from_triplets(std::size_t rows, std::size_t cols, std::vector<Triplet> entries) {
  std::stable_sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
    return a.row < b.row || (a.row == b.row && a.col < b.col);
  });
  CsrMatrix A;
  A.rows = rows;
  A.cols = cols;
  A.row_ptr.assign(rows + 1, 0);
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const auto& t = entries[k];
    if (t.row >= rows || t.col >= cols) throw std::out_of_range("sparse: triplet out of range");
    if (k > 0 && entries[k - 1].row == t.row && entries[k - 1].col == t.col) {
      A.values.back() += t.value;
      continue;
    }
    A.col_idx.push_back(t.col);
    A.values.push_back(t.value);
    ++A.row_ptr[t.row + 1];
  }
  for (std::size_t i = 0; i < rows; ++i) A.row_ptr[i + 1] += A.row_ptr[i];
  return A;
}

void spmv(const CsrMatrix& A, std::span<const double> x, std::span<double> y) {
  if (x.size() != A.cols || y.size() != A.rows)
    throw std::invalid_argument("sparse: spmv dimension mismatch");
  for (std::size_t i = 0; i < A.rows; ++i) {
    double sum = 0.0;
    for (std::size_t k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k) sum += A.values[k] * x[A.col_idx[k]];
    y[i] = sum;
  }
}

std::vector<double> spmv(const CsrMatrix& A, std::span<const double> x) {
  std::vector<double> y(A.rows);
  spmv(A, x, y);
  return y;
}

IluFactors::IluFactors(const CsrMatrix& A) : lu_(A), diag_(A.rows) {
  if (A.rows != A.cols) throw std::invalid_argument("sparse: ilu0 needs a square matrix");
  const std::size_t n = A.rows;
  for (std::size_t i = 0; i < n; ++i) {
    const auto first = lu_.col_idx.begin() + static_cast<std::ptrdiff_t>(lu_.row_ptr[i]);
    const auto last = lu_.col_idx.begin() + static_cast<std::ptrdiff_t>(lu_.row_ptr[i + 1]);
    const auto it = std::lower_bound(first, last, i);
    if (it == last || *it != i)
      throw std::runtime_error("sparse: ilu0 zero pivot at row " + std::to_string(i));
    diag_[i] = static_cast<std::size_t>(it - lu_.col_idx.begin());
  }

  // Position of each column of the current row, or npos.
  constexpr std::size_t npos = static_cast<std::size_t>(-1);
  std::vector<std::size_t> where(n, npos);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t begin = lu_.row_ptr[i];
    const std::size_t end = lu_.row_ptr[i + 1];
    for (std::size_t k = begin; k < end; ++k) where[lu_.col_idx[k]] = k;

    for (std::size_t k = begin; k < diag_[i]; ++k) {
      const std::size_t col = lu_.col_idx[k];
      const double pivot = lu_.values[diag_[col]];
      const double factor = lu_.values[k] / pivot;
      lu_.values[k] = factor;
      for (std::size_t kk = diag_[col] + 1; kk < lu_.row_ptr[col + 1]; ++kk) {
        const std::size_t pos = where[lu_.col_idx[kk]];
        if (pos != npos) lu_.values[pos] -= factor * lu_.values[kk];
      }
    }
    if (lu_.values[diag_[i]] == 0.0 || !std::isfinite(lu_.values[diag_[i]]))
      throw std::runtime_error("sparse: ilu0 zero pivot at row " + std::to_string(i));
    for (std::size_t k = begin; k < end; ++k) where[lu_.col_idx[k]] = npos;
  }
}

void IluFactors::apply(std::span<double> x) const {
  const std::size_t n = lu_.rows;
  for (std::size_t i = 0; i < n; ++i) {
    double sum = x[i];
    for (std::size_t k = lu_.row_ptr[i]; k < diag_[i]; ++k) sum -= lu_.values[k] * x[lu_.col_idx[k]];
    x[i] = sum;
  }
  for (std::size_t i = n; i-- > 0;) {
    double sum = x[i];
    for (std::size_t k = diag_[i] + 1; k < lu_.row_ptr[i + 1]; ++k)
      sum -= lu_.values[k] * x[lu_.col_idx[k]];
    x[i] = sum / lu_.values[diag_[i]];
  }
}

CsrMatrix IluFactors::lower() const {
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < lu_.rows; ++i) {
    for (std::size_t k = lu_.row_ptr[i]; k < diag_[i]; ++k) t.push_back({i, lu_.col_idx[k], lu_.values[k]});
    t.push_back({i, i, 1.0});
  }
  return csr_from_triplets(lu_.rows, lu_.cols, std::move(t));
}

CsrMatrix IluFactors::upper() const {
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < lu_.rows; ++i)
    for (std::size_t k = diag_[i]; k < lu_.row_ptr[i + 1]; ++k) t.push_back({i, lu_.col_idx[k], lu_.values[k]});
  return csr_from_triplets(lu_.rows, lu_.cols, std::move(t));
}

IluFactors ilu0(const CsrMatrix& A) { return IluFactors(A); }

namespace {

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void residual(const CsrMatrix& A, std::span<const double> b, std::span<const double> x,
              std::span<double> r) {
  spmv(A, x, r);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
}

}  // namespace

SolveStats gmres(const CsrMatrix& A, std::span<const double> b, std::span<double> x,
                 const IluFactors* precond, const GmresOptions& opts) {
  const std::size_t n = A.rows;
  if (A.cols != n || b.size() != n || x.size() != n)
    throw std::invalid_argument("sparse: gmres dimension mismatch");
  if (opts.restart < 1) throw std::invalid_argument("sparse: gmres restart must be positive");

  SolveStats stats;
  const double bnorm = norm2(b);
  if (bnorm == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    stats.converged = true;
    return stats;
  }

  const auto m = static_cast<std::size_t>(opts.restart);
  std::vector<std::vector<double>> V(m + 1, std::vector<double>(n));
  std::vector<std::vector<double>> H(m + 1, std::vector<double>(m, 0.0));
  std::vector<double> cs(m), sn(m), g(m + 1), y(m), w(n), z(n), r(n);

  residual(A, b, x, r);
  double rel = norm2(r) / bnorm;
  stats.residual = rel;
  while (rel > opts.tol && stats.iterations < opts.max_iterations) {
    const double beta = rel * bnorm;
    for (std::size_t i = 0; i < n; ++i) V[0][i] = r[i] / beta;
    std::fill(g.begin(), g.end(), 0.0);
    g[0] = beta;
    auto& history = stats.cycle_history.emplace_back();

    std::size_t k = 0;
    bool breakdown = false;
    for (; k < m && stats.iterations < opts.max_iterations; ++k) {
      ++stats.iterations;
      z = V[k];
      if (precond) precond->apply(z);
      spmv(A, z, w);
      for (std::size_t j = 0; j <= k; ++j) {
        H[j][k] = dot(w, V[j]);
        for (std::size_t i = 0; i < n; ++i) w[i] -= H[j][k] * V[j][i];
      }
      H[k + 1][k] = norm2(w);
      if (H[k + 1][k] > 0.0)
        for (std::size_t i = 0; i < n; ++i) V[k + 1][i] = w[i] / H[k + 1][k];
      else
        breakdown = true;

      for (std::size_t j = 0; j < k; ++j) {
        const double t = cs[j] * H[j][k] + sn[j] * H[j + 1][k];
        H[j + 1][k] = -sn[j] * H[j][k] + cs[j] * H[j + 1][k];
        H[j][k] = t;
      }
      const double denom = std::hypot(H[k][k], H[k + 1][k]);
      cs[k] = denom == 0.0 ? 1.0 : H[k][k] / denom;
      sn[k] = denom == 0.0 ? 0.0 : H[k + 1][k] / denom;
      H[k][k] = denom;
      H[k + 1][k] = 0.0;
      g[k + 1] = -sn[k] * g[k];
      g[k] = cs[k] * g[k];

      const double estimate = std::abs(g[k + 1]) / bnorm;
      history.push_back(estimate);
      if (estimate <= opts.tol || breakdown) {
        ++k;
        break;
      }
    }

    // Back substitution on the k x k triangular system.
    for (std::size_t i = k; i-- > 0;) {
      double s = g[i];
      for (std::size_t j = i + 1; j < k; ++j) s -= H[i][j] * y[j];
      y[i] = H[i][i] == 0.0 ? 0.0 : s / H[i][i];
    }
    std::fill(z.begin(), z.end(), 0.0);
    for (std::size_t j = 0; j < k; ++j)
      for (std::size_t i = 0; i < n; ++i) z[i] += y[j] * V[j][i];
    if (precond) precond->apply(z);
    for (std::size_t i = 0; i < n; ++i) x[i] += z[i];

    residual(A, b, x, r);
    const double next = norm2(r) / bnorm;
    const bool stagnated = breakdown || !(next < rel);
    rel = next;
    stats.residual = rel;
    if (stagnated && rel > opts.tol) break;
  }
  stats.converged = rel <= opts.tol;
  return stats;
}

}  // namespace rbffd
