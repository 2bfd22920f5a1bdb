#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace rbffd {

// Compressed sparse row matrix. Column indices are sorted within each row.
struct CsrMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::size_t> row_ptr{0};
  std::vector<std::size_t> col_idx;
  std::vector<double> values;

  std::size_t nnz() const { return values.size(); }
  std::size_t row_nnz(std::size_t i) const { return row_ptr[i + 1] - row_ptr[i]; }
  // Entry (i, j), or 0 when it is not stored.
  double at(std::size_t i, std::size_t j) const;

  static CsrMatrix identity(std::size_t n);
};

struct Triplet {
  std::size_t row;
  std::size_t col;
  double value;
};

// Duplicates are summed. Explicit zeros are kept so the pattern is preserved.
CsrMatrix csr_from_triplets(std::size_t rows, std::size_t cols, std::vector<Triplet> entries);

std::vector<double> spmv(const CsrMatrix& A, std::span<const double> x);
void spmv(const CsrMatrix& A, std::span<const double> x, std::span<double> y);

// Zero-fill incomplete LU. L (unit lower) and U share A's pattern and are
// stored together.
class IluFactors {
 public:
  explicit IluFactors(const CsrMatrix& A);

  // Solves L U x = b in place.
  void apply(std::span<double> x) const;

  CsrMatrix lower() const;  // includes the unit diagonal
  CsrMatrix upper() const;
  const CsrMatrix& combined() const { return lu_; }

 private:
  CsrMatrix lu_;
  std::vector<std::size_t> diag_;
};

IluFactors ilu0(const CsrMatrix& A);

struct GmresOptions {
  double tol = 1e-8;
  int restart = 30;
  int max_iterations = 500;
};

struct SolveStats {
  int iterations = 0;
  double residual = 0.0;  // final relative residual ||b - Ax|| / ||b||
  bool converged = false;
  // Relative residual estimates, one per inner iteration, cycle by cycle.
  std::vector<std::vector<double>> cycle_history;
};

// Right-preconditioned restarted GMRES. `x` holds the initial guess on entry
// and the solution on exit. Pass a null preconditioner for none.
SolveStats gmres(const CsrMatrix& A, std::span<const double> b, std::span<double> x,
                 const IluFactors* precond, const GmresOptions& opts = {});

}  // namespace rbffd
