#pragma once

#include <cstddef>
#include <vector>

namespace gpv::detail {

// Solves a tridiagonal system in place (Thomas algorithm, no pivoting).
// lower[i] couples row i to i-1 (lower[0] unused), upper[i] couples i to i+1.
// Intended for the symmetric positive definite systems assembled here.
template <class T>
void solve_tridiag(const std::vector<double>& lower, const std::vector<double>& diag,
                   const std::vector<double>& upper, std::vector<T>& rhs, std::vector<double>& work) {
  const std::size_t n = diag.size();
  work.resize(n);
  double beta = diag[0];
  rhs[0] = rhs[0] / beta;
  for (std::size_t i = 1; i < n; ++i) {
    work[i] = upper[i - 1] / beta;
    beta = diag[i] - lower[i] * work[i];
    rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / beta;
  }
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= work[i + 1] * rhs[i + 1];
}

}  // namespace gpv::detail
