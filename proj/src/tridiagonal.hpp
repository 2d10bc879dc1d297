#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace semiheat::detail {

/// Solves a tridiagonal system in place (Thomas algorithm).
/// lower[0] and upper[n-1] are ignored. The matrix must be diagonally dominant.
void solve_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                       std::span<const double> upper, std::span<double> rhs);

/// Cyclic tridiagonal solve: lower[0] is A(0,n-1) and upper[n-1] is A(n-1,0).
/// Sherman-Morrison correction on top of two Thomas solves.
void solve_cyclic_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                              std::span<const double> upper, std::span<double> rhs);

}  // namespace semiheat::detail
