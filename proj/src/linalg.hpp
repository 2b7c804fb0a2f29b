#pragma once

// Small dense solvers used by the harmonic module. Sizes are at most a few
// dozen, so plain Gaussian elimination is enough.

#include <optional>
#include <vector>

#include "kmsgraph/rational.hpp"

namespace kms::linalg {

using Matrix = std::vector<std::vector<double>>;
using QMatrix = std::vector<std::vector<Rational>>;

/// Solve a x = b with partial pivoting; nullopt when a pivot falls below
/// `singular_tol` relative to the largest entry.
std::optional<std::vector<double>> solve(Matrix a, std::vector<double> b, double singular_tol = 1e-13);

/// Basis of the right null space of an m x n rational matrix.
std::vector<std::vector<Rational>> nullspace(QMatrix a, std::size_t cols);

}  // namespace kms::linalg
