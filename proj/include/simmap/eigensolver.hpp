#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "simmap/dense.hpp"

namespace simmap {

struct EigenOptions {
    /// Ritz pair accepted when ||A x - theta x|| <= tolerance * max(1, |theta_max|).
    double tolerance = 1e-10;
    /// Matrix-vector product budget; 0 means 10 * n.
    std::size_t max_matvecs = 0;
    /// Krylov basis size before a restart; 0 picks max(2k + 20, 60), capped at n.
    std::size_t basis_size = 0;
    /// Seeds the start vector (and any replacement vector after breakdown).
    std::uint64_t seed = 0;
};

struct EigenResult {
    std::vector<double> values;  // descending
    DenseMatrix vectors;         // n x k, column j pairs with values[j]
    std::size_t matvecs = 0;
    std::size_t restarts = 0;
    double max_residual = 0.0;
};

/// y = A x for a symmetric operator of dimension n.
using SymmetricOperator = std::function<void(std::span<const double> x, std::span<double> y)>;

/// Largest-algebraic k eigenpairs by thick-restart Lanczos with full
/// (twice-iterated classical Gram-Schmidt) reorthogonalization. Throws
/// NumericError when the budget runs out before every wanted pair meets the
/// tolerance.
EigenResult top_eigenpairs(std::size_t n, const SymmetricOperator& op, std::size_t k, const EigenOptions& options = {});

/// Same, for an explicit symmetric matrix (row-parallel matvec).
EigenResult top_eigenpairs(const DenseMatrix& a, std::size_t k, const EigenOptions& options = {});

/// Full dense symmetric eigendecomposition, truncated to the top k. Used
/// as the reference solver for moderate n.
EigenResult top_eigenpairs_dense(const DenseMatrix& a, std::size_t k);

}  // namespace simmap
