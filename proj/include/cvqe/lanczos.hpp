#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace cvqe {

/// y = A x for a real symmetric operator. Must overwrite y.
using LinearOperator = std::function<void(std::span<const double> x, std::span<double> y)>;

struct LanczosOptions {
    /// Converged when ||A v - E v|| <= tolerance * max(1, |E|).
    double tolerance = 1e-10;
    /// Total matrix-vector products allowed; 0 means 10 * dimension.
    int max_iterations = 0;
    /// Krylov basis size before restarting from the current Ritz vector.
    int krylov_cap = 250;
};

struct LanczosResult {
    double value = 0.0;
    std::vector<double> vector;
    /// Second-lowest Ritz value of the final Krylov space, NaN if unavailable.
    double second_value = 0.0;
    double residual = 0.0;
    int iterations = 0;
    bool converged = false;
};

/**
 * Lowest eigenpair of a symmetric operator by Lanczos with full
 * reorthogonalization (two Gram-Schmidt passes per step). Every Krylov vector
 * is also kept orthogonal to `deflate`, so passing previously found
 * eigenvectors yields the next level up.
 *
 * Convergence is always confirmed with an explicit residual. On iteration
 * exhaustion the best Ritz pair is returned with converged = false.
 */
LanczosResult lanczos_lowest(std::size_t dim, const LinearOperator& apply,
                             std::vector<double> start, const LanczosOptions& options = {},
                             std::span<const std::vector<double>> deflate = {});

/// exp(-i h A) psi via a Krylov subspace of at most max_dim vectors. Throws
/// RuntimeError when the Krylov error estimate stays above tolerance.
void krylov_propagate(std::size_t dim, const LinearOperator& apply,
                      std::vector<std::complex<double>>& psi, double h, double tolerance = 1e-12,
                      int max_dim = 40);

}  // namespace cvqe
