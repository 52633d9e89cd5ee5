#include "cvqe/lanczos.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "cvqe/error.hpp"

namespace cvqe {

namespace {

using Vec = Eigen::VectorXd;
using ConstMap = Eigen::Map<const Vec>;

struct RitzPair {
    double value;
    double second;
    Vec coefficients;
};

RitzPair lowest_ritz(const std::vector<double>& alpha, const std::vector<double>& beta) {
    const auto m = static_cast<Eigen::Index>(alpha.size());
    Vec diag(m);
    Vec sub(std::max<Eigen::Index>(m - 1, 0));
    for (Eigen::Index k = 0; k < m; ++k) diag(k) = alpha[k];
    for (Eigen::Index k = 0; k + 1 < m; ++k) sub(k) = beta[k];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    const double second =
        m >= 2 ? solver.eigenvalues()(1) : std::numeric_limits<double>::quiet_NaN();
    return {solver.eigenvalues()(0), second, solver.eigenvectors().col(0)};
}

/// Classical Gram-Schmidt against the deflation vectors and the first m
/// Krylov vectors, applied twice.
void orthogonalize(Vec& w, const Eigen::MatrixXd& deflate, const Eigen::MatrixXd& basis,
                   Eigen::Index m) {
    for (int pass = 0; pass < 2; ++pass) {
        if (deflate.cols() > 0) w.noalias() -= deflate * (deflate.transpose() * w);
        if (m > 0) {
            const auto v = basis.leftCols(m);
            w.noalias() -= v * (v.transpose() * w);
        }
    }
}

}  // namespace

LanczosResult lanczos_lowest(std::size_t dim, const LinearOperator& apply,
                             std::vector<double> start, const LanczosOptions& options,
                             std::span<const std::vector<double>> deflate) {
    if (dim == 0) throw ValidationError("empty_operator", "operator has dimension zero");
    if (start.size() != dim) throw ValidationError("bad_start", "start vector has wrong length");
    if (deflate.size() >= dim) {
        throw ValidationError("over_deflated", "cannot deflate the whole space");
    }
    const auto n = static_cast<Eigen::Index>(dim);
    const std::size_t effective_dim = dim - deflate.size();
    const long long max_iterations =
        options.max_iterations > 0 ? options.max_iterations : 10LL * static_cast<long long>(dim);
    const auto cap = static_cast<Eigen::Index>(
        std::min<std::size_t>(static_cast<std::size_t>(std::max(2, options.krylov_cap)), effective_dim));

    Eigen::MatrixXd defl(n, static_cast<Eigen::Index>(deflate.size()));
    for (std::size_t k = 0; k < deflate.size(); ++k) {
        if (deflate[k].size() != dim) throw ValidationError("bad_deflation", "deflation vector has wrong length");
        defl.col(static_cast<Eigen::Index>(k)) = ConstMap(deflate[k].data(), n);
    }
    const Eigen::MatrixXd no_basis;

    Vec v0 = ConstMap(start.data(), n);
    orthogonalize(v0, defl, no_basis, 0);
    if (v0.norm() < 1e-8) {
        // Start vector lies inside the deflated space; fall back to unit vectors.
        for (Eigen::Index k = 0; k < n && v0.norm() < 1e-8; ++k) {
            v0.setZero();
            v0(k) = 1.0;
            orthogonalize(v0, defl, no_basis, 0);
        }
    }
    v0.normalize();

    LanczosResult best;
    best.second_value = std::numeric_limits<double>::quiet_NaN();
    best.residual = std::numeric_limits<double>::infinity();

    Eigen::MatrixXd basis(n, cap);
    Vec w(n), ritz(n), check(n);
    long long iterations = 0;

    auto matvec = [&](const Vec& x, Vec& y) {
        apply(std::span<const double>(x.data(), dim), std::span<double>(y.data(), dim));
    };

    while (true) {
        std::vector<double> alpha;
        std::vector<double> beta;
        basis.col(0) = v0;
        Eigen::Index m = 0;

        while (true) {
            const Vec v = basis.col(m);
            matvec(v, w);
            ++iterations;
            alpha.push_back(v.dot(w));
            ++m;
            orthogonalize(w, defl, basis, m);
            const double b = w.norm();

            const bool exhausted = static_cast<std::size_t>(m) >= effective_dim;
            const bool out_of_budget = iterations >= max_iterations;
            const bool full = m >= cap;
            // The tridiagonal eigensolve costs O(m^3); past the first few dozen
            // steps only check every eighth step.
            const bool check_now = m <= 32 || m % 8 == 0 || exhausted || out_of_budget || full ||
                                   b <= 1e-12 * std::max(1.0, std::abs(alpha.back()));
            bool restart = false;
            if (check_now) {
                const auto ritz_pair = lowest_ritz(alpha, beta);
                const double scale = std::max(1.0, std::abs(ritz_pair.value));
                const double estimate = b * std::abs(ritz_pair.coefficients(m - 1));
                const bool breakdown = b <= 1e-12 * scale;
                if (estimate <= options.tolerance * scale || exhausted || breakdown ||
                    out_of_budget || full) {
                    ritz.noalias() = basis.leftCols(m) * ritz_pair.coefficients;
                    ritz.normalize();
                    matvec(ritz, check);
                    check -= ritz_pair.value * ritz;
                    const double residual = check.norm();
                    if (residual < best.residual || best.vector.empty()) {
                        best.value = ritz_pair.value;
                        best.second_value = ritz_pair.second;
                        best.vector.assign(ritz.data(), ritz.data() + n);
                        best.residual = residual;
                    }
                    best.iterations = static_cast<int>(
                        std::min<long long>(iterations, std::numeric_limits<int>::max()));
                    if (residual <= options.tolerance * scale) {
                        best.value = ritz_pair.value;
                        best.second_value = ritz_pair.second;
                        best.vector.assign(ritz.data(), ritz.data() + n);
                        best.residual = residual;
                        best.converged = true;
                        return best;
                    }
                    if (out_of_budget) return best;
                    if (exhausted || breakdown || full) {
                        v0 = ritz;
                        restart = true;
                    }
                }
            }
            if (restart) break;
            beta.push_back(b);
            basis.col(m) = w / b;
        }
    }
}

void krylov_propagate(std::size_t dim, const LinearOperator& apply,
                      std::vector<std::complex<double>>& psi, double h, double tolerance,
                      int max_dim) {
    using Complex = std::complex<double>;
    if (psi.size() != dim) throw ValidationError("bad_state", "state has wrong length");
    double rho = 0.0;
    for (const auto& z : psi) rho += std::norm(z);
    rho = std::sqrt(rho);
    if (rho == 0.0 || h == 0.0) return;

    std::vector<double> re(dim), im(dim), are(dim), aim(dim);
    auto apply_complex = [&](const std::vector<Complex>& x, std::vector<Complex>& y) {
        for (std::size_t k = 0; k < dim; ++k) {
            re[k] = x[k].real();
            im[k] = x[k].imag();
        }
        apply(re, are);
        apply(im, aim);
        for (std::size_t k = 0; k < dim; ++k) y[k] = Complex(are[k], aim[k]);
    };
    auto cdot = [](const std::vector<Complex>& a, const std::vector<Complex>& b) {
        Complex s = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k) s += std::conj(a[k]) * b[k];
        return s;
    };

    std::vector<std::vector<Complex>> basis;
    basis.emplace_back(psi);
    for (auto& z : basis[0]) z /= rho;
    std::vector<double> alpha, beta;
    std::vector<Complex> w(dim);
    const int limit = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(max_dim), dim));

    for (int j = 0; j < limit; ++j) {
        apply_complex(basis[j], w);
        alpha.push_back(cdot(basis[j], w).real());
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& v : basis) {
                const Complex c = cdot(v, w);
                for (std::size_t k = 0; k < dim; ++k) w[k] -= c * v[k];
            }
        }
        double b = 0.0;
        for (const auto& z : w) b += std::norm(z);
        b = std::sqrt(b);

        const auto m = static_cast<Eigen::Index>(alpha.size());
        Eigen::VectorXd diag(m), sub(std::max<Eigen::Index>(m - 1, 0));
        for (Eigen::Index k = 0; k < m; ++k) diag(k) = alpha[k];
        for (Eigen::Index k = 0; k + 1 < m; ++k) sub(k) = beta[k];
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
        solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
        const Eigen::MatrixXd& q = solver.eigenvectors();
        Eigen::VectorXcd phases(m);
        for (Eigen::Index k = 0; k < m; ++k) {
            phases(k) = std::polar(q(0, k), -h * solver.eigenvalues()(k));
        }
        const Eigen::VectorXcd coeff = q.cast<Complex>() * phases;

        const bool done = b <= 1e-14 || b * std::abs(coeff(m - 1)) <= tolerance ||
                          static_cast<std::size_t>(m) == dim;
        if (done) {
            std::fill(psi.begin(), psi.end(), Complex{0.0, 0.0});
            for (Eigen::Index k = 0; k < m; ++k) {
                const Complex c = rho * coeff(k);
                const auto& v = basis[static_cast<std::size_t>(k)];
                for (std::size_t x = 0; x < dim; ++x) psi[x] += c * v[x];
            }
            return;
        }
        beta.push_back(b);
        for (auto& z : w) z /= b;
        basis.push_back(w);
    }
    throw RuntimeError("Krylov propagator did not converge; reduce the time step");
}

}  // namespace cvqe
