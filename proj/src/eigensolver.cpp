#include "simmap/eigensolver.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>

#include "simmap/error.hpp"
#include "simmap/kernels.hpp"
#include "simmap/parallel.hpp"
#include "simmap/rng.hpp"

namespace simmap {
namespace {

double norm(std::span<const double> v) { return std::sqrt(kernels::dot(v, v)); }

void scale(std::span<double> v, double factor) {
    for (double& x : v) x *= factor;
}

/// Removes the components of w along basis rows [0, count), twice. The
/// accumulated coefficients are added to `coeffs` when given.
void orthogonalize(const DenseMatrix& basis, std::size_t count, std::span<double> w, double* coeffs) {
    std::vector<double> c(count);
    for (int pass = 0; pass < 2; ++pass) {
        parallel_for(count, [&](std::size_t i) { c[i] = kernels::dot(basis.row(i), w); });
        for (std::size_t i = 0; i < count; ++i) {
            kernels::axpy(-c[i], basis.row(i), w);
            if (coeffs) coeffs[i] += c[i];
        }
    }
}

/// Fills basis row `slot` with a random unit vector orthogonal to rows
/// [0, slot). Returns false if the basis already spans everything.
bool random_orthogonal(DenseMatrix& basis, std::size_t slot, Rng& rng) {
    auto v = basis.row(slot);
    for (int attempt = 0; attempt < 3; ++attempt) {
        for (double& x : v) x = standard_normal(rng);
        const double before = norm(v);
        orthogonalize(basis, slot, v, nullptr);
        const double after = norm(v);
        if (after > 1e-8 * before) {
            scale(v, 1.0 / after);
            return true;
        }
    }
    return false;
}

}  // namespace

EigenResult top_eigenpairs(std::size_t n, const SymmetricOperator& op, std::size_t k, const EigenOptions& options) {
    if (n == 0) throw ContractError("eigensolver: empty operator");
    if (k < 1 || k > n) throw ContractError("eigensolver: need 1 <= k <= n");

    const std::size_t m = std::min(n, options.basis_size ? std::max(options.basis_size, k + 1)
                                                         : std::max<std::size_t>(2 * k + 20, 60));
    const std::size_t budget = options.max_matvecs ? options.max_matvecs : 10 * n;

    Rng rng(options.seed);
    DenseMatrix basis(m + 1, n);
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(m, m);
    if (!random_orthogonal(basis, 0, rng)) throw NumericError("eigensolver: could not draw a start vector");

    EigenResult result;
    std::size_t start = 0;  // first column to expand
    std::vector<double> coeffs(m + 1);
    Eigen::VectorXd theta;
    Eigen::MatrixXd ritz;
    double beta = 0.0;

    while (true) {
        for (std::size_t j = start; j < m; ++j) {
            auto w = basis.row(j + 1);
            op(basis.row(j), w);
            ++result.matvecs;
            std::fill(coeffs.begin(), coeffs.end(), 0.0);
            orthogonalize(basis, j + 1, w, coeffs.data());
            for (std::size_t i = 0; i <= j; ++i) h(i, j) = coeffs[i];
            beta = norm(w);

            const double scale_est = std::max(1.0, std::abs(h(j, j)));
            const bool breakdown = beta <= 1e-13 * scale_est;
            if (breakdown) {
                beta = 0.0;
                // Invariant subspace found; continue with a fresh direction
                // unless the basis is complete.
                if (j + 1 < m && !random_orthogonal(basis, j + 1, rng)) break;
                if (j + 1 == m && m < n) random_orthogonal(basis, m, rng);
            } else {
                scale(w, 1.0 / beta);
            }
            if (j + 1 < m) h(j + 1, j) = beta;
        }

        const Eigen::MatrixXd hs = 0.5 * (h + h.transpose());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(hs);
        if (solver.info() != Eigen::Success) throw NumericError("eigensolver: projected eigenproblem failed");
        theta = solver.eigenvalues().reverse();
        ritz = solver.eigenvectors().rowwise().reverse();

        const double theta_scale = std::max(1.0, std::abs(theta(0)));
        result.max_residual = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            result.max_residual = std::max(result.max_residual, std::abs(beta * ritz(m - 1, i)));
        }
        if (m == n || result.max_residual <= options.tolerance * theta_scale) break;
        if (result.matvecs >= budget) {
            throw NumericError("eigensolver did not converge: " + std::to_string(result.matvecs) +
                               " matvecs, " + std::to_string(result.restarts) + " restarts, max residual " +
                               std::to_string(result.max_residual) + " > " +
                               std::to_string(options.tolerance * theta_scale));
        }

        // Thick restart: keep the leading Ritz vectors plus the residual
        // direction, which becomes the next vector to expand.
        const std::size_t keep = std::min(m - 1, k + (m - k) / 2);
        DenseMatrix next(m + 1, n);
        parallel_for(keep, [&](std::size_t i) {
            auto out = next.row(i);
            for (std::size_t j = 0; j < m; ++j) kernels::axpy(ritz(j, i), basis.row(j), out);
        });
        const auto residual = basis.row(m);
        std::copy(residual.begin(), residual.end(), next.row(keep).begin());
        basis = std::move(next);

        h.setZero();
        for (std::size_t i = 0; i < keep; ++i) {
            h(i, i) = theta(i);
            h(keep, i) = beta * ritz(m - 1, i);
        }
        if (beta == 0.0) {
            if (!random_orthogonal(basis, keep, rng)) throw NumericError("eigensolver: basis exhausted");
        } else {
            // Restore orthogonality lost in the recombination.
            orthogonalize(basis, keep, basis.row(keep), nullptr);
            scale(basis.row(keep), 1.0 / norm(basis.row(keep)));
        }
        start = keep;
        ++result.restarts;
    }

    result.values.resize(k);
    result.vectors = DenseMatrix(n, k);
    for (std::size_t i = 0; i < k; ++i) result.values[i] = theta(static_cast<Eigen::Index>(i));
    parallel_for(n, [&](std::size_t r) {
        for (std::size_t i = 0; i < k; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < m; ++j) acc += ritz(j, i) * basis(j, r);
            result.vectors(r, i) = acc;
        }
    });
    return result;
}

EigenResult top_eigenpairs(const DenseMatrix& a, std::size_t k, const EigenOptions& options) {
    if (a.rows() != a.cols()) throw ContractError("eigensolver: matrix must be square");
    const auto op = [&a](std::span<const double> x, std::span<double> y) {
        parallel_for(a.rows(), [&](std::size_t r) { y[r] = kernels::dot(a.row(r), x); });
    };
    return top_eigenpairs(a.rows(), op, k, options);
}

EigenResult top_eigenpairs_dense(const DenseMatrix& a, std::size_t k) {
    const std::size_t n = a.rows();
    if (a.cols() != n) throw ContractError("eigensolver: matrix must be square");
    if (k < 1 || k > n) throw ContractError("eigensolver: need 1 <= k <= n");
    const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> map(
        a.data().data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    const Eigen::MatrixXd sym = 0.5 * (map + map.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
    if (solver.info() != Eigen::Success) throw NumericError("dense eigensolver failed");

    EigenResult result;
    result.values.resize(k);
    result.vectors = DenseMatrix(n, k);
    for (std::size_t i = 0; i < k; ++i) {
        const auto col = static_cast<Eigen::Index>(n - 1 - i);
        result.values[i] = solver.eigenvalues()(col);
        for (std::size_t r = 0; r < n; ++r) result.vectors(r, i) = solver.eigenvectors()(static_cast<Eigen::Index>(r), col);
    }
    return result;
}

}  // namespace simmap
