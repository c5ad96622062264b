// tridiagonal.hpp: implicit QL with Wilkinson shifts for symmetric tridiagonal matrices

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace rabi2 {

/// Raised when an iterative eigensolver exhausts its iteration budget.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct TridiagonalEigen {
    Eigen::VectorXd values;   // ascending
    Eigen::MatrixXd vectors;  // columns match values; empty unless requested
};

/// Eigen-decomposition of the symmetric tridiagonal matrix with diagonal `diag`
/// and sub-diagonal `off` (off.size() == diag.size() - 1).
///
/// This is the classic tql2 iteration: deflate on negligible off-diagonals,
/// apply a Wilkinson shift from the leading 2x2 block and chase the bulge with
/// Givens rotations. Vectors are accumulated only when `want_vectors`.
inline TridiagonalEigen tridiagonal_eigen(const Eigen::VectorXd& diag, const Eigen::VectorXd& off,
                                          bool want_vectors, int max_sweeps_per_value = 60) {
    const Eigen::Index n = diag.size();
    if (n == 0) return {};
    if (off.size() != n - 1)
        throw std::invalid_argument("tridiagonal_eigen: off-diagonal must have size n-1");

    Eigen::VectorXd d = diag;
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
    e.head(n - 1) = off;

    Eigen::MatrixXd z;
    if (want_vectors) z = Eigen::MatrixXd::Identity(n, n);

    for (Eigen::Index l = 0; l < n; ++l) {
        int iter = 0;
        Eigen::Index m = l;
        for (;;) {
            for (m = l; m < n - 1; ++m) {
                const double dd = std::abs(d(m)) + std::abs(d(m + 1));
                if (std::abs(e(m)) <= std::numeric_limits<double>::epsilon() * dd) break;
            }
            if (m == l) break;
            if (++iter > max_sweeps_per_value)
                throw ConvergenceError("tridiagonal_eigen: no convergence for eigenvalue index " +
                                       std::to_string(l) + " after " + std::to_string(max_sweeps_per_value) +
                                       " sweeps (|e| = " + std::to_string(std::abs(e(l))) + ")");

            double g = (d(l + 1) - d(l)) / (2.0 * e(l));
            double r = std::hypot(g, 1.0);
            g = d(m) - d(l) + e(l) / (g + std::copysign(r, g));
            double s = 1.0;
            double c = 1.0;
            double p = 0.0;
            Eigen::Index i = m - 1;
            bool underflow = false;
            for (; i >= l; --i) {
                double f = s * e(i);
                const double b = c * e(i);
                r = std::hypot(f, g);
                e(i + 1) = r;
                if (r == 0.0) {
                    d(i + 1) -= p;
                    e(m) = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d(i + 1) - p;
                r = (d(i) - g) * s + 2.0 * c * b;
                p = s * r;
                d(i + 1) = g + p;
                g = c * r - b;
                if (want_vectors) {
                    for (Eigen::Index k = 0; k < n; ++k) {
                        f = z(k, i + 1);
                        z(k, i + 1) = s * z(k, i) + c * f;
                        z(k, i) = c * z(k, i) - s * f;
                    }
                }
            }
            if (underflow && i >= l) continue;
            d(l) -= p;
            e(l) = g;
            e(m) = 0.0;
        }
    }

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return d(a) < d(b); });

    TridiagonalEigen out;
    out.values.resize(n);
    if (want_vectors) out.vectors.resize(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        out.values(k) = d(order[static_cast<std::size_t>(k)]);
        if (want_vectors) out.vectors.col(k) = z.col(order[static_cast<std::size_t>(k)]);
    }
    return out;
}

}  // namespace rabi2
