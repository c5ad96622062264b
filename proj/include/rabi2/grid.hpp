// grid.hpp: position-space sampling, oscillator eigenfunctions and quadrature

#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rabi2/exact_solver.hpp"

namespace rabi2 {

/// Uniform symmetric grid in units of the oscillator length of omega.
struct Grid {
    double x_min{-10.0};
    double x_max{10.0};
    int n_points{2001};

    Grid() = default;
    Grid(double half_width, int points) : x_min(-half_width), x_max(half_width), n_points(points) { validate(); }

    void validate() const {
        if (n_points < 3 || n_points % 2 == 0)
            throw std::invalid_argument("Grid: n_points must be odd and >= 3, got " + std::to_string(n_points));
        if (!(x_max > 0.0) || x_min != -x_max) throw std::invalid_argument("Grid: need x_max = -x_min > 0");
    }

    double spacing() const { return (x_max - x_min) / (n_points - 1); }
    double x(int i) const { return (i - center()) * spacing(); }
    int center() const { return n_points / 2; }

    Eigen::VectorXd points() const {
        Eigen::VectorXd xs(n_points);
        for (int i = 0; i < n_points; ++i) xs(i) = x(i);
        return xs;
    }

    bool operator==(const Grid&) const = default;
};

/// Trapezoid-rule integral of f * g over the grid.
inline double quadrature_inner(std::span<const double> f, std::span<const double> g, const Grid& grid) {
    if (f.size() != static_cast<std::size_t>(grid.n_points) || g.size() != f.size())
        throw std::invalid_argument("quadrature_inner: samples do not match the grid");
    double sum = 0.5 * (f.front() * g.front() + f.back() * g.back());
    for (std::size_t i = 1; i + 1 < f.size(); ++i) sum += f[i] * g[i];
    return sum * grid.spacing();
}

inline double quadrature_inner(const Eigen::VectorXd& f, const Eigen::VectorXd& g, const Grid& grid) {
    return quadrature_inner(std::span<const double>(f.data(), static_cast<std::size_t>(f.size())),
                            std::span<const double>(g.data(), static_cast<std::size_t>(g.size())), grid);
}

/// phi_0 .. phi_n_max at x for the unit-frequency oscillator.
///
/// Runs phi_n = sqrt(2/n) x phi_{n-1} - sqrt((n-1)/n) phi_{n-2} on a rescaled
/// sequence and carries the Gaussian factor in log form, so large |x| where
/// exp(-x^2/2) underflows still yields the correct high-n values.
inline std::vector<double> oscillator_eigenfunctions(int n_max, double x) {
    if (n_max < 0) throw std::invalid_argument("oscillator_eigenfunctions: n_max must be >= 0");
    constexpr double kBig = 1e150;
    const double log_big = std::log(kBig);
    std::vector<double> u(static_cast<std::size_t>(n_max) + 1);
    std::vector<double> log_scale(u.size());

    double log_s = -0.25 * std::log(std::numbers::pi) - 0.5 * x * x;
    u[0] = 1.0;
    log_scale[0] = log_s;
    if (n_max >= 1) {
        u[1] = std::numbers::sqrt2 * x;
        log_scale[1] = log_s;
    }
    for (int n = 2; n <= n_max; ++n) {
        const auto k = static_cast<std::size_t>(n);
        u[k] = std::sqrt(2.0 / n) * x * u[k - 1] - std::sqrt((n - 1.0) / n) * u[k - 2];
        if (std::abs(u[k]) > kBig) {
            u[k] /= kBig;
            u[k - 1] /= kBig;
            log_s += log_big;
        }
        log_scale[k] = log_s;
    }
    std::vector<double> phi(u.size());
    for (std::size_t k = 0; k < u.size(); ++k)
        phi[k] = u[k] == 0.0 ? 0.0 : std::copysign(std::exp(std::log(std::abs(u[k])) + log_scale[k]), u[k]);
    return phi;
}

/// Normalized eigenfunction phi_n(x) of the unit-frequency oscillator.
inline double oscillator_eigenfunction(int n, double x) {
    if (n < 0) throw std::invalid_argument("oscillator_eigenfunction: n must be >= 0");
    return oscillator_eigenfunctions(n, x).back();
}

/// Real spinor components sampled on a grid. The state is
/// (Psi+ |up> - Psi- |down>) / sqrt2, so the combined norm is
/// (<Psi+|Psi+> + <Psi-|Psi->) / 2 = 1.
struct SpinorWavefunction {
    Grid grid;
    Eigen::VectorXd psi_plus;
    Eigen::VectorXd psi_minus;
    bool truncation_suspect{false};

    double norm() const {
        return 0.5 * (quadrature_inner(psi_plus, psi_plus, grid) + quadrature_inner(psi_minus, psi_minus, grid));
    }

    /// Fixes the global sign so that Psi+(0) >= 0; falls back to the largest
    /// |Psi+| sample when Psi+(0) vanishes.
    void fix_sign() {
        const int c = grid.center();
        double ref = psi_plus(c);
        if (std::abs(ref) < 1e-300) {
            Eigen::Index imax = 0;
            psi_plus.cwiseAbs().maxCoeff(&imax);
            ref = psi_plus(imax);
        }
        if (ref < 0.0) {
            psi_plus = -psi_plus;
            psi_minus = -psi_minus;
        }
    }

    /// Largest relative deviation from mirror symmetry across both components.
    double parity_defect() const {
        double worst = 0.0;
        for (const auto* v : {&psi_plus, &psi_minus}) {
            const double scale = std::max(v->cwiseAbs().maxCoeff(), 1e-300);
            for (Eigen::Index i = 0; i < v->size(); ++i)
                worst = std::max(worst, std::abs((*v)(i) - (*v)(v->size() - 1 - i)) / scale);
        }
        return worst;
    }
};

/// Psi+(x) = sqrt2 sum_n c[n,up] phi_n(x), Psi-(x) = -sqrt2 sum_n c[n,down] phi_n(x).
inline SpinorWavefunction fock_to_grid(const FockState& state, const Grid& grid = Grid{}) {
    grid.validate();
    SpinorWavefunction wf{grid, Eigen::VectorXd::Zero(grid.n_points), Eigen::VectorXd::Zero(grid.n_points),
                          state.truncation_suspect()};
    const auto ns = state.basis.photon_numbers();
    const double s2 = std::numbers::sqrt2;
    for (int i = 0; i < grid.n_points; ++i) {
        const auto phi = oscillator_eigenfunctions(state.basis.n_max, grid.x(i));
        double up = 0.0, dn = 0.0;
        for (std::size_t k = 0; k < ns.size(); ++k) {
            const double p = phi[static_cast<std::size_t>(ns[k])];
            up += state.coefficients(static_cast<Eigen::Index>(2 * k)) * p;
            dn += state.coefficients(static_cast<Eigen::Index>(2 * k + 1)) * p;
        }
        wf.psi_plus(i) = s2 * up;
        wf.psi_minus(i) = -s2 * dn;
    }
    wf.fix_sign();
    return wf;
}

/// Second derivative by central differences; endpoints copy their neighbours.
inline Eigen::VectorXd second_derivative(const Eigen::VectorXd& f, const Grid& grid) {
    const double h2 = grid.spacing() * grid.spacing();
    Eigen::VectorXd d2(f.size());
    for (Eigen::Index i = 1; i + 1 < f.size(); ++i) d2(i) = (f(i + 1) - 2.0 * f(i) + f(i - 1)) / h2;
    d2(0) = d2(1);
    d2(f.size() - 1) = d2(f.size() - 2);
    return d2;
}

}  // namespace rabi2
