// observables.hpp: ground-state expectation values from either backend

#pragma once

#include <cmath>
#include <variant>

#include "rabi2/exact_solver.hpp"
#include "rabi2/gaussian_kernels.hpp"
#include "rabi2/polaron.hpp"

namespace rabi2 {

/// Either an exact Fock-basis eigenstate or a variational polaron solution.
using GroundStateHandle = std::variant<FockState, VariationalSolution>;

inline const ModelParams& params_of(const GroundStateHandle& h) {
    return std::visit([](const auto& s) -> const ModelParams& { return s.params; }, h);
}

inline double energy_of(const GroundStateHandle& h) {
    return std::visit([](const auto& s) { return s.energy; }, h);
}

namespace detail {

/// sum_{nm} w_n w_m K(xi_n, xi_m) for a same-spin kernel K.
template <typename Kernel>
double quadratic_form(const std::vector<double>& xi, const std::vector<double>& w, Kernel k) {
    double sum = 0.0;
    for (std::size_t n = 0; n < xi.size(); ++n)
        for (std::size_t m = 0; m < xi.size(); ++m) sum += w[n] * w[m] * k(xi[n], xi[m]);
    return sum;
}

}  // namespace detail

/// <sigma_x>
inline double sigma_x(const GroundStateHandle& h) {
    if (const auto* f = std::get_if<FockState>(&h)) {
        double sum = 0.0;
        for (Eigen::Index k = 0; 2 * k + 1 < f->coefficients.size(); ++k)
            sum += 2.0 * f->coefficients(2 * k) * f->coefficients(2 * k + 1);
        return sum;
    }
    const auto& a = std::get<VariationalSolution>(h).ansatz;
    double cross = 0.0;
    for (std::size_t n = 0; n < a.xi_plus.size(); ++n)
        for (std::size_t m = 0; m < a.xi_minus.size(); ++m)
            cross += a.weights_plus[n] * a.weights_minus[m] * overlap(a.xi_plus[n], a.xi_minus[m]);
    return -cross;
}

/// <a^dag a>
inline double mean_photon_number(const GroundStateHandle& h) {
    if (const auto* f = std::get_if<FockState>(&h)) {
        const auto ns = f->basis.photon_numbers();
        double sum = 0.0;
        for (std::size_t k = 0; k < ns.size(); ++k) {
            const auto i = static_cast<Eigen::Index>(2 * k);
            sum += ns[k] * (f->coefficients(i) * f->coefficients(i) + f->coefficients(i + 1) * f->coefficients(i + 1));
        }
        return sum;
    }
    // a^dag a = (x^2 + p^2 - 1) / 2, averaged over the two spin channels
    const auto& a = std::get<VariationalSolution>(h).ansatz;
    auto number = [](double xa, double xb) { return 0.5 * (moment_x2(xa, xb) + kinetic(xa, xb) - overlap(xa, xb)); };
    return 0.5 * (detail::quadratic_form(a.xi_plus, a.weights_plus, number) +
                  detail::quadratic_form(a.xi_minus, a.weights_minus, number));
}

/// <sigma_z ((a^dag)^2 + a^2)>
inline double coupling_correlation(const GroundStateHandle& h) {
    if (const auto* f = std::get_if<FockState>(&h)) {
        double sum = 0.0;
        for (int n = 0; n + 2 <= f->basis.n_max; ++n) {
            const double amp = std::sqrt((n + 1.0) * (n + 2.0));
            sum += 2.0 * amp * (f->coeff(n, 0) * f->coeff(n + 2, 0) - f->coeff(n, 1) * f->coeff(n + 2, 1));
        }
        return sum;
    }
    // (a^dag)^2 + a^2 = x^2 - p^2
    const auto& a = std::get<VariationalSolution>(h).ansatz;
    auto squeeze = [](double xa, double xb) { return moment_x2(xa, xb) - kinetic(xa, xb); };
    return 0.5 * (detail::quadratic_form(a.xi_plus, a.weights_plus, squeeze) -
                  detail::quadratic_form(a.xi_minus, a.weights_minus, squeeze));
}

/// omega <a^dag a> + (Omega/2) <sigma_x> + g <sigma_z ((a^dag)^2 + a^2)>
inline double energy_from_observables(const GroundStateHandle& h) {
    const ModelParams& p = params_of(h);
    return p.omega * mean_photon_number(h) + 0.5 * p.tunneling * sigma_x(h) + p.coupling * coupling_correlation(h);
}

}  // namespace rabi2
