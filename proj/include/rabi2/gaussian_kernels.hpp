// gaussian_kernels.hpp: closed-form matrix elements between centred Gaussians
//
// phi_xi(x) = (xi/pi)^(1/4) exp(-xi x^2 / 2) is the normalized ground state of
// an oscillator with frequency xi * omega (dimensionless, hbar = m = 1).

#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace rabi2 {

namespace detail {
inline void require_positive(double a, double b, const char* who) {
    if (!(a > 0.0) || !(b > 0.0)) throw std::domain_error(std::string(who) + ": frequency factors must be positive");
}
}  // namespace detail

/// <phi_a|phi_b> = sqrt2 [xi_a xi_b / (xi_a + xi_b)^2]^(1/4)
inline double overlap(double xi_a, double xi_b) {
    detail::require_positive(xi_a, xi_b, "overlap");
    const double s = xi_a + xi_b;
    return std::numbers::sqrt2 * std::pow(xi_a * xi_b / (s * s), 0.25);
}

/// <phi_a|x^2|phi_b> = S / (xi_a + xi_b)
inline double moment_x2(double xi_a, double xi_b) {
    detail::require_positive(xi_a, xi_b, "moment_x2");
    return overlap(xi_a, xi_b) / (xi_a + xi_b);
}

/// <phi_a|-d^2/dx^2|phi_b> = S xi_a xi_b / (xi_a + xi_b)
inline double kinetic(double xi_a, double xi_b) {
    detail::require_positive(xi_a, xi_b, "kinetic");
    return overlap(xi_a, xi_b) * xi_a * xi_b / (xi_a + xi_b);
}

/// phi_xi(x)
inline double gaussian_orbital(double xi, double x) {
    return std::pow(xi / std::numbers::pi, 0.25) * std::exp(-0.5 * xi * x * x);
}

}  // namespace rabi2
