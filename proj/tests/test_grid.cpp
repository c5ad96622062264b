#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "rabi2/rabi2.hpp"

using namespace rabi2;

namespace {

// Direct Hermite evaluation for small n: phi_n = H_n(x) e^{-x^2/2} / sqrt(2^n n! sqrt(pi)).
double hermite_function_direct(int n, double x) {
    double h0 = 1.0, h1 = 2.0 * x;
    if (n == 0) return h0 * std::exp(-0.5 * x * x) / std::pow(std::numbers::pi, 0.25);
    for (int k = 1; k < n; ++k) {
        const double h2 = 2.0 * x * h1 - 2.0 * k * h0;
        h0 = h1;
        h1 = h2;
    }
    return h1 * std::exp(-0.5 * x * x) / std::sqrt(std::pow(2.0, n) * std::tgamma(n + 1.0) * std::sqrt(std::numbers::pi));
}

double l2_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b, const Grid& g) {
    const Eigen::VectorXd d = a - b;
    return std::sqrt(quadrature_inner(d, d, g));
}

}  // namespace

TEST(GridTest, Validation) {
    EXPECT_NO_THROW(Grid().validate());
    EXPECT_THROW(Grid(10.0, 2000).validate(), std::invalid_argument);
    EXPECT_THROW(Grid(10.0, 1).validate(), std::invalid_argument);
    Grid g;
    EXPECT_EQ(g.x(g.center()), 0.0);
    EXPECT_EQ(g.x(0), -10.0);
    EXPECT_EQ(g.x(g.n_points - 1), 10.0);
    for (int i = 0; i < g.n_points; ++i) EXPECT_EQ(g.x(i), -g.x(g.n_points - 1 - i));
}

TEST(Hermite, SimpleValues) {
    EXPECT_NEAR(oscillator_eigenfunction(0, 0.0), std::pow(std::numbers::pi, -0.25), 1e-15);
    EXPECT_EQ(oscillator_eigenfunction(1, 0.0), 0.0);
    EXPECT_THROW(oscillator_eigenfunction(-1, 0.0), std::invalid_argument);
}

TEST(Hermite, MatchesDirectFormula) {
    for (int n = 0; n <= 20; ++n)
        for (double x : {-3.1, -0.4, 0.0, 0.9, 2.5, 5.0})
            EXPECT_NEAR(oscillator_eigenfunction(n, x), hermite_function_direct(n, x), 1e-11) << n << " " << x;
}

namespace {

std::vector<Eigen::VectorXd> sampled_hermite(int n_max, const Grid& g) {
    std::vector<Eigen::VectorXd> phi(static_cast<std::size_t>(n_max + 1), Eigen::VectorXd(g.n_points));
    for (int i = 0; i < g.n_points; ++i) {
        const auto v = oscillator_eigenfunctions(n_max, g.x(i));
        for (int n = 0; n <= n_max; ++n) phi[static_cast<std::size_t>(n)](i) = v[static_cast<std::size_t>(n)];
    }
    return phi;
}

}  // namespace

TEST(Hermite, NormalizedOnDefaultGrid) {
    // phi_n reaches past |x| = 10 once n > 33; the default grid holds those below that
    const Grid g;
    const auto phi = sampled_hermite(33, g);
    for (int n = 0; n <= 33; ++n) EXPECT_NEAR(quadrature_inner(phi[n], phi[n], g), 1.0, 1e-8) << n;
    EXPECT_NEAR(quadrature_inner(phi[0], phi[2], g), 0.0, 1e-8);
    EXPECT_NEAR(quadrature_inner(phi[0], phi[0], g), 1.0, 1e-8);
}

TEST(Hermite, NormalizedToOrder200) {
    // same spacing as the default grid, wide enough for the n = 200 turning point (~20)
    const Grid g(30.0, 6001);
    const auto phi = sampled_hermite(200, g);
    for (int n = 0; n <= 200; ++n) EXPECT_NEAR(quadrature_inner(phi[n], phi[n], g), 1.0, 1e-8) << n;
    for (int n = 0; n + 2 <= 200; n += 17) EXPECT_NEAR(quadrature_inner(phi[n], phi[n + 2], g), 0.0, 1e-8) << n;
}

TEST(Hermite, BoundedAtLargeOrder) {
    double worst = 0.0;
    for (double x = -12.0; x <= 12.0; x += 0.0137) {
        const auto v = oscillator_eigenfunctions(2000, x);
        for (double f : v) {
            ASSERT_TRUE(std::isfinite(f));
            worst = std::max(worst, std::abs(f));
        }
    }
    EXPECT_LE(worst, 1.0);
}

TEST(Hermite, FarTailUnderflowsCleanly) {
    EXPECT_EQ(oscillator_eigenfunction(3, 60.0), 0.0);
    EXPECT_GT(oscillator_eigenfunction(1500, 50.0) * 0.0 + 1.0, 0.0);
    EXPECT_TRUE(std::isfinite(oscillator_eigenfunction(1500, 50.0)));
}

TEST(Quadrature, GaussianOverlapClosedForm) {
    const Grid g(14.0, 4001);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(std::log(0.2), std::log(5.0));
    for (int t = 0; t < 50; ++t) {
        const double a = std::exp(u(rng)), b = std::exp(u(rng));
        Eigen::VectorXd fa(g.n_points), fb(g.n_points);
        for (int i = 0; i < g.n_points; ++i) {
            fa(i) = gaussian_orbital(a, g.x(i));
            fb(i) = gaussian_orbital(b, g.x(i));
        }
        EXPECT_NEAR(quadrature_inner(fa, fb, g), overlap(a, b), 1e-8);
    }
    EXPECT_THROW(quadrature_inner(Eigen::VectorXd(3), Eigen::VectorXd(3), g), std::invalid_argument);
}

TEST(FockToGrid, DecoupledEqualSpinor) {
    const auto s = ground_state(ModelParams(1.0, 1.0, 0.0), FockBasisSpec(10));
    const auto wf = fock_to_grid(s);
    for (int i = 0; i < wf.grid.n_points; ++i) {
        const double phi0 = oscillator_eigenfunction(0, wf.grid.x(i));
        EXPECT_NEAR(wf.psi_plus(i), phi0, 1e-12);
        EXPECT_NEAR(wf.psi_minus(i), phi0, 1e-12);
    }
}

TEST(FockToGrid, TunnelingFreeGaussians) {
    const double gp = 0.3;
    const auto s = ground_state(ModelParams(1.0, 0.0, gp), FockBasisSpec(200, Sector::even_photon));
    const auto wf = fock_to_grid(s);
    const double xi = bare_frequency_up(gp);
    Eigen::VectorXd up(wf.grid.n_points), dn(wf.grid.n_points);
    for (int i = 0; i < wf.grid.n_points; ++i) {
        up(i) = gaussian_orbital(xi, wf.grid.x(i));
        dn(i) = gaussian_orbital(1.0 / xi, wf.grid.x(i));
    }
    // Omega = 0 is degenerate between the spins; the even-sector solve picks
    // some combination a|up gaussian> + b|down gaussian> with a^2 + b^2 = 2.
    const double a = quadrature_inner(wf.psi_plus, up, wf.grid);
    const double b = quadrature_inner(wf.psi_minus, dn, wf.grid);
    EXPECT_NEAR(a * a + b * b, 2.0, 1e-8);
    EXPECT_LT(l2_distance(wf.psi_plus, a * up, wf.grid), 1e-8);
    EXPECT_LT(l2_distance(wf.psi_minus, b * dn, wf.grid), 1e-8);
}

TEST(FockToGrid, NormPreservedAndEven) {
    for (double gp : {0.1, 0.3, 0.45}) {
        const auto s = ground_state(ModelParams(1.0, 1.0, gp), FockBasisSpec(300));
        const auto wf = fock_to_grid(s);
        EXPECT_NEAR(wf.norm(), s.coefficients.squaredNorm(), 1e-6) << gp;
        EXPECT_LT(wf.parity_defect(), 1e-8) << gp;
        EXPECT_GE(wf.psi_plus(wf.grid.center()), 0.0);
    }
}

TEST(FockToGrid, CollapsePointNeedsWiderGrid) {
    const auto s = ground_state(ModelParams(1.0, 1.0, 0.5), FockBasisSpec(799), SolverBackend::parity_chains);
    // Psi- spreads past |x| = 10 at the collapse point
    EXPECT_GT(std::abs(fock_to_grid(s).norm() - 1.0), 1e-6);
    const auto wf = fock_to_grid(s, Grid(30.0, 6001));
    EXPECT_NEAR(wf.norm(), 1.0, 1e-6);
    EXPECT_LT(wf.parity_defect(), 1e-8);
}

TEST(FockToGrid, EvenSectorExactMirror) {
    const auto s = ground_state(ModelParams(1.0, 2.0, 0.4), FockBasisSpec(120, Sector::even_photon));
    const auto wf = fock_to_grid(s);
    EXPECT_EQ(wf.parity_defect(), 0.0);
}

TEST(FockToGrid, LargeTunnelingNeutralizes) {
    auto spread = [](double tunneling) {
        const auto s = ground_state(ModelParams(1.0, tunneling, 0.49), FockBasisSpec(1599), SolverBackend::parity_chains);
        const auto wf = fock_to_grid(s);
        return l2_distance(wf.psi_plus, wf.psi_minus, wf.grid);
    };
    const double strong = spread(10.0), weak = spread(1.0);
    EXPECT_LT(strong, 0.2);
    EXPECT_LT(strong, 0.5 * weak);
}

TEST(SecondDerivative, QuadraticIsExact) {
    const Grid g(5.0, 101);
    Eigen::VectorXd f(g.n_points);
    for (int i = 0; i < g.n_points; ++i) f(i) = 3.0 * g.x(i) * g.x(i) - g.x(i);
    const auto d2 = second_derivative(f, g);
    for (int i = 0; i < g.n_points; ++i) EXPECT_NEAR(d2(i), 6.0, 1e-9);
}
