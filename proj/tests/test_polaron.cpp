#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "rabi2/rabi2.hpp"

using namespace rabi2;

namespace {

struct Samples {
    Grid grid;
    Eigen::VectorXd fa, fb, x2, d2b;
};

// Quadrature oracle on a grid wide enough for the broader Gaussian.
Samples sample_pair(double a, double b) {
    const double width = 12.0 / std::sqrt(std::min(a, b));
    const double h = 0.1 / std::sqrt(std::max(a, b));
    int n = static_cast<int>(2.0 * width / h) + 1;
    if (n % 2 == 0) ++n;
    Samples s{Grid(width, n), {}, {}, {}, {}};
    s.fa.resize(n);
    s.fb.resize(n);
    s.x2.resize(n);
    for (int i = 0; i < n; ++i) {
        const double x = s.grid.x(i);
        s.fa(i) = gaussian_orbital(a, x);
        s.fb(i) = gaussian_orbital(b, x);
        s.x2(i) = x * x * s.fb(i);
    }
    s.d2b = second_derivative(s.fb, s.grid);
    return s;
}

}  // namespace

TEST(Kernels, Examples) {
    EXPECT_NEAR(overlap(2.3, 2.3), 1.0, 1e-15);
    EXPECT_EQ(overlap(0.3, 1.7), overlap(1.7, 0.3));
    for (double gp : {0.1, 0.3, 0.45}) {
        const double xi = bare_frequency_up(gp);
        EXPECT_NEAR(overlap(1.0 / xi, xi), std::pow(1.0 - 4.0 * gp * gp, 0.25), 1e-14);
    }
    EXPECT_NEAR(moment_x2(1.0, 1.0), 0.5, 1e-15);
    EXPECT_NEAR(moment_x2(2.0, 2.0), 0.25, 1e-15);
    EXPECT_EQ(moment_x2(0.3, 1.7), moment_x2(1.7, 0.3));
    EXPECT_NEAR(kinetic(1.0, 1.0), 0.5, 1e-15);
    EXPECT_EQ(kinetic(0.3, 1.7), kinetic(1.7, 0.3));
    EXPECT_THROW(overlap(0.0, 1.0), std::domain_error);
    EXPECT_THROW(kinetic(1.0, -1.0), std::domain_error);
}

TEST(Kernels, KineticFiniteDifference) {
    const auto s = sample_pair(0.5, 2.0);
    const double fd = -quadrature_inner(s.fa, s.d2b, s.grid);
    // central differences carry an O(h^2) bias; refine once and extrapolate
    const double a = 0.5, b = 2.0;
    const double width = 12.0 / std::sqrt(a);
    auto kin = [&](int n) {
        Grid g(width, n);
        Eigen::VectorXd fa(n), fb(n);
        for (int i = 0; i < n; ++i) {
            fa(i) = gaussian_orbital(a, g.x(i));
            fb(i) = gaussian_orbital(b, g.x(i));
        }
        return -quadrature_inner(fa, second_derivative(fb, g), g);
    };
    const double coarse = kin(4001), fine = kin(8001);
    EXPECT_NEAR((4.0 * fine - coarse) / 3.0, kinetic(a, b), 1e-8);
    EXPECT_NEAR(fd, kinetic(a, b), 1e-3);
}

TEST(Kernels, RandomPairsMatchQuadrature) {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(std::log(1e-2), std::log(1e2));
    for (int t = 0; t < 200; ++t) {
        const double a = std::exp(u(rng)), b = std::exp(u(rng));
        const auto s = sample_pair(a, b);
        EXPECT_NEAR(quadrature_inner(s.fa, s.fb, s.grid), overlap(a, b), 1e-8);
        EXPECT_NEAR(quadrature_inner(s.fa, s.x2, s.grid), moment_x2(a, b), 1e-8 * std::max(1.0, moment_x2(a, b)));
    }
}

TEST(Generalized, TunnelingFreeOracle) {
    for (double gp : {0.0, 0.2, 0.4}) {
        const ModelParams p(1.0, 0.0, gp);
        const double xi = bare_frequency_up(gp);
        const auto rp = lowest_generalized_eigenpair(assemble_generalized_problem(p, {xi}, {1.0 / xi}));
        EXPECT_NEAR(rp.eigenvalue, 0.5 * std::sqrt(1.0 - 4.0 * gp * gp), 1e-13);
        EXPECT_NEAR(p.epsilon0() + rp.eigenvalue, analytic_tunneling_free_energy(p), 1e-13);
    }
}

TEST(Generalized, DecoupledOracle) {
    const ModelParams p(1.0, 0.8, 0.0);
    const auto rp = lowest_generalized_eigenpair(assemble_generalized_problem(p, {1.0}, {1.0}));
    EXPECT_NEAR(rp.eigenvalue, 0.5 - 0.4, 1e-14);
    EXPECT_NEAR(p.epsilon0() + rp.eigenvalue, -0.4, 1e-14);
}

TEST(Generalized, SymmetricAndPositive) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int t = 0; t < 20; ++t) {
        std::vector<double> xp, xm;
        for (int k = 0; k < 3; ++k) {
            xp.push_back(std::exp(u(rng)));
            xm.push_back(std::exp(u(rng)));
        }
        const auto gpb = assemble_generalized_problem(ModelParams(1.0, 1.5, 0.35), xp, xm);
        EXPECT_EQ((gpb.a - gpb.a.transpose()).cwiseAbs().maxCoeff(), 0.0);
        EXPECT_EQ((gpb.b - gpb.b.transpose()).cwiseAbs().maxCoeff(), 0.0);
        EXPECT_GT(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(gpb.b).eigenvalues().minCoeff(), 0.0);
    }
    EXPECT_THROW(assemble_generalized_problem(ModelParams(1.0, 1.0, 0.6), {1.0}, {1.0}), std::domain_error);
}

TEST(Generalized, NearDuplicateFrequencies) {
    const ModelParams p(1.0, 1.0, 0.3);
    const auto rp = lowest_generalized_eigenpair(assemble_generalized_problem(p, {1.8, 1.8 * (1 + 1e-12)}, {0.55, 1.2}));
    EXPECT_LT(rp.rank, 4);
    EXPECT_TRUE(std::isfinite(rp.eigenvalue));
    EXPECT_GE(p.epsilon0() + rp.eigenvalue, -0.565019250 - 1e-9);
}

TEST(Generalized, NoWeightBeatsRitzValue) {
    const ModelParams p(1.0, 1.0, 0.4);
    const std::vector<double> xp{2.5, 0.76}, xm{0.39, 1.32};
    const auto gpb = assemble_generalized_problem(p, xp, xm);
    const auto rp = lowest_generalized_eigenpair(gpb);
    EXPECT_NEAR(rp.weights.dot(gpb.b * rp.weights), 2.0, 1e-10);
    std::mt19937_64 rng(9);
    std::normal_distribution<double> nd;
    for (int t = 0; t < 500; ++t) {
        Eigen::VectorXd c = rp.weights;
        const double scale = std::pow(10.0, -1.0 - (t % 6));
        for (Eigen::Index i = 0; i < c.size(); ++i) c(i) += scale * nd(rng);
        EXPECT_GE(c.dot(gpb.a * c) / c.dot(gpb.b * c), rp.eigenvalue - 1e-13);
    }
}

TEST(Variational, BareSolution) {
    const ModelParams p(1.0, 1.0, 0.4);
    EXPECT_NEAR(bare_solution(p).energy, bare_state_energy(p), 1e-13);
    EXPECT_NEAR(bare_solution(p).ansatz.normalization(), 1.0, 1e-13);
}

TEST(Variational, DecoupledIsExact) {
    const auto s = minimize_energy(ModelParams(1.0, 1.0, 0.0), 1);
    EXPECT_NEAR(s.energy, -0.5, 1e-12);
    const auto wf = ansatz_to_grid(s);
    for (int i = 0; i < wf.grid.n_points; i += 50) {
        EXPECT_NEAR(wf.psi_plus(i), oscillator_eigenfunction(0, wf.grid.x(i)), 1e-8);
        EXPECT_NEAR(wf.psi_minus(i), oscillator_eigenfunction(0, wf.grid.x(i)), 1e-8);
    }
}

TEST(Variational, CollapsePointTwoPairs) {
    const auto seq = minimize_sequence(ModelParams(1.0, 1.0, 0.5), 2);
    EXPECT_NEAR(seq[1].energy, -0.743858, 0.01 * 0.743858);
    EXPECT_GE(seq[1].energy, -0.743858189751 - 1e-9);
}

TEST(Variational, MonotoneAndBounded) {
    for (double gp : {0.1, 0.3, 0.45}) {
        const ModelParams p(1.0, 1.0, gp);
        const double ed = lowest_levels(p, FockBasisSpec(400), 1, SolverBackend::parity_chains)(0);
        const auto seq = minimize_sequence(p, 3);
        double prev = bare_state_energy(p);
        for (const auto& s : seq) {
            EXPECT_LE(s.energy, prev + 1e-12);
            EXPECT_GE(s.energy, ed - 1e-9);
            EXPECT_NEAR(s.ansatz.normalization(), 1.0, 1e-10);
            prev = s.energy;
        }
    }
}

TEST(Variational, DeterministicForSeed) {
    const ModelParams p(1.0, 1.0, 0.37);
    const auto a = minimize_energy(p, 2), b = minimize_energy(p, 2);
    EXPECT_EQ(a.energy, b.energy);
    EXPECT_EQ(a.ansatz.xi_plus, b.ansatz.xi_plus);
}

TEST(Variational, OriginalAndInducedPattern) {
    const auto s = minimize_sequence(ModelParams(1.0, 1.0, 0.4), 2)[1];
    ASSERT_EQ(s.ansatz.xi_plus.size(), 2u);
    ASSERT_EQ(s.ansatz.xi_minus.size(), 2u);
    auto split = [](const std::vector<double>& xs) {
        return std::pair{std::max(xs[0], xs[1]), std::min(xs[0], xs[1])};
    };
    const auto [p_hi, p_lo] = split(s.ansatz.xi_plus);
    const auto [m_hi, m_lo] = split(s.ansatz.xi_minus);
    EXPECT_GE(p_hi, 1.0);
    EXPECT_LE(p_lo, 1.0);
    EXPECT_GE(m_hi, 1.0);
    EXPECT_LE(m_lo, 1.0);
    // the original polaron dominates each channel: high xi in Psi+, low xi in Psi-
    auto weight_at = [](const std::vector<double>& xs, const std::vector<double>& ws, double xi) {
        return std::abs(ws[xs[0] == xi ? 0 : 1]);
    };
    EXPECT_GT(weight_at(s.ansatz.xi_plus, s.ansatz.weights_plus, p_hi),
              weight_at(s.ansatz.xi_plus, s.ansatz.weights_plus, p_lo));
    EXPECT_GT(weight_at(s.ansatz.xi_minus, s.ansatz.weights_minus, m_lo),
              weight_at(s.ansatz.xi_minus, s.ansatz.weights_minus, m_hi));
}

TEST(Variational, InducedWeightGrowsWithTunneling) {
    double prev = -1.0;
    for (double tunneling : {0.1, 1.0, 10.0}) {
        const auto s = minimize_sequence(ModelParams(1.0, tunneling, 0.3), 2)[1];
        const auto& xs = s.ansatz.xi_minus;
        const auto& ws = s.ansatz.weights_minus;
        ASSERT_EQ(xs.size(), 2u);
        const std::size_t induced = xs[0] > xs[1] ? 0 : 1;
        const double fraction = std::abs(ws[induced]) / (std::abs(ws[0]) + std::abs(ws[1]));
        EXPECT_GE(fraction, prev);
        prev = fraction;
    }
}

TEST(Variational, GridProfile) {
    const auto s = minimize_sequence(ModelParams(1.0, 1.0, 0.4), 2)[1];
    const auto prof = ansatz_profile(s);
    EXPECT_NEAR(prof.total.norm(), s.ansatz.normalization(), 1e-6);
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(prof.total.grid.n_points);
    for (const auto& c : prof.plus_components) sum += c;
    EXPECT_LT((sum - prof.total.psi_plus).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_GE(prof.total.psi_plus(prof.total.grid.center()), 0.0);
}

TEST(Variational, RejectsBadInput) {
    EXPECT_THROW(minimize_energy(ModelParams(1.0, 1.0, 0.3), 0), std::invalid_argument);
    EXPECT_THROW(minimize_energy(ModelParams(1.0, 1.0, 0.6), 1), std::domain_error);
}

TEST(NelderMead, Rosenbrock) {
    auto f = [](const Eigen::VectorXd& v) { return 100 * std::pow(v(1) - v(0) * v(0), 2) + std::pow(1 - v(0), 2); };
    const auto r = nelder_mead(f, Eigen::Vector2d(-1.2, 1.0));
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.x(0), 1.0, 1e-6);
    EXPECT_NEAR(r.x(1), 1.0, 1e-6);
}
