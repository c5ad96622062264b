#include <cmath>

#include <gtest/gtest.h>

#include "rabi2/rabi2.hpp"

using namespace rabi2;

namespace {

FockState ed_ground(double tunneling, double g, int n_max = 400) {
    return ground_state(ModelParams(1.0, tunneling, g), FockBasisSpec(n_max), SolverBackend::parity_chains);
}

}  // namespace

TEST(Observables, Decoupled) {
    const GroundStateHandle ed = ed_ground(1.0, 0.0, 20);
    EXPECT_NEAR(sigma_x(ed), -1.0, 1e-12);
    EXPECT_NEAR(mean_photon_number(ed), 0.0, 1e-12);
    EXPECT_NEAR(coupling_correlation(ed), 0.0, 1e-12);
    // the variational values carry the optimizer's frequency tolerance
    for (int pairs : {1, 2}) {
        const GroundStateHandle var = minimize_energy(ModelParams(1.0, 1.0, 0.0), pairs);
        EXPECT_NEAR(sigma_x(var), -1.0, 1e-8);
        EXPECT_NEAR(mean_photon_number(var), 0.0, 1e-8);
        EXPECT_NEAR(coupling_correlation(var), 0.0, 1e-8);
    }
}

TEST(Observables, BareStateOracle) {
    const double gp = 0.3;
    const GroundStateHandle bare = bare_solution(ModelParams(1.0, 0.0, gp));
    EXPECT_NEAR(sigma_x(bare), -std::pow(1.0 - 4.0 * gp * gp, 0.25), 1e-13);
    const double xi = std::sqrt(1.6 / 0.4);
    // each spin is an oscillator ground state of frequency xi or 1/xi
    const double per_spin = 0.5 * ((xi + 1.0 / xi) / 2.0 - 1.0);
    EXPECT_NEAR(mean_photon_number(bare), per_spin, 1e-13);
}

TEST(Observables, SmallTunnelingApproachesBare) {
    const double gp = 0.3;
    const GroundStateHandle ed = ed_ground(1e-6, gp);
    EXPECT_NEAR(sigma_x(ed), -std::pow(1.0 - 4.0 * gp * gp, 0.25), 1e-4);
}

TEST(Observables, Bounds) {
    for (double gp : {0.1, 0.3, 0.5}) {
        const GroundStateHandle ed = ed_ground(1.0, gp, gp < 0.5 ? 400 : 799);
        EXPECT_GE(sigma_x(ed), -1.0);
        EXPECT_LE(sigma_x(ed), 1.0);
        EXPECT_GE(mean_photon_number(ed), 0.0);
    }
}

TEST(Observables, PhotonNumberIncreasing) {
    double prev = -1.0;
    for (int i = 0; i <= 10; ++i) {
        const double gp = 0.05 * i;
        const double n = mean_photon_number(ed_ground(1.0, gp, gp < 0.49 ? 400 : 799));
        EXPECT_GT(n, prev);
        prev = n;
    }
}

TEST(Observables, CorrelationOddInCoupling) {
    for (double g : {0.1, 0.25, 0.4, 0.5}) {
        const GroundStateHandle a = ed_ground(1.0, g, 799), b = ed_ground(1.0, -g, 799);
        EXPECT_NEAR(coupling_correlation(a), -coupling_correlation(b), 1e-10);
        EXPECT_NEAR(sigma_x(a), sigma_x(b), 1e-10);
        EXPECT_NEAR(mean_photon_number(a), mean_photon_number(b), 1e-10);
    }
}

TEST(Observables, ClosureBothBackends) {
    for (double gp : {0.0, 0.2, 0.4, 0.5}) {
        const ModelParams p(1.0, 1.0, gp);
        const GroundStateHandle ed = ed_ground(1.0, gp, 799);
        const GroundStateHandle var = minimize_sequence(p, 2)[1];
        EXPECT_NEAR(energy_from_observables(ed), energy_of(ed), 1e-8);
        EXPECT_NEAR(energy_from_observables(var), energy_of(var), 1e-8);
    }
}

TEST(Observables, CollapsePointSigmaXAgreement) {
    const GroundStateHandle ed = ed_ground(1.0, 0.5, 799);
    const GroundStateHandle var = minimize_sequence(ModelParams(1.0, 1.0, 0.5), 2)[1];
    EXPECT_NEAR(sigma_x(ed), sigma_x(var), 1e-2);
}

TEST(Observables, CorrelationAgreementAt04) {
    const GroundStateHandle ed = ed_ground(1.0, 0.4);
    const GroundStateHandle var = minimize_sequence(ModelParams(1.0, 1.0, 0.4), 2)[1];
    EXPECT_NEAR(coupling_correlation(var), coupling_correlation(ed), 0.02 * std::abs(coupling_correlation(ed)));
}

TEST(Observables, FourPairsAgreeWithExact) {
    for (int i = 0; i <= 5; ++i) {
        const double gp = 0.1 * i;
        const GroundStateHandle ed = ed_ground(1.0, gp, 799);
        const GroundStateHandle var = minimize_sequence(ModelParams(1.0, 1.0, gp), 4)[3];
        EXPECT_NEAR(sigma_x(var), sigma_x(ed), 1e-2) << gp;
        EXPECT_NEAR(mean_photon_number(var), mean_photon_number(ed), 1e-2) << gp;
        EXPECT_NEAR(coupling_correlation(var), coupling_correlation(ed), 1e-2) << gp;
    }
}
