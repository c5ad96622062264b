// model.hpp: parameters and Fock-space Hamiltonian of the two-photon Rabi model
//
// Spin-boson form used throughout (hbar = m = 1):
//
//   H = omega a^dag a + (Omega/2) sigma_x + g sigma_z [ (a^dag)^2 + a^2 ]
//
// Basis ordering is (n, spin) lexicographic with spin-up first at each n,
// i.e. index = 2 * k + s where k enumerates the retained photon numbers and
// s = 0 (up), 1 (down).

#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace rabi2 {

/// Physical parameters. Energies in the same (arbitrary) unit as omega.
struct ModelParams {
    double omega{1.0};
    double tunneling{0.0};  // Omega, the qubit splitting
    double coupling{0.0};   // g

    ModelParams() = default;
    ModelParams(double omega_, double tunneling_, double coupling_)
        : omega(omega_), tunneling(tunneling_), coupling(coupling_) {
        validate();
    }

    void validate() const {
        if (!(omega > 0.0) || !std::isfinite(omega))
            throw std::invalid_argument("ModelParams: omega must be positive and finite");
        if (!std::isfinite(tunneling) || !std::isfinite(coupling))
            throw std::invalid_argument("ModelParams: tunneling and coupling must be finite");
    }

    /// Dimensionless coupling g' = g / omega.
    double gprime() const { return coupling / omega; }

    /// Constant energy offset of the single-particle form, -omega/2.
    double epsilon0() const { return -0.5 * omega; }

    /// Collapse point is |g'| = 1/2.
    bool beyond_collapse() const { return std::abs(gprime()) > 0.5; }
};

/// g' values closer than this to 1/2 are treated as the collapse point.
inline constexpr double kCollapseTol = 1e-12;

enum class Sector { full, even_photon, odd_photon };

inline const char* to_string(Sector s) {
    switch (s) {
        case Sector::full: return "full";
        case Sector::even_photon: return "even_photon";
        case Sector::odd_photon: return "odd_photon";
    }
    return "?";
}

/// Truncated Fock basis: photon numbers 0..n_max (optionally one parity), times spin.
struct FockBasisSpec {
    int n_max{2};
    Sector sector{Sector::full};

    FockBasisSpec() = default;
    FockBasisSpec(int n_max_, Sector sector_ = Sector::full) : n_max(n_max_), sector(sector_) {}

    void validate() const {
        if (n_max < 2)
            throw std::invalid_argument("FockBasisSpec: n_max must be >= 2, got " + std::to_string(n_max));
    }

    /// Photon numbers retained, ascending.
    std::vector<int> photon_numbers() const {
        std::vector<int> ns;
        for (int n = 0; n <= n_max; ++n) {
            if (sector == Sector::even_photon && n % 2 != 0) continue;
            if (sector == Sector::odd_photon && n % 2 == 0) continue;
            ns.push_back(n);
        }
        return ns;
    }

    std::size_t dim() const {
        const auto states = static_cast<std::size_t>(n_max + 1);
        switch (sector) {
            case Sector::full: return 2 * states;
            case Sector::even_photon: return 2 * ((states + 1) / 2);
            case Sector::odd_photon: return 2 * (states / 2);
        }
        return 0;
    }
};

/// How a "cutoff" count maps onto n_max. The default counts Fock states per
/// spin, so cutoff C keeps n = 0 .. C-1.
enum class CutoffConvention { states_per_spin, max_photon };

inline int n_max_from_cutoff(int cutoff, CutoffConvention conv = CutoffConvention::states_per_spin) {
    return conv == CutoffConvention::states_per_spin ? cutoff - 1 : cutoff;
}

inline const char* cutoff_convention_text(CutoffConvention conv = CutoffConvention::states_per_spin) {
    return conv == CutoffConvention::states_per_spin
               ? "cutoff = Fock states per spin (n = 0..cutoff-1, n_max = cutoff-1)"
               : "cutoff = maximum photon number (n = 0..cutoff)";
}

struct HamiltonianMatrix {
    Eigen::MatrixXd entries;
    FockBasisSpec basis;
    ModelParams params;

    Eigen::Index dim() const { return entries.rows(); }
};

/// Exact matrix elements of H in the truncated (n, spin) basis.
inline HamiltonianMatrix build_fock_hamiltonian(const ModelParams& params, const FockBasisSpec& basis) {
    params.validate();
    basis.validate();

    const std::vector<int> ns = basis.photon_numbers();
    const auto n_states = static_cast<Eigen::Index>(ns.size());
    const Eigen::Index dim = 2 * n_states;

    HamiltonianMatrix h{Eigen::MatrixXd::Zero(dim, dim), basis, params};
    auto& m = h.entries;
    const double w = params.omega;
    const double half_tunnel = 0.5 * params.tunneling;
    const double g = params.coupling;

    // Retained photon numbers are either consecutive (full) or step 2 (sector),
    // so |n+2> sits at position k + step.
    const Eigen::Index step = basis.sector == Sector::full ? 2 : 1;

    for (Eigen::Index k = 0; k < n_states; ++k) {
        const double n = ns[static_cast<std::size_t>(k)];
        const Eigen::Index up = 2 * k;
        const Eigen::Index dn = 2 * k + 1;
        m(up, up) = w * n;
        m(dn, dn) = w * n;
        m(up, dn) = half_tunnel;
        m(dn, up) = half_tunnel;
        if (k + step < n_states) {
            const double amp = g * std::sqrt((n + 1.0) * (n + 2.0));
            const Eigen::Index up2 = 2 * (k + step);
            const Eigen::Index dn2 = up2 + 1;
            m(up, up2) = amp;
            m(up2, up) = amp;
            m(dn, dn2) = -amp;
            m(dn2, dn) = -amp;
        }
    }
    return h;
}

/// Ground energy at Omega = 0: (omega/2)(sqrt(1 - 4 g'^2) - 1).
inline double analytic_tunneling_free_energy(const ModelParams& params) {
    params.validate();
    const double gp = params.gprime();
    if (std::abs(gp) > 0.5 + kCollapseTol)
        throw std::domain_error("analytic_tunneling_free_energy: |g'| > 1/2, spectrum unbounded below");
    const double disc = std::max(0.0, 1.0 - 4.0 * gp * gp);
    return 0.5 * params.omega * (std::sqrt(disc) - 1.0);
}

/// Frequency factor of the bare spin-up polaron, sqrt((1 + 2g')/(1 - 2g')).
/// The spin-down factor is its reciprocal.
inline double bare_frequency_up(double gprime) {
    return std::sqrt((1.0 + 2.0 * gprime) / (1.0 - 2.0 * gprime));
}

/// Energy of the fixed bare state (Omega = 0 solution used at finite Omega):
/// (omega/2)(sqrt(1-4g'^2) - 1) - (Omega/2)(1-4g'^2)^(1/4).
inline double bare_state_energy(const ModelParams& params) {
    params.validate();
    const double gp = params.gprime();
    if (std::abs(gp) >= 0.5)
        throw std::domain_error("bare_state_energy: requires |g'| < 1/2 (bare spin-up frequency diverges)");
    const double disc = 1.0 - 4.0 * gp * gp;
    return 0.5 * params.omega * (std::sqrt(disc) - 1.0) - 0.5 * params.tunneling * std::pow(disc, 0.25);
}

/// bare_state_energy extended by its one-sided limit to |g'| = 1/2, where it
/// equals -omega/2 (the tunneling overlap (1-4g'^2)^(1/4) vanishes).
inline double bare_state_energy_closed(const ModelParams& params) {
    params.validate();
    const double gp = params.gprime();
    if (std::abs(gp) > 0.5 + kCollapseTol) throw std::domain_error("bare_state_energy_closed: |g'| > 1/2");
    if (std::abs(gp) < 0.5) return bare_state_energy(params);
    return -0.5 * params.omega;
}

}  // namespace rabi2
