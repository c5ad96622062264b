// potential.hpp: bare, tunneling-induced and effective potentials
//
// Single-particle form of H|G> = E|G> for (Psi+ |up> - Psi- |down>)/sqrt2:
//
//   (omega/2)(1 -+ 2g')(-Psi'' + v+- Psi+-) - (Omega/2) Psi-+ = (E - eps0) Psi+-
//
// with v+- = (1 +- 2g')/(1 -+ 2g') x^2. Dividing the tunneling term by Psi+-
// turns it into the induced potential dv+- = -Omega/((1 -+ 2g') omega) Psi-+/Psi+-.

#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rabi2/exact_solver.hpp"
#include "rabi2/grid.hpp"
#include "rabi2/model.hpp"

namespace rabi2 {

inline constexpr double kAmplitudeFloor = 1e-8;

struct BarePotentials {
    Eigen::VectorXd v_plus;   // NaN where undefined (g' = 1/2)
    Eigen::VectorXd v_minus;
    bool v_plus_defined{true};
};

/// v+ = (1+2g')/(1-2g') x^2 and v- = (1-2g')/(1+2g') x^2. Beyond the collapse
/// point both coefficients are negative (inverted parabolas).
inline BarePotentials bare_potentials(const ModelParams& p, const Grid& grid = Grid{}) {
    p.validate();
    grid.validate();
    const double gp = p.gprime();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    BarePotentials out{Eigen::VectorXd(grid.n_points), Eigen::VectorXd(grid.n_points), true};
    const bool plus_ok = std::abs(1.0 - 2.0 * gp) > kCollapseTol;
    const bool minus_ok = std::abs(1.0 + 2.0 * gp) > kCollapseTol;
    out.v_plus_defined = plus_ok && minus_ok;
    for (int i = 0; i < grid.n_points; ++i) {
        const double x2 = grid.x(i) * grid.x(i);
        out.v_plus(i) = plus_ok ? (1.0 + 2.0 * gp) / (1.0 - 2.0 * gp) * x2 : nan;
        out.v_minus(i) = minus_ok ? (1.0 - 2.0 * gp) / (1.0 + 2.0 * gp) * x2 : nan;
    }
    return out;
}

struct InducedPotentials {
    Eigen::VectorXd dv_plus;
    Eigen::VectorXd dv_minus;
    std::vector<bool> mask_plus;   // true where |Psi+| >= floor * max|Psi+|
    std::vector<bool> mask_minus;
    std::vector<std::string> warnings;
};

/// Pointwise ratio form of the tunneling term; masked where the denominator
/// component falls below kAmplitudeFloor of its maximum.
inline InducedPotentials induced_potentials(const ModelParams& p, const SpinorWavefunction& wf,
                                            double amplitude_floor = kAmplitudeFloor) {
    p.validate();
    const double gp = p.gprime();
    const auto n = wf.grid.n_points;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    InducedPotentials out{Eigen::VectorXd::Constant(n, nan), Eigen::VectorXd::Constant(n, nan),
                          std::vector<bool>(static_cast<std::size_t>(n), false),
                          std::vector<bool>(static_cast<std::size_t>(n), false), {}};

    const double max_plus = wf.psi_plus.cwiseAbs().maxCoeff();
    const double max_minus = wf.psi_minus.cwiseAbs().maxCoeff();
    const double denom_plus = (1.0 - 2.0 * gp) * p.omega;
    const double denom_minus = (1.0 + 2.0 * gp) * p.omega;
    const bool plus_ok = std::abs(1.0 - 2.0 * gp) > kCollapseTol;
    const bool minus_ok = std::abs(1.0 + 2.0 * gp) > kCollapseTol;

    for (int i = 0; i < n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        if (plus_ok && std::abs(wf.psi_plus(i)) >= amplitude_floor * max_plus && max_plus > 0) {
            out.mask_plus[k] = true;
            out.dv_plus(i) = -p.tunneling / denom_plus * wf.psi_minus(i) / wf.psi_plus(i);
        }
        if (minus_ok && std::abs(wf.psi_minus(i)) >= amplitude_floor * max_minus && max_minus > 0) {
            out.mask_minus[k] = true;
            out.dv_minus(i) = -p.tunneling / denom_minus * wf.psi_plus(i) / wf.psi_minus(i);
        }
    }

    auto sign_changes = [&](const Eigen::VectorXd& v, const std::vector<bool>& mask) {
        int changes = 0;
        double last = 0.0;
        for (int i = 0; i < n; ++i) {
            if (!mask[static_cast<std::size_t>(i)]) continue;
            if (last != 0.0 && v(i) * last < 0.0) ++changes;
            if (v(i) != 0.0) last = v(i);
        }
        return changes;
    };
    if (sign_changes(wf.psi_plus, out.mask_plus) > 0)
        out.warnings.push_back("Psi+ changes sign inside the mask; dv+ is not a potential well");
    if (sign_changes(wf.psi_minus, out.mask_minus) > 0)
        out.warnings.push_back("Psi- changes sign inside the mask; dv- is not a potential well");
    if (!plus_ok) out.warnings.push_back("dv+ undefined at g' = 1/2");
    return out;
}

struct PotentialCurves {
    Grid grid;
    Eigen::VectorXd v_plus, v_minus;
    Eigen::VectorXd dv_plus, dv_minus;
    Eigen::VectorXd veff_plus, veff_minus;
    std::vector<bool> mask_plus, mask_minus;
    std::vector<std::string> warnings;
    bool untrusted{false};
};

inline PotentialCurves potential_curves(const ModelParams& p, const SpinorWavefunction& wf) {
    const auto bare = bare_potentials(p, wf.grid);
    auto induced = induced_potentials(p, wf);
    PotentialCurves c;
    c.grid = wf.grid;
    c.v_plus = bare.v_plus;
    c.v_minus = bare.v_minus;
    c.dv_plus = induced.dv_plus;
    c.dv_minus = induced.dv_minus;
    // At g' = 1/2 the bare v- vanishes and veff- is the induced well alone.
    c.veff_plus = c.v_plus + c.dv_plus;
    c.veff_minus = c.v_minus + c.dv_minus;
    c.mask_plus = std::move(induced.mask_plus);
    c.mask_minus = std::move(induced.mask_minus);
    c.warnings = std::move(induced.warnings);
    c.untrusted = p.beyond_collapse() || wf.truncation_suspect;
    return c;
}

/// Depth of the induced spin-down well, -min dv- over the masked region.
inline double induced_well_depth(const PotentialCurves& c) {
    double lowest = std::numeric_limits<double>::infinity();
    for (int i = 0; i < c.grid.n_points; ++i)
        if (c.mask_minus[static_cast<std::size_t>(i)]) lowest = std::min(lowest, c.dv_minus(i));
    return -lowest;
}

/// Effective-potential profile above the collapse point, built from a finite-cutoff
/// ED state. The result is always flagged untrusted.
inline PotentialCurves barrier_profile_beyond_collapse(const ModelParams& p, const SpinorWavefunction& wf) {
    if (!p.beyond_collapse()) throw std::domain_error("barrier_profile_beyond_collapse: requires |g'| > 1/2");
    PotentialCurves c = potential_curves(p, wf);
    c.untrusted = true;
    c.warnings.push_back("beyond collapse: finite-cutoff state, spurious bound state");
    return c;
}

/// Indices of strict local minima of veff- inside the masked region.
inline std::vector<int> local_minima(const Eigen::VectorXd& v, const std::vector<bool>& mask) {
    std::vector<int> out;
    for (int i = 1; i + 1 < v.size(); ++i) {
        const auto k = static_cast<std::size_t>(i);
        if (!mask[k - 1] || !mask[k] || !mask[k + 1]) continue;
        if (v(i) < v(i - 1) && v(i) <= v(i + 1)) out.push_back(i);
    }
    return out;
}

/// Largest pointwise residual of the single-particle equations over grid
/// points with |x| <= x_limit (interior only), using central differences.
inline double schrodinger_residual(const ModelParams& p, const SpinorWavefunction& wf, double energy,
                                   double x_limit) {
    const double gp = p.gprime();
    const double shifted = energy - p.epsilon0();
    const Eigen::VectorXd d2p = second_derivative(wf.psi_plus, wf.grid);
    const Eigen::VectorXd d2m = second_derivative(wf.psi_minus, wf.grid);
    const double half_w = 0.5 * p.omega, half_t = 0.5 * p.tunneling;
    double worst = 0.0;
    for (int i = 1; i + 1 < wf.grid.n_points; ++i) {
        const double x = wf.grid.x(i);
        if (std::abs(x) > x_limit) continue;
        const double rp = half_w * ((1.0 - 2.0 * gp) * -d2p(i) + (1.0 + 2.0 * gp) * x * x * wf.psi_plus(i)) -
                          half_t * wf.psi_minus(i) - shifted * wf.psi_plus(i);
        const double rm = half_w * ((1.0 + 2.0 * gp) * -d2m(i) + (1.0 - 2.0 * gp) * x * x * wf.psi_minus(i)) -
                          half_t * wf.psi_plus(i) - shifted * wf.psi_minus(i);
        worst = std::max({worst, std::abs(rp), std::abs(rm)});
    }
    return worst;
}

/// Number of levels below -omega/2 - delta*omega at the collapse point.
inline int count_discrete_levels(const ModelParams& p, int n_max, double delta = 0.01,
                                 SolverBackend backend = SolverBackend::dense) {
    if (!at_collapse(p)) throw std::domain_error("count_discrete_levels: requires |g| = omega/2");
    const FockBasisSpec basis{n_max};
    const Eigen::VectorXd e = lowest_levels(p, basis, static_cast<Eigen::Index>(basis.dim()), backend);
    const double threshold = -0.5 * p.omega - delta * p.omega;
    return static_cast<int>((e.array() < threshold).count());
}

}  // namespace rabi2
