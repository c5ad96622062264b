// polaron.hpp: multi-polaron variational ground state
//
// Trial state (Psi+ |up> - Psi- |down>) / sqrt2 with
//
//   Psi+(x) = sum_n alpha_n phi_{xi+_n}(x),   Psi-(x) = sum_n beta_n phi_{xi-_n}(x),
//
// where phi_xi is the centred Gaussian of frequency xi * omega. For fixed
// frequencies the energy is a Rayleigh quotient in the weights, so the optimal
// weights come from the lowest generalized eigenpair of (A, B). The outer loop
// searches the 2N log-frequencies with restarted Nelder-Mead from several
// deterministic starting points.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rabi2/gaussian_kernels.hpp"
#include "rabi2/grid.hpp"
#include "rabi2/model.hpp"
#include "rabi2/nelder_mead.hpp"

namespace rabi2 {

struct PolaronAnsatz {
    int pairs{1};  // N
    std::vector<double> xi_plus;
    std::vector<double> xi_minus;
    std::vector<double> weights_plus;   // alpha_n
    std::vector<double> weights_minus;  // beta_n

    /// (<Psi+|Psi+> + <Psi-|Psi->) / 2
    double normalization() const {
        double plus = 0.0, minus = 0.0;
        for (std::size_t n = 0; n < xi_plus.size(); ++n)
            for (std::size_t m = 0; m < xi_plus.size(); ++m)
                plus += weights_plus[n] * weights_plus[m] * overlap(xi_plus[n], xi_plus[m]);
        for (std::size_t n = 0; n < xi_minus.size(); ++n)
            for (std::size_t m = 0; m < xi_minus.size(); ++m)
                minus += weights_minus[n] * weights_minus[m] * overlap(xi_minus[n], xi_minus[m]);
        return 0.5 * (plus + minus);
    }
};

struct TraceEntry {
    int start{0};
    int round{0};
    int evaluations{0};
    double energy{0.0};
};

struct VariationalSolution {
    ModelParams params;
    PolaronAnsatz ansatz;
    double energy{0.0};
    std::vector<TraceEntry> optimizer_trace;
    bool converged{false};
};

struct GeneralizedProblem {
    Eigen::MatrixXd a;  // Hamiltonian minus epsilon0, in the doubled weight space
    Eigen::MatrixXd b;  // overlaps
};

/// A = [[H+, -(Omega/2) Sc], [-(Omega/2) Sc^T, H-]],  B = diag(S+, S-),
/// H+-[n,m] = (omega/2)[(1 -+ 2g') kinetic + (1 +- 2g') moment_x2].
inline GeneralizedProblem assemble_generalized_problem(const ModelParams& p, const std::vector<double>& xi_plus,
                                                       const std::vector<double>& xi_minus) {
    p.validate();
    if (std::abs(p.gprime()) > 0.5 + kCollapseTol)
        throw std::domain_error("assemble_generalized_problem: |g'| > 1/2 has no normalizable ground state");
    const auto np = static_cast<Eigen::Index>(xi_plus.size());
    const auto nm = static_cast<Eigen::Index>(xi_minus.size());
    const double gp = p.gprime();
    const double half_w = 0.5 * p.omega;
    const double half_t = 0.5 * p.tunneling;

    // filled by mirroring so A and B are symmetric bit for bit
    GeneralizedProblem gpb{Eigen::MatrixXd::Zero(np + nm, np + nm), Eigen::MatrixXd::Zero(np + nm, np + nm)};
    for (Eigen::Index i = 0; i < np; ++i) {
        for (Eigen::Index j = i; j < np; ++j) {
            const double a = xi_plus[static_cast<std::size_t>(i)], b = xi_plus[static_cast<std::size_t>(j)];
            gpb.a(i, j) = gpb.a(j, i) = half_w * ((1.0 - 2.0 * gp) * kinetic(a, b) + (1.0 + 2.0 * gp) * moment_x2(a, b));
            gpb.b(i, j) = gpb.b(j, i) = overlap(a, b);
        }
    }
    for (Eigen::Index i = 0; i < nm; ++i) {
        for (Eigen::Index j = i; j < nm; ++j) {
            const double a = xi_minus[static_cast<std::size_t>(i)], b = xi_minus[static_cast<std::size_t>(j)];
            gpb.a(np + i, np + j) = gpb.a(np + j, np + i) =
                half_w * ((1.0 + 2.0 * gp) * kinetic(a, b) + (1.0 - 2.0 * gp) * moment_x2(a, b));
            gpb.b(np + i, np + j) = gpb.b(np + j, np + i) = overlap(a, b);
        }
    }
    for (Eigen::Index i = 0; i < np; ++i) {
        for (Eigen::Index j = 0; j < nm; ++j) {
            const double v = -half_t * overlap(xi_plus[static_cast<std::size_t>(i)], xi_minus[static_cast<std::size_t>(j)]);
            gpb.a(i, np + j) = v;
            gpb.a(np + j, i) = v;
        }
    }
    return gpb;
}

struct RitzPair {
    double eigenvalue{0.0};
    Eigen::VectorXd weights;  // normalized to weights^T B weights = 2
    Eigen::Index rank{0};     // directions kept after canonical orthogonalization
};

/// Lowest eigenpair of A c = lambda B c. B is diagonalized first and directions
/// with eigenvalue below rel_cutoff * max are discarded (canonical orthogonalization).
inline RitzPair lowest_generalized_eigenpair(const GeneralizedProblem& gpb, double rel_cutoff = 1e-10) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> bs(gpb.b);
    if (bs.info() != Eigen::Success) throw ConvergenceError("lowest_generalized_eigenpair: overlap diagonalization failed");
    const Eigen::VectorXd& s = bs.eigenvalues();
    const double smax = s.maxCoeff();
    Eigen::Index first = 0;
    while (first < s.size() && s(first) < rel_cutoff * smax) ++first;
    const Eigen::Index rank = s.size() - first;
    if (rank == 0) throw std::domain_error("lowest_generalized_eigenpair: overlap matrix has no usable directions");

    const Eigen::MatrixXd x = bs.eigenvectors().rightCols(rank) * s.tail(rank).cwiseSqrt().cwiseInverse().asDiagonal();
    const Eigen::MatrixXd reduced = x.transpose() * gpb.a * x;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> rs(0.5 * (reduced + reduced.transpose()));
    if (rs.info() != Eigen::Success) throw ConvergenceError("lowest_generalized_eigenpair: reduced problem failed");

    RitzPair out;
    out.eigenvalue = rs.eigenvalues()(0);
    out.weights = std::numbers::sqrt2 * (x * rs.eigenvectors().col(0));
    out.rank = rank;
    return out;
}

/// Variational energy with optimal weights at fixed frequencies.
inline double energy_at_frequencies(const ModelParams& p, const std::vector<double>& xi_plus,
                                    const std::vector<double>& xi_minus) {
    return p.epsilon0() + lowest_generalized_eigenpair(assemble_generalized_problem(p, xi_plus, xi_minus)).eigenvalue;
}

/// Energy of an ansatz with given weights (no optimization).
inline double ansatz_energy(const ModelParams& p, const PolaronAnsatz& an) {
    const auto gpb = assemble_generalized_problem(p, an.xi_plus, an.xi_minus);
    Eigen::VectorXd c(static_cast<Eigen::Index>(an.weights_plus.size() + an.weights_minus.size()));
    for (std::size_t i = 0; i < an.weights_plus.size(); ++i) c(static_cast<Eigen::Index>(i)) = an.weights_plus[i];
    for (std::size_t i = 0; i < an.weights_minus.size(); ++i)
        c(static_cast<Eigen::Index>(an.weights_plus.size() + i)) = an.weights_minus[i];
    return p.epsilon0() + c.dot(gpb.a * c) / c.dot(gpb.b * c);
}

struct VariationalConfig {
    int starts{8};
    std::uint64_t seed{1};
    double tol{1e-10};           // energy tolerance in units of omega
    double start_spread{0.5};    // std-dev of log-frequency perturbations for extra starts
    int max_rounds{30};          // Nelder-Mead restarts per start
    double prune_threshold{1e-8};
    double overlap_cutoff{1e-10};
    NelderMeadOptions simplex{};
};

/// Bare frequency pair (xi+, xi-); at the collapse point xi- is clamped to 1e-3.
inline std::pair<double, double> bare_frequencies(const ModelParams& p) {
    const double gp = p.gprime();
    if (std::abs(gp) > 0.5 + kCollapseTol) throw std::domain_error("bare_frequencies: |g'| > 1/2");
    constexpr double kClamp = 1e-3;
    if (std::abs(gp) >= 0.5 - 1e-9) return gp > 0 ? std::pair{1.0 / kClamp, kClamp} : std::pair{kClamp, 1.0 / kClamp};
    const double r = std::clamp(bare_frequency_up(gp), kClamp, 1.0 / kClamp);
    return {r, 1.0 / r};
}

/// The fixed bare state: one Gaussian per spin at the bare frequencies, unit weights.
inline VariationalSolution bare_solution(const ModelParams& p) {
    const auto [up, dn] = bare_frequencies(p);
    VariationalSolution sol;
    sol.params = p;
    sol.ansatz = PolaronAnsatz{1, {up}, {dn}, {1.0}, {1.0}};
    sol.energy = ansatz_energy(p, sol.ansatz);
    sol.converged = true;
    return sol;
}

namespace detail {

inline std::vector<double> geometric_spread(double hi, double lo, int count) {
    std::vector<double> out;
    if (count == 1) return {hi};
    for (int k = 0; k < count; ++k) {
        const double t = static_cast<double>(k) / (count - 1);
        out.push_back(std::exp((1.0 - t) * std::log(hi) + t * std::log(lo)));
    }
    return out;
}

/// Adds one frequency at the geometric midpoint of the widest log-gap.
inline std::vector<double> insert_geometric(std::vector<double> xs, double fallback) {
    if (xs.size() < 2) {
        xs.push_back(fallback);
        return xs;
    }
    std::vector<double> sorted = xs;
    std::sort(sorted.begin(), sorted.end());
    double best_gap = -1.0, mid = fallback;
    for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
        const double gap = std::log(sorted[i + 1] / sorted[i]);
        if (gap > best_gap) {
            best_gap = gap;
            mid = std::sqrt(sorted[i] * sorted[i + 1]);
        }
    }
    if (best_gap < 1e-3) mid = sorted.back() * 1.5;
    xs.push_back(mid);
    return xs;
}

inline Eigen::VectorXd to_log(const std::vector<double>& plus, const std::vector<double>& minus) {
    Eigen::VectorXd t(static_cast<Eigen::Index>(plus.size() + minus.size()));
    for (std::size_t i = 0; i < plus.size(); ++i) t(static_cast<Eigen::Index>(i)) = std::log(plus[i]);
    for (std::size_t i = 0; i < minus.size(); ++i) t(static_cast<Eigen::Index>(plus.size() + i)) = std::log(minus[i]);
    return t;
}

inline void from_log(const Eigen::VectorXd& t, int n, std::vector<double>& plus, std::vector<double>& minus) {
    plus.resize(static_cast<std::size_t>(n));
    minus.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        plus[static_cast<std::size_t>(i)] = std::exp(t(i));
        minus[static_cast<std::size_t>(i)] = std::exp(t(n + i));
    }
}

/// Builds the reported ansatz: optimal weights, negligible components pruned,
/// weights re-solved on the survivors, sign fixed so Psi+(0) >= 0.
inline VariationalSolution finalize(const ModelParams& p, int pairs, std::vector<double> xp, std::vector<double> xm,
                                    const VariationalConfig& cfg) {
    auto solve_weights = [&](const std::vector<double>& a, const std::vector<double>& b) {
        return lowest_generalized_eigenpair(assemble_generalized_problem(p, a, b), cfg.overlap_cutoff);
    };
    RitzPair rp = solve_weights(xp, xm);

    auto max_overlap = [&](const std::vector<double>& xs, std::size_t i) {
        double m = 0.0;
        for (double other : xs) m = std::max(m, overlap(xs[i], other));
        return m;
    };
    std::vector<double> kp, km;
    for (std::size_t i = 0; i < xp.size(); ++i)
        if (std::abs(rp.weights(static_cast<Eigen::Index>(i))) * max_overlap(xp, i) >= cfg.prune_threshold)
            kp.push_back(xp[i]);
    for (std::size_t i = 0; i < xm.size(); ++i)
        if (std::abs(rp.weights(static_cast<Eigen::Index>(xp.size() + i))) * max_overlap(xm, i) >= cfg.prune_threshold)
            km.push_back(xm[i]);
    if (kp.empty()) kp.push_back(xp.front());
    if (km.empty()) km.push_back(xm.front());
    if (kp.size() != xp.size() || km.size() != xm.size()) {
        xp = kp;
        xm = km;
        rp = solve_weights(xp, xm);
    }

    VariationalSolution sol;
    sol.params = p;
    sol.ansatz.pairs = pairs;
    sol.ansatz.xi_plus = xp;
    sol.ansatz.xi_minus = xm;
    double psi_plus_at_0 = 0.0;
    for (std::size_t i = 0; i < xp.size(); ++i) {
        const double w = rp.weights(static_cast<Eigen::Index>(i));
        sol.ansatz.weights_plus.push_back(w);
        psi_plus_at_0 += w * std::pow(xp[i], 0.25);
    }
    for (std::size_t i = 0; i < xm.size(); ++i)
        sol.ansatz.weights_minus.push_back(rp.weights(static_cast<Eigen::Index>(xp.size() + i)));
    if (psi_plus_at_0 < 0.0) {
        for (double& w : sol.ansatz.weights_plus) w = -w;
        for (double& w : sol.ansatz.weights_minus) w = -w;
    }
    sol.energy = p.epsilon0() + rp.eigenvalue;
    return sol;
}

inline int effective_components(const PolaronAnsatz& a) {
    return static_cast<int>(a.xi_plus.size() + a.xi_minus.size());
}

}  // namespace detail

/// Default starting frequencies for N pairs: original polarons at the bare
/// frequencies, induced polarons exchanged between spins, further ones spread
/// geometrically between the two.
inline std::pair<std::vector<double>, std::vector<double>> initial_frequencies(const ModelParams& p, int pairs) {
    const auto [up, dn] = bare_frequencies(p);
    if (pairs == 1) return {{up}, {dn}};
    auto plus = detail::geometric_spread(up, dn, pairs);
    auto minus = detail::geometric_spread(dn, up, pairs);
    // Exact duplicates (g = 0) leave nothing for the search to separate.
    for (int k = 1; k < pairs; ++k) {
        if (std::abs(std::log(plus[static_cast<std::size_t>(k)] / plus[0])) < 1e-6) {
            plus[static_cast<std::size_t>(k)] *= std::pow(1.5, k);
            minus[static_cast<std::size_t>(k)] /= std::pow(1.5, k);
        }
    }
    return {plus, minus};
}

/// Frequencies for N pairs seeded from an (N-1)-pair solution.
inline std::pair<std::vector<double>, std::vector<double>> seeded_frequencies(const VariationalSolution& prev,
                                                                              int pairs) {
    auto plus = prev.ansatz.xi_plus;
    auto minus = prev.ansatz.xi_minus;
    const double up0 = plus.front(), dn0 = minus.front();
    while (static_cast<int>(plus.size()) < pairs) {
        plus = plus.size() == 1 ? std::vector<double>{plus.front(), dn0} : detail::insert_geometric(plus, dn0);
    }
    while (static_cast<int>(minus.size()) < pairs) {
        minus = minus.size() == 1 ? std::vector<double>{minus.front(), up0} : detail::insert_geometric(minus, up0);
    }
    plus.resize(static_cast<std::size_t>(pairs));
    minus.resize(static_cast<std::size_t>(pairs));
    return {plus, minus};
}

/// Minimizes the N-pair energy. When `seed_from` is given, the first start
/// reuses its frequencies (plus new ones), so the result is never above it.
inline VariationalSolution minimize_energy(const ModelParams& p, int pairs, const VariationalConfig& cfg = {},
                                           const VariationalSolution* seed_from = nullptr) {
    p.validate();
    if (pairs < 1) throw std::invalid_argument("minimize_energy: N must be >= 1");
    if (std::abs(p.gprime()) > 0.5 + kCollapseTol)
        throw std::domain_error("minimize_energy: |g'| > 1/2 has no normalizable ground state");

    const auto [plus0, minus0] = seed_from ? seeded_frequencies(*seed_from, pairs) : initial_frequencies(p, pairs);
    const Eigen::VectorXd theta0 = detail::to_log(plus0, minus0);

    constexpr double kLogBound = 25.0;
    auto objective = [&](const Eigen::VectorXd& t) {
        if (t.cwiseAbs().maxCoeff() > kLogBound) return std::numeric_limits<double>::infinity();
        std::vector<double> xp, xm;
        detail::from_log(t, pairs, xp, xm);
        return p.epsilon0() +
               lowest_generalized_eigenpair(assemble_generalized_problem(p, xp, xm), cfg.overlap_cutoff).eigenvalue;
    };

    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> jitter(0.0, cfg.start_spread);

    std::vector<TraceEntry> trace;
    Eigen::VectorXd best_theta = theta0;
    double best_energy = objective(theta0);
    bool best_converged = false;
    int best_components = std::numeric_limits<int>::max();
    const double tol = cfg.tol * p.omega;

    for (int s = 0; s < std::max(1, cfg.starts); ++s) {
        Eigen::VectorXd theta = theta0;
        if (s > 0)
            for (Eigen::Index i = 0; i < theta.size(); ++i) theta(i) += jitter(rng);
        double energy = objective(theta);
        bool converged = false;
        for (int round = 0; round < cfg.max_rounds; ++round) {
            const auto res = nelder_mead(objective, theta, cfg.simplex);
            const double gain = energy - res.f;
            trace.push_back({s, round, res.evaluations, res.f});
            if (res.f <= energy) {
                theta = res.x;
                energy = res.f;
            }
            if (gain < tol && res.converged) {
                converged = true;
                break;
            }
        }
        std::vector<double> xp, xm;
        detail::from_log(theta, pairs, xp, xm);
        const int comps = detail::effective_components(detail::finalize(p, pairs, xp, xm, cfg).ansatz);
        const bool better = energy < best_energy - tol ||
                            (std::abs(energy - best_energy) <= tol && comps < best_components) ||
                            (s == 0 && energy <= best_energy);
        if (better) {
            best_theta = theta;
            best_energy = energy;
            best_converged = converged;
            best_components = comps;
        }
    }

    std::vector<double> xp, xm;
    detail::from_log(best_theta, pairs, xp, xm);
    VariationalSolution sol = detail::finalize(p, pairs, xp, xm, cfg);
    sol.optimizer_trace = std::move(trace);
    sol.converged = best_converged;
    return sol;
}

/// Solutions for N = 1 .. max_pairs, each seeded from the previous one (N = 1
/// from the bare state), so energies are nonincreasing in N.
inline std::vector<VariationalSolution> minimize_sequence(const ModelParams& p, int max_pairs,
                                                          const VariationalConfig& cfg = {}) {
    std::vector<VariationalSolution> out;
    for (int n = 1; n <= max_pairs; ++n) {
        out.push_back(out.empty() ? minimize_energy(p, n, cfg) : minimize_energy(p, n, cfg, &out.back()));
    }
    return out;
}

/// Spinor on a grid plus the per-polaron pieces alpha_n phi_n and beta_n phi_n.
struct PolaronProfile {
    SpinorWavefunction total;
    std::vector<Eigen::VectorXd> plus_components;
    std::vector<Eigen::VectorXd> minus_components;
};

inline PolaronProfile ansatz_profile(const VariationalSolution& sol, const Grid& grid = Grid{}) {
    grid.validate();
    PolaronProfile out;
    out.total = SpinorWavefunction{grid, Eigen::VectorXd::Zero(grid.n_points), Eigen::VectorXd::Zero(grid.n_points),
                                   false};
    const auto& a = sol.ansatz;
    auto fill = [&](const std::vector<double>& xi, const std::vector<double>& w, std::vector<Eigen::VectorXd>& parts,
                    Eigen::VectorXd& total) {
        for (std::size_t k = 0; k < xi.size(); ++k) {
            Eigen::VectorXd comp(grid.n_points);
            for (int i = 0; i < grid.n_points; ++i) comp(i) = w[k] * gaussian_orbital(xi[k], grid.x(i));
            total += comp;
            parts.push_back(std::move(comp));
        }
    };
    fill(a.xi_plus, a.weights_plus, out.plus_components, out.total.psi_plus);
    fill(a.xi_minus, a.weights_minus, out.minus_components, out.total.psi_minus);
    return out;
}

inline SpinorWavefunction ansatz_to_grid(const VariationalSolution& sol, const Grid& grid = Grid{}) {
    return ansatz_profile(sol, grid).total;
}

}  // namespace rabi2
