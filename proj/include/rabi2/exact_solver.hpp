// exact_solver.hpp: exact diagonalization, parameter scans and truncation diagnostics

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <exception>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "rabi2/model.hpp"
#include "rabi2/tridiagonal.hpp"

namespace rabi2 {

enum class SolverBackend {
    dense,            // Eigen self-adjoint solver on the full matrix
    parity_chains,    // exact split into tridiagonal chains, then implicit QL
};

struct SolveOptions {
    SolverBackend backend{SolverBackend::dense};
    bool want_vectors{false};
};

struct EigenSolution {
    Eigen::VectorXd energies;              // k lowest, ascending
    Eigen::MatrixXd vectors;               // dim x k when requested, else empty
    std::optional<double> residual_norm;   // max ||Hv - Ev|| over returned pairs

    bool has_vectors() const { return vectors.cols() > 0; }
};

namespace detail {

inline double inf_norm(const Eigen::MatrixXd& m) {
    return m.cwiseAbs().rowwise().sum().maxCoeff();
}

inline void check_solution(const Eigen::MatrixXd& h, EigenSolution& sol) {
    if (!sol.has_vectors()) return;
    const Eigen::MatrixXd r = h * sol.vectors - sol.vectors * sol.energies.asDiagonal();
    sol.residual_norm = r.colwise().norm().maxCoeff();
    const double bound = 1e-9 * std::max(1.0, inf_norm(h));
    if (*sol.residual_norm > bound)
        throw ConvergenceError("solve: residual " + std::to_string(*sol.residual_norm) +
                               " exceeds bound " + std::to_string(bound));
}

inline EigenSolution solve_dense(const Eigen::MatrixXd& h, Eigen::Index k, bool want_vectors) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
        h, want_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        throw ConvergenceError("solve: dense self-adjoint solver failed to converge (dim " +
                               std::to_string(h.rows()) + ")");
    EigenSolution sol;
    sol.energies = es.eigenvalues().head(k);
    if (want_vectors) sol.vectors = es.eigenvectors().leftCols(k);
    return sol;
}

/// One tridiagonal block of H in the sigma_x basis. The operator
/// sigma_x * exp(i pi a^dag a / 2) commutes with H; in the basis
/// |n, +x>, |n, -x> the coupling term only links |n, s> with |n +- 2, -s>,
/// so each (n mod 2, starting spin) pair spans an invariant chain.
struct Chain {
    std::vector<int> photon;   // n along the chain
    std::vector<int> spin_x;   // +1 or -1 along the chain
    Eigen::VectorXd diag;
    Eigen::VectorXd off;
};

inline std::vector<Chain> build_chains(const ModelParams& p, const FockBasisSpec& basis) {
    std::vector<Chain> chains;
    for (int n0 = 0; n0 <= 1; ++n0) {
        if (basis.sector == Sector::even_photon && n0 == 1) continue;
        if (basis.sector == Sector::odd_photon && n0 == 0) continue;
        for (int s0 : {+1, -1}) {
            Chain c;
            int s = s0;
            for (int n = n0; n <= basis.n_max; n += 2, s = -s) {
                c.photon.push_back(n);
                c.spin_x.push_back(s);
            }
            const auto len = static_cast<Eigen::Index>(c.photon.size());
            if (len == 0) continue;
            c.diag.resize(len);
            c.off.resize(std::max<Eigen::Index>(len - 1, 0));
            for (Eigen::Index i = 0; i < len; ++i) {
                const double n = c.photon[static_cast<std::size_t>(i)];
                c.diag(i) = p.omega * n + 0.5 * p.tunneling * c.spin_x[static_cast<std::size_t>(i)];
                if (i + 1 < len) c.off(i) = p.coupling * std::sqrt((n + 1.0) * (n + 2.0));
            }
            chains.push_back(std::move(c));
        }
    }
    return chains;
}

/// Position of |n, spin> in the (n, spin) basis of `basis`; spin 0 = up.
inline Eigen::Index basis_index(const FockBasisSpec& basis, int n, int spin) {
    const int k = basis.sector == Sector::full ? n : n / 2;
    return 2 * static_cast<Eigen::Index>(k) + spin;
}

inline EigenSolution solve_chains(const HamiltonianMatrix& h, Eigen::Index k, bool want_vectors) {
    const auto chains = build_chains(h.params, h.basis);
    struct Level {
        double e;
        std::size_t chain;
        Eigen::Index col;
    };
    std::vector<Level> levels;
    std::vector<TridiagonalEigen> parts;
    parts.reserve(chains.size());
    for (std::size_t c = 0; c < chains.size(); ++c) {
        parts.push_back(tridiagonal_eigen(chains[c].diag, chains[c].off, want_vectors));
        for (Eigen::Index i = 0; i < parts.back().values.size(); ++i)
            levels.push_back({parts.back().values(i), c, i});
    }
    std::stable_sort(levels.begin(), levels.end(), [](const Level& a, const Level& b) { return a.e < b.e; });

    EigenSolution sol;
    sol.energies.resize(k);
    if (want_vectors) sol.vectors = Eigen::MatrixXd::Zero(h.dim(), k);
    const double r = std::sqrt(0.5);
    for (Eigen::Index j = 0; j < k; ++j) {
        const Level& lv = levels[static_cast<std::size_t>(j)];
        sol.energies(j) = lv.e;
        if (!want_vectors) continue;
        const Chain& ch = chains[lv.chain];
        const auto& z = parts[lv.chain].vectors;
        for (std::size_t i = 0; i < ch.photon.size(); ++i) {
            const double amp = z(static_cast<Eigen::Index>(i), lv.col);
            const int n = ch.photon[i];
            // |+x> = (|up> + |dn>)/sqrt2, |-x> = (|up> - |dn>)/sqrt2
            sol.vectors(basis_index(h.basis, n, 0), j) += r * amp;
            sol.vectors(basis_index(h.basis, n, 1), j) += r * amp * ch.spin_x[i];
        }
    }
    return sol;
}

}  // namespace detail

/// k lowest eigenpairs of an arbitrary dense symmetric matrix.
inline EigenSolution solve(const Eigen::MatrixXd& h, Eigen::Index k, bool want_vectors = false) {
    if (h.rows() != h.cols()) throw std::invalid_argument("solve: matrix must be square");
    if (k < 1 || k > h.rows())
        throw std::invalid_argument("solve: need 1 <= k <= dim, got k = " + std::to_string(k));
    EigenSolution sol = detail::solve_dense(h, k, want_vectors);
    detail::check_solution(h, sol);
    return sol;
}

/// k lowest eigenpairs of the model Hamiltonian.
inline EigenSolution solve(const HamiltonianMatrix& h, Eigen::Index k, const SolveOptions& opt = {}) {
    if (k < 1 || k > h.dim())
        throw std::invalid_argument("solve: need 1 <= k <= dim, got k = " + std::to_string(k));
    EigenSolution sol = opt.backend == SolverBackend::dense
                            ? detail::solve_dense(h.entries, k, opt.want_vectors)
                            : detail::solve_chains(h, k, opt.want_vectors);
    detail::check_solution(h.entries, sol);
    return sol;
}

/// Eigenvalues only, straight from model parameters. The chain backend never
/// forms the dense matrix, so it stays cheap at large cutoffs.
inline Eigen::VectorXd lowest_levels(const ModelParams& p, const FockBasisSpec& basis, Eigen::Index k,
                                     SolverBackend backend = SolverBackend::dense) {
    p.validate();
    basis.validate();
    const auto dim = static_cast<Eigen::Index>(basis.dim());
    k = std::min(k, dim);
    if (backend == SolverBackend::dense) return solve(build_fock_hamiltonian(p, basis), k).energies;
    std::vector<double> all;
    for (const auto& c : detail::build_chains(p, basis)) {
        const auto part = tridiagonal_eigen(c.diag, c.off, false);
        all.insert(all.end(), part.values.data(), part.values.data() + part.values.size());
    }
    std::sort(all.begin(), all.end());
    return Eigen::Map<Eigen::VectorXd>(all.data(), k);
}

// ---------------------------------------------------------------------------
// Eigenstates in the Fock basis

/// Normalized eigenvector with coefficients c[2k + s] over |n_k, s>.
struct FockState {
    Eigen::VectorXd coefficients;
    FockBasisSpec basis;
    ModelParams params;
    double energy{0.0};

    /// Weight on the top 10 retained photon numbers.
    double tail_mass() const {
        const auto ns = basis.photon_numbers();
        double mass = 0.0;
        for (std::size_t k = 0; k < ns.size(); ++k) {
            if (ns[k] > basis.n_max - 10) {
                const auto i = static_cast<Eigen::Index>(2 * k);
                mass += coefficients(i) * coefficients(i) + coefficients(i + 1) * coefficients(i + 1);
            }
        }
        return mass;
    }

    bool truncation_suspect(double threshold = 1e-6) const { return tail_mass() > threshold; }

    /// Coefficient of |n, spin> (spin 0 = up, 1 = down); zero if n is not retained.
    double coeff(int n, int spin) const {
        if (n < 0 || n > basis.n_max) return 0.0;
        if (basis.sector == Sector::even_photon && n % 2 != 0) return 0.0;
        if (basis.sector == Sector::odd_photon && n % 2 == 0) return 0.0;
        return coefficients(detail::basis_index(basis, n, spin));
    }
};

/// Eigenstate `level` (0 = ground) of the model at the given truncation.
inline FockState eigenstate(const ModelParams& p, const FockBasisSpec& basis, int level = 0,
                            SolverBackend backend = SolverBackend::dense) {
    const HamiltonianMatrix h = build_fock_hamiltonian(p, basis);
    const EigenSolution sol = solve(h, level + 1, SolveOptions{backend, true});
    FockState st{sol.vectors.col(level), basis, p, sol.energies(level)};
    st.coefficients.normalize();
    return st;
}

inline FockState ground_state(const ModelParams& p, const FockBasisSpec& basis,
                              SolverBackend backend = SolverBackend::dense) {
    return eigenstate(p, basis, 0, backend);
}

// ---------------------------------------------------------------------------
// Scans

/// Runs fn(i) for i in [0, count) on up to `workers` threads.
inline void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn) {
    const std::size_t nthreads = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, workers)));
    if (nthreads <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < nthreads; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count || failed.load()) return;
                try {
                    fn(i);
                } catch (...) {
                    if (!failed.exchange(true)) failure = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

struct ScanOptions {
    Eigen::Index levels{60};            // k; clipped to dim
    double discrete_delta{0.01};        // in units of omega
    bool allow_beyond_collapse{false};
    int workers{1};
    SolverBackend backend{SolverBackend::dense};
};

enum class LevelKind { regular, discrete, collapsed };

inline const char* to_string(LevelKind k) {
    switch (k) {
        case LevelKind::regular: return "regular";
        case LevelKind::discrete: return "discrete";
        case LevelKind::collapsed: return "collapsed";
    }
    return "?";
}

struct SpectrumRow {
    double scan_value{0.0};         // g/omega or Omega/omega
    Eigen::VectorXd energies;       // absolute energies, ascending
    std::vector<LevelKind> kinds;   // per level; discrete/collapsed only at the collapse point
    bool untrusted{false};          // beyond the collapse point
    int discrete_count{0};
};

struct SpectrumTable {
    ModelParams base;
    int n_max{0};
    double discrete_delta{0.01};
    std::vector<SpectrumRow> rows;
};

inline bool at_collapse(const ModelParams& p) { return std::abs(std::abs(p.gprime()) - 0.5) <= kCollapseTol; }

/// Labels levels at the collapse point: below -omega/2 - delta*omega is discrete.
inline void classify_levels(const ModelParams& p, double delta, SpectrumRow& row) {
    row.kinds.assign(static_cast<std::size_t>(row.energies.size()), LevelKind::regular);
    row.discrete_count = 0;
    if (!at_collapse(p)) return;
    const double threshold = -0.5 * p.omega - delta * p.omega;
    for (Eigen::Index i = 0; i < row.energies.size(); ++i) {
        const bool discrete = row.energies(i) < threshold;
        row.kinds[static_cast<std::size_t>(i)] = discrete ? LevelKind::discrete : LevelKind::collapsed;
        row.discrete_count += discrete ? 1 : 0;
    }
}

/// Lowest levels versus coupling; g_values are absolute couplings g.
inline SpectrumTable scan_coupling(const ModelParams& base, const std::vector<double>& g_values, int n_max,
                                   const ScanOptions& opt = {}) {
    base.validate();
    SpectrumTable table{base, n_max, opt.discrete_delta, {}};
    table.rows.resize(g_values.size());
    for (double g : g_values) {
        if (std::abs(g / base.omega) > 0.5 + kCollapseTol && !opt.allow_beyond_collapse)
            throw std::domain_error("scan_coupling: |g/omega| > 1/2 requires allow_beyond_collapse");
    }
    parallel_for(g_values.size(), opt.workers, [&](std::size_t i) {
        ModelParams p = base;
        p.coupling = g_values[i];
        SpectrumRow row;
        row.scan_value = p.gprime();
        row.energies = lowest_levels(p, FockBasisSpec{n_max}, opt.levels, opt.backend);
        row.untrusted = p.beyond_collapse();
        classify_levels(p, opt.discrete_delta, row);
        table.rows[i] = std::move(row);
    });
    return table;
}

/// Levels at g = omega/2 versus tunneling, with the discrete-level count per row.
inline SpectrumTable scan_tunneling_at_collapse(double omega, const std::vector<double>& tunneling_values,
                                                int n_max, const ScanOptions& opt = {}) {
    ModelParams base(omega, 0.0, 0.5 * omega);
    SpectrumTable table{base, n_max, opt.discrete_delta, {}};
    table.rows.resize(tunneling_values.size());
    parallel_for(tunneling_values.size(), opt.workers, [&](std::size_t i) {
        ModelParams p = base;
        p.tunneling = tunneling_values[i];
        SpectrumRow row;
        row.scan_value = p.tunneling / p.omega;
        row.energies = lowest_levels(p, FockBasisSpec{n_max}, opt.levels, opt.backend);
        classify_levels(p, opt.discrete_delta, row);
        table.rows[i] = std::move(row);
    });
    return table;
}

inline std::vector<double> level_spacings(const Eigen::VectorXd& energies) {
    std::vector<double> out;
    for (Eigen::Index i = 0; i + 1 < energies.size(); ++i) out.push_back(energies(i + 1) - energies(i));
    return out;
}

struct LinearFit {
    double slope{0.0};
    double intercept{0.0};
    double r_squared{0.0};
};

inline LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_line: need >= 2 matched points");
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    LinearFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ss_res = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (f.intercept + f.slope * x[i]);
        ss_res += r * r;
    }
    f.r_squared = syy > 0 ? 1.0 - ss_res / syy : 1.0;
    return f;
}

// ---------------------------------------------------------------------------
// Cutoff dependence

struct CutoffRow {
    int cutoff{0};
    double e0{0.0};  // E0 / omega
    double e1{0.0};  // E1 / omega
};

struct CutoffScanTable {
    ModelParams params;
    CutoffConvention convention{CutoffConvention::states_per_spin};
    bool untrusted{false};
    std::vector<CutoffRow> rows;
};

inline CutoffScanTable scan_cutoff(const ModelParams& p, const std::vector<int>& cutoffs,
                                   CutoffConvention conv = CutoffConvention::states_per_spin,
                                   SolverBackend backend = SolverBackend::dense, int workers = 1) {
    p.validate();
    for (std::size_t i = 1; i < cutoffs.size(); ++i)
        if (cutoffs[i] <= cutoffs[i - 1]) throw std::invalid_argument("scan_cutoff: cutoffs must be strictly increasing");
    CutoffScanTable table{p, conv, p.beyond_collapse(), {}};
    table.rows.resize(cutoffs.size());
    parallel_for(cutoffs.size(), workers, [&](std::size_t i) {
        const Eigen::VectorXd e = lowest_levels(p, FockBasisSpec{n_max_from_cutoff(cutoffs[i], conv)}, 2, backend);
        table.rows[i] = {cutoffs[i], e(0) / p.omega, e(1) / p.omega};
    });
    return table;
}

enum class ConvergenceClass { converged, spurious_plateau, divergent, irregular };

inline const char* to_string(ConvergenceClass c) {
    switch (c) {
        case ConvergenceClass::converged: return "converged";
        case ConvergenceClass::spurious_plateau: return "spurious_plateau";
        case ConvergenceClass::divergent: return "divergent";
        case ConvergenceClass::irregular: return "irregular";
    }
    return "?";
}

/// Classifies E0 versus cutoff. A plateau is a run of at least two successive
/// steps with |dE0| < plateau_tol starting at the first row.
inline ConvergenceClass classify_convergence(const CutoffScanTable& table, double plateau_tol = 1e-6,
                                             double drop_tol = 1e-3) {
    const auto& rows = table.rows;
    if (rows.size() < 3) throw std::invalid_argument("classify_convergence: need at least 3 rows");
    std::vector<double> d;
    for (std::size_t i = 1; i < rows.size(); ++i) d.push_back(rows[i].e0 - rows[i - 1].e0);

    if (std::all_of(d.begin(), d.end(), [&](double x) { return std::abs(x) < plateau_tol; }))
        return ConvergenceClass::converged;
    if (std::all_of(d.begin(), d.end(), [&](double x) { return x < -drop_tol; })) return ConvergenceClass::divergent;

    std::size_t plateau = 0;
    while (plateau < d.size() && std::abs(d[plateau]) < plateau_tol) ++plateau;
    if (plateau >= 2 && plateau < d.size() && d[plateau] < -drop_tol) return ConvergenceClass::spurious_plateau;
    return ConvergenceClass::irregular;
}

}  // namespace rabi2
