// rabi2: command-line front end: one subcommand per data product
//
// Every run writes its table (CSV or JSON) plus <name>.manifest.json into the
// output directory. Exit codes: 0 ok, 1 runtime error, 3 untrusted points
// present without --allow-untrusted, CLI11 codes for usage errors.

#include <chrono>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rabi2/rabi2.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace rabi2;

namespace {

constexpr const char* kVersion = "1.0.0";
constexpr int kExitUntrusted = 3;

// ---------------------------------------------------------------------------
// output tables

using Cell = std::variant<double, long long, std::string>;

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

struct Table {
    std::string name;
    std::vector<std::string> comments;  // units and conventions
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add(std::vector<Cell> row) { rows.push_back(std::move(row)); }
};

std::string cell_text(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
    if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
    return std::get<std::string>(c);
}

json cell_json(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) return std::isfinite(*d) ? json(*d) : json(nullptr);
    if (const auto* i = std::get_if<long long>(&c)) return json(*i);
    return json(std::get<std::string>(c));
}

struct Common {
    double omega{1.0};
    double tunneling{1.0};
    std::optional<double> g;
    std::optional<int> n_max;
    int pairs{2};
    std::uint64_t seed{1};
    std::string out_dir{"rabi2-out"};
    std::string format{"csv"};
    bool allow_untrusted{false};
    bool gnuplot{false};
    std::string backend{"dense"};
};

struct RunContext {
    std::string subcommand;
    Common common;
    json parameters = json::object();
    std::string convention{cutoff_convention_text()};
    std::vector<std::string> outputs;
    std::vector<std::string> warnings;
    json summary = json::object();
    bool untrusted{false};
    std::chrono::steady_clock::time_point start{std::chrono::steady_clock::now()};

    fs::path dir() const {
        if (const char* env = std::getenv("RABI2_OUT"); env && *env) return fs::path(env);
        return fs::path(common.out_dir);
    }
};

int workers_from_env() {
    if (const char* env = std::getenv("RABI2_WORKERS"); env && *env) {
        int w = 1;
        const auto r = std::from_chars(env, env + std::strlen(env), w);
        if (r.ec == std::errc() && w >= 1) return w;
        throw std::invalid_argument("RABI2_WORKERS must be a positive integer");
    }
    return 1;
}

SolverBackend backend_of(const std::string& s) {
    return s == "chains" ? SolverBackend::parity_chains : SolverBackend::dense;
}

void write_text(const fs::path& path, const std::string& text, RunContext& ctx) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << text;
    ctx.outputs.push_back(path.filename().string());
}

void write_table(const Table& t, RunContext& ctx) {
    const fs::path dir = ctx.dir();
    fs::create_directories(dir);
    if (ctx.common.format == "json") {
        json j;
        j["comments"] = t.comments;
        j["columns"] = t.columns;
        json rows = json::array();
        for (const auto& r : t.rows) {
            json row = json::array();
            for (const auto& c : r) row.push_back(cell_json(c));
            rows.push_back(row);
        }
        j["rows"] = rows;
        write_text(dir / (t.name + ".json"), j.dump(2) + "\n", ctx);
        return;
    }
    std::ostringstream out;
    out.imbue(std::locale::classic());
    for (const auto& c : t.comments) out << "# " << c << '\n';
    for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
    out << '\n';
    for (const auto& r : t.rows) {
        for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << cell_text(r[i]);
        out << '\n';
    }
    write_text(dir / (t.name + ".csv"), out.str(), ctx);

    if (ctx.common.gnuplot && t.columns.size() >= 2) {
        std::ostringstream gp;
        gp << "set datafile separator ','\nset key autotitle columnhead\nset xlabel '" << t.columns[0] << "'\n";
        gp << "plot ";
        for (std::size_t i = 1; i < t.columns.size(); ++i)
            gp << (i > 1 ? ", \\\n     " : "") << "'" << t.name << ".csv' using 1:" << (i + 1) << " with lines";
        gp << "\npause -1\n";
        write_text(dir / (t.name + ".gp"), gp.str(), ctx);
    }
}

int finish(RunContext& ctx) {
    const fs::path dir = ctx.dir();
    fs::create_directories(dir);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - ctx.start).count();
    json m;
    m["tool"] = "rabi2";
    m["version"] = kVersion;
    m["subcommand"] = ctx.subcommand;
    json params = ctx.parameters;
    params["omega"] = ctx.common.omega;
    params["Omega"] = ctx.common.tunneling;
    if (ctx.common.g) params["g"] = *ctx.common.g;
    if (ctx.common.n_max) params["n_max"] = *ctx.common.n_max;
    params["N"] = ctx.common.pairs;
    params["backend"] = ctx.common.backend;
    params["format"] = ctx.common.format;
    params["workers"] = workers_from_env();
    m["parameters"] = params;
    m["cutoff_convention"] = ctx.convention;
    m["module_versions"] = {{"model-core", kVersion},       {"exact-solver", kVersion},
                            {"grid-repr", kVersion},        {"polaron-variational", kVersion},
                            {"observables", kVersion},      {"potential-analysis", kVersion},
                            {"cli", kVersion}};
    m["seed"] = ctx.common.seed;
    m["untrusted"] = ctx.untrusted;
    m["warnings"] = ctx.warnings;
    m["summary"] = ctx.summary;
    m["wall_time_seconds"] = wall;
    std::vector<std::string> files = ctx.outputs;
    const std::string manifest_name = ctx.subcommand + ".manifest.json";
    files.push_back(manifest_name);
    m["outputs"] = files;
    std::ofstream(dir / manifest_name, std::ios::binary) << m.dump(2) << "\n";

    if (ctx.untrusted && !ctx.common.allow_untrusted) {
        std::cerr << "rabi2: results contain untrusted points (beyond collapse or truncation suspect); "
                     "rerun with --allow-untrusted to accept\n";
        return kExitUntrusted;
    }
    return 0;
}

std::vector<double> linspace(double lo, double hi, int steps) {
    if (steps < 1) throw std::invalid_argument("steps must be >= 1");
    std::vector<double> v;
    for (int i = 0; i < steps; ++i) v.push_back(steps == 1 ? lo : lo + (hi - lo) * i / (steps - 1));
    return v;
}

VariationalConfig variational_config(const Common& c) {
    VariationalConfig cfg;
    cfg.seed = c.seed;
    return cfg;
}

// default cutoff for ground-state work: generous near the collapse point
int ground_n_max(const Common& c, double gp) {
    if (c.n_max) return *c.n_max;
    return std::abs(gp) < 0.45 ? 400 : 799;
}

const char* kEnergyUnits = "energies in units of omega; g_over_omega = g/omega";

// ---------------------------------------------------------------------------
// subcommands

struct ScanRange {
    double lo{0.0}, hi{0.5};
    int steps{51};
};

int run_energy_scan(RunContext& ctx, const ScanRange& r, const std::vector<std::string>& methods) {
    const Common& c = ctx.common;
    const auto gs = linspace(r.lo, r.hi, r.steps);
    const bool want_var = std::count(methods.begin(), methods.end(), "n1") + std::count(methods.begin(), methods.end(), "n2") > 0;
    for (double gp : gs)
        if (std::abs(gp) > 0.5 + kCollapseTol && (want_var || std::count(methods.begin(), methods.end(), "bare")))
            throw CLI::ValidationError("--g-max", "variational and bare methods need |g/omega| <= 0.5");
    ctx.parameters["g_min"] = r.lo;
    ctx.parameters["g_max"] = r.hi;
    ctx.parameters["g_steps"] = r.steps;
    ctx.parameters["methods"] = methods;

    struct Row {
        double bare{NAN}, n1{NAN}, n2{NAN}, ed{NAN};
        bool untrusted{false};
    };
    std::vector<Row> rows(gs.size());
    parallel_for(gs.size(), workers_from_env(), [&](std::size_t i) {
        const ModelParams p(c.omega, c.tunneling, gs[i] * c.omega);
        Row& row = rows[i];
        for (const auto& m : methods) {
            if (m == "bare") row.bare = bare_state_energy_closed(p) / c.omega;
            if (m == "ed") {
                const auto st = ground_state(p, FockBasisSpec(ground_n_max(c, gs[i])), backend_of(c.backend));
                row.ed = st.energy / c.omega;
                row.untrusted |= st.truncation_suspect() || p.beyond_collapse();
            }
        }
        if (want_var) {
            const auto seq = minimize_sequence(p, 2, variational_config(c));
            row.n1 = seq[0].energy / c.omega;
            row.n2 = seq[1].energy / c.omega;
        }
    });

    Table t{"energy-scan", {kEnergyUnits, ctx.convention}, {"g_over_omega"}, {}};
    const std::vector<std::pair<std::string, std::string>> order{{"bare", "E_bare"}, {"n1", "E_N1"}, {"n2", "E_N2"}, {"ed", "E_ED"}};
    for (const auto& [key, col] : order)
        if (std::count(methods.begin(), methods.end(), key)) t.columns.push_back(col);
    for (std::size_t i = 0; i < gs.size(); ++i) {
        std::vector<Cell> row{gs[i]};
        for (const auto& [key, col] : order) {
            if (!std::count(methods.begin(), methods.end(), key)) continue;
            const Row& rr = rows[i];
            row.push_back(key == "bare" ? rr.bare : key == "n1" ? rr.n1 : key == "n2" ? rr.n2 : rr.ed);
        }
        t.add(row);
        ctx.untrusted |= rows[i].untrusted;
    }
    write_table(t, ctx);
    return finish(ctx);
}

int run_observables_scan(RunContext& ctx, const ScanRange& r) {
    const Common& c = ctx.common;
    const auto gs = linspace(r.lo, r.hi, r.steps);
    for (double gp : gs)
        if (std::abs(gp) > 0.5 + kCollapseTol) throw CLI::ValidationError("--g-max", "needs |g/omega| <= 0.5");
    ctx.parameters["g_min"] = r.lo;
    ctx.parameters["g_max"] = r.hi;
    ctx.parameters["g_steps"] = r.steps;

    const int n_var = c.pairs;
    // per point: ED then N = 1..n_var; each with (sigma_x, photons, correlation, closure residual)
    std::vector<std::vector<std::array<double, 4>>> values(gs.size());
    std::vector<char> untrusted(gs.size(), 0);
    parallel_for(gs.size(), workers_from_env(), [&](std::size_t i) {
        const ModelParams p(c.omega, c.tunneling, gs[i] * c.omega);
        auto measure = [](const GroundStateHandle& h) {
            return std::array<double, 4>{sigma_x(h), mean_photon_number(h), coupling_correlation(h),
                                         energy_from_observables(h) - energy_of(h)};
        };
        const auto st = ground_state(p, FockBasisSpec(ground_n_max(c, gs[i])), backend_of(c.backend));
        untrusted[i] = st.truncation_suspect();
        values[i].push_back(measure(st));
        for (const auto& s : minimize_sequence(p, n_var, variational_config(c))) values[i].push_back(measure(s));
    });

    Table t{"observables-scan",
            {"sigma_x and photons dimensionless; correlation = <sigma_z((a^dag)^2 + a^2)>; closure in units of omega",
             ctx.convention},
            {"g_over_omega"},
            {}};
    std::vector<std::string> tags{"ED"};
    for (int n = 1; n <= n_var; ++n) tags.push_back("N" + std::to_string(n));
    for (const char* q : {"sigma_x", "photons", "correlation", "closure"})
        for (const auto& tag : tags) t.columns.push_back(std::string(q) + "_" + tag);
    for (std::size_t i = 0; i < gs.size(); ++i) {
        std::vector<Cell> row{gs[i]};
        for (int q = 0; q < 4; ++q)
            for (std::size_t m = 0; m < tags.size(); ++m)
                row.push_back(q == 3 ? values[i][m][3] / c.omega : values[i][m][static_cast<std::size_t>(q)]);
        t.add(row);
        ctx.untrusted |= untrusted[i] != 0;
    }
    write_table(t, ctx);
    return finish(ctx);
}

json solution_json(const VariationalSolution& s) {
    json trace = json::array();
    for (const auto& e : s.optimizer_trace)
        trace.push_back({{"start", e.start}, {"round", e.round}, {"evaluations", e.evaluations}, {"energy", e.energy}});
    return {{"N", s.ansatz.pairs},
            {"energy", s.energy},
            {"xi_plus", s.ansatz.xi_plus},
            {"xi_minus", s.ansatz.xi_minus},
            {"weights_plus", s.ansatz.weights_plus},
            {"weights_minus", s.ansatz.weights_minus},
            {"converged", s.converged},
            {"trace", trace}};
}

int run_wavefunction(RunContext& ctx, const std::string& method, bool decompose, double half_width, int points) {
    const Common& c = ctx.common;
    const double gp = c.g.value_or(0.4);
    const ModelParams p(c.omega, c.tunneling, gp * c.omega);
    const Grid grid(half_width, points);
    grid.validate();
    ctx.parameters["method"] = method;
    ctx.parameters["g"] = gp;
    ctx.parameters["decompose"] = decompose;
    ctx.parameters["x_max"] = half_width;
    ctx.parameters["points"] = points;

    Table t{"wavefunction",
            {"x in oscillator lengths; state = (Psi+ |up> - Psi- |down>)/sqrt2, sign fixed by Psi+(0) >= 0"},
            {"x", "psi_plus", "psi_minus"},
            {}};
    if (method == "ed") {
        if (decompose) throw CLI::ValidationError("--decompose", "only available with --method polaron");
        const int nm = ground_n_max(c, gp);
        const auto st = ground_state(p, FockBasisSpec(nm), backend_of(c.backend));
        const auto wf = fock_to_grid(st, grid);
        for (int i = 0; i < grid.n_points; ++i) t.add({grid.x(i), wf.psi_plus(i), wf.psi_minus(i)});
        ctx.untrusted = wf.truncation_suspect || p.beyond_collapse();
        ctx.summary = {{"energy", st.energy}, {"n_max", nm}, {"tail_mass", st.tail_mass()}};
        t.comments.push_back(ctx.convention);
    } else {
        const auto sol = minimize_sequence(p, c.pairs, variational_config(c)).back();
        const auto prof = ansatz_profile(sol, grid);
        if (decompose) {
            for (std::size_t k = 0; k < prof.plus_components.size(); ++k) t.columns.push_back("plus_" + std::to_string(k + 1));
            for (std::size_t k = 0; k < prof.minus_components.size(); ++k) t.columns.push_back("minus_" + std::to_string(k + 1));
        }
        for (int i = 0; i < grid.n_points; ++i) {
            std::vector<Cell> row{grid.x(i), prof.total.psi_plus(i), prof.total.psi_minus(i)};
            if (decompose) {
                for (const auto& v : prof.plus_components) row.push_back(v(i));
                for (const auto& v : prof.minus_components) row.push_back(v(i));
            }
            t.add(row);
        }
        const fs::path dir = ctx.dir();
        fs::create_directories(dir);
        write_text(dir / "solution.json", solution_json(sol).dump(2) + "\n", ctx);
        ctx.summary = {{"energy", sol.energy}, {"N", c.pairs}};
    }
    write_table(t, ctx);
    return finish(ctx);
}

int run_polaron_convergence(RunContext& ctx, int n_top) {
    const Common& c = ctx.common;
    const double gp = c.g.value_or(0.5);
    const ModelParams p(c.omega, c.tunneling, gp * c.omega);
    ctx.parameters["g"] = gp;
    ctx.parameters["N_max"] = n_top;
    const int nm = ground_n_max(c, gp);
    const auto st = ground_state(p, FockBasisSpec(nm), backend_of(c.backend));
    const auto seq = minimize_sequence(p, n_top, variational_config(c));
    Table t{"polaron-convergence", {kEnergyUnits, ctx.convention}, {"N", "E_N", "relative_error"}, {}};
    json sols = json::array();
    for (const auto& s : seq) {
        t.add({static_cast<long long>(s.ansatz.pairs), s.energy / c.omega, std::abs((s.energy - st.energy) / st.energy)});
        sols.push_back(solution_json(s));
    }
    ctx.untrusted = st.truncation_suspect();
    ctx.summary = {{"E_ED", st.energy / c.omega}, {"n_max", nm}};
    write_table(t, ctx);
    const fs::path dir = ctx.dir();
    write_text(dir / "solutions.json", sols.dump(2) + "\n", ctx);
    return finish(ctx);
}

int run_spectrum_scan(RunContext& ctx, const ScanRange& r, int levels, double delta) {
    const Common& c = ctx.common;
    const auto gs = linspace(r.lo, r.hi, r.steps);
    ctx.parameters["g_min"] = r.lo;
    ctx.parameters["g_max"] = r.hi;
    ctx.parameters["g_steps"] = r.steps;
    ctx.parameters["levels"] = levels;
    ctx.parameters["delta"] = delta;
    ScanOptions opt;
    opt.levels = levels;
    opt.discrete_delta = delta;
    opt.allow_beyond_collapse = true;
    opt.workers = workers_from_env();
    opt.backend = backend_of(c.backend);
    std::vector<double> couplings;
    for (double gp : gs) couplings.push_back(gp * c.omega);
    const int nm = c.n_max.value_or(799);
    const auto table = scan_coupling(ModelParams(c.omega, c.tunneling, 0.0), couplings, nm, opt);
    Table t{"spectrum-scan", {kEnergyUnits, ctx.convention}, {"g_over_omega", "level", "E_over_omega", "kind", "untrusted"}, {}};
    json counts = json::array();
    for (const auto& row : table.rows) {
        for (Eigen::Index k = 0; k < row.energies.size(); ++k)
            t.add({row.scan_value, static_cast<long long>(k), row.energies(k) / c.omega,
                   std::string(to_string(row.kinds[static_cast<std::size_t>(k)])),
                   static_cast<long long>(row.untrusted)});
        if (row.untrusted) ctx.untrusted = true;
        counts.push_back({{"g_over_omega", row.scan_value}, {"discrete_count", row.discrete_count}});
    }
    if (ctx.untrusted) ctx.warnings.push_back("rows with g/omega > 1/2 are finite-cutoff artefacts (beyond collapse)");
    ctx.summary = {{"n_max", nm}, {"discrete_counts", counts}};
    write_table(t, ctx);
    return finish(ctx);
}

int run_collapse_vs_omega(RunContext& ctx, const ScanRange& r, int levels, double delta) {
    const Common& c = ctx.common;
    const auto ts = linspace(r.lo, r.hi, r.steps);
    ctx.parameters["Omega_min"] = r.lo;
    ctx.parameters["Omega_max"] = r.hi;
    ctx.parameters["Omega_steps"] = r.steps;
    ctx.parameters["levels"] = levels;
    ctx.parameters["delta"] = delta;
    ScanOptions opt;
    opt.levels = levels;
    opt.discrete_delta = delta;
    opt.workers = workers_from_env();
    opt.backend = backend_of(c.backend);
    std::vector<double> tunnel;
    for (double v : ts) tunnel.push_back(v * c.omega);
    const int nm = c.n_max.value_or(1599);
    const auto table = scan_tunneling_at_collapse(c.omega, tunnel, nm, opt);
    Table t{"collapse-vs-Omega", {kEnergyUnits + std::string("; g = omega/2"), ctx.convention},
            {"Omega_over_omega", "E0", "E1", "E1_minus_E0", "discrete_count"}, {}};
    std::vector<double> x, y;
    for (const auto& row : table.rows) {
        const double e0 = row.energies(0) / c.omega, e1 = row.energies(1) / c.omega;
        t.add({row.scan_value, e0, e1, e1 - e0, static_cast<long long>(row.discrete_count)});
        x.push_back(row.scan_value);
        y.push_back(e0);
    }
    if (x.size() >= 2) {
        const auto fit = fit_line(x, y);
        ctx.summary = {{"fit", {{"slope", fit.slope}, {"intercept", fit.intercept}, {"r_squared", fit.r_squared}}}};
        t.comments.push_back("linear fit E0 = " + format_double(fit.intercept) + " + " + format_double(fit.slope) +
                             " * Omega/omega, R^2 = " + format_double(fit.r_squared));
    }
    ctx.summary["n_max"] = nm;
    write_table(t, ctx);
    return finish(ctx);
}

int run_cutoff_scan(RunContext& ctx, const std::vector<int>& cutoffs, const std::string& convention) {
    const Common& c = ctx.common;
    const double gp = c.g.value_or(0.6);
    const ModelParams p(c.omega, c.tunneling, gp * c.omega);
    const auto conv = convention == "max_photon" ? CutoffConvention::max_photon : CutoffConvention::states_per_spin;
    ctx.convention = cutoff_convention_text(conv);
    ctx.parameters["g"] = gp;
    ctx.parameters["cutoffs"] = cutoffs;
    ctx.parameters["convention"] = convention;
    const auto table = scan_cutoff(p, cutoffs, conv, backend_of(c.backend), workers_from_env());
    Table t{"cutoff-scan", {kEnergyUnits, ctx.convention}, {"cutoff", "E0_over_omega", "E1_over_omega"}, {}};
    for (const auto& row : table.rows) t.add({static_cast<long long>(row.cutoff), row.e0, row.e1});
    if (table.rows.size() >= 3) ctx.summary["classification"] = to_string(classify_convergence(table));
    ctx.untrusted = table.untrusted;
    if (table.untrusted) ctx.warnings.push_back("untrusted: beyond_collapse (|g/omega| > 1/2); any plateau is a truncation artefact");
    write_table(t, ctx);
    return finish(ctx);
}

int run_potential(RunContext& ctx, double half_width, int points) {
    const Common& c = ctx.common;
    const double gp = c.g.value_or(0.5);
    const ModelParams p(c.omega, c.tunneling, gp * c.omega);
    const Grid grid(half_width, points);
    grid.validate();
    ctx.parameters["g"] = gp;
    ctx.parameters["x_max"] = half_width;
    ctx.parameters["points"] = points;
    const int nm = c.n_max.value_or(std::abs(gp) < 0.45 ? 400 : 799);
    const auto st = ground_state(p, FockBasisSpec(nm), backend_of(c.backend));
    const auto wf = fock_to_grid(st, grid);
    const auto curves = p.beyond_collapse() ? barrier_profile_beyond_collapse(p, wf) : potential_curves(p, wf);
    Table t{"potential",
            {"x in oscillator lengths; potentials in units of omega/2 times the channel prefactor (1 -+ 2g')",
             ctx.convention},
            {"x", "v_plus", "v_minus", "dv_plus", "dv_minus", "veff_plus", "veff_minus", "mask_plus", "mask_minus"},
            {}};
    for (int i = 0; i < grid.n_points; ++i) {
        const auto k = static_cast<std::size_t>(i);
        t.add({grid.x(i), curves.v_plus(i), curves.v_minus(i), curves.dv_plus(i), curves.dv_minus(i),
               curves.veff_plus(i), curves.veff_minus(i), static_cast<long long>(curves.mask_plus[k]),
               static_cast<long long>(curves.mask_minus[k])});
    }
    ctx.untrusted = curves.untrusted;
    ctx.warnings = curves.warnings;
    ctx.summary = {{"energy", st.energy}, {"n_max", nm}};
    if (!p.beyond_collapse()) ctx.summary["induced_well_depth"] = induced_well_depth(curves);
    write_table(t, ctx);
    return finish(ctx);
}

void add_common(CLI::App* sub, Common& c, bool with_g) {
    sub->add_option("--omega", c.omega, "oscillator frequency")->check(CLI::PositiveNumber);
    sub->add_option("--Omega", c.tunneling, "tunneling (qubit splitting)");
    if (with_g) sub->add_option("--g", c.g, "coupling in units of omega");
    sub->add_option("--n-max", c.n_max, "largest photon number kept in ED")->check(CLI::Range(2, 1000000));
    sub->add_option("--N", c.pairs, "pairs of polarons")->check(CLI::Range(1, 40));
    sub->add_option("--seed", c.seed, "seed for multi-start perturbations");
    sub->add_option("--out-dir", c.out_dir, "output directory (RABI2_OUT overrides)");
    sub->add_option("--format", c.format, "table format")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--backend", c.backend, "ED backend")->check(CLI::IsMember({"dense", "chains"}));
    sub->add_flag("--allow-untrusted", c.allow_untrusted, "exit 0 even with untrusted points");
    sub->add_flag("--gnuplot", c.gnuplot, "write a gnuplot companion script");
}

}  // namespace

int main(int argc, char** argv) {
    std::locale::global(std::locale::classic());
    CLI::App app{"Two-photon Rabi model: exact diagonalization, polaron variational states, potentials"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    Common common;
    ScanRange range;
    std::vector<std::string> methods{"bare", "n1", "n2", "ed"};
    std::string method{"ed"};
    bool decompose = false;
    double x_max = 10.0;
    int points = 2001;
    int n_top = 6;
    int levels = 60;
    double delta = 0.01;
    std::vector<int> cutoffs{400, 800, 1200, 1600, 2000, 2400, 2800, 3200, 3600, 4000};
    std::string convention{"states_per_spin"};
    ScanRange omega_range{0.1, 10.0, 21};

    auto add_g_range = [&](CLI::App* s) {
        s->add_option("--g-min", range.lo, "first g/omega");
        s->add_option("--g-max", range.hi, "last g/omega");
        s->add_option("--g-steps", range.steps, "number of points")->check(CLI::PositiveNumber);
    };

    auto* energy = app.add_subcommand("energy-scan", "ground energy vs coupling: bare, N=1, N=2, ED");
    add_common(energy, common, false);
    add_g_range(energy);
    energy->add_option("--methods", methods, "subset of bare,n1,n2,ed")
        ->delimiter(',')
        ->check(CLI::IsMember({"bare", "n1", "n2", "ed"}));

    auto* observ = app.add_subcommand("observables-scan", "<sigma_x>, <a^dag a>, coupling correlation vs coupling");
    add_common(observ, common, false);
    add_g_range(observ);

    auto* wave = app.add_subcommand("wavefunction", "ground-state spinor on a grid");
    add_common(wave, common, true);
    wave->add_option("--method", method)->check(CLI::IsMember({"ed", "polaron"}));
    wave->add_flag("--decompose", decompose, "also print each polaron component");
    wave->add_option("--x-max", x_max)->check(CLI::PositiveNumber);
    wave->add_option("--points", points);

    auto* conv = app.add_subcommand("polaron-convergence", "E_N and relative error vs N");
    add_common(conv, common, true);
    conv->add_option("--N-max", n_top)->check(CLI::Range(1, 40));

    auto* spec = app.add_subcommand("spectrum-scan", "lowest levels vs coupling with discrete/collapsed labels");
    add_common(spec, common, false);
    add_g_range(spec);
    spec->add_option("--levels", levels)->check(CLI::PositiveNumber);
    spec->add_option("--delta", delta, "discreteness threshold below -omega/2, units of omega");

    auto* col = app.add_subcommand("collapse-vs-Omega", "levels at g = omega/2 vs tunneling, with a linear fit");
    add_common(col, common, false);
    col->add_option("--Omega-min", omega_range.lo);
    col->add_option("--Omega-max", omega_range.hi);
    col->add_option("--Omega-steps", omega_range.steps)->check(CLI::PositiveNumber);
    col->add_option("--levels", levels)->check(CLI::Range(2, 100000));
    col->add_option("--delta", delta);

    auto* cut = app.add_subcommand("cutoff-scan", "E0, E1 vs Fock cutoff, with convergence classification");
    add_common(cut, common, true);
    cut->add_option("--cutoffs", cutoffs)->delimiter(',');
    cut->add_option("--convention", convention)->check(CLI::IsMember({"states_per_spin", "max_photon"}));

    auto* pot = app.add_subcommand("potential", "bare, induced and effective potentials");
    add_common(pot, common, true);
    pot->add_option("--x-max", x_max)->check(CLI::PositiveNumber);
    pot->add_option("--points", points);

    // subcommand-specific defaults for Omega
    common.tunneling = std::numeric_limits<double>::quiet_NaN();
    CLI11_PARSE(app, argc, argv);

    try {
        RunContext ctx;
        auto* chosen = app.get_subcommands().front();
        ctx.subcommand = chosen->get_name();
        if (std::isnan(common.tunneling)) common.tunneling = chosen == cut ? 1000.0 : 1.0;
        ctx.common = common;
        workers_from_env();
        if (chosen == energy) return run_energy_scan(ctx, range, methods);
        if (chosen == observ) return run_observables_scan(ctx, range);
        if (chosen == wave) return run_wavefunction(ctx, method, decompose, x_max, points);
        if (chosen == conv) return run_polaron_convergence(ctx, n_top);
        if (chosen == spec) return run_spectrum_scan(ctx, range, levels, delta);
        if (chosen == col) return run_collapse_vs_omega(ctx, omega_range, levels, delta);
        if (chosen == cut) return run_cutoff_scan(ctx, cutoffs, convention);
        if (chosen == pot) return run_potential(ctx, x_max, points);
    } catch (const CLI::Error& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "rabi2: error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
