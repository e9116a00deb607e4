#include "basinlab/cli/app.hpp"

#include "basinlab/atlas.hpp"
#include "basinlab/cli/io.hpp"
#include "basinlab/cli/problem_config.hpp"
#include "basinlab/errors.hpp"
#include "basinlab/metrics.hpp"
#include "basinlab/solvers.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace basinlab::cli {

namespace {

namespace fs = std::filesystem;

struct Options {
    std::string problem;
    std::string method = "CN";
    std::string jacobian = "five_point";
    int max_iter = 200;
    double tol_f = 1e-10;
    double tol_step = 1e-12;
    std::optional<double> seed_offset;
    std::string out = ".";
    unsigned threads = 0;

    std::string x0;
    std::string grid;
    std::string xrange;
    std::string yrange;
    bool critical = false;
    int refine = 3;
    std::string trace;
    std::string alpha;
    bool table = false;
    bool rates = false;
};

double parse_number(const std::string& text, const std::string& flag) {
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (text.empty() || *end != '\0' || !std::isfinite(v))
        throw ConfigError(flag + ": '" + text + "' is not a finite number");
    return v;
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    for (;;) {
        const std::size_t pos = text.find(sep, start);
        parts.push_back(text.substr(start, pos - start));
        if (pos == std::string::npos) return parts;
        start = pos + 1;
    }
}

Vector parse_vector(const std::string& text, const std::string& flag, std::size_t dimension) {
    const auto parts = split(text, ',');
    if (parts.size() != dimension)
        throw ConfigError(flag + ": expected " + std::to_string(dimension) + " comma-separated components, got '" +
                          text + "'");
    Vector v(dimension);
    for (std::size_t i = 0; i < dimension; ++i) v[i] = parse_number(parts[i], flag);
    return v;
}

std::pair<double, double> parse_range(const std::string& text, const std::string& flag) {
    const auto parts = split(text, ':');
    if (parts.size() != 2) throw ConfigError(flag + ": expected lo:hi, got '" + text + "'");
    const double lo = parse_number(parts[0], flag);
    const double hi = parse_number(parts[1], flag);
    if (!(lo < hi)) throw ConfigError(flag + ": lo must be below hi");
    return {lo, hi};
}

GridSpec parse_grid(const Options& o, const SystemModel& system, const std::string& fallback) {
    if (system.dimension() != 2) throw ConfigError("--problem: grid commands need a 2-D system");
    const std::string text = o.grid.empty() ? fallback : o.grid;
    const auto pos = text.find_first_of("xX");
    if (pos == std::string::npos) throw ConfigError("--grid: expected NXxNY, got '" + text + "'");
    auto count = [&](const std::string& s) {
        const double v = parse_number(s, "--grid");
        if (v != std::floor(v) || v < 2 || v > 100000) throw ConfigError("--grid: counts must be integers >= 2");
        return static_cast<int>(v);
    };
    GridSpec g = GridSpec::over_domain(system, count(text.substr(0, pos)), count(text.substr(pos + 1)));
    if (!o.xrange.empty()) g.x_range = parse_range(o.xrange, "--xrange");
    if (!o.yrange.empty()) g.y_range = parse_range(o.yrange, "--yrange");
    g.validate();
    return g;
}

SolverSpec solver_spec(const Options& o, Method method) {
    SolverSpec spec;
    spec.method = method;
    spec.max_iter = o.max_iter;
    spec.residual_tol = o.tol_f;
    spec.step_tol = o.tol_step;
    const auto mode = parse_jacobian_mode(o.jacobian);
    if (!mode) throw ConfigError("--jacobian: expected analytic or five_point, got '" + o.jacobian + "'");
    spec.jacobian_mode = *mode;
    spec.validate();
    return spec;
}

SolverSpec solver_spec(const Options& o) {
    const auto method = parse_method(o.method);
    if (!method)
        throw ConfigError("--method: unknown method '" + o.method +
                          "' (expected CN, NLEQ-RES, NLEQ-ERR, JFNK, BA, GS, CO, O4N, O5N or O6N)");
    return solver_spec(o, *method);
}

std::string point_text(const Vector& v) {
    std::string s = "(";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + format_double(v[i]);
    return s + ")";
}

std::string optional_text(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

int cmd_solve(const Options& o, std::ostream& out) {
    const SystemModel system = resolve_problem(o.problem);
    const SolverSpec spec = solver_spec(o);
    const Vector x0 = parse_vector(o.x0, "--x0", system.dimension());
    const IterationTrace trace = run_orbit(x0, spec, system);
    write_text(fs::path(o.out) / "trace.csv", trace_csv(trace));

    out << "method: " << to_string(spec.method) << '\n'
        << "outcome: " << to_string(trace.outcome.kind) << '\n'
        << "root_index: " << trace.outcome.root_index << '\n'
        << "iterations: " << trace.iterations() << '\n'
        << "nfe: " << trace.nfe << '\n'
        << "point: " << point_text(trace.outcome.point) << '\n';
    return trace.outcome.converged() ? kExitOk : kExitNotConverged;
}

int cmd_basin(const Options& o, std::ostream& out) {
    const SystemModel system = resolve_problem(o.problem);
    const SolverSpec spec = solver_spec(o);
    const GridSpec grid = parse_grid(o, system, "200x200");
    const BasinRaster raster = sweep_basin(grid, spec, system, o.threads);
    std::optional<CriticalCurve> curve;
    if (o.critical) curve = extract_critical_curve(grid, system, o.refine);

    const fs::path dir(o.out);
    write_text(dir / "basin.ppm", render_ppm(raster, curve ? &*curve : nullptr));
    write_text(dir / "basin.csv", basin_csv(raster));
    const auto summary = basin_summary(raster);
    write_text(dir / "summary.json", summary.dump(2) + "\n");

    out << "method: " << to_string(spec.method) << '\n';
    for (const auto& [kind, count] : summary["counts"].items()) out << kind << ": " << count << '\n';
    out << "C_percent: " << format_double(summary["C_percent"].get<double>()) << '\n';
    return kExitOk;
}

int cmd_critical(const Options& o, std::ostream& out) {
    const SystemModel system = resolve_problem(o.problem);
    const GridSpec grid = parse_grid(o, system, "200x200");
    const CriticalCurve curve = extract_critical_curve(grid, system, o.refine);
    const fs::path dir(o.out);
    write_text(dir / "critical.csv", critical_csv(curve));
    out << "segments: " << curve.segments.size() << '\n' << "vertices: " << curve.vertex_count() << '\n';

    if (o.seed_offset && !curve.empty()) {
        const SolverSpec spec = solver_spec(o);
        std::string csv = "segment_id,vertex_id,side,x,y,outcome,root_index,iterations\n";
        std::size_t pairs = 0;
        std::size_t split_pairs = 0;
        const auto plus = perturbed_seed_points(curve, *o.seed_offset, +1);
        const auto minus = perturbed_seed_points(curve, *o.seed_offset, -1);
        for (std::size_t i = 0; i < plus.size(); ++i) {
            int roots[2] = {-1, -1};
            int side_index = 0;
            for (const SeedPoint* p : {&plus[i], &minus[i]}) {
                const IterationTrace t = run_orbit(p->point, spec, system);
                roots[side_index] = t.outcome.root_index;
                csv += std::to_string(p->segment) + ',' + std::to_string(p->vertex) + ',' + (side_index ? "-1" : "+1") +
                       ',' + format_double(p->point[0]) + ',' + format_double(p->point[1]) + ',' +
                       std::string(to_string(t.outcome.kind)) + ',' + std::to_string(t.outcome.root_index) + ',' +
                       std::to_string(t.iterations()) + '\n';
                ++side_index;
            }
            ++pairs;
            if (roots[0] >= 0 && roots[1] >= 0 && roots[0] != roots[1]) ++split_pairs;
        }
        write_text(dir / "seeds.csv", csv);
        out << "seed_pairs: " << pairs << '\n' << "pairs_reaching_distinct_roots: " << split_pairs << '\n';
    } else if (o.seed_offset) {
        out << "no critical curve in the grid; seeds.csv not written\n";
    }
    return kExitOk;
}

int cmd_order_table(const Options& o, std::ostream& out) {
    const SystemModel system = resolve_problem(o.problem);
    std::optional<GridSpec> grid;
    if (o.rates) grid = parse_grid(o, system, "50x50");

    std::string csv = "method";
    for (std::size_t i = 0; i < system.dimension(); ++i) csv += ",x0_" + std::to_string(i);
    csv += ",outcome,root_index,iterations,nfe,rho_avg,rho_hat_avg";
    if (grid) csv += ",C_percent";
    csv += '\n';

    for (const Method m : kAllMethods) {
        const SolverSpec spec = solver_spec(o, m);
        std::vector<IterationTrace> traces;
        for (const auto& seed : system.default_seeds()) traces.push_back(run_orbit(seed, spec, system));
        std::optional<double> rate;
        if (grid) rate = convergence_rate(sweep_basin(*grid, spec, system, o.threads));
        const NfeReport report = nfe_report(traces, &system, rate);
        for (const auto& row : report.rows) {
            csv += std::string(to_string(row.method));
            for (std::size_t i = 0; i < row.x0.size(); ++i) csv += ',' + format_double(row.x0[i]);
            csv += ',' + std::string(to_string(row.outcome)) + ',' + std::to_string(row.root_index) + ',' +
                   std::to_string(row.iterations) + ',' + std::to_string(row.nfe) + ',' + optional_text(row.rho_avg) +
                   ',' + optional_text(row.rho_hat_avg);
            if (grid) csv += ',' + format_double(100.0 * *report.convergence_rate);
            csv += '\n';
        }
    }
    write_text(fs::path(o.out) / "order_table.csv", csv);
    out << csv;
    return kExitOk;
}

int cmd_order(const Options& o, std::ostream& out, std::ostream& err) {
    if (o.table) return cmd_order_table(o, out);

    std::vector<Vector> points;
    if (!o.trace.empty()) {
        points = read_trace_points(o.trace);
    } else {
        if (o.problem.empty() || o.x0.empty()) throw ConfigError("order: give --trace FILE, or --problem and --x0");
        const SystemModel system = resolve_problem(o.problem);
        points = run_orbit(parse_vector(o.x0, "--x0", system.dimension()), solver_spec(o), system).points;
    }
    if (points.empty()) throw ConfigError("order: the trace holds no iterates");
    out << "points: " << points.size() << '\n';

    try {
        if (!o.alpha.empty()) {
            const OrderEstimate rho = coc(points, parse_vector(o.alpha, "--alpha", points.front().size()));
            out << "rho_avg: " << format_double(rho.avg) << " (k = " << rho.k_used << ", excluded " << rho.excluded
                << ")\n";
        }
        const OrderEstimate rho_hat = acoc(points);
        out << "rho_hat_avg: " << format_double(rho_hat.avg) << " (k = " << rho_hat.k_used << ", excluded "
            << rho_hat.excluded << ")\n";
    } catch (const InsufficientTrace& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const AllDegenerate& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    }
    return kExitOk;
}

int cmd_bench(const Options& o, std::ostream& out) {
    const SystemModel system = resolve_problem(o.problem);
    const GridSpec grid = parse_grid(o, system, "50x50");
    std::string csv = "method,C_percent";
    for (const OutcomeKind k : kAllOutcomeKinds) csv += ',' + std::string(to_string(k));
    csv += ",mean_iterations,total_nfe,seconds\n";
    for (const Method m : kAllMethods) {
        const SolverSpec spec = solver_spec(o, m);
        const auto start = std::chrono::steady_clock::now();
        const BasinRaster raster = sweep_basin(grid, spec, system, o.threads);
        const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
        double iterations = 0;
        std::uint64_t nfe = 0;
        for (const auto& c : raster.cells) {
            iterations += c.iterations;
            nfe += c.nfe;
        }
        csv += std::string(to_string(m)) + ',' + format_double(100.0 * convergence_rate(raster));
        for (const auto count : raster.counts()) csv += ',' + std::to_string(count);
        csv += ',' + format_double(iterations / static_cast<double>(raster.cells.size())) + ',' + std::to_string(nfe) +
               ',' + format_double(elapsed.count()) + '\n';
    }
    write_text(fs::path(o.out) / "bench.csv", csv);
    out << csv;
    return kExitOk;
}

void add_common(CLI::App* cmd, Options& o, bool needs_problem) {
    auto* problem = cmd->add_option("--problem", o.problem, "Builtin system (cubic_roots, circle_hyperbola, affine) or problem JSON path");
    if (needs_problem) problem->required();
    cmd->add_option("--method", o.method, "CN, NLEQ-RES, NLEQ-ERR, JFNK, BA, GS, CO, O4N, O5N or O6N")->capture_default_str();
    cmd->add_option("--jacobian", o.jacobian, "analytic or five_point")->capture_default_str();
    cmd->add_option("--max-iter", o.max_iter, "Iteration cap per orbit")->capture_default_str();
    cmd->add_option("--tol-f", o.tol_f, "Residual tolerance (scaled by the system's residual scale)")->capture_default_str();
    cmd->add_option("--tol-step", o.tol_step, "Step tolerance")->capture_default_str();
    cmd->add_option("--seed-offset", o.seed_offset, "Perturbation of critical-curve seeds, as a fraction of the box");
    cmd->add_option("--out", o.out, "Output directory")->capture_default_str();
    cmd->add_option("--threads", o.threads, "Sweep workers (0 = hardware concurrency)")->capture_default_str();
}

void add_grid(CLI::App* cmd, Options& o) {
    cmd->add_option("--grid", o.grid, "Lattice size NXxNY");
    cmd->add_option("--xrange", o.xrange, "First-axis range lo:hi (default: system domain)");
    cmd->add_option("--yrange", o.yrange, "Second-axis range lo:hi (default: system domain)");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Basins of attraction and convergence order for Newton-type solvers", "basinlab"};
    app.require_subcommand(1);
    Options o;

    auto* solve = app.add_subcommand("solve", "Run one orbit and write trace.csv");
    add_common(solve, o, true);
    solve->add_option("--x0", o.x0, "Initial estimate, comma separated")->required();

    auto* basin = app.add_subcommand("basin", "Sweep a grid; write basin.ppm, basin.csv and summary.json");
    add_common(basin, o, true);
    add_grid(basin, o);
    basin->add_flag("--critical", o.critical, "Overlay the critical curve on the image");
    basin->add_option("--refine", o.refine, "Critical-curve lattice refinement")->capture_default_str();

    auto* critical = app.add_subcommand("critical", "Extract det J = 0 as polylines; write critical.csv");
    add_common(critical, o, true);
    add_grid(critical, o);
    critical->add_option("--refine", o.refine, "Lattice refinement over the grid")->capture_default_str();

    auto* order = app.add_subcommand("order", "COC/ACOC from a trace file or a live run");
    add_common(order, o, false);
    add_grid(order, o);
    order->add_option("--x0", o.x0, "Initial estimate for a live run");
    order->add_option("--trace", o.trace, "Trace CSV with x_<i> columns");
    order->add_option("--alpha", o.alpha, "Known root for COC, comma separated");
    order->add_flag("--table", o.table, "All methods from the system's default seeds; write order_table.csv");
    order->add_flag("--rates", o.rates, "With --table: add grid convergence rates");

    auto* bench = app.add_subcommand("bench", "Sweep every method over one grid; write bench.csv");
    add_common(bench, o, true);
    add_grid(bench, o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitConfig;
    }

    try {
        if (o.table && o.problem.empty()) throw ConfigError("--table needs --problem");
        if (*solve) return cmd_solve(o, out);
        if (*basin) return cmd_basin(o, out);
        if (*critical) return cmd_critical(o, out);
        if (*order) return cmd_order(o, out, err);
        if (*bench) return cmd_bench(o, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    }
    return kExitConfig;
}

}  // namespace basinlab::cli
