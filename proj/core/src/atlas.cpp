#include "basinlab/atlas.hpp"

#include "basinlab/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <optional>
#include <thread>

namespace basinlab {

namespace {

double lattice(const std::pair<double, double>& r, int n, int i) noexcept {
    if (i == n - 1) return r.second;
    return r.first + (r.second - r.first) * static_cast<double>(i) / static_cast<double>(n - 1);
}

bool increasing(const std::pair<double, double>& r) {
    return std::isfinite(r.first) && std::isfinite(r.second) && r.first < r.second;
}

double jacobian_determinant(const SystemModel& system, const Vector& x) {
    try {
        if (system.has_jacobian()) return det(system.jacobian(x));
        Evaluator<double> ev(system, JacobianMode::five_point);
        return det(ev.jacobian(x));
    } catch (const Error&) {
        return std::numeric_limits<double>::quiet_NaN();
    }
}

// Crossing graph for marching squares: one node per sign-changing edge,
// each with at most two neighbors (the two cells sharing the edge).
struct CrossingGraph {
    std::vector<Vector> position;
    std::vector<std::array<int, 2>> links;

    int add(Vector p) {
        position.push_back(std::move(p));
        links.push_back({-1, -1});
        return static_cast<int>(position.size()) - 1;
    }
    void connect(int a, int b) {
        if (a < 0 || b < 0 || a == b) return;
        attach(a, b);
        attach(b, a);
    }
    [[nodiscard]] int degree(int v) const { return (links[v][0] >= 0) + (links[v][1] >= 0); }

private:
    void attach(int a, int b) {
        auto& l = links[static_cast<std::size_t>(a)];
        if (l[0] == b || l[1] == b) return;
        (l[0] < 0 ? l[0] : l[1]) = b;
    }
};

std::vector<Vector> walk(const CrossingGraph& g, int start, std::vector<char>& seen) {
    std::vector<Vector> line;
    int prev = -1;
    int cur = start;
    while (cur >= 0 && !seen[static_cast<std::size_t>(cur)]) {
        seen[static_cast<std::size_t>(cur)] = 1;
        line.push_back(g.position[static_cast<std::size_t>(cur)]);
        const auto& l = g.links[static_cast<std::size_t>(cur)];
        const int next = l[0] != prev ? l[0] : l[1];
        prev = cur;
        cur = next;
    }
    // A closed loop ends back at its start.
    if (cur == start && line.size() > 2) line.push_back(line.front());
    return line;
}

}  // namespace

void GridSpec::validate() const {
    if (nx < 2 || ny < 2) throw ConfigError("grid needs at least 2 points per axis");
    if (!increasing(x_range) || !increasing(y_range)) throw ConfigError("grid ranges must be strictly increasing");
}

double GridSpec::x_at(int ix) const noexcept { return lattice(x_range, nx, ix); }
double GridSpec::y_at(int iy) const noexcept { return lattice(y_range, ny, iy); }

GridSpec GridSpec::over_domain(const SystemModel& system, int nx, int ny) {
    if (system.dimension() != 2) throw ConfigError("grids need a 2-D system");
    const auto& box = system.domain_box();
    return GridSpec{nx, ny, box[0], box[1]};
}

std::array<std::size_t, kAllOutcomeKinds.size()> BasinRaster::counts() const {
    std::array<std::size_t, kAllOutcomeKinds.size()> c{};
    for (const auto& cell : cells) ++c[static_cast<std::size_t>(cell.outcome)];
    return c;
}

BasinRaster sweep_basin(const GridSpec& grid, const SolverSpec& spec, const SystemModel& system, unsigned threads) {
    grid.validate();
    spec.validate();
    if (system.dimension() != 2) throw ConfigError("basin sweeps need a 2-D system");
    // Surface configuration errors once, before any worker starts.
    { Evaluator<double> probe(system, spec.jacobian_mode); }

    BasinRaster raster;
    raster.grid = grid;
    raster.method = spec.method;
    raster.root_count = system.reference_roots().size();
    raster.cells.resize(grid.cell_count());

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, raster.cells.size()));

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t idx = next.fetch_add(1, std::memory_order_relaxed);
            if (idx >= raster.cells.size()) return;
            const int ix = static_cast<int>(idx % static_cast<std::size_t>(grid.nx));
            const int iy = static_cast<int>(idx / static_cast<std::size_t>(grid.nx));
            try {
                const IterationTrace t = run_orbit(Vector{grid.x_at(ix), grid.y_at(iy)}, spec, system);
                raster.cells[idx] = {t.outcome.kind, t.outcome.root_index, static_cast<int>(t.iterations()), t.nfe};
            } catch (...) {
                const std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(raster.cells.size());
                return;
            }
        }
    };

    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);
    return raster;
}

double convergence_rate(const BasinRaster& raster) {
    if (raster.cells.empty()) return 0.0;
    const auto converged = std::count_if(raster.cells.begin(), raster.cells.end(), [](const CellRecord& c) {
        return c.outcome == OutcomeKind::ConvergedToRoot;
    });
    return static_cast<double>(converged) / static_cast<double>(raster.cells.size());
}

std::size_t CriticalCurve::vertex_count() const noexcept {
    std::size_t n = 0;
    for (const auto& s : segments) n += s.size();
    return n;
}

CriticalCurve extract_critical_curve(const GridSpec& grid, const SystemModel& system, int refine) {
    grid.validate();
    if (system.dimension() != 2) throw ConfigError("critical curves need a 2-D system");
    if (refine < 1) throw ConfigError("refine must be at least 1");

    const GridSpec fine{grid.nx * refine, grid.ny * refine, grid.x_range, grid.y_range};
    const int nx = fine.nx;
    const int ny = fine.ny;
    std::vector<double> xs(static_cast<std::size_t>(nx)), ys(static_cast<std::size_t>(ny));
    for (int i = 0; i < nx; ++i) xs[static_cast<std::size_t>(i)] = fine.x_at(i);
    for (int j = 0; j < ny; ++j) ys[static_cast<std::size_t>(j)] = fine.y_at(j);

    std::vector<double> g(static_cast<std::size_t>(nx) * ny);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
            g[static_cast<std::size_t>(j) * nx + i] = jacobian_determinant(system, Vector{xs[i], ys[j]});
    auto at = [&](int i, int j) { return g[static_cast<std::size_t>(j) * nx + i]; };

    // Node id per lattice edge, -1 when the edge carries no crossing.
    const std::size_t n_h = static_cast<std::size_t>(nx - 1) * ny;
    std::vector<int> edge_node(n_h + static_cast<std::size_t>(nx) * (ny - 1), -1);
    auto h_edge = [&](int i, int j) { return static_cast<std::size_t>(j) * (nx - 1) + i; };
    auto v_edge = [&](int i, int j) { return n_h + static_cast<std::size_t>(j) * nx + i; };

    CrossingGraph graph;
    auto crossing = [&](double ga, double gb, const Vector& a, const Vector& b) -> std::optional<Vector> {
        if (!std::isfinite(ga) || !std::isfinite(gb) || (ga >= 0.0) == (gb >= 0.0)) return std::nullopt;
        const double t = ga / (ga - gb);
        return Vector{a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])};
    };
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i + 1 < nx; ++i)
            if (auto p = crossing(at(i, j), at(i + 1, j), Vector{xs[i], ys[j]}, Vector{xs[i + 1], ys[j]}))
                edge_node[h_edge(i, j)] = graph.add(std::move(*p));
    for (int j = 0; j + 1 < ny; ++j)
        for (int i = 0; i < nx; ++i)
            if (auto p = crossing(at(i, j), at(i, j + 1), Vector{xs[i], ys[j]}, Vector{xs[i], ys[j + 1]}))
                edge_node[v_edge(i, j)] = graph.add(std::move(*p));

    for (int j = 0; j + 1 < ny; ++j)
        for (int i = 0; i + 1 < nx; ++i) {
            const int bottom = edge_node[h_edge(i, j)];
            const int top = edge_node[h_edge(i, j + 1)];
            const int left = edge_node[v_edge(i, j)];
            const int right = edge_node[v_edge(i + 1, j)];
            std::vector<int> hits;
            for (const int e : {bottom, right, top, left})
                if (e >= 0) hits.push_back(e);
            if (hits.size() == 2) {
                graph.connect(hits[0], hits[1]);
            } else if (hits.size() == 4) {
                const double center = jacobian_determinant(system, Vector{0.5 * (xs[i] + xs[i + 1]), 0.5 * (ys[j] + ys[j + 1])});
                const bool bl_positive = at(i, j) >= 0.0;
                if (std::isfinite(center) && (center >= 0.0) == bl_positive) {
                    // bl and tr joined through the center: cut off br and tl.
                    graph.connect(bottom, right);
                    graph.connect(top, left);
                } else {
                    graph.connect(left, bottom);
                    graph.connect(right, top);
                }
            }
        }

    CriticalCurve curve;
    curve.box = {grid.x_range, grid.y_range};
    const int n_nodes = static_cast<int>(graph.position.size());
    std::vector<char> seen(static_cast<std::size_t>(n_nodes), 0);
    for (int v = 0; v < n_nodes; ++v)
        if (!seen[static_cast<std::size_t>(v)] && graph.degree(v) <= 1) curve.segments.push_back(walk(graph, v, seen));
    for (int v = 0; v < n_nodes; ++v)
        if (!seen[static_cast<std::size_t>(v)]) curve.segments.push_back(walk(graph, v, seen));
    return curve;
}

std::vector<SeedPoint> perturbed_seed_points(const CriticalCurve& curve, double offset, int side) {
    if (curve.empty()) throw EmptyCurve("no critical curve to perturb");
    const double sign = side >= 0 ? 1.0 : -1.0;
    const double wx = curve.box[0].second - curve.box[0].first;
    const double wy = curve.box[1].second - curve.box[1].first;
    std::vector<SeedPoint> out;
    for (std::size_t s = 0; s < curve.segments.size(); ++s) {
        const auto& seg = curve.segments[s];
        for (std::size_t k = 0; k < seg.size(); ++k) {
            const Vector& a = seg[k == 0 ? 0 : k - 1];
            const Vector& b = seg[k + 1 < seg.size() ? k + 1 : k];
            const double tx = (b[0] - a[0]) / wx;
            const double ty = (b[1] - a[1]) / wy;
            const double len = std::hypot(tx, ty);
            if (!(len > 0.0)) continue;
            const double nx = -ty / len;
            const double ny = tx / len;
            const double x = std::clamp(seg[k][0] + sign * offset * nx * wx, curve.box[0].first, curve.box[0].second);
            const double y = std::clamp(seg[k][1] + sign * offset * ny * wy, curve.box[1].first, curve.box[1].second);
            out.push_back({s, k, Vector{x, y}});
        }
    }
    return out;
}

std::vector<Vector> perturbed_seeds(const CriticalCurve& curve, double offset, int side) {
    std::vector<Vector> out;
    for (auto& p : perturbed_seed_points(curve, offset, side)) out.push_back(std::move(p.point));
    return out;
}

}  // namespace basinlab
