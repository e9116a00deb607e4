#include "basinlab/atlas.hpp"
#include "basinlab/benchmark_systems.hpp"
#include "basinlab/cli/problem_config.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>

using namespace basinlab;
using Catch::Approx;

namespace {

int complex_newton_root(std::complex<double> z) {
    const std::complex<double> roots[3] = {{1.0, 0.0}, {-0.5, std::sqrt(3.0) / 2}, {-0.5, -std::sqrt(3.0) / 2}};
    for (int k = 0; k < 200; ++k) {
        if (std::abs(z) == 0.0) return -1;
        z -= (z * z * z - 1.0) / (3.0 * z * z);
        for (int r = 0; r < 3; ++r)
            if (std::abs(z - roots[r]) < 1e-9) return r;
    }
    return -1;
}

SolverSpec cn() {
    SolverSpec s;
    s.jacobian_mode = JacobianMode::analytic;
    return s;
}

double distance_to_diagonals(const Vector& p) {
    return std::min(std::abs(p[0] - p[1]), std::abs(p[0] + p[1])) / std::sqrt(2.0);
}

}  // namespace

TEST_CASE("Grid lattice includes both endpoints", "[atlas]") {
    const GridSpec g{5, 3, {-1.0, 1.0}, {280.0, 400.0}};
    CHECK(g.x_at(0) == -1.0);
    CHECK(g.x_at(4) == 1.0);
    CHECK(g.x_at(2) == 0.0);
    CHECK(g.y_at(1) == 340.0);
    CHECK(g.y_at(2) == 400.0);
    CHECK(g.cell_count() == 15);
}

TEST_CASE("Grid validation", "[atlas]") {
    CHECK_THROWS_AS((GridSpec{1, 5, {0, 1}, {0, 1}}.validate()), ConfigError);
    CHECK_THROWS_AS((GridSpec{5, 5, {1, 0}, {0, 1}}.validate()), ConfigError);
    CHECK_NOTHROW(GridSpec{}.validate());
    const GridSpec def;
    CHECK(def.nx == 200);
    CHECK(def.x_range.first == 1e-6);
    CHECK(def.y_range.second == 400.0);
}

TEST_CASE("Affine 2x2 sweep converges everywhere in one iteration", "[atlas]") {
    const SystemModel sys = make_affine_system<double>(Matrix::identity(2), Vector{0.5, -0.25});
    const BasinRaster r = sweep_basin(GridSpec{2, 2, {-1, 1}, {-1, 1}}, cn(), sys, 1);
    REQUIRE(r.cells.size() == 4);
    for (const auto& c : r.cells) {
        CHECK(c.outcome == OutcomeKind::ConvergedToRoot);
        CHECK(c.iterations == 1);
    }
    CHECK(convergence_rate(r) == 1.0);
}

TEST_CASE("Convergence rate counts only reference roots", "[atlas]") {
    BasinRaster r;
    r.grid = GridSpec{2, 2, {0, 1}, {0, 1}};
    r.cells = {{OutcomeKind::ConvergedToRoot, 0, 3, 10},
               {OutcomeKind::SingularJacobian, -1, 0, 1},
               {OutcomeKind::ConvergedToRoot, 1, 2, 5},
               {OutcomeKind::SingularJacobian, -1, 0, 1}};
    CHECK(convergence_rate(r) == 0.5);
    r.cells[2].outcome = OutcomeKind::ConvergedToUnlistedRoot;
    CHECK(convergence_rate(r) == 0.25);
    const auto counts = r.counts();
    std::size_t total = 0;
    for (const auto c : counts) total += c;
    CHECK(total == 4);
}

TEST_CASE("Cubic-roots basin agrees with complex Newton", "[atlas]") {
    const SystemModel sys = make_cubic_roots_system<double>();
    const GridSpec g{41, 41, {-2, 2}, {-2, 2}};
    const BasinRaster r = sweep_basin(g, cn(), sys, 2);
    int agree = 0;
    for (int iy = 0; iy < g.ny; ++iy)
        for (int ix = 0; ix < g.nx; ++ix) {
            const auto& c = r.at(ix, iy);
            const int expected = complex_newton_root({g.x_at(ix), g.y_at(iy)});
            const int got = c.outcome == OutcomeKind::ConvergedToRoot ? c.root_index : -1;
            agree += expected == got;
        }
    CHECK(agree >= static_cast<int>(0.99 * g.cell_count()));
}

TEST_CASE("Cubic-roots classification respects the threefold rotation", "[atlas]") {
    const SystemModel sys = make_cubic_roots_system<double>();
    const double c = std::cos(2 * std::numbers::pi / 3);
    const double s = std::sin(2 * std::numbers::pi / 3);
    int checked = 0;
    for (const Vector& p : {Vector{1.5, 0.0}, Vector{-0.3, 0.0}, Vector{0.75, 0.0}, Vector{-1.2, 0.0}, Vector{0.2, 0.0}}) {
        const Vector q{c * p[0] - s * p[1], s * p[0] + c * p[1]};
        const Vector w{c * q[0] - s * q[1], s * q[0] + c * q[1]};
        const auto a = run_orbit(p, cn(), sys).outcome;
        const auto b = run_orbit(q, cn(), sys).outcome;
        const auto d = run_orbit(w, cn(), sys).outcome;
        if (a.kind != OutcomeKind::ConvergedToRoot) continue;
        CHECK(b.kind == OutcomeKind::ConvergedToRoot);
        CHECK(d.kind == OutcomeKind::ConvergedToRoot);
        // Rotation by 120 degrees maps root 0 -> 1 -> 2 -> 0.
        CHECK(b.root_index == (a.root_index + 1) % 3);
        CHECK(d.root_index == (a.root_index + 2) % 3);
        ++checked;
    }
    CHECK(checked >= 3);
}

TEST_CASE("Reference roots on the lattice classify to themselves", "[atlas]") {
    const SystemModel sys = make_cubic_roots_system<double>();
    const GridSpec g{9, 9, {-2, 2}, {-2, 2}};
    const BasinRaster r = sweep_basin(g, cn(), sys, 1);
    // (1, 0) is lattice point (6, 4).
    CHECK(r.at(6, 4).outcome == OutcomeKind::ConvergedToRoot);
    CHECK(r.at(6, 4).root_index == 0);
}

TEST_CASE("Sweeps are identical for any worker count", "[atlas][determinism]") {
    const SystemModel sys = make_cubic_roots_system<double>();
    SolverSpec s;
    s.method = Method::NLEQ_ERR;
    const GridSpec g{37, 29, {-2, 2}, {-1.5, 2}};
    const BasinRaster one = sweep_basin(g, s, sys, 1);
    for (const unsigned threads : {2u, 3u, 8u}) CHECK(sweep_basin(g, s, sys, threads).cells == one.cells);
}

TEST_CASE("Sweep rejects non-planar systems and bad configuration", "[atlas]") {
    const auto scalar = make_scalar_quadratic_system<double>();
    CHECK_THROWS_AS(sweep_basin(GridSpec{}, SolverSpec{}, scalar, 1), ConfigError);
    const SystemModel bare("bare", 2, [](const Vector& x) { return x; });
    CHECK_THROWS_AS(sweep_basin(GridSpec{3, 3, {0, 1}, {0, 1}}, cn(), bare, 1), ConfigError);
}

TEST_CASE("Affine systems have no critical curve", "[atlas][critical]") {
    const SystemModel sys = make_default_affine_system<double>();
    const CriticalCurve c = extract_critical_curve(GridSpec{20, 20, {-5, 5}, {-5, 5}}, sys);
    CHECK(c.empty());
    CHECK_THROWS_AS(perturbed_seeds(c, 0.1, 1), EmptyCurve);
}

TEST_CASE("Circle-hyperbola critical set is recovered along y = +-x", "[atlas][critical]") {
    const SystemModel sys = make_circle_hyperbola_system<double>();
    const GridSpec g{50, 50, {-2, 2}, {-2, 2}};
    const int refine = 3;
    const CriticalCurve c = extract_critical_curve(g, sys, refine);
    REQUIRE_FALSE(c.empty());
    const double h = 4.0 / (g.nx * refine - 1);
    const double diagonal = std::sqrt(2.0) * h;
    bool near_plus = false;
    bool near_minus = false;
    for (const auto& seg : c.segments)
        for (const auto& v : seg) {
            CHECK(distance_to_diagonals(v) <= diagonal);
            CHECK(std::abs(det(sys.jacobian(v))) <= 1e-2);
            CHECK((v[0] >= -2 && v[0] <= 2 && v[1] >= -2 && v[1] <= 2));
            near_plus = near_plus || std::abs(v[0] - v[1]) < diagonal;
            near_minus = near_minus || std::abs(v[0] + v[1]) < diagonal;
        }
    CHECK(near_plus);
    CHECK(near_minus);
}

TEST_CASE("Every sign-changing lattice edge yields one vertex", "[atlas][critical]") {
    // g = det J = x - 0.3 (vertical line), on a lattice where no node hits zero.
    SystemModel sys("line", 2, [](const Vector& v) { return Vector{0.5 * v[0] * v[0] - 0.3 * v[0], v[1]}; },
                    [](const Vector& v) { return Matrix{{v[0] - 0.3, 0.0}, {0.0, 1.0}}; });
    const GridSpec g{7, 5, {-1, 1}, {-1, 1}};
    const CriticalCurve c = extract_critical_curve(g, sys, 1);
    REQUIRE(c.segments.size() == 1);
    CHECK(c.segments[0].size() == 5);  // one crossing per lattice row
    for (const auto& v : c.segments[0]) CHECK(v[0] == Approx(0.3).margin(1e-12));
}

TEST_CASE("Closed critical loops repeat their first vertex", "[atlas][critical]") {
    // det J = x^2 + y^2 - 1.
    SystemModel sys("circle", 2, [](const Vector& v) { return v; },
                    [](const Vector& v) { return Matrix{{v[0] * v[0] + v[1] * v[1] - 1.0, 0.0}, {0.0, 1.0}}; });
    const CriticalCurve c = extract_critical_curve(GridSpec{30, 30, {-2, 2}, {-2, 2}}, sys, 2);
    REQUIRE(c.segments.size() == 1);
    const auto& loop = c.segments[0];
    CHECK(loop.front() == loop.back());
    for (const auto& v : loop) CHECK(std::hypot(v[0], v[1]) == Approx(1.0).margin(0.01));
}

TEST_CASE("Perturbed seeds shift along the normal", "[atlas][seeds]") {
    CriticalCurve c;
    c.box = {std::pair{0.0, 1.0}, std::pair{0.0, 1.0}};
    c.segments = {{Vector{0.2, 0.5}, Vector{0.5, 0.5}, Vector{0.8, 0.5}}};
    const auto up = perturbed_seeds(c, 0.1, +1);
    const auto down = perturbed_seeds(c, 0.1, -1);
    REQUIRE(up.size() == 3);
    REQUIRE(down.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(up[i][0] == Approx(c.segments[0][i][0]));
        CHECK(up[i][1] == Approx(0.6));
        CHECK(down[i][1] == Approx(0.4));
        CHECK(up[i][0] - c.segments[0][i][0] == Approx(-(down[i][0] - c.segments[0][i][0])).margin(1e-15));
    }
}

TEST_CASE("Perturbed seeds are clipped to the box and use normalized axes", "[atlas][seeds]") {
    CriticalCurve c;
    c.box = {std::pair{0.0, 1.0}, std::pair{280.0, 400.0}};
    c.segments = {{Vector{0.5, 280.0}, Vector{0.5, 400.0}}};
    const auto right = perturbed_seeds(c, 0.02, -1);
    REQUIRE(right.size() == 2);
    CHECK(right[0][0] == Approx(0.52));
    CHECK(right[0][1] == 280.0);

    CriticalCurve edge;
    edge.box = {std::pair{0.0, 1.0}, std::pair{0.0, 1.0}};
    edge.segments = {{Vector{0.1, 0.95}, Vector{0.9, 0.95}}};
    for (const auto& p : perturbed_seeds(edge, 0.2, +1)) CHECK(p[1] == 1.0);
}

TEST_CASE("Illustrative azeotrope critical curve separates the two azeotropes", "[atlas][azeotrope]") {
    const auto cfg = cli::load_problem_config(BASINLAB_DATA_DIR "/illustrative_double_azeotrope.json");
    const SystemModel az = cli::make_system(cfg);
    const CriticalCurve c = extract_critical_curve(GridSpec{60, 60, {1e-6, 1 - 1e-6}, {280, 400}}, az);
    REQUIRE_FALSE(c.empty());
    // Count crossings of the segment between the azeotropes with the polylines.
    const Vector a = cfg.reference_roots[0];
    const Vector b = cfg.reference_roots[1];
    auto orient = [](const Vector& p, const Vector& q, const Vector& r) {
        return (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0]);
    };
    int crossings = 0;
    for (const auto& seg : c.segments)
        for (std::size_t k = 0; k + 1 < seg.size(); ++k) {
            const Vector& p = seg[k];
            const Vector& q = seg[k + 1];
            if (orient(a, b, p) * orient(a, b, q) < 0 && orient(p, q, a) * orient(p, q, b) < 0) ++crossings;
        }
    CHECK(crossings % 2 == 1);
}
