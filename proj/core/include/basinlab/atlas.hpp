#pragma once

// Basin-of-attraction rasters and the critical set det J = 0 over a 2-D box.

#include "basinlab/linalg.hpp"
#include "basinlab/solvers.hpp"
#include "basinlab/system.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

namespace basinlab {

/// Uniform lattice of nx * ny seeds; both range endpoints are lattice points.
struct GridSpec {
    int nx = 200;
    int ny = 200;
    std::pair<double, double> x_range{1e-6, 1.0 - 1e-6};
    std::pair<double, double> y_range{280.0, 400.0};

    /// Throws ConfigError unless nx, ny >= 2 and both ranges increase strictly.
    void validate() const;
    [[nodiscard]] double x_at(int ix) const noexcept;
    [[nodiscard]] double y_at(int iy) const noexcept;
    [[nodiscard]] std::size_t cell_count() const noexcept { return static_cast<std::size_t>(nx) * ny; }

    /// Grid over a 2-D system's domain box.
    [[nodiscard]] static GridSpec over_domain(const SystemModel& system, int nx, int ny);
};

struct CellRecord {
    OutcomeKind outcome = OutcomeKind::Oscillatory;
    int root_index = -1;
    int iterations = 0;
    std::uint64_t nfe = 0;

    friend bool operator==(const CellRecord&, const CellRecord&) = default;
};

struct BasinRaster {
    GridSpec grid;
    Method method = Method::CN;
    std::size_t root_count = 0;
    /// Row-major from (ix, iy) = (0, 0): index iy * nx + ix.
    std::vector<CellRecord> cells;

    [[nodiscard]] const CellRecord& at(int ix, int iy) const { return cells[static_cast<std::size_t>(iy) * grid.nx + ix]; }
    /// Cell counts indexed like kAllOutcomeKinds.
    [[nodiscard]] std::array<std::size_t, kAllOutcomeKinds.size()> counts() const;
};

/// Runs run_orbit from every lattice point. Cells are handed to `threads`
/// workers (0 picks the hardware concurrency) and stored by index, so the
/// raster does not depend on scheduling. Requires a 2-D system.
[[nodiscard]] BasinRaster sweep_basin(const GridSpec& grid, const SolverSpec& spec, const SystemModel& system,
                                      unsigned threads = 0);

/// Fraction of cells that converged to a reference root.
[[nodiscard]] double convergence_rate(const BasinRaster& raster);

struct CriticalCurve {
    std::vector<std::vector<Vector>> segments;
    /// Rectangle the curve was extracted over; perturbed seeds are clipped to it.
    std::array<std::pair<double, double>, 2> box{};

    [[nodiscard]] bool empty() const noexcept { return segments.empty(); }
    [[nodiscard]] std::size_t vertex_count() const noexcept;
};

/// Marching squares on g = det J over a (refine nx) x (refine ny) lattice.
/// Corners with g >= 0 count as positive; each edge with a sign change gets
/// one vertex by linear interpolation. Saddle cells are split according to
/// the sign of g at the cell center. Crossings are chained into polylines:
/// open chains first, then closed loops (whose first vertex is repeated).
/// Uses the analytic Jacobian when the system has one, else five-point.
[[nodiscard]] CriticalCurve extract_critical_curve(const GridSpec& grid, const SystemModel& system, int refine = 3);

struct SeedPoint {
    std::size_t segment = 0;
    std::size_t vertex = 0;
    Vector point;
};

/// For every vertex with a defined tangent, the point displaced by
/// side * offset along the unit normal (-t_y, t_x). Tangent, normal and
/// offset live in box-normalized coordinates (each axis scaled to [0, 1]),
/// so one offset is meaningful on axes with different units. Results are
/// clipped to curve.box. Throws EmptyCurve.
[[nodiscard]] std::vector<SeedPoint> perturbed_seed_points(const CriticalCurve& curve, double offset, int side);
[[nodiscard]] std::vector<Vector> perturbed_seeds(const CriticalCurve& curve, double offset, int side);

}  // namespace basinlab
