#pragma once

// Palette and file formats for rasters, curves and traces.

#include "basinlab/atlas.hpp"
#include "basinlab/metrics.hpp"
#include "basinlab/solvers.hpp"

#include <json.hpp>

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace basinlab::cli {

using Rgb = std::array<std::uint8_t, 3>;

inline constexpr Rgb kSingularColor{240, 220, 30};
inline constexpr Rgb kDivergedColor{20, 150, 20};
inline constexpr Rgb kOscillatoryColor{255, 140, 0};
inline constexpr Rgb kUnlistedRootColor{128, 128, 128};
inline constexpr Rgb kOverlayColor{0, 0, 0};

/// Root 0 red, root 1 blue, further roots spaced by the golden angle in hue.
[[nodiscard]] Rgb root_color(int root_index);
[[nodiscard]] Rgb cell_color(const CellRecord& cell);

/// Binary P6 image, one pixel per cell, first row at the maximum y. With a
/// curve, every lattice pixel the polylines pass through is painted black.
[[nodiscard]] std::string render_ppm(const BasinRaster& raster, const CriticalCurve* overlay = nullptr);

/// Header ix,iy,x,y,outcome,root_index,iterations,nfe; one row per cell.
[[nodiscard]] std::string basin_csv(const BasinRaster& raster);
[[nodiscard]] nlohmann::json basin_summary(const BasinRaster& raster);

/// Header segment_id,vertex_id,x,y.
[[nodiscard]] std::string critical_csv(const CriticalCurve& curve);

/// Header k,x_0..x_{n-1},f_inf,dx_inf,lambda,nfe; dx_inf and lambda are empty at k = 0.
[[nodiscard]] std::string trace_csv(const IterationTrace& trace);

/// Iterates from a trace file: the x_<i> columns of every data row.
[[nodiscard]] std::vector<Vector> read_trace_points(const std::filesystem::path& path);

/// Round-trip text for doubles.
[[nodiscard]] std::string format_double(double v);

void write_text(const std::filesystem::path& path, const std::string& content);

}  // namespace basinlab::cli
