#include "basinlab/cli/io.hpp"

#include "basinlab/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace basinlab::cli {

namespace {

Rgb hsv(double h, double s, double v) {
    const double c = v * s;
    const double hp = std::fmod(h, 360.0) / 60.0;
    const double x = c * (1.0 - std::abs(std::fmod(hp, 2.0) - 1.0));
    double r = 0, g = 0, b = 0;
    if (hp < 1) r = c, g = x;
    else if (hp < 2) r = x, g = c;
    else if (hp < 3) g = c, b = x;
    else if (hp < 4) g = x, b = c;
    else if (hp < 5) r = x, b = c;
    else r = c, b = x;
    const double m = v - c;
    auto byte = [m](double u) { return static_cast<std::uint8_t>(std::lround(255.0 * (u + m))); };
    return {byte(r), byte(g), byte(b)};
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(line);
    while (std::getline(in, cur, sep)) out.push_back(cur);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

}  // namespace

Rgb root_color(int root_index) {
    if (root_index == 0) return {220, 20, 20};
    if (root_index == 1) return {20, 20, 220};
    return hsv(40.0 + 137.50776405 * (root_index - 2), 0.6, 0.85);
}

Rgb cell_color(const CellRecord& cell) {
    switch (cell.outcome) {
        case OutcomeKind::ConvergedToRoot: return root_color(cell.root_index);
        case OutcomeKind::ConvergedToUnlistedRoot: return kUnlistedRootColor;
        case OutcomeKind::SingularJacobian: return kSingularColor;
        case OutcomeKind::DivergedToInfinity: return kDivergedColor;
        case OutcomeKind::Oscillatory: return kOscillatoryColor;
    }
    return kOscillatoryColor;
}

std::string render_ppm(const BasinRaster& raster, const CriticalCurve* overlay) {
    const int nx = raster.grid.nx;
    const int ny = raster.grid.ny;
    std::vector<Rgb> pixels(static_cast<std::size_t>(nx) * ny);
    for (int iy = 0; iy < ny; ++iy)
        for (int ix = 0; ix < nx; ++ix)
            pixels[static_cast<std::size_t>(ny - 1 - iy) * nx + ix] = cell_color(raster.at(ix, iy));

    if (overlay) {
        const auto& g = raster.grid;
        auto to_lattice = [&](const Vector& p) {
            return std::pair{(p[0] - g.x_range.first) / (g.x_range.second - g.x_range.first) * (nx - 1),
                             (p[1] - g.y_range.first) / (g.y_range.second - g.y_range.first) * (ny - 1)};
        };
        auto paint = [&](double fx, double fy) {
            const long ix = std::lround(fx);
            const long iy = std::lround(fy);
            if (ix < 0 || iy < 0 || ix >= nx || iy >= ny) return;
            pixels[static_cast<std::size_t>(ny - 1 - iy) * nx + static_cast<std::size_t>(ix)] = kOverlayColor;
        };
        for (const auto& seg : overlay->segments) {
            for (std::size_t k = 0; k < seg.size(); ++k) {
                const auto [ax, ay] = to_lattice(seg[k]);
                if (k + 1 == seg.size()) {
                    paint(ax, ay);
                    break;
                }
                const auto [bx, by] = to_lattice(seg[k + 1]);
                const int steps = 1 + static_cast<int>(std::ceil(std::max(std::abs(bx - ax), std::abs(by - ay))));
                for (int s = 0; s <= steps; ++s) {
                    const double t = static_cast<double>(s) / steps;
                    paint(ax + t * (bx - ax), ay + t * (by - ay));
                }
            }
        }
    }

    std::string out = "P6\n" + std::to_string(nx) + " " + std::to_string(ny) + "\n255\n";
    out.reserve(out.size() + pixels.size() * 3);
    for (const auto& p : pixels) out.append(reinterpret_cast<const char*>(p.data()), 3);
    return out;
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string basin_csv(const BasinRaster& raster) {
    std::string out = "ix,iy,x,y,outcome,root_index,iterations,nfe\n";
    for (int iy = 0; iy < raster.grid.ny; ++iy)
        for (int ix = 0; ix < raster.grid.nx; ++ix) {
            const auto& c = raster.at(ix, iy);
            out += std::to_string(ix) + ',' + std::to_string(iy) + ',' + format_double(raster.grid.x_at(ix)) + ',' +
                   format_double(raster.grid.y_at(iy)) + ',' + std::string(to_string(c.outcome)) + ',' +
                   std::to_string(c.root_index) + ',' + std::to_string(c.iterations) + ',' + std::to_string(c.nfe) + '\n';
        }
    return out;
}

nlohmann::json basin_summary(const BasinRaster& raster) {
    nlohmann::json counts = nlohmann::json::object();
    const auto c = raster.counts();
    for (std::size_t i = 0; i < kAllOutcomeKinds.size(); ++i) counts[std::string(to_string(kAllOutcomeKinds[i]))] = c[i];
    const auto& g = raster.grid;
    return {{"method", std::string(to_string(raster.method))},
            {"grid", {{"nx", g.nx}, {"ny", g.ny}, {"x_range", {g.x_range.first, g.x_range.second}},
                      {"y_range", {g.y_range.first, g.y_range.second}}}},
            {"counts", counts},
            {"C_percent", 100.0 * convergence_rate(raster)}};
}

std::string critical_csv(const CriticalCurve& curve) {
    std::string out = "segment_id,vertex_id,x,y\n";
    for (std::size_t s = 0; s < curve.segments.size(); ++s)
        for (std::size_t v = 0; v < curve.segments[s].size(); ++v) {
            const auto& p = curve.segments[s][v];
            out += std::to_string(s) + ',' + std::to_string(v) + ',' + format_double(p[0]) + ',' + format_double(p[1]) + '\n';
        }
    return out;
}

std::string trace_csv(const IterationTrace& trace) {
    const std::size_t n = trace.points.empty() ? 0 : trace.points.front().size();
    std::string out = "k";
    for (std::size_t i = 0; i < n; ++i) out += ",x_" + std::to_string(i);
    out += ",f_inf,dx_inf,lambda,nfe\n";
    for (std::size_t k = 0; k < trace.points.size(); ++k) {
        out += std::to_string(k);
        for (std::size_t i = 0; i < n; ++i) out += ',' + format_double(trace.points[k][i]);
        out += ',' + format_double(trace.residual_norms[k]) + ',';
        if (k > 0) out += format_double(norm_inf(trace.steps[k - 1])) + ',' + format_double(trace.damping[k - 1]);
        else out += ',';
        out += ',' + std::to_string(trace.nfe_at[k]) + '\n';
    }
    return out;
}

std::vector<Vector> read_trace_points(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open trace file '" + path.string() + "'");
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("trace file '" + path.string() + "' is empty");
    const auto header = split(line, ',');
    std::vector<std::size_t> cols;
    for (std::size_t i = 0;; ++i) {
        const auto it = std::find(header.begin(), header.end(), "x_" + std::to_string(i));
        if (it == header.end()) break;
        cols.push_back(static_cast<std::size_t>(it - header.begin()));
    }
    if (cols.empty()) throw ConfigError("trace file '" + path.string() + "' has no x_0 column");

    std::vector<Vector> points;
    int row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty() || line == "\r") continue;
        const auto fields = split(line, ',');
        Vector p(cols.size());
        for (std::size_t i = 0; i < cols.size(); ++i) {
            if (cols[i] >= fields.size()) throw ConfigError("trace file row " + std::to_string(row) + ": missing column");
            const std::string& f = fields[cols[i]];
            char* end = nullptr;
            p[i] = std::strtod(f.c_str(), &end);
            if (f.empty() || (*end != '\0' && *end != '\r'))
                throw ConfigError("trace file row " + std::to_string(row) + ": '" + f + "' is not a number");
        }
        points.push_back(std::move(p));
    }
    return points;
}

void write_text(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path.string() + "'");
    out << content;
    if (!out) throw ConfigError("failed writing '" + path.string() + "'");
}

}  // namespace basinlab::cli
