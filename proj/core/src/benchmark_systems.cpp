#include "basinlab/benchmark_systems.hpp"

#include <string>

namespace basinlab {

SystemModel benchmark_system(std::string_view name) {
    if (name == "cubic_roots") return make_cubic_roots_system<double>();
    if (name == "circle_hyperbola") return make_circle_hyperbola_system<double>();
    if (name == "affine") return make_default_affine_system<double>();
    throw UnknownSystem("unknown builtin system '" + std::string(name) +
                        "' (expected cubic_roots, circle_hyperbola or affine)");
}

bool is_benchmark_system(std::string_view name) noexcept {
    return name == "cubic_roots" || name == "circle_hyperbola" || name == "affine";
}

}  // namespace basinlab
