#pragma once

// Synthetic systems with known root and critical-set geometry.

#include "basinlab/system.hpp"

#include <cmath>
#include <numbers>
#include <string_view>
#include <utility>
#include <vector>

namespace basinlab {

/// Real form of z^3 = 1: f(x, y) = (x^3 - 3xy^2 - 1, 3x^2 y - y^3).
template <class Real = double>
[[nodiscard]] BasicSystemModel<Real> make_cubic_roots_system() {
    using V = BasicVector<Real>;
    using M = BasicMatrix<Real>;
    BasicSystemModel<Real> model(
        "cubic_roots", 2,
        [](const V& v) {
            const Real x = v[0], y = v[1];
            return V{x * x * x - Real(3) * x * y * y - Real(1), Real(3) * x * x * y - y * y * y};
        },
        [](const V& v) {
            const Real x = v[0], y = v[1];
            const Real a = Real(3) * (x * x - y * y);
            const Real b = Real(6) * x * y;
            return M{{a, -b}, {b, a}};
        });
    using std::sqrt;
    const Real half_root3 = sqrt(Real(3)) / Real(2);
    model.set_domain_box({{Real(-2), Real(2)}, {Real(-2), Real(2)}})
        .set_reference_roots({V{Real(1), Real(0)}, V{Real(-0.5), half_root3}, V{Real(-0.5), -half_root3}})
        .set_default_seeds({V{Real(1.1), Real(0.1)}, V{Real(-1), Real(1)}, V{Real(-1), Real(-1)}, V{Real(0.3), Real(0.2)}});
    return model;
}

/// f(x, y) = (x^2 + y^2 - 4, xy - 1); det J = 2x^2 - 2y^2, critical set {y = ±x}.
template <class Real = double>
[[nodiscard]] BasicSystemModel<Real> make_circle_hyperbola_system() {
    using V = BasicVector<Real>;
    using M = BasicMatrix<Real>;
    BasicSystemModel<Real> model(
        "circle_hyperbola", 2,
        [](const V& v) { return V{v[0] * v[0] + v[1] * v[1] - Real(4), v[0] * v[1] - Real(1)}; },
        [](const V& v) { return M{{Real(2) * v[0], Real(2) * v[1]}, {v[1], v[0]}}; });
    using std::sqrt;
    // x^2 = 2 ± sqrt(3), y = 1/x.
    const Real a = sqrt(Real(2) + sqrt(Real(3)));
    const Real b = sqrt(Real(2) - sqrt(Real(3)));
    model.set_domain_box({{Real(-2), Real(2)}, {Real(-2), Real(2)}})
        .set_reference_roots({V{a, Real(1) / a}, V{b, Real(1) / b}, V{-b, Real(-1) / b}, V{-a, Real(-1) / a}})
        .set_default_seeds({V{Real(1.5), Real(0.5)}, V{Real(0.5), Real(1.5)}, V{Real(-0.5), Real(-1.5)},
                            V{Real(-1.5), Real(-0.5)}});
    return model;
}

/// f(X) = A X - b with the single root A^{-1} b.
template <class Real = double>
[[nodiscard]] BasicSystemModel<Real> make_affine_system(const BasicMatrix<Real>& a, const BasicVector<Real>& b) {
    using V = BasicVector<Real>;
    const std::size_t n = b.size();
    if (a.size() != n) throw Error("affine system: A and b dimensions differ");
    BasicSystemModel<Real> model(
        "affine", n, [a, b](const V& x) { return a * x - b; }, [a](const V&) { return a; });
    std::vector<std::pair<Real, Real>> box(n, {Real(-5), Real(5)});
    model.set_domain_box(std::move(box)).set_reference_roots({lu_solve(a, b)});
    std::vector<V> seeds;
    for (const Real s : {Real(5), Real(-3), Real(1)}) seeds.emplace_back(n, s);
    model.set_default_seeds(std::move(seeds));
    return model;
}

/// Default affine instance: A = [[2, 1], [1, 3]], b = (1, 2).
template <class Real = double>
[[nodiscard]] BasicSystemModel<Real> make_default_affine_system() {
    return make_affine_system<Real>(BasicMatrix<Real>{{Real(2), Real(1)}, {Real(1), Real(3)}},
                                    BasicVector<Real>{Real(1), Real(2)});
}

/// Scalar f(x) = x^2 - c with root sqrt(c).
template <class Real = double>
[[nodiscard]] BasicSystemModel<Real> make_scalar_quadratic_system(Real c = Real(2)) {
    using V = BasicVector<Real>;
    using M = BasicMatrix<Real>;
    BasicSystemModel<Real> model(
        "scalar_quadratic", 1, [c](const V& x) { return V{x[0] * x[0] - c}; },
        [](const V& x) { return M{{Real(2) * x[0]}}; });
    using std::sqrt;
    model.set_domain_box({{Real(0), Real(3)}}).set_reference_roots({V{sqrt(c)}}).set_default_seeds({V{Real(1.5)}});
    return model;
}

/// Builtin systems by name: cubic_roots, circle_hyperbola, affine.
/// Throws UnknownSystem otherwise.
[[nodiscard]] SystemModel benchmark_system(std::string_view name);

/// True when `name` is accepted by benchmark_system.
[[nodiscard]] bool is_benchmark_system(std::string_view name) noexcept;

}  // namespace basinlab
