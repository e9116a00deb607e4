#pragma once

// Newton-type iteration schemes behind one stepping contract, and the orbit
// driver that classifies where an initial estimate ends up.

#include "basinlab/errors.hpp"
#include "basinlab/linalg.hpp"
#include "basinlab/system.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string_view>
#include <vector>

namespace basinlab {

enum class Method { CN, NLEQ_RES, NLEQ_ERR, JFNK, BA, GS, CO, O4N, O5N, O6N };

inline constexpr std::array<Method, 10> kAllMethods{Method::CN,  Method::NLEQ_RES, Method::NLEQ_ERR, Method::JFNK,
                                                     Method::BA,  Method::GS,       Method::CO,       Method::O4N,
                                                     Method::O5N, Method::O6N};

/// Display names match the usual tabulation: "CN", "NLEQ-RES", ...
[[nodiscard]] std::string_view to_string(Method m) noexcept;
/// Accepts display names, underscore variants and any letter case.
[[nodiscard]] std::optional<Method> parse_method(std::string_view name) noexcept;

[[nodiscard]] std::string_view to_string(JacobianMode m) noexcept;
[[nodiscard]] std::optional<JacobianMode> parse_jacobian_mode(std::string_view name) noexcept;

struct SolverSpec {
    Method method = Method::CN;
    int max_iter = 200;
    double step_tol = 1e-12;
    /// Multiplied by the system's residual_scale().
    double residual_tol = 1e-10;
    /// A residual this small (also scaled) is accepted without the step test;
    /// lets an exact step on an affine map finish in one iteration.
    double exact_residual_tol = 1e-13;
    double lambda0 = 1.0;
    double lambda_min = 1e-4;
    double theta_max = 0.25;
    /// Relative noise level of f for the JFNK forward difference.
    double fd_epsilon = 2.220446049250313e-16;
    double krylov_tol = 1e-12;
    double divergence_bound = 1e8;
    JacobianMode jacobian_mode = JacobianMode::five_point;

    /// Throws ConfigError when an invariant is violated.
    void validate() const;
};

enum class OutcomeKind { ConvergedToRoot, ConvergedToUnlistedRoot, SingularJacobian, DivergedToInfinity, Oscillatory };

inline constexpr std::array<OutcomeKind, 5> kAllOutcomeKinds{
    OutcomeKind::ConvergedToRoot, OutcomeKind::ConvergedToUnlistedRoot, OutcomeKind::SingularJacobian,
    OutcomeKind::DivergedToInfinity, OutcomeKind::Oscillatory};

/// Canonical snake_case names used in every output file.
[[nodiscard]] std::string_view to_string(OutcomeKind k) noexcept;
[[nodiscard]] std::optional<OutcomeKind> parse_outcome_kind(std::string_view name) noexcept;

template <class Real>
struct BasicOutcome {
    OutcomeKind kind = OutcomeKind::Oscillatory;
    /// Index into reference_roots for ConvergedToRoot, -1 otherwise.
    int root_index = -1;
    /// Last iterate (the root found, for converged outcomes).
    BasicVector<Real> point;

    [[nodiscard]] bool converged() const noexcept {
        return kind == OutcomeKind::ConvergedToRoot || kind == OutcomeKind::ConvergedToUnlistedRoot;
    }
};

template <class Real>
struct BasicIterationTrace {
    Method method = Method::CN;
    std::vector<BasicVector<Real>> points;  ///< X^0 .. X^K
    std::vector<BasicVector<Real>> steps;   ///< X^{k+1} - X^k
    std::vector<double> damping;            ///< accepted lambda per step (1 for undamped methods)
    std::vector<double> residual_norms;     ///< ||f(X^k)||_inf per point
    std::vector<std::uint64_t> nfe_at;      ///< cumulative residual evaluations per point
    std::uint64_t nfe = 0;
    BasicOutcome<Real> outcome;

    [[nodiscard]] std::size_t iterations() const noexcept { return steps.size(); }
};

using Outcome = BasicOutcome<double>;
using IterationTrace = BasicIterationTrace<double>;

template <class Real>
struct StepResult {
    BasicVector<Real> next;
    BasicVector<Real> residual;  ///< f(next)
    BasicVector<Real> delta;     ///< next - x
    Real lambda = Real(1);
    /// Set by the globalized methods when their own termination test fired.
    bool converged = false;
};

/// Memory carried between iterations by the damped methods.
template <class Real>
struct DampingState {
    bool has_previous = false;
    Real lambda_previous = Real(1);
    // NLEQ-RES
    Real residual_norm_previous = Real(0);
    Real mu_previous = Real(1);
    // NLEQ-ERR
    Real newton_norm_previous = Real(0);
    BasicVector<Real> simplified_correction;
};

namespace detail {

template <class Real>
BasicMatrix<Real> quadratic_weight(const BasicMatrix<Real>& tau, const Real& linear, const Real& quadratic) {
    const std::size_t n = tau.size();
    const BasicMatrix<Real> id = BasicMatrix<Real>::identity(n);
    const BasicMatrix<Real> e = tau - id;
    return id + e * linear + (e * e) * quadratic;
}

template <class Real>
Real inf_or(const Real& num, const Real& den) {
    if (den == Real(0)) return Real(std::numeric_limits<double>::infinity());
    return num / den;
}

// Trial evaluation for the damped methods; a failed evaluation is reported
// as nullopt so the caller can shrink the step.
template <class Real>
std::optional<BasicVector<Real>> try_residual(Evaluator<Real>& ev, const BasicVector<Real>& x) {
    if (!all_finite(x)) return std::nullopt;
    try {
        BasicVector<Real> r = ev.residual(x);
        if (!all_finite(r)) return std::nullopt;
        return r;
    } catch (const DomainError&) {
        return std::nullopt;
    }
}

inline constexpr int kMaxDampingTrials = 64;

}  // namespace detail

/// Classic Newton: J(X) dX = -f(X), X+ = X + dX.
template <class Real>
StepResult<Real> step_cn(const BasicVector<Real>& x, const BasicVector<Real>& fx, Evaluator<Real>& ev) {
    const LuFactorization<Real> lu(ev.jacobian(x));
    BasicVector<Real> dx = lu.solve(-fx);
    BasicVector<Real> next = x + dx;
    BasicVector<Real> fn = ev.residual(next);
    return {std::move(next), std::move(fn), std::move(dx)};
}

/// Global Newton with residual-based damping and adaptive trust region.
template <class Real>
StepResult<Real> step_nleq_res(const BasicVector<Real>& x, const BasicVector<Real>& fx, Evaluator<Real>& ev,
                               const SolverSpec& spec, DampingState<Real>& state) {
    using std::min;
    const LuFactorization<Real> lu(ev.jacobian(x));
    const BasicVector<Real> dx = lu.solve(-fx);
    const Real fnorm = norm2(fx);
    if (fnorm == Real(0)) return {x, fx, BasicVector<Real>(x.size()), Real(1), true};

    Real lambda = Real(spec.lambda0);
    if (state.has_previous) lambda = min<Real>(Real(1), detail::inf_or(state.residual_norm_previous, fnorm) * state.mu_previous);

    const Real scaled_tol = Real(spec.residual_tol) * ev.system().residual_scale();
    for (int trial = 0;; ++trial) {
        if (lambda < Real(spec.lambda_min) || trial >= detail::kMaxDampingTrials)
            throw RegularityFailure("NLEQ-RES: damping factor below lambda_min");
        BasicVector<Real> trial_x = x + dx * lambda;
        const auto trial_f = detail::try_residual(ev, trial_x);
        if (!trial_f) {
            lambda = lambda / Real(2);
            continue;
        }
        const bool within_tol = norm_inf(*trial_f) <= scaled_tol;
        const Real trial_norm = norm2(*trial_f);
        const Real theta = trial_norm / fnorm;
        const Real mu = detail::inf_or(Real(0.5) * fnorm * lambda * lambda, norm2(*trial_f - fx * (Real(1) - lambda)));
        // At rounding level the monotonicity test compares noise.
        if (!within_tol && theta > Real(1) - lambda / Real(4)) {
            lambda = min<Real>(mu, lambda / Real(2));
            continue;
        }
        const Real lambda_pred = min<Real>(Real(1), mu);
        const bool full_step = lambda_pred == Real(1) && lambda == Real(1) && theta < Real(spec.theta_max);
        if (!within_tol && !full_step && lambda_pred >= Real(4) * lambda) {
            lambda = lambda_pred;
            continue;
        }
        const bool converged = within_tol;
        state.has_previous = true;
        state.residual_norm_previous = fnorm;
        state.mu_previous = mu;
        state.lambda_previous = lambda;
        BasicVector<Real> delta = trial_x - x;
        return {std::move(trial_x), *trial_f, std::move(delta), lambda, converged};
    }
}

/// Global Newton with error-oriented damping; the simplified correction
/// J(X^k)^{-1} f(X_trial) drives both monitoring and prediction.
template <class Real>
StepResult<Real> step_nleq_err(const BasicVector<Real>& x, const BasicVector<Real>& fx, Evaluator<Real>& ev,
                               const SolverSpec& spec, DampingState<Real>& state) {
    using std::min;
    const LuFactorization<Real> lu(ev.jacobian(x));
    const BasicVector<Real> dx = lu.solve(-fx);
    const Real dx_norm = norm2(dx);
    if (dx_norm == Real(0)) return {x, fx, BasicVector<Real>(x.size()), Real(1), true};

    Real lambda = Real(spec.lambda0);
    if (state.has_previous) {
        const Real mu = detail::inf_or(state.newton_norm_previous * norm2(state.simplified_correction),
                                       norm2(state.simplified_correction - dx) * dx_norm) *
                        state.lambda_previous;
        lambda = min<Real>(Real(1), mu);
    }

    const Real scaled_tol = Real(spec.residual_tol) * ev.system().residual_scale();
    for (int trial = 0;; ++trial) {
        if (lambda < Real(spec.lambda_min) || trial >= detail::kMaxDampingTrials)
            throw RegularityFailure("NLEQ-ERR: damping factor below lambda_min");
        BasicVector<Real> trial_x = x + dx * lambda;
        const auto trial_f = detail::try_residual(ev, trial_x);
        if (!trial_f) {
            lambda = lambda / Real(2);
            continue;
        }
        const bool within_tol = norm_inf(*trial_f) <= scaled_tol;
        BasicVector<Real> simplified = lu.solve(-*trial_f);
        const Real simplified_norm = norm2(simplified);
        const Real theta = simplified_norm / dx_norm;
        const Real mu = detail::inf_or(Real(0.5) * dx_norm * lambda * lambda, norm2(simplified - dx * (Real(1) - lambda)));
        // At rounding level the monotonicity test compares noise.
        if (!within_tol && theta > Real(1) - lambda / Real(4)) {
            lambda = min<Real>(mu, lambda / Real(2));
            continue;
        }
        const Real lambda_pred = min<Real>(Real(1), mu);
        const bool full_step = lambda_pred == Real(1) && lambda == Real(1);
        if (!within_tol && !full_step && lambda_pred >= Real(4) * lambda) {
            lambda = lambda_pred;
            continue;
        }
        const bool converged = (full_step && simplified_norm < Real(spec.step_tol)) || within_tol;
        state.has_previous = true;
        state.newton_norm_previous = dx_norm;
        state.simplified_correction = std::move(simplified);
        state.lambda_previous = lambda;
        BasicVector<Real> delta = trial_x - x;
        return {std::move(trial_x), *trial_f, std::move(delta), lambda, converged};
    }
}

/// Forward-difference increment for J v: sqrt((1 + ||X||) fd_epsilon) / ||v||,
/// with fd_epsilon the relative noise level of f.
template <class Real>
[[nodiscard]] Real jfnk_increment(const Real& x_norm, const Real& v_norm, double fd_epsilon) {
    using std::sqrt;
    return sqrt((Real(1) + x_norm) * Real(fd_epsilon)) / v_norm;
}

/// Jacobian-free Newton-Krylov: GMRES on the forward-difference product
///   J v ≈ (f(X + eps v) - f(X)) / eps, eps from jfnk_increment.
/// A degenerate Krylov basis yields the least-squares step over the
/// non-degenerate part; the driver then classifies the orbit.

template <class Real>
StepResult<Real> step_jfnk(const BasicVector<Real>& x, const BasicVector<Real>& fx, Evaluator<Real>& ev,
                           const SolverSpec& spec) {
    auto matvec = [&](const BasicVector<Real>& v) {
        const Real vn = norm2(v);
        if (vn == Real(0)) return BasicVector<Real>(v.size());
        const Real eps = jfnk_increment(norm2(x), vn, spec.fd_epsilon);
        BasicVector<Real> fp = ev.residual(x + v * eps);
        if (!all_finite(fp)) throw NonFiniteEvaluation("non-finite residual in matrix-free product");
        return (fp - fx) * (Real(1) / eps);
    };
    GmresResult<Real> lin = gmres_solve<Real>(matvec, -fx, Real(spec.krylov_tol));
    BasicVector<Real> next = x + lin.x;
    BasicVector<Real> fn = ev.residual(next);
    return {std::move(next), std::move(fn), std::move(lin.x)};
}

/// Fourth-order two-Jacobian scheme:
///   Y = X - 2/3 J(X)^{-1} f, tau = J(X)^{-1} J(Y), A1 = (J(X) + J(Y)) / 2,
///   W = I - (tau - I)/4 + 3/4 (tau - I)^2, X+ = X - W A1^{-1} f.
template <class Real>
StepResult<Real> step_ba(const BasicVector<Real>& x, const BasicVector<Real>& fx, Evaluator<Real>& ev) {
    const BasicMatrix<Real> jx = ev.jacobian(x);
    const LuFactorization<Real> lux(jx);
    const BasicVector<Real> y = x - lux.solve(fx) * (Real(2) / Real(3));
    const BasicMatrix<Real> jy = ev.jacobian(y);
    const BasicMatrix<Real> w = detail::quadratic_weight(lux.solve(jy), Real(-0.25), Real(0.75));
    const LuFactorization<Real> lua((jx + jy) * Real(0.5));
    BasicVector<Real> dx = -(w * lua.solve(fx));
    BasicVector<Real> next = x + dx;
    BasicVector<Real> fn = ev.residual(next);
    return {std::move(next), std::move(fn), std::move(dx)};
}

/// Fifth-order scheme:
///   Y = X - J(X)^{-1} f, Z = X - (J(X)^{-1} + J(Y)^{-1}) f / 2, X+ = Z - J(Y)^{-1} f(Z).
template <class Real>
StepResult<Real> step_gs(const BasicVector<Real>& x, const BasicVector<Real>& fx, Evaluator<Real>& ev) {
    const LuFactorization<Real> lux(ev.jacobian(x));
    const BasicVector<Real> ux = lux.solve(fx);
    const BasicVector<Real> y = x - ux;
    const LuFactorization<Real> luy(ev.jacobian(y));
    const BasicVector<Real> z = x - (ux + luy.solve(fx)) * Real(0.5);
    const BasicVector<Real> fz = ev.residual(z);
    BasicVector<Real> next = z - luy.solve(fz);
    BasicVector<Real> fn = ev.residual(next);
    BasicVector<Real> dx = next - x;
    return {std::move(next), std::move(fn), std::move(dx)};
}

/// Sixth-order scheme with M = 2 J(Y) - J(X):
///   Y = X - J(X)^{-1} f / 2, Z = X - M^{-1} (3 f(X) - 4 f(Y)), X+ = Z - M^{-1} f(Z).
/// M reduces to J on affine maps, so each stage is affine-exact.
template <class Real>
StepResult<Real> step_co(const BasicVector<Real>& x, const BasicVector<Real>& fx, Evaluator<Real>& ev) {
    const BasicMatrix<Real> jx = ev.jacobian(x);
    const LuFactorization<Real> lux(jx);
    const BasicVector<Real> y = x - lux.solve(fx) * Real(0.5);
    const BasicMatrix<Real> jy = ev.jacobian(y);
    const BasicVector<Real> fy = ev.residual(y);
    const LuFactorization<Real> lum(jy * Real(2) - jx);
    const BasicVector<Real> z = x - lum.solve(fx * Real(3) - fy * Real(4));
    const BasicVector<Real> fz = ev.residual(z);
    BasicVector<Real> next = z - lum.solve(fz);
    BasicVector<Real> fn = ev.residual(next);
    BasicVector<Real> dx = next - x;
    return {std::move(next), std::move(fn), std::move(dx)};
}

/// Fourth/fifth/sixth-order family sharing Y = X - 2/3 J(X)^{-1} f and
/// tau = J(X)^{-1} J(Y):
///   G4 = X - H J(X)^{-1} f,   H = I - 3/4 (tau - I) + 9/8 (tau - I)^2
///   G5 = G4 - J(X)^{-1} f(G4)
///   G6 = G4 - T J(X)^{-1} f(G4),   T = I - 3/2 (tau - I) + 1/2 (tau - I)^2
template <class Real>
StepResult<Real> step_madhu(int order, const BasicVector<Real>& x, const BasicVector<Real>& fx, Evaluator<Real>& ev) {
    const LuFactorization<Real> lux(ev.jacobian(x));
    const BasicVector<Real> ux = lux.solve(fx);
    const BasicVector<Real> y = x - ux * (Real(2) / Real(3));
    const BasicMatrix<Real> tau = lux.solve(ev.jacobian(y));
    const BasicMatrix<Real> h = detail::quadratic_weight(tau, Real(-0.75), Real(9) / Real(8));
    BasicVector<Real> next = x - h * ux;
    if (order >= 5) {
        const BasicVector<Real> fg = ev.residual(next);
        const BasicVector<Real> ug = lux.solve(fg);
        if (order == 5) {
            next -= ug;
        } else {
            const BasicMatrix<Real> t = detail::quadratic_weight(tau, Real(-1.5), Real(0.5));
            next -= t * ug;
        }
    }
    BasicVector<Real> fn = ev.residual(next);
    BasicVector<Real> dx = next - x;
    return {std::move(next), std::move(fn), std::move(dx)};
}

/// One iteration of `spec.method` from (x, f(x)).
template <class Real>
StepResult<Real> step(const BasicVector<Real>& x, const BasicVector<Real>& fx, Evaluator<Real>& ev,
                      const SolverSpec& spec, DampingState<Real>& state) {
    switch (spec.method) {
        case Method::CN: return step_cn(x, fx, ev);
        case Method::NLEQ_RES: return step_nleq_res(x, fx, ev, spec, state);
        case Method::NLEQ_ERR: return step_nleq_err(x, fx, ev, spec, state);
        case Method::JFNK: return step_jfnk(x, fx, ev, spec);
        case Method::BA: return step_ba(x, fx, ev);
        case Method::GS: return step_gs(x, fx, ev);
        case Method::CO: return step_co(x, fx, ev);
        case Method::O4N: return step_madhu(4, x, fx, ev);
        case Method::O5N: return step_madhu(5, x, fx, ev);
        case Method::O6N: return step_madhu(6, x, fx, ev);
    }
    throw ConfigError("unknown method");
}

/// Iterates spec.method from x0 until one terminal condition holds:
///  - ||f||_inf <= residual_tol and (||dX||_inf <= step_tol, or the method's
///    own convergence test, or ||f||_inf <= exact_residual_tol): converged,
///    classified against the system's reference roots;
///  - a linear solve hits a singular matrix: SingularJacobian;
///  - a non-finite iterate/residual or ||X||_inf > divergence_bound: DivergedToInfinity;
///  - max_iter steps, a damping regularity failure, or a stationary
///    non-root iterate: Oscillatory.
template <class Real>
BasicIterationTrace<Real> run_orbit(const BasicVector<Real>& x0, const SolverSpec& spec,
                                    const BasicSystemModel<Real>& system) {
    spec.validate();
    if (x0.size() != system.dimension()) throw ConfigError("initial estimate has the wrong dimension");

    BasicIterationTrace<Real> trace;
    trace.method = spec.method;
    Evaluator<Real> ev(system, spec.jacobian_mode);
    const Real scale = system.residual_scale();
    const Real residual_tol = Real(spec.residual_tol) * scale;
    const Real exact_tol = Real(spec.exact_residual_tol) * scale;
    const Real bound = Real(spec.divergence_bound);

    auto finish = [&](OutcomeKind kind, const BasicVector<Real>& point) {
        trace.outcome.kind = kind;
        trace.outcome.point = point;
        if (kind == OutcomeKind::ConvergedToRoot || kind == OutcomeKind::ConvergedToUnlistedRoot) {
            const auto idx = system.match_root(point);
            trace.outcome.kind = idx ? OutcomeKind::ConvergedToRoot : OutcomeKind::ConvergedToUnlistedRoot;
            trace.outcome.root_index = idx ? static_cast<int>(*idx) : -1;
        }
        trace.nfe = ev.count();
        return std::move(trace);
    };
    auto record_point = [&](const BasicVector<Real>& p, const BasicVector<Real>& fp) {
        trace.points.push_back(p);
        using std::isfinite;
        const Real r = norm_inf(fp);
        trace.residual_norms.push_back(isfinite(r) ? static_cast<double>(r) : std::numeric_limits<double>::infinity());
        trace.nfe_at.push_back(ev.count());
    };

    BasicVector<Real> x = x0;
    BasicVector<Real> fx;
    try {
        fx = ev.residual(x);
    } catch (const DomainError&) {
        trace.points.push_back(x);
        trace.residual_norms.push_back(std::numeric_limits<double>::infinity());
        trace.nfe_at.push_back(ev.count());
        return finish(OutcomeKind::DivergedToInfinity, x);
    }
    record_point(x, fx);
    if (!all_finite(fx)) return finish(OutcomeKind::DivergedToInfinity, x);
    if (norm_inf(fx) <= exact_tol) return finish(OutcomeKind::ConvergedToRoot, x);

    DampingState<Real> state;
    for (int k = 0; k < spec.max_iter; ++k) {
        StepResult<Real> r;
        try {
            r = step(x, fx, ev, spec, state);
        } catch (const SingularMatrix&) {
            return finish(OutcomeKind::SingularJacobian, x);
        } catch (const RegularityFailure&) {
            return finish(OutcomeKind::Oscillatory, x);
        } catch (const NonFiniteEvaluation&) {
            return finish(OutcomeKind::DivergedToInfinity, x);
        } catch (const DomainError&) {
            return finish(OutcomeKind::DivergedToInfinity, x);
        }
        trace.steps.push_back(r.delta);
        trace.damping.push_back(static_cast<double>(r.lambda));
        record_point(r.next, r.residual);
        if (!all_finite(r.next) || !all_finite(r.residual) || norm_inf(r.next) > bound)
            return finish(OutcomeKind::DivergedToInfinity, r.next);

        const Real fnorm = norm_inf(r.residual);
        if (fnorm <= residual_tol &&
            (norm_inf(r.delta) <= Real(spec.step_tol) || r.converged || fnorm <= exact_tol))
            return finish(OutcomeKind::ConvergedToRoot, r.next);
        if (norm_inf(r.delta) == Real(0)) return finish(OutcomeKind::Oscillatory, r.next);

        x = std::move(r.next);
        fx = std::move(r.residual);
    }
    return finish(OutcomeKind::Oscillatory, x);
}

extern template BasicIterationTrace<double> run_orbit<double>(const BasicVector<double>&, const SolverSpec&,
                                                              const BasicSystemModel<double>&);

}  // namespace basinlab
