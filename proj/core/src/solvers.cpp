#include "basinlab/solvers.hpp"

#include <cctype>
#include <cmath>
#include <string>

namespace basinlab {

namespace {

// Upper-case with '_' folded to '-', so "nleq_res" and "NLEQ-RES" compare equal.
std::string normalize(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (const char c : s) out.push_back(c == '_' ? '-' : static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    return out;
}

bool positive_finite(double v) { return v > 0.0 && std::isfinite(v); }

}  // namespace

std::string_view to_string(Method m) noexcept {
    switch (m) {
        case Method::CN: return "CN";
        case Method::NLEQ_RES: return "NLEQ-RES";
        case Method::NLEQ_ERR: return "NLEQ-ERR";
        case Method::JFNK: return "JFNK";
        case Method::BA: return "BA";
        case Method::GS: return "GS";
        case Method::CO: return "CO";
        case Method::O4N: return "O4N";
        case Method::O5N: return "O5N";
        case Method::O6N: return "O6N";
    }
    return "CN";
}

std::optional<Method> parse_method(std::string_view name) noexcept {
    const std::string key = normalize(name);
    for (const Method m : kAllMethods)
        if (key == to_string(m)) return m;
    return std::nullopt;
}

std::string_view to_string(JacobianMode m) noexcept { return m == JacobianMode::analytic ? "analytic" : "five_point"; }

std::optional<JacobianMode> parse_jacobian_mode(std::string_view name) noexcept {
    const std::string key = normalize(name);
    if (key == "ANALYTIC") return JacobianMode::analytic;
    if (key == "FIVE-POINT" || key == "5PT" || key == "FD") return JacobianMode::five_point;
    return std::nullopt;
}

void SolverSpec::validate() const {
    if (max_iter < 1) throw ConfigError("max_iter must be at least 1");
    if (!positive_finite(step_tol)) throw ConfigError("step_tol must be positive");
    if (!positive_finite(residual_tol)) throw ConfigError("residual_tol must be positive");
    if (!(exact_residual_tol >= 0.0) || !std::isfinite(exact_residual_tol))
        throw ConfigError("exact_residual_tol must be non-negative");
    if (!(lambda0 > 0.0 && lambda0 <= 1.0)) throw ConfigError("lambda0 must lie in (0, 1]");
    if (!(lambda_min > 0.0 && lambda_min < lambda0)) throw ConfigError("lambda_min must lie in (0, lambda0)");
    if (!(theta_max > 0.0 && theta_max < 1.0)) throw ConfigError("theta_max must lie in (0, 1)");
    if (!positive_finite(fd_epsilon)) throw ConfigError("fd_epsilon must be positive");
    if (!positive_finite(krylov_tol)) throw ConfigError("krylov_tol must be positive");
    if (!positive_finite(divergence_bound)) throw ConfigError("divergence_bound must be positive");
}

std::string_view to_string(OutcomeKind k) noexcept {
    switch (k) {
        case OutcomeKind::ConvergedToRoot: return "converged_to_root";
        case OutcomeKind::ConvergedToUnlistedRoot: return "converged_to_unlisted_root";
        case OutcomeKind::SingularJacobian: return "singular_jacobian";
        case OutcomeKind::DivergedToInfinity: return "diverged_to_infinity";
        case OutcomeKind::Oscillatory: return "oscillatory";
    }
    return "oscillatory";
}

std::optional<OutcomeKind> parse_outcome_kind(std::string_view name) noexcept {
    for (const OutcomeKind k : kAllOutcomeKinds)
        if (name == to_string(k)) return k;
    return std::nullopt;
}

template BasicIterationTrace<double> run_orbit<double>(const BasicVector<double>&, const SolverSpec&,
                                                       const BasicSystemModel<double>&);

}  // namespace basinlab
