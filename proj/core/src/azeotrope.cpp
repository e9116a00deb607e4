#include "basinlab/azeotrope.hpp"

#include "basinlab/errors.hpp"

#include <cmath>
#include <numbers>

namespace basinlab {

namespace {

double log_base(AntoineForm form) noexcept { return form == AntoineForm::log10 ? std::numbers::ln10 : 1.0; }

double shifted_temperature(double T, const AntoineCoefficients& c) {
    const double denom = T + c.temperature_offset + c.C;
    if (denom == 0.0) throw DomainError("Antoine pole: T + C = 0");
    return denom;
}

std::array<double, 4> coefficients_at(const AzeotropeParams& p, double T) {
    return {p.redlich_kister[0].at(T), p.redlich_kister[1].at(T), p.redlich_kister[2].at(T),
            p.redlich_kister[3].at(T)};
}

std::array<double, 4> coefficient_slopes(const AzeotropeParams& p, double T) {
    return {p.redlich_kister[0].derivative(T), p.redlich_kister[1].derivative(T),
            p.redlich_kister[2].derivative(T), p.redlich_kister[3].derivative(T)};
}

// S(d) and its first two derivatives with respect to d = x2 - x1.
struct Expansion {
    double s, ds, d2s;
};

Expansion expansion(double d, const std::array<double, 4>& c) noexcept {
    return {c[0] + d * (c[1] + d * (c[2] + d * c[3])), c[1] + d * (2.0 * c[2] + 3.0 * d * c[3]),
            2.0 * c[2] + 6.0 * d * c[3]};
}

// Second composition derivative of G^E/RT at fixed coefficients.
double gibbs_curvature(double x1, const std::array<double, 4>& c) noexcept {
    const double x2 = 1.0 - x1;
    const double d = x2 - x1;
    const Expansion e = expansion(d, c);
    return -2.0 * e.s - 4.0 * d * e.ds + 4.0 * x1 * x2 * e.d2s;
}

void require_open_composition(double x1) {
    if (x1 == 0.0 || x1 == 1.0) throw DomainError("activity coefficients undefined at a pure-component limit");
    if (!std::isfinite(x1)) throw DomainError("non-finite composition");
}

}  // namespace

double kpa_per_unit(PressureUnit unit) noexcept {
    switch (unit) {
        case PressureUnit::kPa: return 1.0;
        case PressureUnit::Pa: return 1e-3;
        case PressureUnit::bar: return 100.0;
        case PressureUnit::mmHg: return 101.325 / 760.0;
        case PressureUnit::atm: return 101.325;
    }
    return 1.0;
}

std::string_view to_string(AntoineForm form) noexcept { return form == AntoineForm::log10 ? "log10" : "ln"; }

std::string_view to_string(PressureUnit unit) noexcept {
    switch (unit) {
        case PressureUnit::kPa: return "kPa";
        case PressureUnit::Pa: return "Pa";
        case PressureUnit::bar: return "bar";
        case PressureUnit::mmHg: return "mmHg";
        case PressureUnit::atm: return "atm";
    }
    return "kPa";
}

void AzeotropeParams::validate() const {
    if (!(pressure_kPa > 0.0) || !std::isfinite(pressure_kPa)) throw ConfigError("pressure must be positive");
}

double antoine_psat(double T, const AntoineCoefficients& coeffs) {
    const double exponent = coeffs.A - coeffs.B / shifted_temperature(T, coeffs);
    const double value = std::exp(exponent * log_base(coeffs.form));
    if (!std::isfinite(value)) throw DomainError("Antoine saturation pressure overflows");
    return value;
}

double antoine_dlnpsat_dT(double T, const AntoineCoefficients& coeffs) {
    const double t = shifted_temperature(T, coeffs);
    return coeffs.B * log_base(coeffs.form) / (t * t);
}

double gibbs_excess_over_RT(const ThermoState& s, const AzeotropeParams& p) {
    const double x1 = s.x1;
    const double x2 = 1.0 - x1;
    return x1 * x2 * expansion(x2 - x1, coefficients_at(p, s.T)).s;
}

std::pair<double, double> ln_activity_coefficients(double x1, const std::array<double, 4>& c) {
    const double x2 = 1.0 - x1;
    const double d = x2 - x1;
    const Expansion e = expansion(d, c);
    const double g = x1 * x2 * e.s;
    // dg/dx1, using dd/dx1 = -2.
    const double slope = d * e.s - 2.0 * x1 * x2 * e.ds;
    return {g + x2 * slope, g - x1 * slope};
}

std::pair<double, double> activity_coefficients(const ThermoState& s, const AzeotropeParams& p) {
    require_open_composition(s.x1);
    const auto [ln1, ln2] = ln_activity_coefficients(s.x1, coefficients_at(p, s.T));
    const double g1 = std::exp(ln1);
    const double g2 = std::exp(ln2);
    if (!std::isfinite(g1) || !std::isfinite(g2)) throw DomainError("activity coefficient overflows");
    return {g1, g2};
}

Vector azeotrope_residual(const ThermoState& s, const AzeotropeParams& p) {
    const auto [g1, g2] = activity_coefficients(s, p);
    const double p1 = antoine_psat(s.T, p.antoine[0]) * kpa_per_unit(p.antoine[0].unit);
    const double p2 = antoine_psat(s.T, p.antoine[1]) * kpa_per_unit(p.antoine[1].unit);
    Vector r{g1 * p1 - p.pressure_kPa, g2 * p2 - p.pressure_kPa};
    if (!all_finite(r)) throw DomainError("azeotrope residual overflows");
    return r;
}

Matrix analytic_jacobian_azeotrope(const ThermoState& s, const AzeotropeParams& p) {
    const auto [g1, g2] = activity_coefficients(s, p);
    const double p1 = antoine_psat(s.T, p.antoine[0]) * kpa_per_unit(p.antoine[0].unit);
    const double p2 = antoine_psat(s.T, p.antoine[1]) * kpa_per_unit(p.antoine[1].unit);
    const double a1 = g1 * p1;
    const double a2 = g2 * p2;

    const double curvature = gibbs_curvature(s.x1, coefficients_at(p, s.T));
    // ln(gamma) is linear in the coefficients, so its T-derivative is ln(gamma)
    // evaluated with dC/dT in place of C.
    const auto [dln1_dT, dln2_dT] = ln_activity_coefficients(s.x1, coefficient_slopes(p, s.T));

    Matrix j(2);
    j(0, 0) = a1 * (1.0 - s.x1) * curvature;
    j(1, 0) = -a2 * s.x1 * curvature;
    j(0, 1) = a1 * (dln1_dT + antoine_dlnpsat_dT(s.T, p.antoine[0]));
    j(1, 1) = a2 * (dln2_dT + antoine_dlnpsat_dT(s.T, p.antoine[1]));
    return j;
}

std::vector<std::pair<double, double>> default_azeotrope_domain() { return {{1e-6, 1.0 - 1e-6}, {280.0, 400.0}}; }

SystemModel make_azeotrope_system(const AzeotropeParams& params, std::vector<std::pair<double, double>> domain,
                                  std::vector<Vector> reference_roots) {
    params.validate();
    for (const auto& r : reference_roots)
        if (r.size() != 2) throw ConfigError("azeotrope reference roots must be (x1, T) pairs");
    SystemModel model(
        "azeotrope", 2,
        [params](const Vector& x) { return azeotrope_residual({x[0], x[1]}, params); },
        [params](const Vector& x) { return analytic_jacobian_azeotrope({x[0], x[1]}, params); });
    model.set_domain_box(std::move(domain))
        .set_reference_roots(std::move(reference_roots))
        .set_root_tolerance(RootTolerance<double>{{1e-4, 1e-2}, 0.0})
        .set_residual_scale(params.pressure_kPa)
        .set_default_seeds({Vector{0.1, 340.0}, Vector{0.2, 380.0}, Vector{0.6, 330.0}, Vector{0.8, 360.0}});
    return model;
}

}  // namespace basinlab
