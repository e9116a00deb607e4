#pragma once

// Binary azeotrope model under an ideal vapor phase: unknowns (x1, T), with
// a Redlich-Kister excess Gibbs energy for the liquid and Antoine saturation
// pressures. At an azeotrope x_i = y_i, so the coexistence conditions
// reduce to gamma_i * Psat_i(T) = P for both components.

#include "basinlab/linalg.hpp"
#include "basinlab/system.hpp"

#include <array>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace basinlab {

enum class AntoineForm { log10, ln };

enum class PressureUnit { kPa, Pa, bar, mmHg, atm };

[[nodiscard]] double kpa_per_unit(PressureUnit unit) noexcept;
[[nodiscard]] std::string_view to_string(AntoineForm form) noexcept;
[[nodiscard]] std::string_view to_string(PressureUnit unit) noexcept;

/// Psat = base^(A - B / (T + temperature_offset + C)), in `unit`.
/// temperature_offset converts kelvin to the correlation's temperature scale
/// (-273.15 for Celsius correlations).
struct AntoineCoefficients {
    double A = 0.0;
    double B = 0.0;
    double C = 0.0;
    AntoineForm form = AntoineForm::log10;
    PressureUnit unit = PressureUnit::kPa;
    double temperature_offset = 0.0;
};

/// One Redlich-Kister coefficient with C(T) = constant + inverse / T.
struct RedlichKisterTerm {
    double constant = 0.0;
    double inverse = 0.0;

    [[nodiscard]] double at(double T) const noexcept { return constant + inverse / T; }
    [[nodiscard]] double derivative(double T) const noexcept { return -inverse / (T * T); }
};

struct AzeotropeParams {
    double pressure_kPa = 35.0;
    std::array<AntoineCoefficients, 2> antoine{};
    std::array<RedlichKisterTerm, 4> redlich_kister{};

    /// Throws ConfigError on pressure <= 0.
    void validate() const;
};

struct ThermoState {
    double x1 = 0.5;
    double T = 300.0;
};

/// Saturation pressure in coeffs.unit. DomainError at the Antoine pole or on overflow.
[[nodiscard]] double antoine_psat(double T, const AntoineCoefficients& coeffs);

/// d(ln Psat)/dT = B ln(base) / (T + offset + C)^2.
[[nodiscard]] double antoine_dlnpsat_dT(double T, const AntoineCoefficients& coeffs);

/// G^E/RT = x1 x2 [C1 + C2 d + C3 d^2 + C4 d^3], d = x2 - x1, C_i at T.
[[nodiscard]] double gibbs_excess_over_RT(const ThermoState& s, const AzeotropeParams& p);

/// (ln gamma1, ln gamma2) at the given coefficients (no temperature dependence).
[[nodiscard]] std::pair<double, double> ln_activity_coefficients(double x1, const std::array<double, 4>& c);

/// (gamma1, gamma2). DomainError at x1 in {0, 1}.
[[nodiscard]] std::pair<double, double> activity_coefficients(const ThermoState& s, const AzeotropeParams& p);

/// (gamma1 Psat1 - P, gamma2 Psat2 - P) in kPa.
[[nodiscard]] Vector azeotrope_residual(const ThermoState& s, const AzeotropeParams& p);

/// Closed-form d residual / d(x1, T).
[[nodiscard]] Matrix analytic_jacobian_azeotrope(const ThermoState& s, const AzeotropeParams& p);

/// Default search box: 1e-6 <= x1 <= 1 - 1e-6, 280 <= T <= 400.
[[nodiscard]] std::vector<std::pair<double, double>> default_azeotrope_domain();

/// Wraps the model as a 2-D SystemModel with per-axis root matching
/// (|dx1| <= 1e-4, |dT| <= 1e-2) and residual tolerances scaled by P.
[[nodiscard]] SystemModel make_azeotrope_system(const AzeotropeParams& params,
                                                std::vector<std::pair<double, double>> domain,
                                                std::vector<Vector> reference_roots);

}  // namespace basinlab
