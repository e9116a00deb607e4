#pragma once

// Order-of-convergence estimators and per-run cost tables.
//
//   COC   rho(i)  = ln|e_i^{k+1} / e_i^k| / ln|e_i^k / e_i^{k-1}|,  e = X - alpha
//   ACOC  rhoh(i) = ln|d_i^{k+1} / d_i^k| / ln|d_i^k / d_i^{k-1}|,  d^k = X^k - X^{k-1}
//
// Both are evaluated at the last usable index. Trailing points whose error
// (or difference) has sunk under the rounding floor are dropped first; a
// coordinate left with too few points, or with a zero/non-finite log ratio,
// is excluded from the average and counted in `excluded`.

#include "basinlab/errors.hpp"
#include "basinlab/linalg.hpp"
#include "basinlab/solvers.hpp"
#include "basinlab/system.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace basinlab {

struct OrderEstimate {
    /// One entry per coordinate; NaN for excluded coordinates.
    std::vector<double> per_variable;
    /// Mean of the finite per_variable entries.
    double avg = std::numeric_limits<double>::quiet_NaN();
    /// Largest iteration index k at which a coordinate was evaluated.
    int k_used = -1;
    int excluded = 0;
};

/// Rounding floor in double precision; scaled by the epsilon ratio for wider types.
inline constexpr double kRoundingFloor = 1e-14;

template <class Real>
[[nodiscard]] Real rounding_floor() {
    return Real(kRoundingFloor) * (std::numeric_limits<Real>::epsilon() / Real(std::numeric_limits<double>::epsilon()));
}

namespace detail {

// Ratio estimator over per-coordinate magnitude sequences (errors for COC,
// differences for ACOC); refs[i][k] sets the relative rounding floor.
template <class Real>
OrderEstimate ratio_estimate(const std::vector<std::vector<Real>>& mags, const std::vector<std::vector<Real>>& refs,
                             std::size_t index_offset) {
    using std::abs;
    using std::log;
    const Real floor = rounding_floor<Real>();
    OrderEstimate est;
    est.per_variable.assign(mags.size(), std::numeric_limits<double>::quiet_NaN());
    double sum = 0.0;
    int used = 0;
    for (std::size_t i = 0; i < mags.size(); ++i) {
        const auto& m = mags[i];
        std::size_t len = m.size();
        while (len > 0 && !(m[len - 1] >= floor * std::max<Real>(Real(1), abs(refs[i][len - 1])))) --len;
        if (len < 3) {
            ++est.excluded;
            continue;
        }
        const Real num = log(m[len - 1] / m[len - 2]);
        const Real den = log(m[len - 2] / m[len - 3]);
        const double rho = static_cast<double>(num / den);
        if (den == Real(0) || !std::isfinite(rho)) {
            ++est.excluded;
            continue;
        }
        est.per_variable[i] = rho;
        sum += rho;
        ++used;
        est.k_used = std::max(est.k_used, static_cast<int>(len - 2 + index_offset));
    }
    if (used == 0) throw AllDegenerate("every coordinate is degenerate");
    est.avg = sum / used;
    return est;
}

}  // namespace detail

/// COC against a known root. InsufficientTrace below 3 points.
template <class Real>
[[nodiscard]] OrderEstimate coc(const std::vector<BasicVector<Real>>& points, const BasicVector<Real>& alpha) {
    using std::abs;
    if (points.size() < 3) throw InsufficientTrace("COC needs at least three iterates");
    const std::size_t n = alpha.size();
    std::vector<std::vector<Real>> errs(n), refs(n);
    for (const auto& p : points) {
        if (p.size() != n) throw Error("COC: root and iterate dimensions differ");
        for (std::size_t i = 0; i < n; ++i) {
            errs[i].push_back(abs(p[i] - alpha[i]));
            refs[i].push_back(alpha[i]);
        }
    }
    return detail::ratio_estimate(errs, refs, 0);
}

/// ACOC from consecutive differences. InsufficientTrace below 4 points.
template <class Real>
[[nodiscard]] OrderEstimate acoc(const std::vector<BasicVector<Real>>& points) {
    using std::abs;
    if (points.size() < 4)
        throw InsufficientTrace("ACOC needs a sequence that has at least four elements");
    const std::size_t n = points.front().size();
    std::vector<std::vector<Real>> diffs(n), refs(n);
    for (std::size_t k = 1; k < points.size(); ++k) {
        if (points[k].size() != n) throw Error("ACOC: iterates differ in dimension");
        for (std::size_t i = 0; i < n; ++i) {
            diffs[i].push_back(abs(points[k][i] - points[k - 1][i]));
            refs[i].push_back(points[k][i]);
        }
    }
    return detail::ratio_estimate(diffs, refs, 1);
}

template <class Real>
[[nodiscard]] OrderEstimate coc(const BasicIterationTrace<Real>& trace, const BasicVector<Real>& alpha) {
    return coc(trace.points, alpha);
}

template <class Real>
[[nodiscard]] OrderEstimate acoc(const BasicIterationTrace<Real>& trace) {
    return acoc(trace.points);
}

struct NfeRow {
    Method method = Method::CN;
    Vector x0;
    std::uint64_t nfe = 0;
    std::size_t iterations = 0;
    OutcomeKind outcome = OutcomeKind::Oscillatory;
    int root_index = -1;
    std::optional<double> rho_avg;      ///< COC, when the run reached a reference root
    std::optional<double> rho_hat_avg;  ///< ACOC, when the trace supports it
};

struct NfeReport {
    std::vector<NfeRow> rows;
    std::optional<double> convergence_rate;
};

/// One row per trace. COC uses the reference root the trace converged to
/// (taken from `system` when given). Estimator failures leave the column empty.
[[nodiscard]] NfeReport nfe_report(const std::vector<IterationTrace>& traces, const SystemModel* system = nullptr,
                                   std::optional<double> convergence_rate = std::nullopt);

}  // namespace basinlab
