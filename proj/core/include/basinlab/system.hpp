#pragma once

#include "basinlab/errors.hpp"
#include "basinlab/linalg.hpp"

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace basinlab {

/// How a converged point is matched against the known roots of a system.
template <class Real>
struct RootTolerance {
    /// When non-empty: |Δ_i| ≤ per_axis[i] for every coordinate.
    std::vector<Real> per_axis;
    /// Used when per_axis is empty: Euclidean distance ≤ euclidean.
    Real euclidean = Real(1e-6);

    [[nodiscard]] bool matches(const BasicVector<Real>& a, const BasicVector<Real>& b) const {
        using std::abs;
        if (!per_axis.empty()) {
            for (std::size_t i = 0; i < a.size(); ++i)
                if (!(abs(a[i] - b[i]) <= per_axis[i])) return false;
            return true;
        }
        return norm2(a - b) <= euclidean;
    }
};

/// An n-dimensional residual map with optional analytic Jacobian.
///
/// Every call to residual() bumps a shared atomic counter, so copies of a
/// model observe the same count and concurrent sweeps stay exact.
template <class Real>
class BasicSystemModel {
public:
    using VectorType = BasicVector<Real>;
    using MatrixType = BasicMatrix<Real>;
    using ResidualFn = std::function<VectorType(const VectorType&)>;
    using JacobianFn = std::function<MatrixType(const VectorType&)>;

    BasicSystemModel(std::string name, std::size_t dimension, ResidualFn residual, JacobianFn jacobian = {})
        : name_(std::move(name)),
          dimension_(dimension),
          residual_(std::move(residual)),
          jacobian_(std::move(jacobian)),
          domain_box_(dimension, {Real(-1), Real(1)}),
          counter_(std::make_shared<std::atomic<std::uint64_t>>(0)) {
        if (dimension_ == 0) throw Error("system dimension must be at least 1");
        if (!residual_) throw Error("system requires a residual function");
    }

    [[nodiscard]] const std::string& name() const noexcept { return name_; }
    [[nodiscard]] std::size_t dimension() const noexcept { return dimension_; }

    [[nodiscard]] VectorType residual(const VectorType& x) const {
        counter_->fetch_add(1, std::memory_order_relaxed);
        return residual_(x);
    }

    [[nodiscard]] bool has_jacobian() const noexcept { return static_cast<bool>(jacobian_); }
    /// Analytic Jacobian; not counted as a residual evaluation.
    [[nodiscard]] MatrixType jacobian(const VectorType& x) const {
        if (!jacobian_) throw Error("system '" + name_ + "' has no analytic Jacobian");
        return jacobian_(x);
    }

    [[nodiscard]] std::uint64_t eval_count() const noexcept { return counter_->load(std::memory_order_relaxed); }
    void reset_eval_count() const noexcept { counter_->store(0, std::memory_order_relaxed); }

    [[nodiscard]] const std::vector<std::pair<Real, Real>>& domain_box() const noexcept { return domain_box_; }
    BasicSystemModel& set_domain_box(std::vector<std::pair<Real, Real>> box) {
        if (box.size() != dimension_) throw Error("domain box dimension mismatch");
        domain_box_ = std::move(box);
        return *this;
    }

    [[nodiscard]] const std::vector<VectorType>& reference_roots() const noexcept { return roots_; }
    BasicSystemModel& set_reference_roots(std::vector<VectorType> roots) {
        roots_ = std::move(roots);
        return *this;
    }

    [[nodiscard]] const RootTolerance<Real>& root_tolerance() const noexcept { return root_tol_; }
    BasicSystemModel& set_root_tolerance(RootTolerance<Real> tol) {
        root_tol_ = std::move(tol);
        return *this;
    }

    /// Residual tolerances are multiplied by this (the system pressure for
    /// the azeotrope model, 1 otherwise).
    [[nodiscard]] Real residual_scale() const noexcept { return residual_scale_; }
    BasicSystemModel& set_residual_scale(Real s) {
        residual_scale_ = s;
        return *this;
    }

    /// Initial estimates used for tabulated runs (order reports).
    [[nodiscard]] const std::vector<VectorType>& default_seeds() const noexcept { return seeds_; }
    BasicSystemModel& set_default_seeds(std::vector<VectorType> seeds) {
        seeds_ = std::move(seeds);
        return *this;
    }

    /// Index of the first reference root within tolerance of x.
    [[nodiscard]] std::optional<std::size_t> match_root(const VectorType& x) const {
        for (std::size_t i = 0; i < roots_.size(); ++i)
            if (root_tol_.matches(x, roots_[i])) return i;
        return std::nullopt;
    }

private:
    std::string name_;
    std::size_t dimension_;
    ResidualFn residual_;
    JacobianFn jacobian_;
    std::vector<std::pair<Real, Real>> domain_box_;
    std::vector<VectorType> roots_;
    RootTolerance<Real> root_tol_;
    Real residual_scale_ = Real(1);
    std::vector<VectorType> seeds_;
    std::shared_ptr<std::atomic<std::uint64_t>> counter_;
};

using SystemModel = BasicSystemModel<double>;

enum class JacobianMode { analytic, five_point };

/// Per-orbit view of a system: counts the evaluations made through it while
/// forwarding every call to the model's shared counter.
template <class Real>
class Evaluator {
public:
    Evaluator(const BasicSystemModel<Real>& system, JacobianMode mode) : system_(system), mode_(mode) {
        if (mode_ == JacobianMode::analytic && !system_.has_jacobian())
            throw ConfigError("system '" + system_.name() + "' has no analytic Jacobian; use five_point");
    }

    [[nodiscard]] BasicVector<Real> residual(const BasicVector<Real>& x) {
        ++count_;
        return system_.residual(x);
    }

    [[nodiscard]] BasicMatrix<Real> jacobian(const BasicVector<Real>& x) {
        if (mode_ == JacobianMode::analytic) {
            BasicMatrix<Real> j = system_.jacobian(x);
            for (std::size_t r = 0; r < j.size(); ++r)
                for (std::size_t c = 0; c < j.size(); ++c) {
                    using std::isfinite;
                    if (!isfinite(j(r, c))) throw NonFiniteEvaluation("non-finite analytic Jacobian");
                }
            return j;
        }
        return fd_jacobian_5pt<Real>([this](const BasicVector<Real>& v) { return residual(v); }, x);
    }

    [[nodiscard]] std::uint64_t count() const noexcept { return count_; }
    [[nodiscard]] const BasicSystemModel<Real>& system() const noexcept { return system_; }

private:
    const BasicSystemModel<Real>& system_;
    JacobianMode mode_;
    std::uint64_t count_ = 0;
};

}  // namespace basinlab
