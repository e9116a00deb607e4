#pragma once

// Small dense linear algebra for the 1..few dimensional systems swept by the
// solvers: vectors, square matrices, partial-pivot LU, a five-point
// finite-difference Jacobian and an unrestarted matrix-free GMRES.
//
// Everything is templated on the scalar so the same kernels run in double
// for sweeps and in extended precision for order-of-convergence studies.

#include "basinlab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

namespace basinlab {

template <class Real>
class BasicVector {
public:
    using value_type = Real;

    BasicVector() = default;
    explicit BasicVector(std::size_t n, Real value = Real(0)) : data_(n, value) {}
    BasicVector(std::initializer_list<Real> values) : data_(values) {}
    explicit BasicVector(std::vector<Real> values) : data_(std::move(values)) {}

    [[nodiscard]] std::size_t size() const noexcept { return data_.size(); }
    [[nodiscard]] bool empty() const noexcept { return data_.empty(); }

    Real& operator[](std::size_t i) { return data_[i]; }
    const Real& operator[](std::size_t i) const { return data_[i]; }

    [[nodiscard]] auto begin() noexcept { return data_.begin(); }
    [[nodiscard]] auto end() noexcept { return data_.end(); }
    [[nodiscard]] auto begin() const noexcept { return data_.begin(); }
    [[nodiscard]] auto end() const noexcept { return data_.end(); }

    [[nodiscard]] std::span<const Real> span() const noexcept { return data_; }
    [[nodiscard]] const std::vector<Real>& values() const noexcept { return data_; }

    BasicVector& operator+=(const BasicVector& o) {
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
        return *this;
    }
    BasicVector& operator-=(const BasicVector& o) {
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
        return *this;
    }
    BasicVector& operator*=(const Real& s) {
        for (auto& v : data_) v *= s;
        return *this;
    }

    friend BasicVector operator+(BasicVector a, const BasicVector& b) { return a += b; }
    friend BasicVector operator-(BasicVector a, const BasicVector& b) { return a -= b; }
    friend BasicVector operator*(BasicVector a, const Real& s) { return a *= s; }
    friend BasicVector operator*(const Real& s, BasicVector a) { return a *= s; }
    friend BasicVector operator-(BasicVector a) {
        for (auto& v : a.data_) v = -v;
        return a;
    }
    friend bool operator==(const BasicVector& a, const BasicVector& b) = default;

private:
    std::vector<Real> data_;
};

/// Square matrix, row-major.
template <class Real>
class BasicMatrix {
public:
    using value_type = Real;

    BasicMatrix() = default;
    explicit BasicMatrix(std::size_t n, Real value = Real(0)) : n_(n), a_(n * n, value) {}
    BasicMatrix(std::initializer_list<std::initializer_list<Real>> rows) : n_(rows.size()) {
        a_.reserve(n_ * n_);
        for (const auto& row : rows) {
            if (row.size() != n_) throw Error("BasicMatrix: rows must form a square matrix");
            a_.insert(a_.end(), row.begin(), row.end());
        }
    }

    static BasicMatrix identity(std::size_t n) {
        BasicMatrix m(n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = Real(1);
        return m;
    }

    [[nodiscard]] std::size_t size() const noexcept { return n_; }

    Real& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
    const Real& operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }

    [[nodiscard]] BasicVector<Real> column(std::size_t j) const {
        BasicVector<Real> c(n_);
        for (std::size_t i = 0; i < n_; ++i) c[i] = (*this)(i, j);
        return c;
    }
    void set_column(std::size_t j, const BasicVector<Real>& c) {
        for (std::size_t i = 0; i < n_; ++i) (*this)(i, j) = c[i];
    }

    [[nodiscard]] Real max_abs() const {
        using std::abs;
        Real m(0);
        for (const auto& v : a_) m = std::max<Real>(m, abs(v));
        return m;
    }

    BasicMatrix& operator+=(const BasicMatrix& o) {
        for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
        return *this;
    }
    BasicMatrix& operator-=(const BasicMatrix& o) {
        for (std::size_t i = 0; i < a_.size(); ++i) a_[i] -= o.a_[i];
        return *this;
    }
    BasicMatrix& operator*=(const Real& s) {
        for (auto& v : a_) v *= s;
        return *this;
    }

    friend BasicMatrix operator+(BasicMatrix a, const BasicMatrix& b) { return a += b; }
    friend BasicMatrix operator-(BasicMatrix a, const BasicMatrix& b) { return a -= b; }
    friend BasicMatrix operator*(BasicMatrix a, const Real& s) { return a *= s; }
    friend BasicMatrix operator*(const Real& s, BasicMatrix a) { return a *= s; }

    friend BasicMatrix operator*(const BasicMatrix& a, const BasicMatrix& b) {
        const std::size_t n = a.n_;
        BasicMatrix c(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < n; ++k) {
                const Real aik = a(i, k);
                for (std::size_t j = 0; j < n; ++j) c(i, j) += aik * b(k, j);
            }
        return c;
    }

    friend BasicVector<Real> operator*(const BasicMatrix& a, const BasicVector<Real>& x) {
        const std::size_t n = a.n_;
        BasicVector<Real> y(n);
        for (std::size_t i = 0; i < n; ++i) {
            Real s(0);
            for (std::size_t j = 0; j < n; ++j) s += a(i, j) * x[j];
            y[i] = s;
        }
        return y;
    }

    friend bool operator==(const BasicMatrix& a, const BasicMatrix& b) = default;

private:
    std::size_t n_ = 0;
    std::vector<Real> a_;
};

using Vector = BasicVector<double>;
using Matrix = BasicMatrix<double>;

template <class Real>
[[nodiscard]] Real dot(const BasicVector<Real>& a, const BasicVector<Real>& b) {
    Real s(0);
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

template <class Real>
[[nodiscard]] Real norm2(const BasicVector<Real>& v) {
    using std::sqrt;
    return sqrt(dot(v, v));
}

template <class Real>
[[nodiscard]] Real norm_inf(const BasicVector<Real>& v) {
    using std::abs;
    Real m(0);
    for (const auto& x : v) m = std::max<Real>(m, abs(x));
    return m;
}

template <class Real>
[[nodiscard]] bool all_finite(const BasicVector<Real>& v) {
    using std::isfinite;
    return std::all_of(v.begin(), v.end(), [](const Real& x) { return bool(isfinite(x)); });
}

/// Relative pivot threshold below which a matrix is reported singular.
inline constexpr double kSingularPivotRatio = 1e-14;

/// LU factorization with partial pivoting, P·A = L·U stored compactly.
template <class Real>
class LuFactorization {
public:
    /// Throws SingularMatrix when a pivot magnitude drops below
    /// kSingularPivotRatio · max|A| (or A is identically zero).
    explicit LuFactorization(const BasicMatrix<Real>& a) : lu_(a), perm_(a.size()) {
        using std::abs;
        const std::size_t n = a.size();
        std::iota(perm_.begin(), perm_.end(), std::size_t{0});
        const Real threshold = Real(kSingularPivotRatio) * a.max_abs();
        for (std::size_t k = 0; k < n; ++k) {
            std::size_t p = k;
            for (std::size_t i = k + 1; i < n; ++i)
                if (abs(lu_(i, k)) > abs(lu_(p, k))) p = i;
            const Real pivot_mag = abs(lu_(p, k));
            if (!(pivot_mag > threshold) || pivot_mag == Real(0)) throw SingularMatrix();
            if (p != k) {
                for (std::size_t j = 0; j < n; ++j) std::swap(lu_(k, j), lu_(p, j));
                std::swap(perm_[k], perm_[p]);
                sign_ = -sign_;
            }
            for (std::size_t i = k + 1; i < n; ++i) {
                const Real m = lu_(i, k) / lu_(k, k);
                lu_(i, k) = m;
                for (std::size_t j = k + 1; j < n; ++j) lu_(i, j) -= m * lu_(k, j);
            }
        }
    }

    [[nodiscard]] BasicVector<Real> solve(const BasicVector<Real>& b) const {
        const std::size_t n = lu_.size();
        BasicVector<Real> x(n);
        for (std::size_t i = 0; i < n; ++i) {
            Real s = b[perm_[i]];
            for (std::size_t j = 0; j < i; ++j) s -= lu_(i, j) * x[j];
            x[i] = s;
        }
        for (std::size_t i = n; i-- > 0;) {
            Real s = x[i];
            for (std::size_t j = i + 1; j < n; ++j) s -= lu_(i, j) * x[j];
            x[i] = s / lu_(i, i);
        }
        return x;
    }

    /// Solves A·X = B column by column.
    [[nodiscard]] BasicMatrix<Real> solve(const BasicMatrix<Real>& b) const {
        BasicMatrix<Real> x(b.size());
        for (std::size_t j = 0; j < b.size(); ++j) x.set_column(j, solve(b.column(j)));
        return x;
    }

    [[nodiscard]] Real determinant() const {
        Real d(sign_);
        for (std::size_t i = 0; i < lu_.size(); ++i) d *= lu_(i, i);
        return d;
    }

private:
    BasicMatrix<Real> lu_;
    std::vector<std::size_t> perm_;
    int sign_ = 1;
};

template <class Real>
[[nodiscard]] BasicVector<Real> lu_solve(const BasicMatrix<Real>& a, const BasicVector<Real>& b) {
    return LuFactorization<Real>(a).solve(b);
}

/// Determinant by Gaussian elimination with partial pivoting. Never throws;
/// an exactly vanishing pivot column gives 0.
template <class Real>
[[nodiscard]] Real det(const BasicMatrix<Real>& a) {
    using std::abs;
    const std::size_t n = a.size();
    BasicMatrix<Real> m = a;
    Real d(1);
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (abs(m(i, k)) > abs(m(p, k))) p = i;
        if (m(p, k) == Real(0)) return Real(0);
        if (p != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(m(k, j), m(p, j));
            d = -d;
        }
        d *= m(k, k);
        for (std::size_t i = k + 1; i < n; ++i) {
            const Real f = m(i, k) / m(k, k);
            for (std::size_t j = k + 1; j < n; ++j) m(i, j) -= f * m(k, j);
        }
    }
    return d;
}

/// Step used by fd_jacobian_5pt along coordinate value x.
template <class Real>
[[nodiscard]] Real five_point_step(const Real& x) {
    using std::abs;
    return Real(1e-6) * std::max<Real>(Real(1), abs(x));
}

/// Fourth-order central-difference Jacobian:
///   column j = (-f(X+2h e_j) + 8 f(X+h e_j) - 8 f(X-h e_j) + f(X-2h e_j)) / (12 h)
/// with h = 1e-6 * max(1, |X_j|). Calls f exactly 4n times.
template <class Real, class Residual>
[[nodiscard]] BasicMatrix<Real> fd_jacobian_5pt(Residual&& f, const BasicVector<Real>& x) {
    const std::size_t n = x.size();
    BasicMatrix<Real> jac(n);
    BasicVector<Real> probe = x;
    auto eval = [&](std::size_t j, const Real& offset) {
        probe[j] = x[j] + offset;
        BasicVector<Real> r = f(probe);
        probe[j] = x[j];
        if (!all_finite(r)) throw NonFiniteEvaluation("non-finite residual inside five-point stencil");
        return r;
    };
    for (std::size_t j = 0; j < n; ++j) {
        const Real h = five_point_step(x[j]);
        const BasicVector<Real> fp2 = eval(j, Real(2) * h);
        const BasicVector<Real> fp1 = eval(j, h);
        const BasicVector<Real> fm1 = eval(j, -h);
        const BasicVector<Real> fm2 = eval(j, Real(-2) * h);
        for (std::size_t i = 0; i < n; ++i)
            jac(i, j) = (-fp2[i] + Real(8) * fp1[i] - Real(8) * fm1[i] + fm2[i]) / (Real(12) * h);
    }
    return jac;
}

template <class Real>
struct GmresResult {
    BasicVector<Real> x;
    Real residual_estimate{};  ///< Arnoldi least-squares residual, absolute
    std::size_t iterations = 0;
    bool converged = false;
    bool breakdown = false;  ///< operator singular on the Krylov subspace
};

/// Unrestarted GMRES with zero initial guess. Never throws; reports whether
/// the residual target tol·‖b‖₂ was met. On breakdown the least-squares
/// solution over the non-degenerate part of the Krylov basis is returned.
template <class Real, class MatVec>
[[nodiscard]] GmresResult<Real> gmres_solve(MatVec&& matvec, const BasicVector<Real>& b, const Real& tol,
                                            std::size_t max_iter = 0) {
    using std::abs;
    using std::sqrt;
    const std::size_t n = b.size();
    if (max_iter == 0) max_iter = n;
    GmresResult<Real> out;
    out.x = BasicVector<Real>(n);
    const Real beta = norm2(b);
    if (beta == Real(0)) {
        out.converged = true;
        return out;
    }
    const Real target = tol * beta;

    std::vector<BasicVector<Real>> basis;
    basis.push_back(b * (Real(1) / beta));
    // Hessenberg columns, rotated in place into R.
    std::vector<std::vector<Real>> r_cols;
    std::vector<Real> cs, sn;
    std::vector<Real> g{beta};
    Real r_scale(0);
    std::size_t k = 0;

    for (std::size_t j = 0; j < max_iter; ++j) {
        BasicVector<Real> w = matvec(basis[j]);
        const Real w_norm0 = norm2(w);
        std::vector<Real> h(j + 2, Real(0));
        for (std::size_t i = 0; i <= j; ++i) {
            h[i] = dot(w, basis[i]);
            w -= basis[i] * h[i];
        }
        // One reorthogonalization pass keeps the tiny bases honest.
        for (std::size_t i = 0; i <= j; ++i) {
            const Real c = dot(w, basis[i]);
            h[i] += c;
            w -= basis[i] * c;
        }
        h[j + 1] = norm2(w);

        for (std::size_t i = 0; i < j; ++i) {
            const Real t = cs[i] * h[i] + sn[i] * h[i + 1];
            h[i + 1] = -sn[i] * h[i] + cs[i] * h[i + 1];
            h[i] = t;
        }
        const Real denom = sqrt(h[j] * h[j] + h[j + 1] * h[j + 1]);
        r_scale = std::max<Real>(r_scale, w_norm0);
        if (!(denom > Real(kSingularPivotRatio) * r_scale)) {
            out.breakdown = true;
            break;
        }
        cs.push_back(h[j] / denom);
        sn.push_back(h[j + 1] / denom);
        const Real h_sub = h[j + 1];
        h[j] = denom;
        h.resize(j + 1);
        r_cols.push_back(std::move(h));
        g.push_back(-sn[j] * g[j]);
        g[j] = cs[j] * g[j];
        k = j + 1;
        if (abs(g[j + 1]) <= target) break;
        if (!(h_sub > Real(kSingularPivotRatio) * r_scale)) break;  // invariant subspace
        basis.push_back(w * (Real(1) / h_sub));
    }

    std::vector<Real> y(k, Real(0));
    for (std::size_t i = k; i-- > 0;) {
        Real s = g[i];
        for (std::size_t c = i + 1; c < k; ++c) s -= r_cols[c][i] * y[c];
        y[i] = s / r_cols[i][i];
    }
    for (std::size_t i = 0; i < k; ++i) out.x += basis[i] * y[i];
    out.iterations = k;
    out.residual_estimate = abs(g[k]);
    out.converged = out.residual_estimate <= target;
    return out;
}

/// Throwing front end of gmres_solve: Breakdown when the target is unmet.
template <class Real, class MatVec>
[[nodiscard]] BasicVector<Real> gmres_matfree(MatVec&& matvec, const BasicVector<Real>& b, const Real& tol,
                                              std::size_t max_iter = 0) {
    GmresResult<Real> res = gmres_solve<Real>(std::forward<MatVec>(matvec), b, tol, max_iter);
    if (!res.converged) throw Breakdown("GMRES: Krylov basis degenerated before reaching the residual target");
    return std::move(res.x);
}

}  // namespace basinlab
