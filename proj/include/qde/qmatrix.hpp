// qmatrix.hpp
// Dense quaternion vectors and matrices with right-module semantics.
//
// Scalars act on the right (x·q) or on the left (q·x); the two differ and
// both are exposed. Spectra, rank, inverses and exponentials go through the
// complex adjoint χ, which maps each entry a + b·j (a, b complex) onto the
// 2×2 block [[a, b], [-conj(b), conj(a)]].

#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

#include "qde/complex_matrix.hpp"
#include "qde/errors.hpp"
#include "qde/quat.hpp"

namespace qde {

class QVec {
public:
    QVec() = default;
    explicit QVec(std::size_t dim) : data_(dim) {}
    QVec(std::initializer_list<Quat> entries) : data_(entries) {}
    explicit QVec(std::vector<Quat> entries) : data_(std::move(entries)) {}

    std::size_t dim() const noexcept { return data_.size(); }
    const Quat& operator[](std::size_t n) const { return data_[n]; }
    Quat& operator[](std::size_t n) { return data_[n]; }
    const std::vector<Quat>& entries() const noexcept { return data_; }

    /// Euclidean norm sqrt(Σ|xᵢ|²).
    double norm() const {
        double s = 0.0;
        for (const auto& q : data_) s += norm2(q);
        return std::sqrt(s);
    }

    bool operator==(const QVec&) const = default;

    friend QVec operator+(const QVec& a, const QVec& b) {
        check(a, b);
        QVec out(a.dim());
        for (std::size_t n = 0; n < a.dim(); ++n) out[n] = a[n] + b[n];
        return out;
    }
    friend QVec operator-(const QVec& a, const QVec& b) {
        check(a, b);
        QVec out(a.dim());
        for (std::size_t n = 0; n < a.dim(); ++n) out[n] = a[n] - b[n];
        return out;
    }
    /// Right scalar action x·q.
    friend QVec operator*(const QVec& a, const Quat& q) {
        QVec out(a.dim());
        for (std::size_t n = 0; n < a.dim(); ++n) out[n] = a[n] * q;
        return out;
    }
    /// Left scalar action q·x.
    friend QVec operator*(const Quat& q, const QVec& a) {
        QVec out(a.dim());
        for (std::size_t n = 0; n < a.dim(); ++n) out[n] = q * a[n];
        return out;
    }
    friend QVec operator*(double s, const QVec& a) { return Quat(s) * a; }

private:
    static void check(const QVec& a, const QVec& b) {
        if (a.dim() != b.dim()) throw DimensionMismatch("vector dimensions differ");
    }
    std::vector<Quat> data_;
};

inline QVec right_scale(const QVec& v, const Quat& q) { return v * q; }
inline QVec left_scale(const Quat& q, const QVec& v) { return q * v; }

/// Row-major dense quaternion matrix.
class QMat {
public:
    QMat() = default;
    QMat(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
    QMat(std::initializer_list<std::initializer_list<Quat>> rows) {
        rows_ = rows.size();
        cols_ = rows_ ? rows.begin()->size() : 0;
        for (const auto& r : rows) {
            if (r.size() != cols_) throw DimensionMismatch("ragged matrix rows");
            data_.insert(data_.end(), r.begin(), r.end());
        }
    }
    QMat(std::size_t rows, std::size_t cols, std::vector<Quat> entries)
        : rows_(rows), cols_(cols), data_(std::move(entries)) {
        if (data_.size() != rows_ * cols_) throw DimensionMismatch("entry count does not match shape");
    }

    static QMat identity(std::size_t n) {
        QMat m(n, n);
        for (std::size_t k = 0; k < n; ++k) m(k, k) = 1.0;
        return m;
    }
    static QMat diagonal(const std::vector<Quat>& d) {
        QMat m(d.size(), d.size());
        for (std::size_t k = 0; k < d.size(); ++k) m(k, k) = d[k];
        return m;
    }
    static QMat from_columns(const std::vector<QVec>& columns) {
        if (columns.empty()) return {};
        QMat m(columns.front().dim(), columns.size());
        for (std::size_t c = 0; c < columns.size(); ++c) {
            if (columns[c].dim() != m.rows_) throw DimensionMismatch("columns of unequal length");
            for (std::size_t r = 0; r < m.rows_; ++r) m(r, c) = columns[c][r];
        }
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool square() const noexcept { return rows_ == cols_; }
    const std::vector<Quat>& entries() const noexcept { return data_; }

    Quat& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const Quat& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    QVec column(std::size_t c) const {
        QVec v(rows_);
        for (std::size_t r = 0; r < rows_; ++r) v[r] = (*this)(r, c);
        return v;
    }

    /// ‖A‖ = Σ|aᵢⱼ|
    double norm() const {
        double s = 0.0;
        for (const auto& q : data_) s += qde::norm(q);
        return s;
    }

    bool operator==(const QMat&) const = default;

    friend QMat operator+(const QMat& a, const QMat& b) {
        same_shape(a, b);
        QMat out(a.rows_, a.cols_);
        for (std::size_t n = 0; n < a.data_.size(); ++n) out.data_[n] = a.data_[n] + b.data_[n];
        return out;
    }
    friend QMat operator-(const QMat& a, const QMat& b) {
        same_shape(a, b);
        QMat out(a.rows_, a.cols_);
        for (std::size_t n = 0; n < a.data_.size(); ++n) out.data_[n] = a.data_[n] - b.data_[n];
        return out;
    }
    friend QMat operator*(const QMat& a, const QMat& b) {
        if (a.cols_ != b.rows_) throw DimensionMismatch("matmul: inner dimensions differ");
        QMat out(a.rows_, b.cols_);
        for (std::size_t r = 0; r < a.rows_; ++r)
            for (std::size_t c = 0; c < b.cols_; ++c) {
                Quat s;
                for (std::size_t k = 0; k < a.cols_; ++k) s = s + a(r, k) * b(k, c);
                out(r, c) = s;
            }
        return out;
    }
    friend QVec operator*(const QMat& a, const QVec& x) {
        if (a.cols_ != x.dim()) throw DimensionMismatch("matvec: dimensions differ");
        QVec out(a.rows_);
        for (std::size_t r = 0; r < a.rows_; ++r) {
            Quat s;
            for (std::size_t k = 0; k < a.cols_; ++k) s = s + a(r, k) * x[k];
            out[r] = s;
        }
        return out;
    }
    friend QMat operator*(const QMat& a, const Quat& q) {
        QMat out(a.rows_, a.cols_);
        for (std::size_t n = 0; n < a.data_.size(); ++n) out.data_[n] = a.data_[n] * q;
        return out;
    }
    friend QMat operator*(const Quat& q, const QMat& a) {
        QMat out(a.rows_, a.cols_);
        for (std::size_t n = 0; n < a.data_.size(); ++n) out.data_[n] = q * a.data_[n];
        return out;
    }
    friend QMat operator*(double s, const QMat& a) { return Quat(s) * a; }

private:
    static void same_shape(const QMat& a, const QMat& b) {
        if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw DimensionMismatch("matrix shapes differ");
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Quat> data_;
};

inline QMat matmul(const QMat& a, const QMat& b) { return a * b; }
inline QMat add(const QMat& a, const QMat& b) { return a + b; }
inline QMat right_scale(const QMat& a, const Quat& q) { return a * q; }
inline QMat left_scale(const Quat& q, const QMat& a) { return q * a; }

/// A⁺: transpose with every entry conjugated.
inline QMat conj_transpose(const QMat& a) {
    QMat out(a.cols(), a.rows());
    for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t c = 0; c < a.cols(); ++c) out(c, r) = conj(a(r, c));
    return out;
}

inline Quat trace(const QMat& a) {
    if (!a.square()) throw NonSquare("trace of a non-square matrix");
    Quat s;
    for (std::size_t k = 0; k < a.rows(); ++k) s = s + a(k, k);
    return s;
}

inline void require_2x2(const QMat& m, const char* what) {
    if (m.rows() != 2 || m.cols() != 2) throw DimensionMismatch(std::string(what) + " needs a 2x2 matrix");
}

/// Row expansion a₁₁a₂₂ − a₁₂a₂₁.
inline Quat rdet2(const QMat& m) {
    require_2x2(m, "rdet2");
    return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
}

/// Column expansion a₁₁a₂₂ − a₂₁a₁₂.
inline Quat cdet2(const QMat& m) {
    require_2x2(m, "cdet2");
    return m(0, 0) * m(1, 1) - m(1, 0) * m(0, 1);
}

/// Four-term real form of rdet(M M⁺) for a 2×2 M:
/// |a|²|d|² + |b|²|c|² − 2 Re(a c̄ d b̄), with M = [[a, b], [c, d]].
inline double ddet2_formula(const QMat& m) {
    require_2x2(m, "ddet2");
    const Quat &a = m(0, 0), &b = m(0, 1), &c = m(1, 0), &d = m(1, 1);
    const Quat cross = b * conj(d) * c * conj(a) + a * conj(c) * d * conj(b);
    return norm2(a) * norm2(d) + norm2(b) * norm2(c) - cross.w;
}

// ---------------------------------------------------------------------------
// Complex adjoint

struct ComplexAdjoint {
    linalg::CMatrix matrix;  // 2n × 2m
    std::size_t source_rows = 0;
    std::size_t source_cols = 0;
};

inline linalg::cplx adjoint_a(const Quat& q) { return {q.w, q.x}; }
inline linalg::cplx adjoint_b(const Quat& q) { return {q.y, q.z}; }
inline Quat quat_from_parts(linalg::cplx a, linalg::cplx b) { return {a.real(), a.imag(), b.real(), b.imag()}; }

inline ComplexAdjoint to_adjoint(const QMat& a) {
    ComplexAdjoint out{linalg::CMatrix(2 * a.rows(), 2 * a.cols()), a.rows(), a.cols()};
    for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t c = 0; c < a.cols(); ++c) {
            const auto pa = adjoint_a(a(r, c)), pb = adjoint_b(a(r, c));
            out.matrix(2 * r, 2 * c) = pa;
            out.matrix(2 * r, 2 * c + 1) = pb;
            out.matrix(2 * r + 1, 2 * c) = -std::conj(pb);
            out.matrix(2 * r + 1, 2 * c + 1) = std::conj(pa);
        }
    return out;
}

inline constexpr double kAdjointTolerance = 1e-10;

/// Inverse of to_adjoint. Blocks are averaged with their mirrored partner;
/// a mismatch beyond 1e-10 (relative to max(1, max|C|)) is a StructureError.
inline QMat from_adjoint(const linalg::CMatrix& c) {
    if (c.rows() % 2 != 0 || c.cols() % 2 != 0) throw StructureError("adjoint dimensions must be even");
    const double tol = kAdjointTolerance * std::max(1.0, c.max_abs());
    QMat out(c.rows() / 2, c.cols() / 2);
    for (std::size_t r = 0; r < out.rows(); ++r)
        for (std::size_t k = 0; k < out.cols(); ++k) {
            const auto a1 = c(2 * r, 2 * k), a2 = std::conj(c(2 * r + 1, 2 * k + 1));
            const auto b1 = c(2 * r, 2 * k + 1), b2 = -std::conj(c(2 * r + 1, 2 * k));
            if (std::abs(a1 - a2) > tol || std::abs(b1 - b2) > tol)
                throw StructureError("matrix is not the complex adjoint of a quaternion matrix");
            out(r, k) = quat_from_parts((a1 + a2) / 2.0, (b1 + b2) / 2.0);
        }
    return out;
}

inline QMat from_adjoint(const ComplexAdjoint& c) { return from_adjoint(c.matrix); }

/// Φ(x): first column of χ(x), a real-linear bijection Hⁿ → C²ⁿ with
/// Φ(A x) = χ(A) Φ(x) and Φ(x·c) = Φ(x)·c for complex c.
inline std::vector<linalg::cplx> to_adjoint_vector(const QVec& x) {
    std::vector<linalg::cplx> u(2 * x.dim());
    for (std::size_t k = 0; k < x.dim(); ++k) {
        u[2 * k] = adjoint_a(x[k]);
        u[2 * k + 1] = -std::conj(adjoint_b(x[k]));
    }
    return u;
}

inline QVec from_adjoint_vector(const std::vector<linalg::cplx>& u) {
    if (u.size() % 2 != 0) throw StructureError("adjoint vector length must be even");
    QVec x(u.size() / 2);
    for (std::size_t k = 0; k < x.dim(); ++k) x[k] = quat_from_parts(u[2 * k], -std::conj(u[2 * k + 1]));
    return x;
}

// ---------------------------------------------------------------------------
// Determinants, invertibility, rank

/// Double determinant. For 2×2 this is the four-term rdet(M M⁺) formula;
/// otherwise Re det χ(M), which coincides with it at n = 2.
inline double ddet(const QMat& m) {
    if (!m.square()) throw NonSquare("ddet of a non-square matrix");
    if (m.rows() == 2) return ddet2_formula(m);
    if (m.rows() == 0) return 1.0;
    return linalg::FullPivLU(to_adjoint(m).matrix).determinant().real();
}

/// Singularity threshold on ddet: 1e-10 · max(1, ‖M‖²ⁿ).
inline double singular_threshold(const QMat& m) {
    return 1e-10 * std::max(1.0, std::pow(m.norm(), 2.0 * static_cast<double>(m.rows())));
}

inline QMat inverse(const QMat& m) {
    if (!m.square()) throw NonSquare("inverse of a non-square matrix");
    if (std::abs(ddet(m)) <= singular_threshold(m)) throw SingularMatrix("matrix is singular (ddet below threshold)");
    return from_adjoint(linalg::FullPivLU(to_adjoint(m).matrix).inverse());
}

inline constexpr double kRankTolerance = 1e-10;

/// Quaternion rank = (complex rank of χ(M)) / 2.
inline std::size_t rank(const QMat& m, double rel_tol = kRankTolerance) {
    if (m.rows() == 0 || m.cols() == 0) return 0;
    const std::size_t r = linalg::FullPivLU(to_adjoint(m).matrix).rank(rel_tol);
    return (r + 1) / 2;
}

// ---------------------------------------------------------------------------
// Exponentials

/// exp(A t) through the complex adjoint (scaling and squaring, Pade core).
inline QMat expm(const QMat& a, double t) {
    if (!a.square()) throw NonSquare("expm of a non-square matrix");
    auto chi = to_adjoint(a).matrix;
    chi *= t;
    return from_adjoint(linalg::expm(chi));
}

/// Truncated series Σ (A t)ⁿ / n!, stopping once the term norm drops below
/// 1e-18. Kept as an independent check on expm.
inline QMat expm_series(const QMat& a, double t, int max_terms = 200) {
    if (!a.square()) throw NonSquare("expm_series of a non-square matrix");
    const QMat at = t * a;
    QMat term = QMat::identity(a.rows());
    QMat sum = term;
    double last = term.norm();
    for (int n = 1; n < max_terms; ++n) {
        term = (1.0 / n) * (term * at);
        sum = sum + term;
        last = term.norm();
        if (last < 1e-18) return sum;
    }
    if (last > 1e-12) throw ConvergenceError("matrix exponential series did not converge within the term cap");
    return sum;
}

}  // namespace qde
