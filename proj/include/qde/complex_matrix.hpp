// complex_matrix.hpp
// Small dense complex matrices: the numerical backend behind the quaternion
// complex-adjoint embedding. Provides full-pivot LU (rank, null space,
// determinant, inverse), the matrix exponential by scaling and squaring with
// Pade approximants, and eigenvalues by Hessenberg reduction followed by
// single-shift complex QR.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numeric>
#include <utility>
#include <vector>

#include "qde/errors.hpp"

namespace qde::linalg {

using cplx = std::complex<double>;

class CMatrix {
public:
    CMatrix() = default;
    CMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

    static CMatrix identity(std::size_t n) {
        CMatrix m(n, n);
        for (std::size_t k = 0; k < n; ++k) m(k, k) = 1.0;
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    cplx& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const cplx& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    /// Conjugate transpose.
    CMatrix adjoint() const {
        CMatrix out(cols_, rows_);
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t c = 0; c < cols_; ++c) out(c, r) = std::conj((*this)(r, c));
        return out;
    }

    /// Max column sum.
    double norm1() const {
        double best = 0.0;
        for (std::size_t c = 0; c < cols_; ++c) {
            double s = 0.0;
            for (std::size_t r = 0; r < rows_; ++r) s += std::abs((*this)(r, c));
            best = std::max(best, s);
        }
        return best;
    }

    double max_abs() const {
        double best = 0.0;
        for (const auto& v : data_) best = std::max(best, std::abs(v));
        return best;
    }

    cplx trace() const {
        cplx s = 0.0;
        for (std::size_t k = 0; k < std::min(rows_, cols_); ++k) s += (*this)(k, k);
        return s;
    }

    CMatrix& operator+=(const CMatrix& o) {
        check_same(o);
        for (std::size_t n = 0; n < data_.size(); ++n) data_[n] += o.data_[n];
        return *this;
    }
    CMatrix& operator-=(const CMatrix& o) {
        check_same(o);
        for (std::size_t n = 0; n < data_.size(); ++n) data_[n] -= o.data_[n];
        return *this;
    }
    CMatrix& operator*=(cplx s) {
        for (auto& v : data_) v *= s;
        return *this;
    }

    friend CMatrix operator+(CMatrix a, const CMatrix& b) { return a += b; }
    friend CMatrix operator-(CMatrix a, const CMatrix& b) { return a -= b; }
    friend CMatrix operator*(CMatrix a, cplx s) { return a *= s; }
    friend CMatrix operator*(cplx s, CMatrix a) { return a *= s; }

    friend CMatrix operator*(const CMatrix& a, const CMatrix& b) {
        if (a.cols_ != b.rows_) throw DimensionMismatch("complex matmul: inner dimensions differ");
        CMatrix out(a.rows_, b.cols_);
        for (std::size_t r = 0; r < a.rows_; ++r)
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const cplx v = a(r, k);
                if (v == 0.0) continue;
                for (std::size_t c = 0; c < b.cols_; ++c) out(r, c) += v * b(k, c);
            }
        return out;
    }

    friend std::vector<cplx> operator*(const CMatrix& a, const std::vector<cplx>& x) {
        if (a.cols_ != x.size()) throw DimensionMismatch("complex matvec: dimensions differ");
        std::vector<cplx> out(a.rows_);
        for (std::size_t r = 0; r < a.rows_; ++r)
            for (std::size_t c = 0; c < a.cols_; ++c) out[r] += a(r, c) * x[c];
        return out;
    }

private:
    void check_same(const CMatrix& o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_) throw DimensionMismatch("complex matrix shapes differ");
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cplx> data_;
};

/// P·A·Q = L·U with complete pivoting. Works for rectangular input; the
/// pivot sequence is kept whole so rank can be judged at any tolerance.
class FullPivLU {
public:
    explicit FullPivLU(const CMatrix& a)
        : lu_(a), row_perm_(a.rows()), col_perm_(a.cols()) {
        std::iota(row_perm_.begin(), row_perm_.end(), 0);
        std::iota(col_perm_.begin(), col_perm_.end(), 0);
        const std::size_t m = a.rows(), n = a.cols();
        const std::size_t steps = std::min(m, n);
        for (std::size_t k = 0; k < steps; ++k) {
            std::size_t pr = k, pc = k;
            double best = -1.0;
            for (std::size_t r = k; r < m; ++r)
                for (std::size_t c = k; c < n; ++c)
                    if (std::abs(lu_(r, c)) > best) {
                        best = std::abs(lu_(r, c));
                        pr = r;
                        pc = c;
                    }
            if (pr != k) {
                for (std::size_t c = 0; c < n; ++c) std::swap(lu_(k, c), lu_(pr, c));
                std::swap(row_perm_[k], row_perm_[pr]);
                ++swaps_;
            }
            if (pc != k) {
                for (std::size_t r = 0; r < m; ++r) std::swap(lu_(r, k), lu_(r, pc));
                std::swap(col_perm_[k], col_perm_[pc]);
                ++swaps_;
            }
            const cplx pivot = lu_(k, k);
            pivots_.push_back(std::abs(pivot));
            if (pivot == 0.0) continue;
            for (std::size_t r = k + 1; r < m; ++r) {
                const cplx f = lu_(r, k) / pivot;
                lu_(r, k) = f;
                if (f == 0.0) continue;
                for (std::size_t c = k + 1; c < n; ++c) lu_(r, c) -= f * lu_(k, c);
            }
        }
    }

    /// Number of pivots above rel_tol times the largest pivot.
    std::size_t rank(double rel_tol) const {
        if (pivots_.empty() || pivots_.front() == 0.0) return 0;
        const double cut = rel_tol * pivots_.front();
        std::size_t r = 0;
        while (r < pivots_.size() && pivots_[r] > cut) ++r;
        return r;
    }

    /// Determinant of a square input (no tolerance applied).
    cplx determinant() const {
        if (lu_.rows() != lu_.cols()) throw NonSquare("determinant of a non-square matrix");
        cplx d = (swaps_ % 2 == 0) ? 1.0 : -1.0;
        for (std::size_t k = 0; k < lu_.rows(); ++k) d *= lu_(k, k);
        return d;
    }

    /// Orthonormal-free basis of the right null space, each vector unit 2-norm.
    std::vector<std::vector<cplx>> nullspace(double rel_tol) const {
        const std::size_t n = lu_.cols();
        const std::size_t r = rank(rel_tol);
        std::vector<std::vector<cplx>> basis;
        for (std::size_t f = r; f < n; ++f) {
            // Back-substitute U[0:r,0:r] y = -U[0:r,f] in permuted coordinates.
            std::vector<cplx> z(n, 0.0);
            z[f] = 1.0;
            for (std::size_t kk = r; kk-- > 0;) {
                cplx s = -lu_(kk, f);
                for (std::size_t c = kk + 1; c < r; ++c) s -= lu_(kk, c) * z[c];
                z[kk] = s / lu_(kk, kk);
            }
            std::vector<cplx> v(n);
            double nrm = 0.0;
            for (std::size_t c = 0; c < n; ++c) {
                v[col_perm_[c]] = z[c];
                nrm += std::norm(z[c]);
            }
            nrm = std::sqrt(nrm);
            for (auto& e : v) e /= nrm;
            basis.push_back(std::move(v));
        }
        return basis;
    }

    /// Solves A x = b for square nonsingular A.
    std::vector<cplx> solve(const std::vector<cplx>& b) const {
        const std::size_t n = lu_.rows();
        std::vector<cplx> y(n);
        for (std::size_t r = 0; r < n; ++r) {
            cplx s = b[row_perm_[r]];
            for (std::size_t c = 0; c < r; ++c) s -= lu_(r, c) * y[c];
            y[r] = s;
        }
        for (std::size_t r = n; r-- > 0;) {
            cplx s = y[r];
            for (std::size_t c = r + 1; c < n; ++c) s -= lu_(r, c) * y[c];
            y[r] = s / lu_(r, r);
        }
        std::vector<cplx> x(n);
        for (std::size_t c = 0; c < n; ++c) x[col_perm_[c]] = y[c];
        return x;
    }

    CMatrix solve(const CMatrix& b) const {
        CMatrix x(b.rows(), b.cols());
        std::vector<cplx> col(b.rows());
        for (std::size_t c = 0; c < b.cols(); ++c) {
            for (std::size_t r = 0; r < b.rows(); ++r) col[r] = b(r, c);
            const auto sol = solve(col);
            for (std::size_t r = 0; r < b.rows(); ++r) x(r, c) = sol[r];
        }
        return x;
    }

    CMatrix inverse() const { return solve(CMatrix::identity(lu_.rows())); }

    const std::vector<double>& pivots() const noexcept { return pivots_; }

private:
    CMatrix lu_;
    std::vector<std::size_t> row_perm_;
    std::vector<std::size_t> col_perm_;
    std::vector<double> pivots_;
    std::size_t swaps_ = 0;
};

namespace detail {

inline void pade_terms(const CMatrix& a, int degree, CMatrix& u, CMatrix& v) {
    const std::size_t n = a.rows();
    const CMatrix id = CMatrix::identity(n);
    const CMatrix a2 = a * a;
    switch (degree) {
        case 3: {
            const double b[] = {120., 60., 12., 1.};
            u = a * (b[3] * a2 + b[1] * id);
            v = b[2] * a2 + b[0] * id;
            return;
        }
        case 5: {
            const double b[] = {30240., 15120., 3360., 420., 30., 1.};
            const CMatrix a4 = a2 * a2;
            u = a * (b[5] * a4 + b[3] * a2 + b[1] * id);
            v = b[4] * a4 + b[2] * a2 + b[0] * id;
            return;
        }
        case 7: {
            const double b[] = {17297280., 8648640., 1995840., 277200., 25200., 1512., 56., 1.};
            const CMatrix a4 = a2 * a2;
            const CMatrix a6 = a4 * a2;
            u = a * (b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id);
            v = b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
            return;
        }
        case 9: {
            const double b[] = {17643225600., 8821612800., 2075673600., 302702400., 30270240.,
                                2162160.,     110880.,     3960.,       90.,         1.};
            const CMatrix a4 = a2 * a2;
            const CMatrix a6 = a4 * a2;
            const CMatrix a8 = a6 * a2;
            u = a * (b[9] * a8 + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id);
            v = b[8] * a8 + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
            return;
        }
        default: {
            const double b[] = {64764752532480000., 32382376266240000., 7771770303897600.,
                                1187353796428800.,  129060195264000.,   10559470521600.,
                                670442572800.,      33522128640.,       1323241920.,
                                40840800.,          960960.,            16380.,
                                182.,               1.};
            const CMatrix a4 = a2 * a2;
            const CMatrix a6 = a4 * a2;
            u = a * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 +
                     b[3] * a2 + b[1] * id);
            v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 + b[2] * a2 +
                b[0] * id;
            return;
        }
    }
}

}  // namespace detail

/// exp(A) by scaling and squaring over the [m/m] Pade family (m = 3..13).
inline CMatrix expm(const CMatrix& a) {
    if (a.rows() != a.cols()) throw NonSquare("expm of a non-square matrix");
    if (a.rows() == 0) return a;
    static constexpr double kTheta[] = {1.495585217958292e-2, 2.539398330063230e-1,
                                        9.504178996162932e-1, 2.097847961257068e0,
                                        5.371920351148152e0};
    static constexpr int kDegree[] = {3, 5, 7, 9, 13};
    const double l1 = a.norm1();
    CMatrix u, v;
    int squarings = 0;
    int degree = 13;
    for (int n = 0; n < 4; ++n)
        if (l1 <= kTheta[n]) {
            degree = kDegree[n];
            break;
        }
    CMatrix scaled = a;
    if (degree == 13 && l1 > kTheta[4]) {
        squarings = std::max(0, static_cast<int>(std::ceil(std::log2(l1 / kTheta[4]))));
        scaled *= std::ldexp(1.0, -squarings);
    }
    detail::pade_terms(scaled, degree, u, v);
    // (V - U)^{-1} (V + U)
    CMatrix result = FullPivLU(v - u).solve(v + u);
    for (int s = 0; s < squarings; ++s) result = result * result;
    return result;
}

namespace detail {

// Rotation G = [[c, s], [-conj(s), c]] chosen so that G·(a, b)ᵀ = (r, 0)ᵀ.
struct Givens {
    double c = 1.0;
    cplx s = 0.0;

    static Givens make(cplx a, cplx b) {
        Givens g;
        if (b == 0.0) return g;
        if (a == 0.0) {
            g.c = 0.0;
            g.s = 1.0;
            return g;
        }
        const double nrm = std::hypot(std::abs(a), std::abs(b));
        g.c = std::abs(a) / nrm;
        g.s = (a / std::abs(a)) * std::conj(b) / nrm;
        return g;
    }

    // rows p, p+1 of columns [c0, c1)
    void apply_left(CMatrix& m, std::size_t p, std::size_t c0, std::size_t c1) const {
        for (std::size_t col = c0; col < c1; ++col) {
            const cplx x = m(p, col), y = m(p + 1, col);
            m(p, col) = c * x + s * y;
            m(p + 1, col) = -std::conj(s) * x + c * y;
        }
    }

    // columns p, p+1 of rows [r0, r1), multiplied by Gᴴ
    void apply_right_adjoint(CMatrix& m, std::size_t p, std::size_t r0, std::size_t r1) const {
        for (std::size_t row = r0; row < r1; ++row) {
            const cplx x = m(row, p), y = m(row, p + 1);
            m(row, p) = x * c + y * std::conj(s);
            m(row, p + 1) = -x * s + y * c;
        }
    }
};

inline void reduce_to_hessenberg(CMatrix& h) {
    const std::size_t n = h.rows();
    if (n < 3) return;
    for (std::size_t k = 0; k + 2 < n; ++k) {
        double xnorm = 0.0;
        for (std::size_t r = k + 1; r < n; ++r) xnorm += std::norm(h(r, k));
        xnorm = std::sqrt(xnorm);
        if (xnorm == 0.0) continue;
        const cplx x0 = h(k + 1, k);
        const cplx phase = std::abs(x0) == 0.0 ? cplx(1.0) : x0 / std::abs(x0);
        std::vector<cplx> v(n, 0.0);
        for (std::size_t r = k + 1; r < n; ++r) v[r] = h(r, k);
        v[k + 1] += phase * xnorm;
        double vnorm = 0.0;
        for (std::size_t r = k + 1; r < n; ++r) vnorm += std::norm(v[r]);
        vnorm = std::sqrt(vnorm);
        for (auto& e : v) e /= vnorm;
        // H <- (I - 2vvᴴ) H (I - 2vvᴴ)
        for (std::size_t c = 0; c < n; ++c) {
            cplx dot = 0.0;
            for (std::size_t r = k + 1; r < n; ++r) dot += std::conj(v[r]) * h(r, c);
            for (std::size_t r = k + 1; r < n; ++r) h(r, c) -= 2.0 * v[r] * dot;
        }
        for (std::size_t r = 0; r < n; ++r) {
            cplx dot = 0.0;
            for (std::size_t c = k + 1; c < n; ++c) dot += h(r, c) * v[c];
            for (std::size_t c = k + 1; c < n; ++c) h(r, c) -= 2.0 * dot * std::conj(v[c]);
        }
        for (std::size_t r = k + 2; r < n; ++r) h(r, k) = 0.0;
    }
}

inline cplx wilkinson_shift(const CMatrix& t, std::size_t iu, int iter) {
    if (iter == 10 || iter == 20) {
        // exceptional shift
        double s = std::abs(t(iu, iu - 1).real());
        if (iu >= 2) s += std::abs(t(iu - 1, iu - 2).real());
        return s;
    }
    cplx a = t(iu - 1, iu - 1), b = t(iu - 1, iu), c = t(iu, iu - 1), d = t(iu, iu);
    const double scale = std::abs(a) + std::abs(b) + std::abs(c) + std::abs(d);
    if (scale == 0.0) return 0.0;
    a /= scale;
    b /= scale;
    c /= scale;
    d /= scale;
    const cplx bc = b * c;
    const cplx diff = a - d;
    const cplx disc = std::sqrt(diff * diff + 4.0 * bc);
    const cplx det = a * d - bc;
    const cplx tr = a + d;
    cplx e1 = (tr + disc) / 2.0, e2 = (tr - disc) / 2.0;
    if (std::abs(e1) > std::abs(e2)) e2 = det / e1;
    else if (e2 != 0.0) e1 = det / e2;
    return scale * (std::abs(e1 - d) < std::abs(e2 - d) ? e1 : e2);
}

}  // namespace detail

/// Eigenvalues of a square complex matrix (upper-triangular Schur diagonal).
/// Throws EigenFailure when the QR sweep exceeds 100·n iterations.
inline std::vector<cplx> eigenvalues(const CMatrix& a) {
    if (a.rows() != a.cols()) throw NonSquare("eigenvalues of a non-square matrix");
    const std::size_t n = a.rows();
    CMatrix t = a;
    detail::reduce_to_hessenberg(t);
    const std::size_t max_iter = 100 * std::max<std::size_t>(n, 1);
    constexpr double eps = std::numeric_limits<double>::epsilon();

    auto negligible = [&](std::size_t r) {
        const double mag = std::abs(t(r, r)) + std::abs(t(r + 1, r + 1));
        if (std::abs(t(r + 1, r)) <= eps * mag || std::abs(t(r + 1, r)) < std::numeric_limits<double>::min()) {
            t(r + 1, r) = 0.0;
            return true;
        }
        return false;
    };

    std::size_t iu = n == 0 ? 0 : n - 1;
    std::size_t total = 0;
    int iter = 0;
    while (true) {
        while (iu > 0 && negligible(iu - 1)) {
            iter = 0;
            --iu;
        }
        if (iu == 0) break;
        ++iter;
        if (++total > max_iter) throw EigenFailure("complex QR iteration did not converge");
        std::size_t il = iu - 1;
        while (il > 0 && !negligible(il - 1)) --il;

        const cplx shift = detail::wilkinson_shift(t, iu, iter);
        auto g = detail::Givens::make(t(il, il) - shift, t(il + 1, il));
        g.apply_left(t, il, il, n);
        g.apply_right_adjoint(t, il, 0, std::min(il + 2, iu) + 1);
        for (std::size_t r = il + 1; r < iu; ++r) {
            g = detail::Givens::make(t(r, r - 1), t(r + 1, r - 1));
            g.apply_left(t, r, r - 1, n);
            t(r + 1, r - 1) = 0.0;
            g.apply_right_adjoint(t, r, 0, std::min(r + 2, iu) + 1);
        }
    }
    std::vector<cplx> out(n);
    for (std::size_t k = 0; k < n; ++k) out[k] = t(k, k);
    return out;
}

}  // namespace qde::linalg
