// analysis.hpp
// Solution-structure tools for linear quaternion systems: right/left linear
// dependence with certificates, the double-determinant Wronskian, the
// quaternionic Liouville formula, and residual probes showing that
// solutions are closed under right (but not left) scalar multiplication.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "qde/engine.hpp"
#include "qde/errors.hpp"
#include "qde/qmatrix.hpp"
#include "qde/quadrature.hpp"

namespace qde {

struct Dependence {
    bool dependent = false;
    /// Nonzero coefficients with Σ xᵢ·cᵢ = 0 (right) or Σ cᵢ·xᵢ = 0 (left);
    /// empty when independent. Largest-modulus coefficient equals 1.
    std::vector<Quat> certificate;
    double residual = 0.0;
};

namespace detail {

inline void check_vectors(const std::vector<QVec>& vectors) {
    if (vectors.empty()) throw InputError("dependence test needs at least one vector");
    for (const auto& v : vectors)
        if (v.dim() != vectors.front().dim()) throw DimensionMismatch("vectors of unequal dimension");
}

}  // namespace detail

/// Σ xᵢ·qᵢ = 0 for some nonzero (qᵢ)? Decided by the rank of [x₁ … xₘ];
/// the certificate comes from the null space of the adjoint.
inline Dependence right_dependent(const std::vector<QVec>& vectors) {
    detail::check_vectors(vectors);
    const QMat v = QMat::from_columns(vectors);
    if (rank(v) == vectors.size()) return {};
    const auto basis = linalg::FullPivLU(to_adjoint(v).matrix).nullspace(kRankTolerance);
    if (basis.empty()) return {};  // rank and null space disagree only at the tolerance edge
    QVec c = from_adjoint_vector(basis.front());
    std::size_t big = 0;
    for (std::size_t k = 1; k < c.dim(); ++k)
        if (norm(c[k]) > norm(c[big])) big = k;
    c = c * inv(c[big]);
    c[big] = 1.0;
    return {true, c.entries(), (v * c).norm()};
}

/// Σ qᵢ·xᵢ = 0 for some nonzero (qᵢ)? Conjugating entrywise turns left
/// dependence of {xᵢ} into right dependence of {x̄ᵢ}.
inline Dependence left_dependent(const std::vector<QVec>& vectors) {
    detail::check_vectors(vectors);
    std::vector<QVec> conjugated;
    for (const auto& v : vectors) {
        QVec w(v.dim());
        for (std::size_t k = 0; k < v.dim(); ++k) w[k] = conj(v[k]);
        conjugated.push_back(std::move(w));
    }
    Dependence d = right_dependent(conjugated);
    if (!d.dependent) return d;
    for (auto& q : d.certificate) q = conj(q);
    QVec sum(vectors.front().dim());
    for (std::size_t n = 0; n < vectors.size(); ++n) sum = sum + d.certificate[n] * vectors[n];
    d.residual = sum.norm();
    return d;
}

/// Distance from v to the right line {ν·α : α ∈ H}:
/// ‖v − ν (ν⁺ν)⁻¹ (ν⁺v)‖.
inline double distance_to_right_line(const QVec& nu, const QVec& v) {
    if (nu.dim() != v.dim()) throw DimensionMismatch("vectors of unequal dimension");
    Quat inner;
    for (std::size_t k = 0; k < nu.dim(); ++k) inner = inner + conj(nu[k]) * v[k];
    const double nn = nu.norm() * nu.norm();
    if (nn == 0.0) throw DomainError("zero direction vector");
    return (v - nu * (inner / nn)).norm();
}

using MatrixFunction = std::function<QMat(double)>;
using VectorFunction = std::function<QVec(double)>;

/// W(t) = ddet M(t) by the four-term real formula.
inline double wronskian(const MatrixFunction& m, double t) { return ddet2_formula(m(t)); }

/// Solutions x₁ … xₘ of one system, sharing dimension and interval.
struct SolutionSet {
    std::size_t dim = 0;
    std::vector<VectorFunction> solutions;
    double t0 = 0.0;
    double t1 = 1.0;

    QMat matrix(double t) const {
        std::vector<QVec> cols;
        for (const auto& s : solutions) {
            cols.push_back(s(t));
            if (cols.back().dim() != dim) throw DimensionMismatch("solution has the wrong dimension");
        }
        return QMat::from_columns(cols);
    }

    /// x(t) = Σ xᵢ(t)·qᵢ
    VectorFunction combine(const std::vector<Quat>& coeffs) const {
        if (coeffs.size() != solutions.size()) throw DimensionMismatch("one coefficient per solution");
        return [sols = solutions, coeffs, n = dim](double t) {
            QVec x(n);
            for (std::size_t k = 0; k < sols.size(); ++k) x = x + sols[k](t) * coeffs[k];
            return x;
        };
    }

    /// Right dependence decided at t0 and confirmed at 8 more samples.
    bool right_dependent_on_interval() const {
        auto cols_at = [&](double t) {
            std::vector<QVec> cols;
            for (const auto& s : solutions) cols.push_back(s(t));
            return cols;
        };
        const bool at_start = right_dependent(cols_at(t0)).dependent;
        for (int k = 1; k <= 8; ++k) {
            const double t = t0 + (t1 - t0) * k / 8.0;
            if (right_dependent(cols_at(t)).dependent != at_start)
                throw NotASolution("dependence changes along the interval; inputs are not solutions of one system");
        }
        return at_start;
    }
};

struct WronskianReport {
    std::vector<double> t_samples;
    std::vector<double> w_values;        // ddet M(t) evaluated directly
    std::vector<double> formula_values;  // exp(∫ tr[A + A⁺]) · W(t0)
    double max_rel_err = 0.0;

    std::vector<double> rel_errors() const {
        std::vector<double> out;
        for (std::size_t n = 0; n < t_samples.size(); ++n) {
            const double denom = std::max(std::abs(w_values[n]), std::abs(formula_values[n]));
            out.push_back(denom == 0.0 ? 0.0 : std::abs(w_values[n] - formula_values[n]) / denom);
        }
        return out;
    }

    /// Columns: t, w_direct, w_formula, rel_err.
    std::string to_csv() const {
        std::ostringstream os;
        os << "t,w_direct,w_formula,rel_err\n";
        const auto errs = rel_errors();
        for (std::size_t n = 0; n < t_samples.size(); ++n)
            os << format_real(t_samples[n]) << ',' << format_real(w_values[n]) << ','
               << format_real(formula_values[n]) << ',' << format_real(errs[n]) << '\n';
        return os.str();
    }
};

/// tr[A + A⁺], real since it equals 2·Re tr A.
inline double hermitian_trace(const QMat& a) { return re(trace(a + conj_transpose(a))); }

inline WronskianReport liouville_check(const LinearQDE& qde, const MatrixFunction& m, double t0,
                                       const std::vector<double>& ts) {
    if (qde.dim != 2) throw DimensionMismatch("the Liouville check is defined for 2x2 systems");
    const double w0 = wronskian(m, t0);
    WronskianReport report;
    auto tr = [&qde](double s) { return hermitian_trace(qde(s)); };
    for (double t : ts) {
        report.t_samples.push_back(t);
        report.w_values.push_back(wronskian(m, t));
        report.formula_values.push_back(std::exp(integrate_simpson(tr, t0, t)) * w0);
    }
    for (double e : report.rel_errors()) report.max_rel_err = std::max(report.max_rel_err, e);
    return report;
}

inline WronskianReport liouville_check(const LinearQDE& qde, const FundamentalMatrix& m, double t0,
                                       const std::vector<double>& ts) {
    return liouville_check(qde, MatrixFunction(m.eval), t0, ts);
}

/// ‖ẋ(t) − A(t)x(t)‖ with ẋ by central differences (h = 1e-6).
inline double qde_residual(const LinearQDE& qde, const VectorFunction& x, double t, double h = kDerivativeStep) {
    const QVec dx = (1.0 / (2.0 * h)) * (x(t + h) - x(t - h));
    return (dx - qde(t) * x(t)).norm();
}

struct ModuleResiduals {
    double right_residual = 0.0;  // x·q
    double left_residual = 0.0;   // q·x
};

/// Probes whether x·q and q·x still solve the system. x itself must solve it
/// (residual ≤ 1e-8, relative to max(1, ‖x‖)), else NotASolution.
inline ModuleResiduals module_structure_check(const LinearQDE& qde, const VectorFunction& x, const Quat& q,
                                              const std::vector<double>& ts) {
    ModuleResiduals out;
    for (double t : ts) {
        const double own = qde_residual(qde, x, t);
        if (own > 1e-8 * std::max(1.0, x(t).norm()))
            throw NotASolution("trajectory residual " + format_real(own) + " at t = " + format_real(t));
        out.right_residual = std::max(out.right_residual, qde_residual(qde, [&](double s) { return x(s) * q; }, t));
        out.left_residual = std::max(out.left_residual, qde_residual(qde, [&](double s) { return q * x(s); }, t));
    }
    return out;
}

}  // namespace qde
