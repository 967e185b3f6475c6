// engine.hpp
// Solvers for linear quaternion systems ẋ = A(t)·x.
//
// The fixed-step RK4 integrator is the reference every closed form is
// checked against. Closed forms: exp(A t) through the adjoint, commuting
// diagonal + nilpotent splits, Jordan blocks, right eigenpairs, and diagonal
// time-varying systems whose coefficients commute with their integrals.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <future>
#include <mutex>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qde/errors.hpp"
#include "qde/qmatrix.hpp"
#include "qde/quadrature.hpp"
#include "qde/quat.hpp"

namespace qde {

/// ẋ = A(t)·x on [a, b], coefficient acting from the left.
struct LinearQDE {
    std::size_t dim = 0;
    std::function<QMat(double)> coeff;
    double a = 0.0;
    double b = 1.0;
    std::string label;
    /// False for providers with internal state; batch solvers then serialize calls.
    bool concurrent_safe = true;

    QMat operator()(double t) const { return coeff(t); }

    bool contains(double t) const { return t >= a - 1e-12 && t <= b + 1e-12; }

    static LinearQDE constant(QMat A, double a = 0.0, double b = 1.0, std::string label = "constant") {
        if (!A.square()) throw NonSquare("coefficient matrix must be square");
        const std::size_t n = A.rows();
        return {n, [A = std::move(A)](double) { return A; }, a, b, std::move(label)};
    }
};

/// Spot check that ‖A(t+h) − A(t)‖ shrinks toward 0 as h → 0 at sample points.
inline bool coefficient_continuous(const LinearQDE& qde, int samples = 8) {
    for (int s = 0; s < samples; ++s) {
        const double t = qde.a + (qde.b - qde.a) * (s + 0.5) / samples;
        const QMat at = qde(t);
        if (at.rows() != qde.dim || at.cols() != qde.dim) return false;
        const double coarse = (qde(t + 1e-3) - at).norm();
        const double fine = (qde(t + 1e-7) - at).norm();
        if (fine > 1e-5 * std::max(1.0, at.norm()) && fine > 0.5 * coarse) return false;
    }
    return true;
}

struct IVP {
    LinearQDE qde;
    double t0 = 0.0;
    QVec x0;
};

/// Dense output over strictly increasing nodes, cubic Hermite between them
/// using the stored slopes A(tᵢ)·xᵢ.
class Trajectory {
public:
    Trajectory() = default;
    Trajectory(std::vector<double> ts, std::vector<QVec> xs, std::vector<QVec> slopes)
        : ts_(std::move(ts)), xs_(std::move(xs)), slopes_(std::move(slopes)) {
        if (ts_.size() != xs_.size() || ts_.size() != slopes_.size() || ts_.empty())
            throw DimensionMismatch("trajectory arrays must be nonempty and of equal length");
        for (std::size_t k = 1; k < ts_.size(); ++k)
            if (!(ts_[k] > ts_[k - 1])) throw DomainError("trajectory times must be strictly increasing");
    }

    const std::vector<double>& ts() const noexcept { return ts_; }
    const std::vector<QVec>& xs() const noexcept { return xs_; }
    const std::vector<QVec>& slopes() const noexcept { return slopes_; }
    double t_min() const { return ts_.front(); }
    double t_max() const { return ts_.back(); }
    std::size_t dim() const { return xs_.front().dim(); }

    QVec operator()(double t) const { return interpolate(t, false); }
    QVec derivative(double t) const { return interpolate(t, true); }

private:
    QVec interpolate(double t, bool deriv) const {
        const double slack = 1e-9 * std::max(1.0, std::abs(t_max() - t_min()));
        if (t < t_min() - slack || t > t_max() + slack) throw DomainError("time outside the trajectory range");
        if (ts_.size() == 1) return deriv ? slopes_.front() : xs_.front();
        auto it = std::upper_bound(ts_.begin(), ts_.end(), t);
        std::size_t k = it == ts_.begin() ? 0 : static_cast<std::size_t>(it - ts_.begin()) - 1;
        k = std::min(k, ts_.size() - 2);
        if (!deriv && t == ts_[k]) return xs_[k];
        const double h = ts_[k + 1] - ts_[k];
        const double s = (t - ts_[k]) / h;
        double h00, h10, h01, h11;
        if (!deriv) {
            h00 = (2 * s - 3) * s * s + 1;
            h10 = ((s - 2) * s + 1) * s * h;
            h01 = (3 - 2 * s) * s * s;
            h11 = (s - 1) * s * s * h;
        } else {
            h00 = (6 * s * s - 6 * s) / h;
            h10 = 3 * s * s - 4 * s + 1;
            h01 = (6 * s - 6 * s * s) / h;
            h11 = 3 * s * s - 2 * s;
        }
        return h00 * xs_[k] + h10 * slopes_[k] + h01 * xs_[k + 1] + h11 * slopes_[k + 1];
    }

    std::vector<double> ts_;
    std::vector<QVec> xs_;
    std::vector<QVec> slopes_;
};

/// Classical RK4 with fixed step h = (t_end − t0)/steps. t_end may lie on
/// either side of t0; the returned nodes are always increasing.
inline Trajectory solve_ivp(const IVP& ivp, double t_end, int steps) {
    const auto& qde = ivp.qde;
    if (steps < 1) throw InputError("steps must be at least 1");
    if (ivp.x0.dim() != qde.dim) throw DimensionMismatch("initial vector does not match system dimension");
    if (!qde.contains(ivp.t0) || !qde.contains(t_end)) throw InputError("integration range leaves the system interval");

    std::vector<double> ts{ivp.t0};
    std::vector<QVec> xs{ivp.x0};
    std::vector<QVec> slopes{qde(ivp.t0) * ivp.x0};
    if (t_end != ivp.t0) {
        const double h = (t_end - ivp.t0) / steps;
        QVec x = ivp.x0;
        for (int n = 0; n < steps; ++n) {
            const double t = ivp.t0 + n * h;
            const QVec& k1 = slopes.back();
            const QMat a_mid = qde(t + 0.5 * h);
            const QVec k2 = a_mid * (x + (0.5 * h) * k1);
            const QVec k3 = a_mid * (x + (0.5 * h) * k2);
            const double t_next = n + 1 == steps ? t_end : ivp.t0 + (n + 1) * h;
            const QMat a_next = qde(t_next);
            const QVec k4 = a_next * (x + h * k3);
            x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            ts.push_back(t_next);
            xs.push_back(x);
            slopes.push_back(a_next * x);
        }
        if (h < 0) {
            std::reverse(ts.begin(), ts.end());
            std::reverse(xs.begin(), xs.end());
            std::reverse(slopes.begin(), slopes.end());
        }
    }
    return Trajectory(std::move(ts), std::move(xs), std::move(slopes));
}

/// Independent IVPs, optionally on several threads. Providers that are not
/// concurrent_safe are evaluated one IVP at a time.
inline std::vector<Trajectory> solve_ivp_batch(const std::vector<IVP>& ivps, double t_end, int steps,
                                               unsigned jobs = 1) {
    std::vector<Trajectory> out(ivps.size());
    bool serial = jobs <= 1;
    for (const auto& p : ivps) serial = serial || !p.qde.concurrent_safe;
    if (serial) {
        for (std::size_t n = 0; n < ivps.size(); ++n) out[n] = solve_ivp(ivps[n], t_end, steps);
        return out;
    }
    for (std::size_t start = 0; start < ivps.size(); start += jobs) {
        std::vector<std::future<Trajectory>> pending;
        for (std::size_t n = start; n < std::min(ivps.size(), start + jobs); ++n)
            pending.push_back(std::async(std::launch::async, [&, n] { return solve_ivp(ivps[n], t_end, steps); }));
        for (std::size_t n = 0; n < pending.size(); ++n) out[start + n] = pending[n].get();
    }
    return out;
}

// ---------------------------------------------------------------------------
// Fundamental matrices

enum class Method { NumericColumns, ExpmAdjoint, CommutingSplit, JordanClosedForm, EigenMethod, DiagonalIntegral };

inline const char* method_name(Method m) {
    switch (m) {
        case Method::NumericColumns: return "NumericColumns";
        case Method::ExpmAdjoint: return "ExpmAdjoint";
        case Method::CommutingSplit: return "CommutingSplit";
        case Method::JordanClosedForm: return "JordanClosedForm";
        case Method::EigenMethod: return "EigenMethod";
        case Method::DiagonalIntegral: return "DiagonalIntegral";
    }
    return "?";
}

struct FundamentalMatrix {
    std::size_t dim = 0;
    std::function<QMat(double)> eval;
    Method method = Method::NumericColumns;
    double t0 = 0.0;
    double certificate = 0.0;  // ddet(eval(t0))

    QMat operator()(double t) const { return eval(t); }
};

/// Builds the record and validates the certificate |ddet M(t0)| > τ_sing.
inline FundamentalMatrix make_fundamental(std::size_t dim, std::function<QMat(double)> eval, Method method,
                                          double t0) {
    const QMat m0 = eval(t0);
    const double cert = ddet(m0);
    if (std::abs(cert) <= singular_threshold(m0))
        throw SingularCertificate("solution matrix is singular at t0; not a fundamental matrix");
    return {dim, std::move(eval), method, t0, cert};
}

inline constexpr double kDerivativeStep = 1e-6;

/// ‖Ṁ(t) − A(t)M(t)‖ with Ṁ by central differences.
inline double fundamental_residual(const LinearQDE& qde, const FundamentalMatrix& m, double t,
                                   double h = kDerivativeStep) {
    const QMat dm = (1.0 / (2.0 * h)) * (m(t + h) - m(t - h));
    return (dm - qde(t) * m(t)).norm();
}

/// `count` sample times strictly inside [a, b], leaving room for the
/// central-difference stencil.
inline std::vector<double> interior_samples(double a, double b, int count) {
    std::vector<double> ts;
    const double pad = 4 * kDerivativeStep;
    for (int k = 0; k < count; ++k) ts.push_back(a + pad + (b - a - 2 * pad) * (k + 0.5) / count);
    return ts;
}

/// Columns integrated from the identity at t0 across the whole system interval.
inline FundamentalMatrix fundamental_numeric(const LinearQDE& qde, double t0, int steps) {
    if (!qde.contains(t0)) throw InputError("t0 outside the system interval");
    if (steps < 1) throw InputError("steps must be at least 1");
    const std::size_t n = qde.dim;
    const double span = qde.b - qde.a;
    const int fwd = qde.b > t0 ? std::max(1, static_cast<int>(std::lround(steps * (qde.b - t0) / span))) : 0;
    const int bwd = t0 > qde.a ? std::max(1, static_cast<int>(std::lround(steps * (t0 - qde.a) / span))) : 0;

    std::vector<Trajectory> columns;
    for (std::size_t c = 0; c < n; ++c) {
        QVec e(n);
        e[c] = 1.0;
        const IVP ivp{qde, t0, e};
        std::vector<double> ts;
        std::vector<QVec> xs, slopes;
        if (bwd > 0) {
            const Trajectory back = solve_ivp(ivp, qde.a, bwd);
            ts = back.ts();
            xs = back.xs();
            slopes = back.slopes();
            ts.pop_back();  // t0 comes again from the forward leg
            xs.pop_back();
            slopes.pop_back();
        }
        const Trajectory front = solve_ivp(ivp, fwd > 0 ? qde.b : t0, std::max(fwd, 1));
        ts.insert(ts.end(), front.ts().begin(), front.ts().end());
        xs.insert(xs.end(), front.xs().begin(), front.xs().end());
        slopes.insert(slopes.end(), front.slopes().begin(), front.slopes().end());
        columns.emplace_back(std::move(ts), std::move(xs), std::move(slopes));
    }
    auto eval = [columns = std::move(columns)](double t) {
        std::vector<QVec> cols;
        cols.reserve(columns.size());
        for (const auto& c : columns) cols.push_back(c(t));
        return QMat::from_columns(cols);
    };
    return make_fundamental(n, std::move(eval), Method::NumericColumns, t0);
}

/// M(t) = exp(A (t − t0)); M(t0) = I.
inline FundamentalMatrix fundamental_constant(const QMat& A, double t0 = 0.0) {
    if (!A.square()) throw NonSquare("coefficient matrix must be square");
    return make_fundamental(A.rows(), [A, t0](double t) { return expm(A, t - t0); }, Method::ExpmAdjoint, t0);
}

inline constexpr double kCommuteTolerance = 1e-12;

/// A = D + N with D its diagonal, accepted when N is nilpotent and DN = ND.
inline std::optional<std::pair<QMat, QMat>> commuting_split(const QMat& A) {
    if (!A.square()) throw NonSquare("commuting_split of a non-square matrix");
    const std::size_t n = A.rows();
    QMat d(n, n);
    for (std::size_t k = 0; k < n; ++k) d(k, k) = A(k, k);
    const QMat nil = A - d;
    const double scale = std::max(1.0, nil.norm());
    QMat power = nil;
    for (std::size_t k = 1; k < n; ++k) power = power * nil;
    if (power.norm() > kCommuteTolerance * std::pow(scale, static_cast<double>(n))) return std::nullopt;
    if ((d * nil - nil * d).norm() > kCommuteTolerance * std::max(1.0, d.norm() * nil.norm())) return std::nullopt;
    return std::make_pair(d, nil);
}

/// Σ_{m<n} Nᵐ tᵐ / m! for nilpotent N.
inline QMat nilpotent_exp(const QMat& nil, double t) {
    QMat term = QMat::identity(nil.rows());
    QMat sum = term;
    for (std::size_t m = 1; m < nil.rows(); ++m) {
        term = (t / static_cast<double>(m)) * (term * nil);
        sum = sum + term;
    }
    return sum;
}

inline QMat diagonal_exp(const QMat& d, double t) {
    QMat out(d.rows(), d.cols());
    for (std::size_t k = 0; k < d.rows(); ++k) out(k, k) = exp_quat(t * d(k, k));
    return out;
}

/// exp(J(λ) t) for the n×n Jordan block: diag(e^{λt}) · [t^{j−i}/(j−i)!]ᵢ≤ⱼ.
inline QMat jordan_exp(const Quat& lambda, std::size_t n, double t) {
    if (n < 1) throw InputError("Jordan block size must be at least 1");
    const Quat e = exp_quat(t * lambda);
    QMat out(n, n);
    for (std::size_t r = 0; r < n; ++r) {
        double coef = 1.0;
        for (std::size_t c = r; c < n; ++c) {
            if (c > r) coef *= t / static_cast<double>(c - r);
            out(r, c) = e * coef;
        }
    }
    return out;
}

/// λ when A is exactly the Jordan block J(λ) (λ on the diagonal, 1 above it).
inline std::optional<Quat> jordan_block_eigenvalue(const QMat& A) {
    if (!A.square() || A.rows() == 0) return std::nullopt;
    const Quat lambda = A(0, 0);
    for (std::size_t r = 0; r < A.rows(); ++r)
        for (std::size_t c = 0; c < A.cols(); ++c) {
            const Quat expect = r == c ? lambda : (c == r + 1 ? Quat(1.0) : Quat());
            if (!(A(r, c) == expect)) return std::nullopt;
        }
    return lambda;
}

/// Closed form exp(D t)·exp(N t); std::nullopt when the split is rejected.
inline std::optional<FundamentalMatrix> fundamental_split(const QMat& A) {
    auto split = commuting_split(A);
    if (!split) return std::nullopt;
    auto [d, nil] = std::move(*split);
    return make_fundamental(
        A.rows(), [d, nil](double t) { return diagonal_exp(d, t) * nilpotent_exp(nil, t); },
        Method::CommutingSplit, 0.0);
}

inline std::optional<FundamentalMatrix> fundamental_jordan(const QMat& A) {
    auto lambda = jordan_block_eigenvalue(A);
    if (!lambda) return std::nullopt;
    const std::size_t n = A.rows();
    return make_fundamental(n, [l = *lambda, n](double t) { return jordan_exp(l, n, t); },
                            Method::JordanClosedForm, 0.0);
}

// ---------------------------------------------------------------------------
// Right eigenpairs A q = q λ

struct RightEigenpair {
    Quat lambda;      // complex representative w + x·i, x ≥ 0
    QVec vector;      // unit norm
    double residual;  // ‖A q − q λ‖
};

inline constexpr double kEigenResidualTolerance = 1e-8;

namespace detail {

// Right multiplication by a unit factor that commutes with λ, chosen so the
// first significant entry has a real positive complex part (or is real
// positive outright when λ is real).
inline QVec normalize_eigenvector(QVec v, const Quat& lambda) {
    v = v * (1.0 / v.norm());
    for (std::size_t k = 0; k < v.dim(); ++k) {
        const Quat e = v[k];
        if (norm(e) <= 1e-8) continue;
        if (lambda.x == 0.0) return v * (conj(e) / norm(e));
        const linalg::cplx a = adjoint_a(e), b = adjoint_b(e);
        // v·c for complex c: a ↦ a·c, b ↦ b·conj(c)
        const linalg::cplx c = std::abs(a) > 1e-8 ? std::conj(a) / std::abs(a) : b / std::abs(b);
        return v * Quat(c.real(), c.imag(), 0, 0);
    }
    return v;
}

}  // namespace detail

/// Right eigenpairs through the spectrum of χ(A). Each similarity class
/// {α⁻¹λα} is reported once, by its complex representative with nonnegative
/// imaginary part. Defective matrices yield fewer than n pairs.
inline std::vector<RightEigenpair> right_eigenpairs(const QMat& A) {
    if (!A.square()) throw NonSquare("right_eigenpairs of a non-square matrix");
    const std::size_t n = A.rows();
    const linalg::CMatrix chi = to_adjoint(A).matrix;
    auto ev = linalg::eigenvalues(chi);
    const double scale = std::max(1.0, chi.norm1());
    const double cluster_tol = 1e-6 * scale;

    std::sort(ev.begin(), ev.end(), [](auto p, auto q) {
        return p.real() != q.real() ? p.real() < q.real() : p.imag() < q.imag();
    });
    std::vector<std::vector<linalg::cplx>> clusters;
    std::vector<bool> used(ev.size(), false);
    for (std::size_t s = 0; s < ev.size(); ++s) {
        if (used[s]) continue;
        std::vector<linalg::cplx> group{ev[s]};
        used[s] = true;
        for (std::size_t u = s + 1; u < ev.size(); ++u)
            if (!used[u] && std::abs(ev[u] - ev[s]) <= cluster_tol) {
                group.push_back(ev[u]);
                used[u] = true;
            }
        clusters.push_back(std::move(group));
    }

    struct Candidate {
        linalg::cplx value;
        std::size_t quota;
    };
    std::vector<Candidate> keep;
    for (const auto& g : clusters) {
        linalg::cplx mean = 0.0;
        for (auto v : g) mean += v;
        mean /= static_cast<double>(g.size());
        if (mean.imag() > cluster_tol) keep.push_back({mean, g.size()});
        else if (std::abs(mean.imag()) <= cluster_tol)
            keep.push_back({linalg::cplx(mean.real(), 0.0), (g.size() + 1) / 2});
    }
    std::sort(keep.begin(), keep.end(), [](const Candidate& p, const Candidate& q) {
        return std::abs(p.value) != std::abs(q.value) ? std::abs(p.value) < std::abs(q.value)
                                                      : p.value.real() < q.value.real();
    });

    std::vector<RightEigenpair> out;
    for (const auto& cand : keep) {
        linalg::CMatrix shifted = chi;
        for (std::size_t k = 0; k < shifted.rows(); ++k) shifted(k, k) -= cand.value;
        const auto basis = linalg::FullPivLU(shifted).nullspace(1e-9);
        const Quat lambda(cand.value.real(), cand.value.imag(), 0, 0);
        std::vector<QVec> accepted;
        for (const auto& u : basis) {
            if (accepted.size() == cand.quota) break;
            QVec q = from_adjoint_vector(u);
            auto trial = accepted;
            trial.push_back(q);
            if (rank(QMat::from_columns(trial), 1e-8) < trial.size()) continue;
            accepted.push_back(q);
            q = detail::normalize_eigenvector(q, lambda);
            const double res = (A * q - q * lambda).norm();
            if (res > kEigenResidualTolerance)
                throw ResidualTooLarge("right eigenpair residual " + format_real(res) + " exceeds 1e-8");
            out.push_back({lambda, q, res});
        }
    }
    if (out.size() > n) out.resize(n);
    return out;
}

/// M(t) = (q₁e^{λ₁t}, …, qₙe^{λₙt}); each exponential multiplies on the right.
inline FundamentalMatrix fundamental_eigen(const QMat& A) {
    const auto pairs = right_eigenpairs(A);
    const std::size_t n = A.rows();
    if (pairs.size() < n) throw DefectiveMatrix("not enough right-independent eigenvectors");
    std::vector<QVec> columns;
    std::vector<Quat> lambdas;
    for (const auto& p : pairs) {
        columns.push_back(p.vector);
        lambdas.push_back(p.lambda);
    }
    const QMat v = QMat::from_columns(columns);
    if (rank(v) < n || std::abs(ddet(v)) <= singular_threshold(v))
        throw DefectiveMatrix("eigenvectors are right linearly dependent");
    auto eval = [v, lambdas](double t) {
        QMat m = v;
        for (std::size_t c = 0; c < m.cols(); ++c) {
            const Quat e = exp_quat(t * lambdas[c]);
            for (std::size_t r = 0; r < m.rows(); ++r) m(r, c) = v(r, c) * e;
        }
        return m;
    };
    FundamentalMatrix fm = make_fundamental(n, std::move(eval), Method::EigenMethod, 0.0);
    const auto qde = LinearQDE::constant(A, -1.0, 2.0);
    for (double t : {0.0, 0.25, 0.5, 1.0})
        if (fundamental_residual(qde, fm, t) > 1e-7)
            throw ResidualTooLarge("eigen fundamental matrix fails Ṁ = AM");
    return fm;
}

// ---------------------------------------------------------------------------
// Time-varying diagonal systems

using QuatFunction = std::function<Quat(double)>;

/// 16 Chebyshev points of the first kind on [a, b].
inline std::vector<double> chebyshev_samples(double a, double b, int count = 16) {
    std::vector<double> ts;
    for (int k = 0; k < count; ++k)
        ts.push_back(0.5 * (a + b) + 0.5 * (b - a) * std::cos((2.0 * k + 1.0) * std::numbers::pi / (2.0 * count)));
    return ts;
}

/// diag(exp ∫_{t0}^t aᵢ), valid when each aᵢ(t) commutes with its own
/// integral; that condition is checked at 16 Chebyshev samples on [t0, t1].
inline FundamentalMatrix diagonal_timevarying(const std::vector<QuatFunction>& a, double t0, double t1) {
    for (std::size_t n = 0; n < a.size(); ++n)
        for (double t : chebyshev_samples(t0, t1)) {
            const Quat at = a[n](t);
            const Quat integral = integrate_simpson(a[n], t0, t);
            const double gap = norm(commutator(at, integral));
            if (gap > 1e-9 * std::max(1.0, norm(at) * norm(integral)))
                throw ConditionViolated("coefficient " + std::to_string(n) +
                                        " does not commute with its integral at t = " + format_real(t));
        }
    auto eval = [a, t0](double t) {
        QMat m(a.size(), a.size());
        for (std::size_t n = 0; n < a.size(); ++n) m(n, n) = exp_quat(integrate_simpson(a[n], t0, t));
        return m;
    };
    return make_fundamental(a.size(), std::move(eval), Method::DiagonalIntegral, t0);
}

inline LinearQDE diagonal_system(const std::vector<QuatFunction>& a, double t0, double t1) {
    return {a.size(),
            [a](double t) {
                QMat m(a.size(), a.size());
                for (std::size_t n = 0; n < a.size(); ++n) m(n, n) = a[n](t);
                return m;
            },
            t0, t1, "diagonal"};
}

// ---------------------------------------------------------------------------

/// ẍ + q₁(t)ẋ + q₂(t)x = 0 as ẋ₁ = x₂, ẋ₂ = −q₂x₁ − q₁x₂.
inline LinearQDE second_order_reduce(QuatFunction q1, QuatFunction q2, double a = 0.0, double b = 1.0) {
    return {2,
            [q1 = std::move(q1), q2 = std::move(q2)](double t) {
                return QMat{{0.0, 1.0}, {-q2(t), -q1(t)}};
            },
            a, b, "second-order"};
}

}  // namespace qde
