// Randomized property checks shared by the unit suite and the acceptance
// runner. Each returns the trial count, failure count and worst error seen.
#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "oracles.hpp"
#include "qde/analysis.hpp"
#include "qde/engine.hpp"
#include "qde/qmatrix.hpp"
#include "support.hpp"

namespace qtest {

struct PropertyOutcome {
    std::string name;
    int trials = 0;
    int failures = 0;
    double worst = 0.0;

    void record(double err, double tol) {
        ++trials;
        worst = std::max(worst, err);
        if (!(err <= tol)) ++failures;
    }
    void record_bool(bool ok) {
        ++trials;
        if (!ok) ++failures;
    }
};

inline PropertyOutcome prop_associativity(std::uint64_t seed, int trials = 10000) {
    Rng rng(seed);
    PropertyOutcome out{"associativity"};
    for (int n = 0; n < trials; ++n) {
        const Quat p = rng.quat(10), q = rng.quat(10), r = rng.quat(10);
        const double scale = std::max(1e-300, qde::norm(p) * qde::norm(q) * qde::norm(r));
        out.record(diff((p * q) * r, p * (q * r)) / scale, 1e-13);
    }
    return out;
}

inline PropertyOutcome prop_conjugation_reverses(std::uint64_t seed, int trials = 10000) {
    Rng rng(seed);
    PropertyOutcome out{"conjugation_anti_homomorphism"};
    for (int n = 0; n < trials; ++n) {
        const Quat p = rng.quat(10), q = rng.quat(10);
        out.record(diff(qde::conj(p * q), qde::conj(q) * qde::conj(p)) / std::max(1e-300, qde::norm(p) * qde::norm(q)),
                   1e-13);
    }
    return out;
}

inline PropertyOutcome prop_modulus_multiplicative(std::uint64_t seed, int trials = 10000) {
    Rng rng(seed);
    PropertyOutcome out{"modulus_multiplicative"};
    for (int n = 0; n < trials; ++n) {
        const Quat p = rng.quat(10), q = rng.quat(10);
        const double prod = qde::norm(p) * qde::norm(q);
        out.record(std::abs(qde::norm(p * q) - prod) / std::max(1e-300, prod), 1e-13);
    }
    return out;
}

inline PropertyOutcome prop_exp_addition_commuting(std::uint64_t seed, int trials = 2000) {
    Rng rng(seed);
    PropertyOutcome out{"exp_addition_commuting"};
    for (int n = 0; n < trials; ++n) {
        const Quat u = rng.pure_unit();
        const Quat p = rng.uniform() + rng.uniform(-3, 3) * u, q = rng.uniform() + rng.uniform(-3, 3) * u;
        const Quat lhs = qde::exp_quat(p) * qde::exp_quat(q), rhs = qde::exp_quat(p + q);
        out.record(diff(lhs, rhs) / std::max(1.0, qde::norm(rhs)), 1e-13);
    }
    return out;
}

inline PropertyOutcome prop_real_part_swap(std::uint64_t seed, int trials = 10000) {
    Rng rng(seed);
    PropertyOutcome out{"real_part_swap"};
    for (int n = 0; n < trials; ++n) {
        const Quat a = rng.quat(10), b = rng.quat(10);
        out.record(std::abs(qde::re(a * qde::conj(b)) - qde::re(qde::conj(a) * b)) /
                       std::max(1.0, qde::norm(a) * qde::norm(b)),
                   1e-14);
    }
    return out;
}

inline PropertyOutcome prop_adjoint_homomorphism(std::uint64_t seed, int trials = 1000) {
    Rng rng(seed);
    PropertyOutcome out{"adjoint_homomorphism"};
    for (int n = 0; n < trials; ++n) {
        const std::size_t r = 1 + n % 4, k = 1 + (n / 4) % 4, c = 1 + (n / 16) % 4;
        const QMat a = rng.mat(r, k), b = rng.mat(k, c);
        const auto lhs = chi_oracle(a * b);
        const auto ca = chi_oracle(a), cb = chi_oracle(b);
        double err = 0.0;
        for (std::size_t i = 0; i < 2 * r; ++i)
            for (std::size_t j = 0; j < 2 * c; ++j) {
                cplx s = 0.0;
                for (std::size_t m = 0; m < 2 * k; ++m) s += ca[i][m] * cb[m][j];
                err = std::max(err, std::abs(s - lhs[i][j]));
            }
        // the library embedding must match the oracle and respect ⁺ ↦ ᴴ
        const auto lib = qde::to_adjoint(a).matrix, lib_h = qde::to_adjoint(qde::conj_transpose(a)).matrix;
        for (std::size_t i = 0; i < 2 * r; ++i)
            for (std::size_t j = 0; j < 2 * k; ++j) {
                err = std::max(err, std::abs(lib(i, j) - ca[i][j]));
                err = std::max(err, std::abs(lib_h(j, i) - std::conj(ca[i][j])));
            }
        out.record(err, 1e-12);
    }
    return out;
}

/// The four-term Wronskian formula against det χ(M) by cofactor expansion.
inline PropertyOutcome prop_ddet_vs_det_chi(std::uint64_t seed, int trials = 10000) {
    Rng rng(seed);
    PropertyOutcome out{"ddet_equals_det_chi"};
    for (int n = 0; n < trials; ++n) {
        const double scale = n % 3 == 0 ? 0.1 : n % 3 == 1 ? 1.0 : 5.0;
        const QMat m = rng.mat(2, 2, scale);
        const cplx det = det_cofactor(chi_oracle(m));
        const double tol = 1e-10 * std::max(1.0, std::abs(det));
        out.record(std::max(std::abs(qde::ddet2_formula(m) - det.real()), std::abs(det.imag())), tol);
    }
    return out;
}

/// right_dependent(columns) ⟺ |W| ≤ τ_sing on independent and on
/// constructed dependent pairs.
inline PropertyOutcome prop_wronskian_dependence(std::uint64_t seed, int trials = 2000) {
    Rng rng(seed);
    PropertyOutcome out{"wronskian_dependence_equivalence"};
    for (int n = 0; n < trials; ++n) {
        const QVec x1 = rng.vec(2);
        const QVec x2 = n % 2 ? x1 * rng.nonzero_quat() : rng.vec(2);
        const QMat m = QMat::from_columns({x1, x2});
        const bool dep = qde::right_dependent({x1, x2}).dependent;
        const bool small = std::abs(qde::ddet(m)) <= qde::singular_threshold(m);
        out.record_bool(dep == small && dep == (n % 2 == 1));
    }
    return out;
}

/// x₁q₁ + x₂q₂ built from two numeric solutions still solves the system.
inline PropertyOutcome prop_superposition(std::uint64_t seed, int trials = 40) {
    Rng rng(seed);
    PropertyOutcome out{"superposition_closure"};
    for (int n = 0; n < trials; ++n) {
        const QMat a = rng.mat(2, 2);
        const qde::LinearQDE qde = qde::LinearQDE::constant(a, 0.0, 1.0);
        const auto x1 = qde::solve_ivp({qde, 0.0, rng.vec(2)}, 1.0, 2000);
        const auto x2 = qde::solve_ivp({qde, 0.0, rng.vec(2)}, 1.0, 2000);
        const Quat q1 = rng.quat(), q2 = rng.quat();
        const qde::VectorFunction sum = [&](double t) { return x1(t) * q1 + x2(t) * q2; };
        double worst = 0.0;
        for (double t : qde::interior_samples(0.0, 1.0, 8)) worst = std::max(worst, qde::qde_residual(qde, sum, t));
        out.record(worst, 1e-6);
    }
    return out;
}

/// Solutions that start right-dependent keep a vanishing Wronskian.
inline PropertyOutcome prop_zero_or_nowhere_zero(std::uint64_t seed, int trials = 20) {
    Rng rng(seed);
    PropertyOutcome out{"wronskian_zero_or_nowhere_zero"};
    for (int n = 0; n < trials; ++n) {
        const QMat a = rng.mat(2, 2);
        const qde::LinearQDE qde = qde::LinearQDE::constant(a, 0.0, 1.0);
        const QVec x0 = rng.vec(2);
        const Quat eta = rng.nonzero_quat();
        const auto x1 = qde::solve_ivp({qde, 0.0, x0}, 1.0, 1000);
        const auto x2 = qde::solve_ivp({qde, 0.0, x0 * eta}, 1.0, 1000);
        double worst = 0.0;
        for (double t : qde::interior_samples(0.0, 1.0, 8)) {
            const QMat m = QMat::from_columns({x1(t), x2(t)});
            worst = std::max(worst, std::abs(qde::ddet(m)) / std::max(1.0, std::pow(m.norm(), 4)));
        }
        out.record(worst, 1e-8);
    }
    return out;
}

/// (λ, q) an eigenpair ⟹ (α⁻¹λα, qα) is one too.
inline PropertyOutcome prop_eigen_covariance(std::uint64_t seed, int trials = 200) {
    Rng rng(seed);
    PropertyOutcome out{"eigenpair_right_scaling_covariance"};
    for (int n = 0; n < trials; ++n) {
        const std::size_t dim = 2 + n % 2;
        const QMat a = rng.mat(dim, dim);
        const auto pairs = qde::right_eigenpairs(a);
        for (const auto& p : pairs) {
            const Quat alpha = rng.nonzero_quat();
            const QVec v = p.vector * alpha;
            const Quat mu = qde::inv(alpha) * p.lambda * alpha;
            out.record((a * v - v * mu).norm() / qde::norm(alpha), 1e-8);
        }
    }
    return out;
}

}  // namespace qtest
