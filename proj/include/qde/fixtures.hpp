// fixtures.hpp
// Worked systems with known closed-form fundamental matrices.

#pragma once

#include <cmath>

#include "qde/engine.hpp"
#include "qde/qmatrix.hpp"
#include "qde/quadrature.hpp"
#include "qde/quat.hpp"

namespace qde::fixtures {

inline const Quat kI = Quat::i();
inline const Quat kJ = Quat::j();
inline const Quat kK = Quat::k();

/// Upper-triangular coupling of two different rotation axes.
inline QMat coupled_axes() { return {{kI, 1.0}, {0.0, kJ}}; }

/// M(t) = [[e^{it}, e^{it} ∫_{t0}^t e^{-is} e^{js} ds], [0, e^{jt}]]
/// normalized to M(t0) = diag(e^{it0}, e^{jt0}).
inline QMat coupled_axes_closed_form(double t, double t0 = 0.0) {
    const Quat integral =
        integrate_simpson([](double s) { return exp_quat(-s * kI) * exp_quat(s * kJ); }, t0, t);
    const Quat ei = exp_quat(t * kI);
    return {{ei, ei * integral}, {0.0, exp_quat(t * kJ)}};
}

/// Jordan-type block with a quaternion eigenvalue.
inline QMat jordan_k() { return {{kK, 1.0}, {0.0, kK}}; }

inline QMat jordan_k_closed_form(double t) {
    const Quat e = exp_quat(t * kK);
    return {{e, t * e}, {0.0, e}};
}

/// Triangular system with right eigenvalues i and i + j.
inline QMat triangular_eigen() { return {{kI, kJ}, {0.0, kI + kJ}}; }

inline QMat triangular_eigen_closed_form(double t) {
    const Quat e1 = exp_quat(t * kI), e2 = exp_quat(t * (kI + kJ));
    return {{e1, e2}, {0.0, e2}};
}

/// diag(i, j): right multiples of solutions solve it, complex combinations
/// do not exhaust the solution set.
inline QMat split_axes() { return {{kI, 0.0}, {0.0, kJ}}; }

}  // namespace qde::fixtures
