// Independent reference computations used by the test suites. None of these
// route through the library's own solvers or factorizations.
#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <vector>

#include "qde/complex_matrix.hpp"
#include "qde/qmatrix.hpp"

namespace qtest {

using cplx = std::complex<double>;

/// Determinant by Laplace expansion along the first row.
inline cplx det_cofactor(const std::vector<std::vector<cplx>>& m) {
    const std::size_t n = m.size();
    if (n == 1) return m[0][0];
    if (n == 2) return m[0][0] * m[1][1] - m[0][1] * m[1][0];
    cplx sum = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
        std::vector<std::vector<cplx>> minor;
        for (std::size_t r = 1; r < n; ++r) {
            std::vector<cplx> row;
            for (std::size_t k = 0; k < n; ++k)
                if (k != c) row.push_back(m[r][k]);
            minor.push_back(row);
        }
        sum += (c % 2 ? -1.0 : 1.0) * m[0][c] * det_cofactor(minor);
    }
    return sum;
}

/// The complex image of a quaternion matrix, built entry by entry from
/// q = a + b·j ↦ [[a, b], [−b̄, ā]] without calling the library.
inline std::vector<std::vector<cplx>> chi_oracle(const qde::QMat& m) {
    std::vector<std::vector<cplx>> out(2 * m.rows(), std::vector<cplx>(2 * m.cols()));
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c) {
            const qde::Quat q = m(r, c);
            const cplx a{q.w, q.x}, b{q.y, q.z};
            out[2 * r][2 * c] = a;
            out[2 * r][2 * c + 1] = b;
            out[2 * r + 1][2 * c] = -std::conj(b);
            out[2 * r + 1][2 * c + 1] = std::conj(a);
        }
    return out;
}

/// Frenet frame (T, B, N) for constant v, κ, τ, integrated directly from
/// (T', B', N') = v [[0, κ, 0], [−κ, 0, τ], [0, −τ, 0]] (T, B, N) by RK4 on
/// the nine real components, starting from the coordinate axes.
struct FrameOracle {
    std::array<double, 3> t, b, n;
};

inline FrameOracle frenet_frame_rk4(double v, double kappa, double tau, double s_end, int steps) {
    using State = std::array<double, 9>;
    auto rhs = [&](const State& y) {
        State d{};
        for (int c = 0; c < 3; ++c) {
            d[c] = v * kappa * y[3 + c];                             // T' = vκB
            d[3 + c] = v * (-kappa * y[c] + tau * y[6 + c]);         // B' = v(−κT + τN)
            d[6 + c] = -v * tau * y[3 + c];                          // N' = −vτB
        }
        return d;
    };
    State y{1, 0, 0, 0, 1, 0, 0, 0, 1};
    const double h = s_end / steps;
    for (int s = 0; s < steps; ++s) {
        State k1 = rhs(y), tmp;
        for (int c = 0; c < 9; ++c) tmp[c] = y[c] + 0.5 * h * k1[c];
        State k2 = rhs(tmp);
        for (int c = 0; c < 9; ++c) tmp[c] = y[c] + 0.5 * h * k2[c];
        State k3 = rhs(tmp);
        for (int c = 0; c < 9; ++c) tmp[c] = y[c] + h * k3[c];
        State k4 = rhs(tmp);
        for (int c = 0; c < 9; ++c) y[c] += h / 6.0 * (k1[c] + 2 * k2[c] + 2 * k3[c] + k4[c]);
    }
    return {{y[0], y[1], y[2]}, {y[3], y[4], y[5]}, {y[6], y[7], y[8]}};
}

}  // namespace qtest
