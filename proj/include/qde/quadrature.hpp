// quadrature.hpp
// Adaptive Simpson integration for real- and quaternion-valued integrands.

#pragma once

#include <cmath>
#include <limits>

#include "qde/errors.hpp"
#include "qde/quat.hpp"

namespace qde {

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const Quat& q) { return norm(q); }

inline constexpr double kSimpsonTolerance = 1e-10;
inline constexpr int kSimpsonMaxDepth = 30;
// Refinements forced before accepting, so oscillatory integrands are not
// accepted on a lucky coarse estimate.
inline constexpr int kSimpsonMinDepth = 4;

namespace detail {

template <typename T, typename F>
T simpson_step(const F& f, double a, double b, const T& fa, const T& fm, const T& fb, const T& whole,
               double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const T flm = f(lm), frm = f(rm);
    const T left = ((m - a) / 6.0) * (fa + 4.0 * flm + fm);
    const T right = ((b - m) / 6.0) * (fm + 4.0 * frm + fb);
    const T delta = left + right - whole;
    const double err = magnitude(delta);
    const double floor = 64.0 * std::numeric_limits<double>::epsilon() * magnitude(left + right);
    if (depth >= kSimpsonMinDepth && (err <= 15.0 * tol || err <= floor)) return left + right + (1.0 / 15.0) * delta;
    if (depth >= kSimpsonMaxDepth) throw IntegrationError("adaptive Simpson did not converge within 30 levels");
    return simpson_step<T>(f, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
           simpson_step<T>(f, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
}

}  // namespace detail

/// ∫ₐᵇ f. Works for either orientation of the interval; tol is absolute.
template <typename F>
auto integrate_simpson(const F& f, double a, double b, double tol = kSimpsonTolerance) {
    using T = decltype(f(a));
    if (a == b) return T{};
    if (b < a) return T{} - integrate_simpson(f, b, a, tol);
    const double m = 0.5 * (a + b);
    const T fa = f(a), fm = f(m), fb = f(b);
    const T whole = ((b - a) / 6.0) * (fa + 4.0 * fm + fb);
    return detail::simpson_step<T>(f, a, b, fa, fm, fb, whole, tol, 0);
}

}  // namespace qde
