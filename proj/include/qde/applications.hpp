// applications.hpp
// Fixture models built on the linear quaternion solvers: attitude kinematics
// and Frenet-frame propagation along a space curve.
//
// Attitude conventions. The Marins form propagates n' = ½ n ω with ω a pure
// quaternion acting on the right. The solvers act from the left, so it is
// integrated through p = conj(n), which obeys p' = −½ ω p. The Wertz form
// q' = ½ Ω q is a real 4-vector system with the scalar part stored LAST:
// (q1, q2, q3, q4) = (x, y, z, w). With that ordering the two forms coincide
// component for component; agreement is asserted on the rotation v ↦ q v q̄.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qde/engine.hpp"
#include "qde/errors.hpp"
#include "qde/qmatrix.hpp"
#include "qde/quat.hpp"

namespace qde::app {

using Vec3 = std::array<double, 3>;

/// cos(θ/2) + sin(θ/2)(eₓi + e_yj + e_zk) for a unit axis e.
inline Quat axis_angle_quat(const Vec3& axis, double theta) {
    const double len = std::sqrt(axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]);
    if (std::abs(len - 1.0) > 1e-10) throw NonUnitAxis("rotation axis must have unit length");
    const double s = std::sin(0.5 * theta);
    return {std::cos(0.5 * theta), s * axis[0], s * axis[1], s * axis[2]};
}

inline Quat pure(const Vec3& v) { return {0.0, v[0], v[1], v[2]}; }

/// v ↦ q v q̄ / |q|²
inline Vec3 rotate(const Quat& q, const Vec3& v) {
    const Quat r = q * pure(v) * conj(q) / norm2(q);
    return {r.x, r.y, r.z};
}

// ---------------------------------------------------------------------------
// Attitude kinematics

/// Body angular rates t ↦ (ωx, ωy, ωz) in rad/s.
using BodyRates = std::function<Vec3(double)>;

inline BodyRates constant_rates(const Vec3& omega) {
    return [omega](double) { return omega; };
}

/// Rates table (t, ωx, ωy, ωz) from CSV text, linearly interpolated and held
/// constant beyond the ends. A non-numeric first line is taken as a header.
inline BodyRates rates_from_csv(const std::string& text) {
    std::vector<double> ts;
    std::vector<Vec3> ws;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream row(line);
        std::string cell;
        std::vector<double> vals;
        bool numeric = true;
        while (std::getline(row, cell, ',')) {
            try {
                std::size_t used = 0;
                vals.push_back(std::stod(cell, &used));
                if (cell.find_first_not_of(" \t\r", used) != std::string::npos) numeric = false;
            } catch (const std::exception&) {
                numeric = false;
            }
        }
        if (!numeric && ts.empty() && line_no == 1) continue;  // header
        if (!numeric || vals.size() != 4)
            throw InputError("rates CSV line " + std::to_string(line_no) + " must hold t,wx,wy,wz");
        if (!ts.empty() && !(vals[0] > ts.back()))
            throw InputError("rates CSV times must be strictly increasing");
        ts.push_back(vals[0]);
        ws.push_back({vals[1], vals[2], vals[3]});
    }
    if (ts.empty()) throw InputError("rates CSV holds no samples");
    return [ts, ws](double t) -> Vec3 {
        if (t <= ts.front()) return ws.front();
        if (t >= ts.back()) return ws.back();
        const auto hi = static_cast<std::size_t>(std::upper_bound(ts.begin(), ts.end(), t) - ts.begin());
        const double f = (t - ts[hi - 1]) / (ts[hi] - ts[hi - 1]);
        Vec3 w;
        for (int c = 0; c < 3; ++c) w[c] = (1 - f) * ws[hi - 1][c] + f * ws[hi][c];
        return w;
    };
}

/// Marins form n' = ½ n ω, written for the conjugate p = n̄ as the
/// left-acting 1-dim system p' = −½ ω(t) p.
inline LinearQDE attitude_qde(BodyRates rates, double a = 0.0, double b = 1.0) {
    return {1,
            [rates = std::move(rates)](double t) {
                QMat m(1, 1);
                m(0, 0) = -0.5 * pure(rates(t));
                return m;
            },
            a, b, "attitude (conjugate Marins form)"};
}

/// Wertz form q' = ½ Ω q on (q1, q2, q3, q4) = (x, y, z, w).
inline LinearQDE attitude_omega_qde(BodyRates rates, double a = 0.0, double b = 1.0) {
    return {4,
            [rates = std::move(rates)](double t) {
                const Vec3 w = rates(t);
                const double wx = w[0], wy = w[1], wz = w[2];
                const double omega[4][4] = {{0, wz, -wy, wx}, {-wz, 0, wx, wy}, {wy, -wx, 0, wz}, {-wx, -wy, -wz, 0}};
                QMat m(4, 4);
                for (int r = 0; r < 4; ++r)
                    for (int c = 0; c < 4; ++c) m(r, c) = 0.5 * omega[r][c];
                return m;
            },
            a, b, "attitude (Omega form)"};
}

struct AttitudeSample {
    double t;
    Quat q;
};

/// Propagates n' = ½ n ω from n(t0) = q0 to t1 with fixed-step RK4.
inline std::vector<AttitudeSample> propagate_attitude(const BodyRates& rates, const Quat& q0, double t0, double t1,
                                                      int steps) {
    const LinearQDE qde = attitude_qde(rates, std::min(t0, t1), std::max(t0, t1));
    const Trajectory traj = solve_ivp({qde, t0, QVec{conj(q0)}}, t1, steps);
    std::vector<AttitudeSample> out;
    for (std::size_t n = 0; n < traj.ts().size(); ++n) out.push_back({traj.ts()[n], conj(traj.xs()[n][0])});
    return out;
}

/// Same propagation through the real 4×4 Ω form.
inline std::vector<AttitudeSample> propagate_attitude_omega(const BodyRates& rates, const Quat& q0, double t0,
                                                            double t1, int steps) {
    const LinearQDE qde = attitude_omega_qde(rates, std::min(t0, t1), std::max(t0, t1));
    const Trajectory traj = solve_ivp({qde, t0, QVec{q0.x, q0.y, q0.z, q0.w}}, t1, steps);
    std::vector<AttitudeSample> out;
    for (std::size_t n = 0; n < traj.ts().size(); ++n) {
        const QVec& s = traj.xs()[n];
        out.push_back({traj.ts()[n], Quat(s[3].w, s[0].w, s[1].w, s[2].w)});
    }
    return out;
}

/// Columns: t, q0, q1, q2, q3, |q|.
inline std::string attitude_csv(const std::vector<AttitudeSample>& samples) {
    std::ostringstream os;
    os << "t,q0,q1,q2,q3,norm\n";
    for (const auto& s : samples)
        os << format_real(s.t) << ',' << format_real(s.q.w) << ',' << format_real(s.q.x) << ','
           << format_real(s.q.y) << ',' << format_real(s.q.z) << ',' << format_real(norm(s.q)) << '\n';
    return os.str();
}

// ---------------------------------------------------------------------------
// Frenet frames

struct CurveGeometry {
    std::function<double(double)> speed;      // v(s) > 0
    std::function<double(double)> curvature;  // κ(s)
    std::function<double(double)> torsion;    // τ(s)
};

inline CurveGeometry helix(double speed, double curvature, double torsion) {
    return {[speed](double) { return speed; }, [curvature](double) { return curvature; },
            [torsion](double) { return torsion; }};
}

/// q' = ½ v K q on (q0, q1, q2, q3), K in κ and τ as a real 4×4 system.
inline LinearQDE frenet_qde(CurveGeometry geom, double a = 0.0, double b = 1.0) {
    return {4,
            [geom = std::move(geom)](double s) {
                const double v = geom.speed(s);
                if (!(v > 0.0)) throw DomainError("curve speed must be positive");
                const double k = geom.curvature(s), t = geom.torsion(s);
                const double kmat[4][4] = {{0, -t, 0, -k}, {t, 0, k, 0}, {0, -k, 0, t}, {k, 0, -t, 0}};
                QMat m(4, 4);
                for (int r = 0; r < 4; ++r)
                    for (int c = 0; c < 4; ++c) m(r, c) = 0.5 * v * kmat[r][c];
                return m;
            },
            a, b, "frenet"};
}

inline Quat quat_from_state(const QVec& s) { return {s[0].w, s[1].w, s[2].w, s[3].w}; }
inline QVec state_from_quat(const Quat& q) { return QVec{q.w, q.x, q.y, q.z}; }

/// Tangent, binormal, normal.
struct Frame {
    Vec3 t, b, n;
};

/// (T, B, N) are the images of the coordinate axes under v ↦ q v q̄.
inline Frame frame_from_quat(const Quat& q) {
    return {rotate(q, {1, 0, 0}), rotate(q, {0, 1, 0}), rotate(q, {0, 0, 1})};
}

/// Largest |⟨fᵢ, fⱼ⟩ − δᵢⱼ| over the frame vectors.
inline double orthonormality_defect(const Frame& f) {
    const Vec3* v[3] = {&f.t, &f.b, &f.n};
    double worst = 0.0;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) {
            double dot = 0.0;
            for (int k = 0; k < 3; ++k) dot += (*v[r])[k] * (*v[c])[k];
            worst = std::max(worst, std::abs(dot - (r == c ? 1.0 : 0.0)));
        }
    return worst;
}

/// Max-component residual of (T', B', N') = v [[0, κ, 0], [−κ, 0, τ], [0, −τ, 0]] (T, B, N),
/// derivatives by central differences.
inline double frenet_residual(const CurveGeometry& geom, const std::function<Frame(double)>& frame, double s,
                              double h = kDerivativeStep) {
    const Frame lo = frame(s - h), hi = frame(s + h), mid = frame(s);
    const double v = geom.speed(s), k = geom.curvature(s), t = geom.torsion(s);
    double worst = 0.0;
    for (int c = 0; c < 3; ++c) {
        const double dt = (hi.t[c] - lo.t[c]) / (2 * h);
        const double db = (hi.b[c] - lo.b[c]) / (2 * h);
        const double dn = (hi.n[c] - lo.n[c]) / (2 * h);
        worst = std::max({worst, std::abs(dt - v * k * mid.b[c]),
                          std::abs(db - v * (-k * mid.t[c] + t * mid.n[c])), std::abs(dn + v * t * mid.b[c])});
    }
    return worst;
}

/// Columns: s, Tx, Ty, Tz, Bx, By, Bz, Nx, Ny, Nz.
inline std::string frame_csv(const std::vector<double>& ss, const std::vector<Frame>& frames) {
    std::ostringstream os;
    os << "s,Tx,Ty,Tz,Bx,By,Bz,Nx,Ny,Nz\n";
    for (std::size_t n = 0; n < ss.size(); ++n) {
        os << format_real(ss[n]);
        for (const Vec3* v : {&frames[n].t, &frames[n].b, &frames[n].n})
            for (double c : *v) os << ',' << format_real(c);
        os << '\n';
    }
    return os.str();
}

}  // namespace qde::app
