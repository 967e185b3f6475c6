// scenario.hpp
// JSON scenario files and the method dispatcher shared by the CLI.
//
//   {"dim": 2, "A": [["k","1"],["0","k"]] | "k,1;0,k", "A_t": "<builtin>",
//    "t0": 0, "x0": ["1","1"], "t_end": 1, "steps": 100,
//    "method": "auto|numeric|expm|split|eigen"}

#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qde/engine.hpp"
#include "qde/errors.hpp"
#include "qde/io.hpp"
#include "qde/qmatrix.hpp"

namespace qde {

enum class MethodChoice { Auto, Numeric, Expm, Split, Jordan, Eigen };

inline MethodChoice parse_method(const std::string& s) {
    static const std::map<std::string, MethodChoice> table{{"auto", MethodChoice::Auto},
                                                           {"numeric", MethodChoice::Numeric},
                                                           {"expm", MethodChoice::Expm},
                                                           {"split", MethodChoice::Split},
                                                           {"jordan", MethodChoice::Jordan},
                                                           {"eigen", MethodChoice::Eigen}};
    auto it = table.find(s);
    if (it == table.end()) throw InputError("unknown method '" + s + "'");
    return it->second;
}

/// Fundamental matrix of ẋ = A x. Auto tries split, then eigen, then expm.
/// The numeric route integrates over [a, b] ∋ 0 at `steps_per_unit`.
inline FundamentalMatrix select_fundamental(const QMat& A, MethodChoice choice, double a = 0.0, double b = 1.0,
                                            int steps_per_unit = 10000) {
    switch (choice) {
        case MethodChoice::Numeric: {
            a = std::min(a, 0.0);
            b = std::max(b, 0.0);
            if (a == b) b = a + 1.0;
            const int steps = std::max(1, static_cast<int>(std::lround(steps_per_unit * (b - a))));
            return fundamental_numeric(LinearQDE::constant(A, a, b), 0.0, steps);
        }
        case MethodChoice::Expm: return fundamental_constant(A);
        case MethodChoice::Split: {
            auto fm = fundamental_split(A);
            if (!fm) throw ConditionViolated("diagonal and nilpotent parts do not commute");
            return *fm;
        }
        case MethodChoice::Jordan: {
            auto fm = fundamental_jordan(A);
            if (!fm) throw ConditionViolated("matrix is not a single Jordan block");
            return *fm;
        }
        case MethodChoice::Eigen: return fundamental_eigen(A);
        case MethodChoice::Auto:
            if (auto fm = fundamental_split(A)) return *fm;
            try {
                return fundamental_eigen(A);
            } catch (const DefectiveMatrix&) {
            } catch (const ResidualTooLarge&) {
            }
            return fundamental_constant(A);
    }
    throw InputError("unhandled method");
}

/// Named time-varying 2×2 coefficient families usable as "A_t".
inline LinearQDE builtin_family(const std::string& name, double a, double b) {
    const Quat i = Quat::i(), j = Quat::j(), k = Quat::k();
    if (name == "diag-cos")
        return {2, [=](double t) { return QMat{{i * std::cos(t), 0.0}, {0.0, j * std::cos(t)}}; }, a, b, name};
    if (name == "rotating")
        return {2, [=](double t) { return QMat{{i * std::cos(t), 1.0}, {k * 0.5, j * std::sin(t)}}; }, a, b, name};
    if (name == "oscillator")
        return second_order_reduce([=](double) { return 0.1 * i; },
                                   [=](double t) { return 1.0 + 0.5 * std::cos(t) * j; }, a, b);
    throw InputError("unknown builtin coefficient family '" + name + "'");
}

struct Scenario {
    std::size_t dim = 0;
    std::optional<QMat> A;
    std::string family;
    double t0 = 0.0;
    QVec x0;
    double t_end = 1.0;
    int steps = 100;
    MethodChoice method = MethodChoice::Auto;
};

inline Scenario parse_scenario(const nlohmann::json& j) {
    Scenario s;
    try {
        s.dim = j.at("dim").get<std::size_t>();
        if (j.contains("A") == j.contains("A_t")) throw InputError("scenario needs exactly one of A or A_t");
        if (j.contains("A")) {
            const auto& a = j.at("A");
            if (a.is_string()) s.A = io::parse_matrix_inline(a.get<std::string>());
            else if (a.is_object()) s.A = io::matrix_from_json(a);
            else {
                std::string text;
                for (const auto& row : a) {
                    std::string line;
                    for (const auto& e : row) line += (line.empty() ? "" : ",") + e.get<std::string>();
                    text += line + ";";
                }
                if (!text.empty()) text.pop_back();
                s.A = io::parse_matrix_inline(text);
            }
            if (s.A->rows() != s.dim || s.A->cols() != s.dim) throw DimensionMismatch("A does not match dim");
        } else {
            s.family = j.at("A_t").get<std::string>();
        }
        s.t0 = j.value("t0", 0.0);
        const auto& x0 = j.at("x0");
        if (x0.is_string()) s.x0 = io::parse_vector(x0.get<std::string>());
        else {
            std::vector<Quat> v;
            for (const auto& e : x0) v.push_back(parse_quat(e.get<std::string>()));
            s.x0 = QVec(std::move(v));
        }
        if (s.x0.dim() != s.dim) throw DimensionMismatch("x0 does not match dim");
        s.t_end = j.at("t_end").get<double>();
        s.steps = j.value("steps", 100);
        if (s.steps < 1) throw InputError("steps must be at least 1");
        s.method = parse_method(j.value("method", std::string("auto")));
        if (!s.A && s.method != MethodChoice::Auto && s.method != MethodChoice::Numeric)
            throw InputError("time-varying scenarios support only the numeric method");
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("scenario: ") + e.what());
    }
    return s;
}

struct ScenarioResult {
    std::vector<double> ts;
    std::vector<QVec> xs;
    std::string method;
};

/// x(t) on steps+1 uniform nodes from t0 to t_end. Closed forms use
/// x(t) = M(t) M(t0)⁻¹ x0.
inline ScenarioResult run_scenario(const Scenario& s) {
    const double lo = std::min(s.t0, s.t_end), hi = std::max(s.t0, s.t_end);
    ScenarioResult out;
    if (!s.A || s.method == MethodChoice::Numeric) {
        const LinearQDE qde = s.A ? LinearQDE::constant(*s.A, lo, hi) : builtin_family(s.family, lo, hi);
        if (qde.dim != s.dim) throw DimensionMismatch("builtin family dimension differs from dim");
        const Trajectory traj = solve_ivp({qde, s.t0, s.x0}, s.t_end, s.steps);
        out.ts = traj.ts();
        out.xs = traj.xs();
        out.method = method_name(Method::NumericColumns);
        return out;
    }
    const FundamentalMatrix fm = select_fundamental(*s.A, s.method, lo, hi);
    const QVec coeff = inverse(fm(s.t0)) * s.x0;
    for (int n = 0; n <= s.steps; ++n) {
        const double t = s.t0 + (s.t_end - s.t0) * n / s.steps;
        out.ts.push_back(t);
        out.xs.push_back(fm(t) * coeff);
    }
    if (s.t_end < s.t0) {
        std::reverse(out.ts.begin(), out.ts.end());
        std::reverse(out.xs.begin(), out.xs.end());
    }
    out.method = method_name(fm.method);
    return out;
}

}  // namespace qde
