// cli.hpp
// Command-line front end. run() is kept separate from main() so the test
// suites can drive it with an argument vector and capture its streams.
//
// Exit codes: 0 success, 2 input or parse errors (nothing written),
// 3 numerical failures or a breached --verify check.

#pragma once

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <future>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qde/analysis.hpp"
#include "qde/applications.hpp"
#include "qde/engine.hpp"
#include "qde/errors.hpp"
#include "qde/fixtures.hpp"
#include "qde/io.hpp"
#include "qde/qmatrix.hpp"
#include "qde/scenario.hpp"

namespace qde::cli {

class VerificationFailed : public Error {
public:
    using Error::Error;
    const char* name() const noexcept override { return "VerificationFailed"; }
    bool numerical() const noexcept override { return true; }
};

enum class LogLevel { Error = 0, Warn = 1, Info = 2, Debug = 3 };

/// Level from QDE_LOG (error|warn|info|debug), default warn.
inline LogLevel log_level_from_env() {
    const char* v = std::getenv("QDE_LOG");
    if (!v) return LogLevel::Warn;
    const std::string s(v);
    if (s == "error") return LogLevel::Error;
    if (s == "info") return LogLevel::Info;
    if (s == "debug") return LogLevel::Debug;
    return LogLevel::Warn;
}

struct Options {
    std::string matrix;
    std::string scenario;
    std::string family;
    std::string x0;
    std::string method = "auto";
    std::string out;
    std::string format = "csv";
    std::string preset;
    std::optional<double> t, t0, t1;
    std::optional<int> steps;
    bool verify = false;
    unsigned jobs = 1;
};

/// Accumulates verification metrics; every check is also reported in output.
class Checks {
public:
    void at_most(const std::string& name, double value, double limit) { add(name, value, value <= limit, "<=", limit); }
    void at_least(const std::string& name, double value, double limit) { add(name, value, value >= limit, ">=", limit); }

    bool passed() const { return failures_.empty(); }
    const std::vector<std::string>& lines() const { return lines_; }
    std::string failure_summary() const {
        std::string s;
        for (const auto& f : failures_) s += (s.empty() ? "" : "; ") + f;
        return s;
    }

private:
    void add(const std::string& name, double value, bool ok, const char* rel, double limit) {
        lines_.push_back(name + ": " + format_real(value) + " (" + rel + " " + format_real(limit) + ", " +
                         (ok ? "ok" : "FAIL") + ")");
        if (!ok) failures_.push_back(name);
    }
    std::vector<std::string> lines_;
    std::vector<std::string> failures_;
};

namespace detail {

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

/// Inline "a,b;c,d", or "@file" holding the line format or the JSON mirror.
inline QMat load_matrix(const std::string& spec) {
    if (spec.empty()) throw InputError("--matrix is required");
    if (spec.front() != '@') return io::parse_matrix_inline(spec);
    const std::string path = spec.substr(1);
    const std::string text = read_file(path);
    if (path.size() > 5 && path.substr(path.size() - 5) == ".json") {
        try {
            return io::matrix_from_json(nlohmann::json::parse(text));
        } catch (const nlohmann::json::exception& e) {
            throw InputError(std::string("matrix JSON: ") + e.what());
        }
    }
    return io::parse_matrix_text(text);
}

inline std::vector<double> grid(double a, double b, int steps) {
    std::vector<double> ts;
    for (int n = 0; n <= steps; ++n) ts.push_back(a + (b - a) * n / steps);
    return ts;
}

inline void append_checks(std::ostringstream& os, const Checks& checks) {
    for (const auto& l : checks.lines()) os << "# " << l << '\n';
}

inline double max_entry_diff(const QMat& a, const QMat& b) {
    double d = 0.0;
    for (std::size_t n = 0; n < a.entries().size(); ++n)
        for (int c = 0; c < 4; ++c)
            d = std::max(d, std::abs(a.entries()[n].components()[c] - b.entries()[n].components()[c]));
    return d;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Presets

struct PresetResult {
    std::string text;
    Checks checks;
};

inline PresetResult preset_example1(std::optional<double> t_opt) {
    const double t = t_opt.value_or(1.0);
    const QMat A = fixtures::coupled_axes();
    const double hi = std::max(2.0, t);
    const LinearQDE qde = LinearQDE::constant(A, 0.0, hi);
    const FundamentalMatrix fm = fundamental_numeric(qde, 0.0, static_cast<int>(std::lround(5000 * hi)));
    double worst = 0.0;
    for (double s : detail::grid(0.0, 2.0, 40))
        worst = std::max(worst, detail::max_entry_diff(fm(s), fixtures::coupled_axes_closed_form(s)));
    const auto report = liouville_check(qde, fm, 0.0, detail::grid(0.0, 2.0, 20));
    double drift = 0.0;
    for (double w : report.w_values) drift = std::max(drift, std::abs(w - report.w_values.front()));

    PresetResult r;
    std::ostringstream os;
    os << "preset: example1\nA:\n" << io::format_matrix(A) << "method: " << method_name(fm.method) << '\n'
       << "t: " << format_real(t) << "\nM_numeric:\n" << io::format_matrix(fm(t))
       << "M_closed_form:\n" << io::format_matrix(fixtures::coupled_axes_closed_form(t))
       << "ddet_M_t: " << format_real(ddet(fm(t))) << '\n';
    r.checks.at_most("max_closed_form_diff_0_2", worst, 1e-7);
    r.checks.at_most("wronskian_drift", drift, 1e-8);
    r.text = os.str();
    return r;
}

inline PresetResult preset_example2(std::optional<double> t_opt) {
    const double t = t_opt.value_or(1.0);
    const QMat A = fixtures::jordan_k();
    const auto fm = select_fundamental(A, MethodChoice::Split);
    PresetResult r;
    std::ostringstream os;
    os << "preset: example2\nA:\n" << io::format_matrix(A) << "method: " << method_name(fm.method) << '\n'
       << "t: " << format_real(t) << "\nM:\n" << io::format_matrix(fm(t));
    r.checks.at_most("closed_form_diff", detail::max_entry_diff(fm(t), fixtures::jordan_k_closed_form(t)), 1e-10);
    r.checks.at_most("expm_vs_series", detail::max_entry_diff(expm(A, t), expm_series(A, t)), 1e-10);
    r.checks.at_most("split_vs_expm", detail::max_entry_diff(fm(t), expm(A, t)), 1e-10);
    r.text = os.str();
    return r;
}

inline PresetResult preset_example3(std::optional<double> t_opt) {
    const double t = t_opt.value_or(0.5);
    const QMat A = fixtures::triangular_eigen();
    const auto pairs = right_eigenpairs(A);
    const auto fm = fundamental_eigen(A);
    const LinearQDE qde = LinearQDE::constant(A, -1.0, 3.0);
    double residual = 0.0, min_ddet = INFINITY;
    for (double s : interior_samples(0.0, 2.0, 16)) {
        residual = std::max(residual, fundamental_residual(qde, fm, s));
        min_ddet = std::min(min_ddet, std::abs(ddet(fm(s))));
    }
    PresetResult r;
    std::ostringstream os;
    os << "preset: example3\nA:\n" << io::format_matrix(A) << "method: " << method_name(fm.method) << '\n';
    for (std::size_t n = 0; n < pairs.size(); ++n)
        os << "lambda" << n + 1 << ": " << format_quat(pairs[n].lambda) << "\nvector" << n + 1 << ": "
           << io::format_vector(pairs[n].vector) << '\n';
    os << "t: " << format_real(t) << "\nM:\n" << io::format_matrix(fm(t));
    r.checks.at_most("residual", residual, 1e-7);
    r.checks.at_least("min_abs_ddet", min_ddet, 1e-3);
    r.checks.at_most("eigenline_1", distance_to_right_line(QVec{1.0, 0.0}, pairs.at(0).vector), 1e-8);
    r.checks.at_most("eigenline_2", distance_to_right_line(QVec{1.0, 1.0}, pairs.at(1).vector), 1e-8);
    r.text = os.str();
    return r;
}

inline PresetResult preset_counterexample(std::optional<double> t_opt) {
    const double t1 = t_opt.value_or(1.0);
    const auto ts = detail::grid(0.0, t1, 10);
    const LinearQDE diag = LinearQDE::constant(fixtures::split_axes(), -1.0, t1 + 1.0);
    const auto x1 = [](double s) { return QVec{exp_quat(s * fixtures::kI), 0.0}; };
    const auto right = module_structure_check(diag, x1, fixtures::kK, ts);
    QMat one(1, 1);
    one(0, 0) = fixtures::kI;
    const LinearQDE scalar = LinearQDE::constant(one, -1.0, t1 + 1.0);
    const auto x = [](double s) { return QVec{exp_quat(s * fixtures::kI)}; };
    const auto left = module_structure_check(scalar, x, fixtures::kJ, ts);
    PresetResult r;
    std::ostringstream os;
    os << "preset: counterexample\nsystem: diag(i,j)\nsolution: (e^{it},0)\n"
       << "right_multiplier: k\nright_residual: " << format_real(right.right_residual) << '\n'
       << "scalar_system: x' = i x\nleft_multiplier: j\nleft_residual: " << format_real(left.left_residual) << '\n';
    r.checks.at_most("right_residual", right.right_residual, 1e-6);
    r.checks.at_least("left_residual", left.left_residual, 0.5);
    r.checks.at_most("left_residual_vs_2", std::abs(left.left_residual - 2.0) / 2.0, 0.1);
    r.text = os.str();
    return r;
}

inline PresetResult preset_frenet_helix(std::optional<double> t_opt) {
    const double s_end = t_opt.value_or(2.0);
    const auto geom = app::helix(1.0, 1.0, 0.5);
    const LinearQDE qde = app::frenet_qde(geom, 0.0, s_end);
    const Trajectory traj = solve_ivp({qde, 0.0, app::state_from_quat(1.0)}, s_end,
                                      std::max(1, static_cast<int>(std::lround(1e4 * s_end))));
    auto frame = [&](double s) { return app::frame_from_quat(app::quat_from_state(traj(s))); };
    double residual = 0.0, norm_defect = 0.0, ortho = 0.0;
    for (double s : interior_samples(0.0, s_end, 16)) residual = std::max(residual, app::frenet_residual(geom, frame, s));
    for (const auto& x : traj.xs()) norm_defect = std::max(norm_defect, std::abs(x.norm() - 1.0));
    std::vector<double> ss = detail::grid(0.0, s_end, 10);
    std::vector<app::Frame> frames;
    for (double s : ss) {
        frames.push_back(frame(s));
        ortho = std::max(ortho, app::orthonormality_defect(frames.back()));
    }
    PresetResult r;
    r.text = "preset: frenet-helix\nspeed: 1\ncurvature: 1\ntorsion: 0.5\n" + app::frame_csv(ss, frames);
    r.checks.at_most("frame_residual", residual, 1e-6);
    r.checks.at_most("norm_defect", norm_defect, 1e-8);
    r.checks.at_most("orthonormality_defect", ortho, 1e-6);
    return r;
}

inline PresetResult preset_attitude_spin(std::optional<double> t_opt) {
    const double t = t_opt.value_or(1.0);
    const auto rates = app::constant_rates({0.0, 0.0, 1.0});
    const int steps = std::max(1, static_cast<int>(std::lround(1e4 * std::abs(t))));
    const auto samples = app::propagate_attitude(rates, 1.0, 0.0, t, steps);
    const auto omega = app::propagate_attitude_omega(rates, 1.0, 0.0, t, steps);
    const Quat expected = app::axis_angle_quat({0, 0, 1}, t);
    const Quat got = t >= 0 ? samples.back().q : samples.front().q;
    double norm_defect = 0.0, form_gap = 0.0;
    for (std::size_t n = 0; n < samples.size(); ++n) {
        norm_defect = std::max(norm_defect, std::abs(norm(samples[n].q) - 1.0));
        for (const app::Vec3& v : {app::Vec3{1, 0, 0}, app::Vec3{0, 1, 0}, app::Vec3{0, 0, 1}}) {
            const auto a = app::rotate(samples[n].q, v), b = app::rotate(omega[n].q, v);
            for (int c = 0; c < 3; ++c) form_gap = std::max(form_gap, std::abs(a[c] - b[c]));
        }
    }
    std::vector<app::AttitudeSample> coarse;
    const std::size_t stride = std::max<std::size_t>(1, (samples.size() - 1) / 10);
    for (std::size_t n = 0; n < samples.size(); n += stride) coarse.push_back(samples[n]);
    PresetResult r;
    r.text = "preset: attitude-spin\nomega: 0,0,1\n" + app::attitude_csv(coarse);
    r.checks.at_most("axis_angle_diff", norm(got - expected), 1e-8);
    r.checks.at_most("norm_defect", norm_defect, 1e-8);
    r.checks.at_most("omega_form_rotation_gap", form_gap, 1e-8);
    return r;
}

inline const std::map<std::string, std::function<PresetResult(std::optional<double>)>>& presets() {
    static const std::map<std::string, std::function<PresetResult(std::optional<double>)>> table{
        {"example1", preset_example1},         {"example2", preset_example2},
        {"example3", preset_example3},         {"counterexample", preset_counterexample},
        {"frenet-helix", preset_frenet_helix}, {"attitude-spin", preset_attitude_spin}};
    return table;
}

inline const std::vector<std::string>& preset_order() {
    static const std::vector<std::string> order{"example1",       "example2",     "example3",
                                                "counterexample", "frenet-helix", "attitude-spin"};
    return order;
}

// ---------------------------------------------------------------------------
// Verbs

namespace detail {

inline void finish(Checks& checks, const Options& o, std::ostringstream& os) {
    if (!o.verify) return;
    if (o.format == "csv") append_checks(os, checks);
}

inline std::string verb_exp(const Options& o, Checks& checks) {
    const QMat A = load_matrix(o.matrix);
    const double t = o.t.value_or(1.0);
    const QMat e = expm(A, t);
    if (o.verify)
        checks.at_most("expm_vs_series", max_entry_diff(e, expm_series(A, t)) / std::max(1.0, e.norm()), 1e-10);
    std::ostringstream os;
    if (o.format == "json") {
        nlohmann::json j = io::matrix_to_json(e);
        j["t"] = t;
        os << j.dump() << '\n';
    } else {
        os << io::format_matrix(e);
    }
    finish(checks, o, os);
    return os.str();
}

inline std::string verb_solve(const Options& o, Checks& checks) {
    Scenario s;
    if (!o.scenario.empty()) {
        try {
            s = parse_scenario(nlohmann::json::parse(read_file(o.scenario)));
        } catch (const nlohmann::json::exception& e) {
            throw InputError(std::string("scenario: ") + e.what());
        }
    } else {
        if (o.matrix.empty() == o.family.empty()) throw InputError("give exactly one of --matrix or --family");
        if (!o.matrix.empty()) s.A = load_matrix(o.matrix);
        else s.family = o.family;
        if (o.x0.empty()) throw InputError("--x0 is required");
        s.x0 = io::parse_vector(o.x0);
        s.dim = s.x0.dim();
        if (s.A && (s.A->rows() != s.dim || !s.A->square())) throw DimensionMismatch("x0 does not match the matrix");
        s.t0 = o.t0.value_or(0.0);
        s.t_end = o.t1.value_or(1.0);
        s.steps = o.steps.value_or(std::max(1, static_cast<int>(std::lround(1e4 * std::abs(s.t_end - s.t0)))));
        s.method = parse_method(o.method);
        if (!s.A && s.method != MethodChoice::Auto && s.method != MethodChoice::Numeric)
            throw InputError("time-varying systems support only the numeric method");
    }
    if (s.steps < 1) throw InputError("steps must be at least 1");
    const ScenarioResult res = run_scenario(s);
    if (o.verify) {
        // Cross-check against RK4 at twice the resolution.
        const double lo = std::min(s.t0, s.t_end), hi = std::max(s.t0, s.t_end);
        const LinearQDE qde = s.A ? LinearQDE::constant(*s.A, lo, hi) : builtin_family(s.family, lo, hi);
        const Trajectory ref = solve_ivp({qde, s.t0, s.x0}, s.t_end, 2 * std::max(s.steps, 100));
        double worst = 0.0;
        for (std::size_t n = 0; n < res.ts.size(); ++n)
            worst = std::max(worst, (res.xs[n] - ref(res.ts[n])).norm() / std::max(1.0, ref(res.ts[n]).norm()));
        checks.at_most("oracle_diff", worst, 1e-6);
    }
    std::ostringstream os;
    if (o.format == "json") {
        nlohmann::json j;
        j["method"] = res.method;
        j["t"] = res.ts;
        nlohmann::json xs = nlohmann::json::array();
        for (const auto& x : res.xs) {
            nlohmann::json row = nlohmann::json::array();
            for (const auto& q : x.entries()) row.push_back({q.w, q.x, q.y, q.z});
            xs.push_back(row);
        }
        j["x"] = xs;
        os << j.dump() << '\n';
    } else {
        os << io::trajectory_csv(res.ts, res.xs);
    }
    finish(checks, o, os);
    return os.str();
}

inline std::vector<double> requested_times(const Options& o, double default_t) {
    if (o.t) return {*o.t};
    if (o.t0 || o.t1) return grid(o.t0.value_or(0.0), o.t1.value_or(1.0), o.steps.value_or(10));
    return {default_t};
}

inline std::string verb_fund(const Options& o, Checks& checks, std::ostream& log, LogLevel level) {
    const QMat A = load_matrix(o.matrix);
    if (!A.square()) throw NonSquare("coefficient matrix must be square");
    const auto ts = requested_times(o, 1.0);
    const double lo = std::min(0.0, *std::min_element(ts.begin(), ts.end()));
    const double hi = std::max(1.0, *std::max_element(ts.begin(), ts.end()));
    const FundamentalMatrix fm = select_fundamental(A, parse_method(o.method), lo - 0.01, hi + 0.01);
    if (level >= LogLevel::Info) log << "[info] fundamental matrix via " << method_name(fm.method) << '\n';
    if (o.verify) {
        const LinearQDE qde = LinearQDE::constant(A, lo - 1.0, hi + 1.0);
        double residual = 0.0, min_ddet = INFINITY;
        for (double s : interior_samples(lo, hi, 16)) {
            residual = std::max(residual, fundamental_residual(qde, fm, s) / std::max(1.0, fm(s).norm()));
            const QMat m = fm(s);
            min_ddet = std::min(min_ddet, std::abs(ddet(m)) / singular_threshold(m));
        }
        checks.at_most("residual", residual, 1e-6);
        checks.at_least("ddet_over_threshold", min_ddet, 1.0);
    }
    std::ostringstream os;
    if (o.format == "json") {
        nlohmann::json j;
        j["method"] = method_name(fm.method);
        j["certificate"] = fm.certificate;
        j["samples"] = nlohmann::json::array();
        for (double t : ts) j["samples"].push_back({{"t", t}, {"M", io::matrix_to_json(fm(t))}});
        os << j.dump() << '\n';
    } else {
        os << "t,method";
        for (std::size_t r = 1; r <= A.rows(); ++r)
            for (std::size_t c = 1; c <= A.cols(); ++c) os << ",m" << r << c;
        os << '\n';
        for (double t : ts) {
            os << format_real(t) << ',' << method_name(fm.method);
            const QMat m = fm(t);
            for (const auto& q : m.entries()) os << ',' << format_quat(q);
            os << '\n';
        }
    }
    finish(checks, o, os);
    return os.str();
}

inline std::string verb_eig(const Options& o, Checks& checks) {
    const QMat A = load_matrix(o.matrix);
    const auto pairs = right_eigenpairs(A);
    if (o.verify) {
        double worst = 0.0;
        for (const auto& p : pairs) worst = std::max(worst, p.residual);
        checks.at_most("max_residual", worst, 1e-8);
        checks.at_least("pair_count", static_cast<double>(pairs.size()), static_cast<double>(A.rows()));
    }
    std::ostringstream os;
    if (o.format == "json") {
        nlohmann::json j = nlohmann::json::array();
        for (const auto& p : pairs) {
            nlohmann::json v = nlohmann::json::array();
            for (const auto& q : p.vector.entries()) v.push_back({q.w, q.x, q.y, q.z});
            j.push_back({{"lambda", {p.lambda.w, p.lambda.x, p.lambda.y, p.lambda.z}}, {"vector", v},
                         {"residual", p.residual}});
        }
        os << j.dump() << '\n';
    } else {
        os << "index,lambda,vector,residual\n";
        for (std::size_t n = 0; n < pairs.size(); ++n) {
            std::string v = io::format_vector(pairs[n].vector);
            std::replace(v.begin(), v.end(), ',', ';');
            os << n + 1 << ',' << format_quat(pairs[n].lambda) << ',' << v << ','
               << format_real(pairs[n].residual) << '\n';
        }
    }
    finish(checks, o, os);
    return os.str();
}

struct SystemAndFundamental {
    LinearQDE qde;
    FundamentalMatrix fm;
};

inline SystemAndFundamental load_system(const Options& o, double lo, double hi) {
    if (o.matrix.empty() == o.family.empty()) throw InputError("give exactly one of --matrix or --family");
    if (!o.matrix.empty()) {
        const QMat A = load_matrix(o.matrix);
        if (!A.square()) throw NonSquare("coefficient matrix must be square");
        return {LinearQDE::constant(A, lo - 1.0, hi + 1.0),
                select_fundamental(A, parse_method(o.method), lo - 0.01, hi + 0.01)};
    }
    const MethodChoice m = parse_method(o.method);
    if (m != MethodChoice::Auto && m != MethodChoice::Numeric)
        throw InputError("time-varying systems support only the numeric method");
    const LinearQDE qde = builtin_family(o.family, lo, hi);
    const int steps = std::max(1, static_cast<int>(std::lround(1e4 * (hi - lo))));
    return {qde, fundamental_numeric(qde, lo, steps)};
}

inline std::string verb_wronskian(const Options& o, Checks& checks) {
    const double t0 = o.t0.value_or(0.0), t1 = o.t1.value_or(1.0);
    if (!(t1 > t0)) throw InputError("--t1 must exceed --t0");
    const auto sys = load_system(o, t0, t1);
    const auto ts = grid(t0, t1, o.steps.value_or(10));
    std::vector<double> ws;
    for (double t : ts) ws.push_back(ddet(sys.fm(t)));
    if (o.verify) {
        double smallest = INFINITY;
        for (std::size_t n = 0; n < ts.size(); ++n)
            smallest = std::min(smallest, std::abs(ws[n]) / singular_threshold(sys.fm(ts[n])));
        checks.at_least("wronskian_over_threshold", smallest, 1.0);
    }
    std::ostringstream os;
    if (o.format == "json") {
        os << nlohmann::json{{"t", ts}, {"w", ws}}.dump() << '\n';
    } else {
        os << "t,w\n";
        for (std::size_t n = 0; n < ts.size(); ++n) os << format_real(ts[n]) << ',' << format_real(ws[n]) << '\n';
    }
    finish(checks, o, os);
    return os.str();
}

inline std::string verb_liouville(const Options& o, Checks& checks) {
    const double t0 = o.t0.value_or(0.0), t1 = o.t1.value_or(1.0);
    if (!(t1 > t0)) throw InputError("--t1 must exceed --t0");
    const auto sys = load_system(o, t0, t1);
    if (sys.qde.dim != 2) throw DimensionMismatch("liouville needs a 2x2 system");
    const auto report = liouville_check(sys.qde, sys.fm, t0, grid(t0, t1, o.steps.value_or(10)));
    if (o.verify) checks.at_most("max_rel_err", report.max_rel_err, 1e-6);
    std::ostringstream os;
    if (o.format == "json") {
        os << nlohmann::json{{"t", report.t_samples},
                             {"w_direct", report.w_values},
                             {"w_formula", report.formula_values},
                             {"max_rel_err", report.max_rel_err}}
                  .dump()
           << '\n';
    } else {
        os << report.to_csv();
    }
    finish(checks, o, os);
    return os.str();
}

inline std::string verb_preset(const Options& o, Checks& checks) {
    std::vector<std::string> names;
    if (o.preset == "all") names = preset_order();
    else if (presets().count(o.preset)) names = {o.preset};
    else throw InputError("unknown preset '" + o.preset + "'");

    std::vector<PresetResult> results(names.size());
    if (o.jobs > 1 && names.size() > 1) {
        std::vector<std::future<PresetResult>> pending;
        for (const auto& n : names) pending.push_back(std::async(std::launch::async, presets().at(n), o.t));
        for (std::size_t k = 0; k < names.size(); ++k) results[k] = pending[k].get();
    } else {
        for (std::size_t k = 0; k < names.size(); ++k) results[k] = presets().at(names[k])(o.t);
    }
    std::ostringstream os;
    for (std::size_t k = 0; k < names.size(); ++k) {
        if (k) os << '\n';
        os << results[k].text;
        for (const auto& l : results[k].checks.lines()) os << "check " << l << '\n';
        if (!o.verify) continue;
        if (!results[k].checks.passed()) checks.at_most(names[k] + " failed checks", 1.0, 0.0);
    }
    return os.str();
}

}  // namespace detail

/// Runs one command. args excludes the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    const LogLevel level = log_level_from_env();
    Options o;
    CLI::App app{"Linear quaternion differential equations: exponentials, fundamental matrices, Wronskians"};
    app.require_subcommand(1);

    auto add_common = [&o](CLI::App* sub) {
        sub->add_option("--matrix", o.matrix, "matrix: inline 'a,b;c,d' or @file (.json for the JSON mirror)");
        sub->add_option("--x0", o.x0, "initial vector, comma-separated literals");
        sub->add_option("--t0", o.t0, "start time");
        sub->add_option("--t1", o.t1, "end time");
        sub->add_option("--t", o.t, "single evaluation time");
        sub->add_option("--steps", o.steps, "step or sample count");
        sub->add_option("--method", o.method, "auto|numeric|expm|split|jordan|eigen");
        sub->add_option("--out", o.out, "write output to FILE instead of stdout");
        sub->add_option("--format", o.format, "csv|json")->check(CLI::IsMember({"csv", "json"}));
        sub->add_flag("--verify", o.verify, "compute residual checks, exit 3 on breach");
        sub->add_option("--jobs", o.jobs, "parallel jobs for batch verbs")->check(CLI::Range(1u, 256u));
        sub->add_option("--family", o.family, "builtin time-varying coefficient family (diag-cos|rotating|oscillator)");
    };
    auto* exp_cmd = app.add_subcommand("exp", "matrix exponential exp(A t)");
    auto* solve_cmd = app.add_subcommand("solve", "solve an initial value problem");
    auto* fund_cmd = app.add_subcommand("fund", "fundamental matrix of x' = A x");
    auto* eig_cmd = app.add_subcommand("eig", "right eigenpairs A q = q lambda");
    auto* wr_cmd = app.add_subcommand("wronskian", "Wronskian ddet M(t) along a fundamental matrix");
    auto* li_cmd = app.add_subcommand("liouville", "compare the Wronskian with the Liouville formula");
    auto* pre_cmd = app.add_subcommand("preset", "run a built-in worked example");
    for (auto* sub : {exp_cmd, solve_cmd, fund_cmd, eig_cmd, wr_cmd, li_cmd, pre_cmd}) add_common(sub);
    solve_cmd->add_option("--scenario", o.scenario, "scenario JSON file");
    pre_cmd->add_option("name", o.preset, "example1|example2|example3|counterexample|frenet-helix|attitude-spin|all")
        ->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: ParseError: " << e.what() << '\n';
        return 2;
    }

    Checks checks;
    std::string result;
    try {
        if (*exp_cmd) result = detail::verb_exp(o, checks);
        else if (*solve_cmd) result = detail::verb_solve(o, checks);
        else if (*fund_cmd) result = detail::verb_fund(o, checks, err, level);
        else if (*eig_cmd) result = detail::verb_eig(o, checks);
        else if (*wr_cmd) result = detail::verb_wronskian(o, checks);
        else if (*li_cmd) result = detail::verb_liouville(o, checks);
        else if (*pre_cmd) result = detail::verb_preset(o, checks);
    } catch (const Error& e) {
        err << "error: " << e.name() << ": " << e.what() << '\n';
        return e.numerical() ? 3 : 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }

    if (o.out.empty()) {
        out << result;
    } else {
        std::ofstream f(o.out, std::ios::binary);
        if (!f) {
            err << "error: InputError: cannot write '" << o.out << "'\n";
            return 2;
        }
        f << result;
    }
    if (o.verify && !checks.passed()) {
        err << "error: VerificationFailed: " << checks.failure_summary() << '\n';
        return 3;
    }
    if (level >= LogLevel::Info && o.verify) err << "[info] all checks passed\n";
    return 0;
}

}  // namespace qde::cli
