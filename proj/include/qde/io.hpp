// io.hpp
// Text formats: inline and file matrix syntax built on quaternion literals,
// the JSON matrix mirror, and trajectory CSV.

#pragma once

#include <cstddef>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "qde/engine.hpp"
#include "qde/errors.hpp"
#include "qde/qmatrix.hpp"
#include "qde/quat.hpp"

namespace qde::io {

namespace detail {

inline std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline bool blank(std::string_view s) { return s.find_first_not_of(" \t\r\n") == std::string_view::npos; }

inline Quat parse_entry(std::string_view cell, std::size_t base) {
    try {
        return parse_quat(cell);
    } catch (const ParseError& e) {
        throw ParseError("bad matrix entry '" + std::string(cell) + "'", base + e.offset());
    }
}

inline QMat parse_rows(std::string_view text, char row_sep) {
    std::vector<std::vector<Quat>> rows;
    std::size_t offset = 0;
    for (auto line : split(text, row_sep)) {
        const std::size_t line_start = offset;
        offset += line.size() + 1;
        if (row_sep == '\n' && blank(line)) continue;
        std::vector<Quat> row;
        std::size_t cell_start = line_start;
        for (auto cell : split(line, ',')) {
            row.push_back(parse_entry(cell, cell_start));
            cell_start += cell.size() + 1;
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw ParseError("row has " + std::to_string(row.size()) + " entries, expected " +
                                 std::to_string(rows.front().size()),
                             line_start);
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParseError("empty matrix", 0);
    std::vector<Quat> flat;
    for (auto& r : rows) flat.insert(flat.end(), r.begin(), r.end());
    return QMat(rows.size(), rows.front().size(), std::move(flat));
}

}  // namespace detail

/// "k,1;0,k": entries separated by commas, rows by semicolons.
inline QMat parse_matrix_inline(std::string_view text) { return detail::parse_rows(text, ';'); }

/// One row per line, comma-separated entries; blank lines are skipped.
inline QMat parse_matrix_text(std::string_view text) { return detail::parse_rows(text, '\n'); }

/// "1,i" or "1;i": one literal per component.
inline QVec parse_vector(std::string_view text) {
    const char sep = text.find(';') != std::string_view::npos ? ';' : ',';
    std::vector<Quat> v;
    std::size_t offset = 0;
    for (auto cell : detail::split(text, sep)) {
        v.push_back(detail::parse_entry(cell, offset));
        offset += cell.size() + 1;
    }
    return QVec(std::move(v));
}

inline std::string format_matrix(const QMat& m) {
    std::ostringstream os;
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) os << (c ? "," : "") << format_quat(m(r, c));
        os << '\n';
    }
    return os.str();
}

inline std::string format_vector(const QVec& v) {
    std::string out;
    for (std::size_t k = 0; k < v.dim(); ++k) out += (k ? "," : "") + format_quat(v[k]);
    return out;
}

/// {"rows": n, "cols": m, "entries": [[w, x, y, z], ...]} in row-major order.
inline nlohmann::json matrix_to_json(const QMat& m) {
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& q : m.entries()) entries.push_back({q.w, q.x, q.y, q.z});
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"entries", entries}};
}

inline QMat matrix_from_json(const nlohmann::json& j) {
    try {
        const auto rows = j.at("rows").get<std::size_t>();
        const auto cols = j.at("cols").get<std::size_t>();
        const auto& entries = j.at("entries");
        if (!entries.is_array() || entries.size() != rows * cols)
            throw InputError("matrix JSON: entries must hold rows*cols quaternions");
        std::vector<Quat> flat;
        for (const auto& e : entries) {
            if (!e.is_array() || e.size() != 4) throw InputError("matrix JSON: each entry is [w,x,y,z]");
            flat.emplace_back(e[0].get<double>(), e[1].get<double>(), e[2].get<double>(), e[3].get<double>());
        }
        return QMat(rows, cols, std::move(flat));
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("matrix JSON: ") + e.what());
    }
}

/// Columns: t, then w,x,y,z for every component.
inline std::string trajectory_csv(const std::vector<double>& ts, const std::vector<QVec>& xs) {
    std::ostringstream os;
    os << 't';
    const std::size_t n = xs.empty() ? 0 : xs.front().dim();
    for (std::size_t k = 1; k <= n; ++k)
        for (const char* c : {"w", "x", "y", "z"}) os << ",x" << k << '_' << c;
    os << '\n';
    for (std::size_t r = 0; r < ts.size(); ++r) {
        os << format_real(ts[r]);
        for (const auto& q : xs[r].entries())
            os << ',' << format_real(q.w) << ',' << format_real(q.x) << ',' << format_real(q.y) << ','
               << format_real(q.z);
        os << '\n';
    }
    return os.str();
}

inline std::string trajectory_csv(const Trajectory& traj) { return trajectory_csv(traj.ts(), traj.xs()); }

}  // namespace qde::io
