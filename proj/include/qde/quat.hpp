// quat.hpp
// Quaternion scalars q = w + xi + yj + zk with i² = j² = k² = ijk = -1.
//
// Multiplication is the Hamilton product: associative, not commutative.
// Values are immutable; every operation returns a fresh Quat.

#pragma once

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "qde/errors.hpp"

namespace qde {

struct Quat {
    double w = 0.0;  // scalar part
    double x = 0.0;  // i
    double y = 0.0;  // j
    double z = 0.0;  // k

    constexpr Quat() = default;
    constexpr Quat(double w_) : w(w_) {}  // NOLINT: reals embed implicitly
    constexpr Quat(double w_, double x_, double y_, double z_) : w(w_), x(x_), y(y_), z(z_) {}

    static constexpr Quat i() { return {0, 1, 0, 0}; }
    static constexpr Quat j() { return {0, 0, 1, 0}; }
    static constexpr Quat k() { return {0, 0, 0, 1}; }

    constexpr bool operator==(const Quat&) const = default;

    constexpr std::array<double, 4> components() const { return {w, x, y, z}; }
};

constexpr Quat operator+(const Quat& p, const Quat& q) {
    return {p.w + q.w, p.x + q.x, p.y + q.y, p.z + q.z};
}
constexpr Quat operator-(const Quat& p, const Quat& q) {
    return {p.w - q.w, p.x - q.x, p.y - q.y, p.z - q.z};
}
constexpr Quat operator-(const Quat& q) { return {-q.w, -q.x, -q.y, -q.z}; }

// Hamilton product
constexpr Quat operator*(const Quat& p, const Quat& q) {
    return {p.w * q.w - p.x * q.x - p.y * q.y - p.z * q.z,
            p.w * q.x + p.x * q.w + p.y * q.z - p.z * q.y,
            p.w * q.y - p.x * q.z + p.y * q.w + p.z * q.x,
            p.w * q.z + p.x * q.y - p.y * q.x + p.z * q.w};
}
constexpr Quat operator*(double s, const Quat& q) { return {s * q.w, s * q.x, s * q.y, s * q.z}; }
constexpr Quat operator*(const Quat& q, double s) { return s * q; }
constexpr Quat operator/(const Quat& q, double s) { return {q.w / s, q.x / s, q.y / s, q.z / s}; }

constexpr Quat mul(const Quat& p, const Quat& q) { return p * q; }

constexpr Quat conj(const Quat& q) { return {q.w, -q.x, -q.y, -q.z}; }
constexpr double norm2(const Quat& q) { return q.w * q.w + q.x * q.x + q.y * q.y + q.z * q.z; }
inline double norm(const Quat& q) { return std::hypot(std::hypot(q.w, q.x), std::hypot(q.y, q.z)); }
constexpr double re(const Quat& q) { return q.w; }
constexpr Quat im(const Quat& q) { return {0, q.x, q.y, q.z}; }

inline Quat inv(const Quat& q) {
    const double n2 = norm2(q);
    if (n2 == 0.0) throw DomainError("zero quaternion has no inverse");
    return conj(q) / n2;
}

/// pq - qp
constexpr Quat commutator(const Quat& p, const Quat& q) { return p * q - q * p; }

/// Threshold on |Im q| below which exp_quat uses the series limit of sin(r)/r.
inline constexpr double kPureEpsilon = 1e-12;

/// Euler form: exp(q) = e^{Re q} (cos r + sin(r) Im(q)/r), r = |Im q|.
inline Quat exp_quat(const Quat& q) {
    const double r = norm(im(q));
    const double scale = std::exp(q.w);
    // sin(r)/r = 1 - r²/6 + O(r⁴)
    const double sinc = r < kPureEpsilon ? 1.0 - r * r / 6.0 : std::sin(r) / r;
    return {scale * std::cos(r), scale * sinc * q.x, scale * sinc * q.y, scale * sinc * q.z};
}

/// Real number in 17 significant digits, '.' separator; shared by every text output.
inline std::string format_real(double v) {
    if (v == 0.0) return "0";  // also folds -0
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

/// Literal with terms in w, x, y, z order, zero terms omitted, "0" for zero.
inline std::string format_quat(const Quat& q) {
    static constexpr char kUnits[4] = {'\0', 'i', 'j', 'k'};
    const auto c = q.components();
    std::string out;
    for (int n = 0; n < 4; ++n) {
        if (c[n] == 0.0) continue;
        std::string mag = format_real(std::abs(c[n]));
        if (c[n] < 0) out += '-';
        else if (!out.empty()) out += '+';
        if (n == 0 || mag != "1") out += mag;
        if (n > 0) out += kUnits[n];
    }
    return out.empty() ? "0" : out;
}

/// Parses literals such as "1-2i+0.5k", "-j", "2k+1". Whitespace is ignored,
/// term order is free, a repeated unit (or repeated real term) is an error.
inline Quat parse_quat(std::string_view text) {
    std::string s;
    std::vector<std::size_t> origin;
    for (std::size_t n = 0; n < text.size(); ++n) {
        if (text[n] == ' ' || text[n] == '\t' || text[n] == '\n' || text[n] == '\r') continue;
        s += text[n];
        origin.push_back(n);
    }
    auto where = [&](std::size_t pos) { return pos < origin.size() ? origin[pos] : text.size(); };
    if (s.empty()) throw ParseError("empty quaternion literal", 0);

    std::array<double, 4> c{};
    std::array<bool, 4> seen{};
    std::size_t pos = 0;
    bool first = true;
    while (pos < s.size()) {
        double sign = 1.0;
        if (s[pos] == '+' || s[pos] == '-') {
            sign = s[pos] == '-' ? -1.0 : 1.0;
            ++pos;
        } else if (!first) {
            throw ParseError("expected '+' or '-' between terms", where(pos));
        }
        first = false;

        double mag = 1.0;
        bool has_number = false;
        if (pos < s.size() && (std::isdigit(static_cast<unsigned char>(s[pos])) || s[pos] == '.')) {
            auto res = std::from_chars(s.data() + pos, s.data() + s.size(), mag);
            if (res.ec != std::errc()) throw ParseError("malformed number", where(pos));
            pos = static_cast<std::size_t>(res.ptr - s.data());
            has_number = true;
        }
        int unit = 0;
        if (pos < s.size() && (s[pos] == 'i' || s[pos] == 'j' || s[pos] == 'k')) {
            unit = s[pos] == 'i' ? 1 : s[pos] == 'j' ? 2 : 3;
            ++pos;
        } else if (!has_number) {
            throw ParseError("expected a number or unit i|j|k", where(pos));
        }
        if (seen[unit]) throw ParseError("duplicate term for the same unit", where(pos - 1));
        seen[unit] = true;
        c[unit] = sign * mag;
    }
    return {c[0], c[1], c[2], c[3]};
}

}  // namespace qde
