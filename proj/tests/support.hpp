// Shared helpers for the test suites: seeded generators and comparisons.
#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "qde/qmatrix.hpp"
#include "qde/quat.hpp"

namespace qtest {

using qde::QMat;
using qde::Quat;
using qde::QVec;

class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double uniform(double lo = -1.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }

    Quat quat(double scale = 1.0) {
        return {scale * uniform(), scale * uniform(), scale * uniform(), scale * uniform()};
    }
    Quat nonzero_quat(double scale = 1.0) {
        Quat q;
        do q = quat(scale);
        while (qde::norm(q) < 0.1 * scale);
        return q;
    }
    Quat pure_unit() {
        Quat q;
        do q = {0.0, uniform(), uniform(), uniform()};
        while (qde::norm(q) < 0.1);
        return q / qde::norm(q);
    }
    QVec vec(std::size_t n, double scale = 1.0) {
        QVec v(n);
        for (std::size_t k = 0; k < n; ++k) v[k] = quat(scale);
        return v;
    }
    QMat mat(std::size_t r, std::size_t c, double scale = 1.0) {
        QMat m(r, c);
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < c; ++j) m(i, j) = quat(scale);
        return m;
    }

private:
    std::mt19937_64 gen_;
};

inline double diff(const Quat& a, const Quat& b) { return qde::norm(a - b); }

inline double diff(const QVec& a, const QVec& b) { return (a - b).norm(); }

/// Largest componentwise difference.
inline double diff(const QMat& a, const QMat& b) {
    double d = 0.0;
    for (std::size_t n = 0; n < a.entries().size(); ++n) {
        const auto x = a.entries()[n].components(), y = b.entries()[n].components();
        for (int c = 0; c < 4; ++c) d = std::max(d, std::abs(x[c] - y[c]));
    }
    return d;
}

}  // namespace qtest
