#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "qde/errors.hpp"
#include "qde/quat.hpp"
#include "support.hpp"

using namespace qde;
using qtest::diff;

namespace {

const Quat I = Quat::i(), J = Quat::j(), K = Quat::k();

// Oracle: truncated power series, stopped once a term drops below 1e-18.
Quat exp_series(const Quat& q) {
    Quat sum = 1.0, term = 1.0;
    for (int n = 1; n < 200 && norm(term) >= 1e-18; ++n) {
        term = term * q / static_cast<double>(n);
        sum = sum + term;
    }
    return sum;
}

}  // namespace

TEST(QuatProduct, UnitTable) {
    EXPECT_EQ(I * J, K);
    EXPECT_EQ(J * I, -K);
    EXPECT_EQ(J * K, I);
    EXPECT_EQ(K * I, J);
    EXPECT_EQ(I * I, Quat(-1.0));
    EXPECT_EQ(I * J * K, Quat(-1.0));
}

TEST(QuatProduct, IdentityAndHandExpansion) {
    const Quat q{0.5, -2, 3, 1.25};
    EXPECT_EQ(mul(1.0, q), q);
    EXPECT_EQ(mul(q, 1.0), q);
    EXPECT_EQ((1.0 + I) * (1.0 + J), Quat(1, 1, 1, 1));
}

TEST(QuatBasics, ConjNormInverse) {
    EXPECT_EQ(conj(Quat(1, 2, 3, 4)), Quat(1, -2, -3, -4));
    EXPECT_DOUBLE_EQ(norm(Quat(1, 1, 1, 1)), 2.0);
    EXPECT_EQ(inv(I), -I);
    EXPECT_DOUBLE_EQ(re(Quat(1, 2, 3, 4)), 1.0);
    EXPECT_EQ(im(Quat(1, 2, 3, 4)), Quat(0, 2, 3, 4));
    const Quat q{0.3, -1.2, 0.7, 2.0};
    EXPECT_LT(diff(q * inv(q), 1.0), 1e-15);
    EXPECT_LT(diff(inv(q) * q, 1.0), 1e-15);
    EXPECT_LT(diff(conj(q) * q, norm2(q)), 1e-14);
}

TEST(QuatBasics, InverseOfZeroIsDomainError) {
    try {
        (void)inv(Quat{});
        FAIL() << "expected DomainError";
    } catch (const DomainError& e) {
        EXPECT_STREQ(e.what(), "zero quaternion has no inverse");
        EXPECT_STREQ(e.name(), "DomainError");
    }
}

TEST(QuatExp, EulerFormValues) {
    EXPECT_EQ(exp_quat(0.0), Quat(1.0));
    EXPECT_LT(diff(exp_quat(std::numbers::pi * I), -1.0), 1e-15);
    EXPECT_LT(diff(exp_quat(0.5 * std::numbers::pi * I), I), 1e-15);
}

TEST(QuatExp, MatchesSeriesOracle) {
    const Quat q{0.3, 0.4, -0.2, 0.1};
    EXPECT_LT(diff(exp_quat(q), exp_series(q)), 1e-12);
}

TEST(QuatExp, TinyImaginaryPartUsesSeriesLimit) {
    const Quat q{0.2, 1e-14, -2e-14, 0.0};
    const Quat e = exp_quat(q);
    EXPECT_TRUE(std::isfinite(e.w) && std::isfinite(e.x));
    EXPECT_NEAR(e.w, std::exp(0.2), 1e-15);
    EXPECT_NEAR(e.x, std::exp(0.2) * 1e-14, 1e-28);
    EXPECT_NEAR(e.y, std::exp(0.2) * -2e-14, 1e-28);
}

TEST(QuatExp, ModulusIsExpOfRealPart) {
    qtest::Rng rng(11);
    for (int n = 0; n < 200; ++n) {
        const Quat q = rng.quat(3.0);
        EXPECT_NEAR(norm(exp_quat(q)), std::exp(q.w), 1e-12 * std::exp(q.w));
    }
}

TEST(QuatParse, Literals) {
    EXPECT_EQ(parse_quat("i"), I);
    EXPECT_EQ(parse_quat("1+2i-3j+0.5k"), Quat(1, 2, -3, 0.5));
    EXPECT_EQ(parse_quat("2k+1"), Quat(1, 0, 0, 2));
    EXPECT_EQ(parse_quat(" -j "), -J);
    EXPECT_EQ(parse_quat("1 - 2 i"), Quat(1, -2, 0, 0));
    EXPECT_EQ(parse_quat("1e-3k"), Quat(0, 0, 0, 1e-3));
    EXPECT_EQ(parse_quat("0"), Quat{});
}

TEST(QuatParse, ErrorsCarryOffsets) {
    auto offset_of = [](const char* text) -> long {
        try {
            (void)parse_quat(text);
        } catch (const ParseError& e) {
            return static_cast<long>(e.offset());
        }
        return -1;
    };
    EXPECT_GE(offset_of("1+2i+3i"), 4);  // duplicate unit
    EXPECT_EQ(offset_of(""), 0);
    EXPECT_GE(offset_of("1+"), 1);
    EXPECT_GE(offset_of("2x"), 1);
    EXPECT_EQ(offset_of("2i3j"), 2);  // missing sign between terms
    EXPECT_EQ(parse_quat("1 2"), Quat(12.0));  // whitespace is ignored entirely
    EXPECT_GE(offset_of("i+1+2"), 2);  // two scalar terms
}

TEST(QuatFormat, CanonicalText) {
    EXPECT_EQ(format_quat(Quat{}), "0");
    EXPECT_EQ(format_quat(I), "i");
    EXPECT_EQ(format_quat(-K), "-k");
    EXPECT_EQ(format_quat(Quat(1, -2, 0, 0.5)), "1-2i+0.5k");
    EXPECT_EQ(format_real(0.1), "0.10000000000000001");
    EXPECT_EQ(format_real(-0.0), "0");
}

TEST(QuatFormat, RoundTripIsExact) {
    qtest::Rng rng(2024);
    for (int n = 0; n < 2000; ++n) {
        Quat q = rng.quat(1e3);
        if (n % 5 == 0) q.y = 0.0;
        if (n % 7 == 0) q.x = 1.0;
        EXPECT_EQ(parse_quat(format_quat(q)), q) << format_quat(q);
    }
}
