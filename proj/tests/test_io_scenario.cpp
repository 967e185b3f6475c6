#include <gtest/gtest.h>

#include "qde/errors.hpp"
#include "qde/fixtures.hpp"
#include "qde/io.hpp"
#include "qde/scenario.hpp"
#include "support.hpp"

using namespace qde;
using qtest::diff;

namespace {
const Quat I = Quat::i(), J = Quat::j(), K = Quat::k();

std::size_t parse_offset(const std::string& text) {
    try {
        (void)io::parse_matrix_inline(text);
    } catch (const ParseError& e) {
        return e.offset();
    }
    return std::string::npos;
}
}  // namespace

TEST(MatrixText, InlineAndLineFormats) {
    EXPECT_EQ(io::parse_matrix_inline("k,1;0,k"), fixtures::jordan_k());
    EXPECT_EQ(io::parse_matrix_text("i, j\n\n0, i+j\n"), fixtures::triangular_eigen());
    const QMat m = io::parse_matrix_inline("1-2i+0.5k");
    EXPECT_EQ(m.rows(), 1u);
    EXPECT_EQ(m(0, 0), Quat(1, -2, 0, 0.5));
}

TEST(MatrixText, ErrorsPointAtTheBadEntry) {
    EXPECT_EQ(parse_offset("1,2;3,x"), 6u);
    EXPECT_EQ(parse_offset("1,2;3"), 4u);  // ragged row
    EXPECT_EQ(parse_offset("i,,1"), 2u);
    EXPECT_THROW((void)io::parse_matrix_text("\n\n"), ParseError);
}

TEST(MatrixText, FormatRoundTrip) {
    qtest::Rng rng(6);
    for (int n = 0; n < 50; ++n) {
        const QMat m = rng.mat(1 + n % 3, 1 + n % 2, 100.0);
        EXPECT_EQ(io::parse_matrix_text(io::format_matrix(m)), m);
    }
    EXPECT_EQ(io::format_matrix(fixtures::jordan_k()), "k,1\n0,k\n");
}

TEST(MatrixJson, Mirror) {
    const QMat m{{I, 2.0}, {Quat(0.5, 0, -1, 0), K}};
    const auto j = io::matrix_to_json(m);
    EXPECT_EQ(j.dump(), R"({"cols":2,"entries":[[0.0,1.0,0.0,0.0],[2.0,0.0,0.0,0.0],[0.5,0.0,-1.0,0.0],[0.0,0.0,0.0,1.0]],"rows":2})");
    EXPECT_EQ(io::matrix_from_json(j), m);
    EXPECT_THROW((void)io::matrix_from_json(nlohmann::json::parse(R"({"rows":1,"cols":2,"entries":[[1,0,0,0]]})")),
                 InputError);
    EXPECT_THROW((void)io::matrix_from_json(nlohmann::json::parse(R"({"rows":1,"cols":1,"entries":[[1,0,0]]})")),
                 InputError);
    EXPECT_THROW((void)io::matrix_from_json(nlohmann::json::parse(R"({"cols":1})")), InputError);
}

TEST(Vectors, ParseAndFormat) {
    EXPECT_EQ(io::parse_vector("1,i"), (QVec{1.0, I}));
    EXPECT_EQ(io::parse_vector("1;j+k"), (QVec{1.0, J + K}));
    EXPECT_EQ(io::format_vector(QVec{1.0, -I}), "1,-i");
    EXPECT_THROW((void)io::parse_vector("1,q"), ParseError);
}

TEST(TrajectoryCsv, Layout) {
    const std::string csv = io::trajectory_csv({0.0, 0.5}, {QVec{1.0, I}, QVec{J, K}});
    EXPECT_EQ(csv,
              "t,x1_w,x1_x,x1_y,x1_z,x2_w,x2_x,x2_y,x2_z\n"
              "0,1,0,0,0,0,1,0,0\n"
              "0.5,0,0,1,0,0,0,0,1\n");
}

TEST(Scenarios, ParseForms) {
    const auto a = parse_scenario(nlohmann::json::parse(
        R"({"dim":2,"A":[["k","1"],["0","k"]],"x0":["1","1"],"t_end":1,"steps":10,"method":"split"})"));
    EXPECT_EQ(*a.A, fixtures::jordan_k());
    EXPECT_EQ(a.method, MethodChoice::Split);
    EXPECT_EQ(a.steps, 10);

    const auto b = parse_scenario(nlohmann::json::parse(R"({"dim":2,"A":"i,j;0,i+j","x0":"1,0","t0":0.5,"t_end":1})"));
    EXPECT_EQ(*b.A, fixtures::triangular_eigen());
    EXPECT_DOUBLE_EQ(b.t0, 0.5);
    EXPECT_EQ(b.method, MethodChoice::Auto);

    const auto c = parse_scenario(nlohmann::json::parse(R"({"dim":2,"A_t":"rotating","x0":"1,0","t_end":1})"));
    EXPECT_FALSE(c.A.has_value());
    EXPECT_EQ(c.family, "rotating");
}

TEST(Scenarios, RejectBadInput) {
    auto bad = [](const char* text) { return parse_scenario(nlohmann::json::parse(text)); };
    EXPECT_THROW(bad(R"({"dim":2,"x0":"1,0","t_end":1})"), InputError);
    EXPECT_THROW(bad(R"({"dim":2,"A":"1","A_t":"rotating","x0":"1,0","t_end":1})"), InputError);
    EXPECT_THROW(bad(R"({"dim":3,"A":"1,0;0,1","x0":"1,0","t_end":1})"), DimensionMismatch);
    EXPECT_THROW(bad(R"({"dim":2,"A":"1,0;0,1","x0":"1","t_end":1})"), DimensionMismatch);
    EXPECT_THROW(bad(R"({"dim":2,"A":"1,0;0,1","x0":"1,0","t_end":1,"method":"magic"})"), InputError);
    EXPECT_THROW(bad(R"({"dim":2,"A":"1,0;0,1","x0":"1,0","t_end":1,"steps":0})"), InputError);
    EXPECT_THROW(bad(R"({"dim":2,"A_t":"rotating","x0":"1,0","t_end":1,"method":"eigen"})"), InputError);
    EXPECT_THROW(bad(R"({"dim":2,"A":"1,0;0,x","x0":"1,0","t_end":1})"), ParseError);
    EXPECT_THROW((void)builtin_family("nope", 0, 1), InputError);
}

TEST(Scenarios, ClosedFormAndNumericRunsAgree) {
    Scenario s;
    s.dim = 2;
    s.A = fixtures::triangular_eigen();
    s.x0 = QVec{1.0 + J, K};
    s.t0 = 0.3;
    s.t_end = 1.3;
    s.steps = 2000;
    const auto closed = run_scenario(s);
    EXPECT_EQ(closed.method, "EigenMethod");
    s.method = MethodChoice::Numeric;
    const auto numeric = run_scenario(s);
    EXPECT_EQ(numeric.method, "NumericColumns");
    ASSERT_EQ(closed.ts.size(), numeric.ts.size());
    EXPECT_LT(diff(closed.xs.front(), s.x0), 1e-12);
    for (std::size_t n = 0; n < closed.ts.size(); n += 250) EXPECT_LT(diff(closed.xs[n], numeric.xs[n]), 1e-9);
}

TEST(Scenarios, BackwardRunAndBuiltinFamilies) {
    Scenario s;
    s.dim = 2;
    s.A = fixtures::jordan_k();
    s.x0 = QVec{1.0, 1.0};
    s.t0 = 1.0;
    s.t_end = 0.0;
    s.steps = 4;
    const auto r = run_scenario(s);
    EXPECT_DOUBLE_EQ(r.ts.front(), 0.0);
    EXPECT_DOUBLE_EQ(r.ts.back(), 1.0);
    EXPECT_LT(diff(r.xs.back(), s.x0), 1e-12);

    for (const char* name : {"diag-cos", "rotating", "oscillator"}) {
        Scenario f;
        f.dim = 2;
        f.family = name;
        f.x0 = QVec{1.0, I};
        f.t_end = 1.0;
        f.steps = 100;
        const auto out = run_scenario(f);
        EXPECT_EQ(out.xs.size(), 101u) << name;
    }
}
