#include <gtest/gtest.h>

#include "cob/matrix.hpp"
#include "cob/rational.hpp"

using namespace cob::exactalg;

namespace {

Matrix make(std::initializer_list<std::initializer_list<long long>> rows) {
    std::vector<Vector> vv;
    for (const auto& r : rows) {
        Vector v;
        for (long long x : r) v.push_back(Rational(x));
        vv.push_back(std::move(v));
    }
    return Matrix::from_rows(vv);
}

Vector vec(std::initializer_list<long long> xs) {
    Vector v;
    for (long long x : xs) v.push_back(Rational(x));
    return v;
}

TEST(Rational, Construction) {
    EXPECT_EQ(rat(4, 6), rat(2, 3));
    EXPECT_EQ(rat(-4, 6), rat(2, -3));
    EXPECT_EQ(den(rat(2, -3)), 3);
    EXPECT_EQ(num(rat(2, -3)), -2);
    EXPECT_THROW(rat(1, 0), std::domain_error);
}

TEST(Rational, Arithmetic) {
    EXPECT_EQ(rat(1, 2) + rat(1, 3), rat(5, 6));
    EXPECT_EQ(rat(1, 2) * rat(2, 5), rat(1, 5));
    EXPECT_EQ(rat(1, 2) - rat(1, 2), 0);
    EXPECT_EQ(rat(3, 4) / rat(3, 2), rat(1, 2));
}

TEST(Rational, Text) {
    EXPECT_EQ(to_string(rat(1, 2)), "1/2");
    EXPECT_EQ(to_string(rat(-7)), "-7");
    EXPECT_EQ(to_string(rat(-1, 2)), "-1/2");
    EXPECT_EQ(*parse_rational("3/4"), rat(3, 4));
    EXPECT_EQ(*parse_rational("-3/4"), rat(-3, 4));
    EXPECT_EQ(*parse_rational("0.5"), rat(1, 2));
    EXPECT_EQ(*parse_rational(".5"), rat(1, 2));
    EXPECT_EQ(*parse_rational("3.25"), rat(13, 4));
    EXPECT_EQ(*parse_rational("-17"), rat(-17));
    EXPECT_FALSE(parse_rational("1/0").has_value());
    EXPECT_FALSE(parse_rational("x").has_value());
    EXPECT_FALSE(parse_rational("").has_value());
    EXPECT_FALSE(parse_rational("1.2.3").has_value());
}

TEST(Rational, BigValues) {
    // 100! / 98! = 9900 exercises arbitrary precision without overflow.
    Rational f = 1;
    for (int i = 1; i <= 100; ++i) f *= i;
    Rational g = 1;
    for (int i = 1; i <= 98; ++i) g *= i;
    EXPECT_EQ(f / g, 9900);
    EXPECT_NEAR(to_double(rat(1, 3)), 1.0 / 3.0, 1e-15);
}

TEST(Rref, CanonicalForm) {
    // [[1,2,3],[2,4,8]] reduces to [[1,2,0],[0,0,1]] with pivots {0,2}.
    auto rr = rref(make({{1, 2, 3}, {2, 4, 8}}));
    EXPECT_EQ(rr.pivots, (std::vector<std::size_t>{0, 2}));
    EXPECT_EQ(rr.m.row(0), vec({1, 2, 0}));
    EXPECT_EQ(rr.m.row(1), vec({0, 0, 1}));
}

TEST(Rref, RankAndIdentity) {
    EXPECT_EQ(rank(make({{1, 2}, {2, 4}})), 1u);
    EXPECT_EQ(rank(Matrix::identity(4)), 4u);
    EXPECT_EQ(rank(Matrix(3, 3)), 0u);
    auto rr = rref(make({{0, 1}, {1, 0}}));
    EXPECT_EQ(rr.m, Matrix::identity(2));
}

TEST(Rref, FractionPivots) {
    // [[2,1],[0,3]] -> [[1,0],[0,1]]; [[2,4],[1,2]] -> [[1,2],[0,0]].
    EXPECT_EQ(rref(make({{2, 1}, {0, 3}})).m, Matrix::identity(2));
    auto rr = rref(make({{2, 4}, {1, 2}}));
    EXPECT_EQ(rr.m.row(0), vec({1, 2}));
    EXPECT_EQ(rr.m.row(1), vec({0, 0}));
}

TEST(Kernel, Canonical) {
    // x + 2y - z = 0: kernel basis with free vars y, z set to 1 in turn.
    auto k = kernel(make({{1, 2, -1}}));
    ASSERT_EQ(k.size(), 2u);
    EXPECT_EQ(k[0], vec({-2, 1, 0}));
    EXPECT_EQ(k[1], vec({1, 0, 1}));
}

TEST(Kernel, FullRankAndZero) {
    EXPECT_TRUE(kernel(Matrix::identity(3)).empty());
    auto k = kernel(Matrix(2, 3));  // zero map: kernel is everything
    ASSERT_EQ(k.size(), 3u);
    EXPECT_EQ(k[0], vec({1, 0, 0}));
    EXPECT_EQ(k[1], vec({0, 1, 0}));
    EXPECT_EQ(k[2], vec({0, 0, 1}));
}

TEST(Kernel, MembersAreInKernel) {
    auto m = make({{1, 2, 3, 4}, {0, 1, 1, 1}, {1, 3, 4, 5}});
    for (const auto& v : kernel(m)) EXPECT_TRUE(is_zero(mat_vec(m, v)));
    EXPECT_EQ(kernel(m).size(), 4u - rank(m));
}

TEST(Residual, InsideAndOutside) {
    // span of columns (1,0,1) and (0,1,1)
    Matrix span(3, 2);
    span.at(0, 0) = 1;
    span.at(2, 0) = 1;
    span.at(1, 1) = 1;
    span.at(2, 1) = 1;
    EXPECT_TRUE(is_zero(residual(vec({1, 1, 2}), span)));
    EXPECT_TRUE(is_zero(residual(vec({2, 0, 2}), span)));
    EXPECT_FALSE(is_zero(residual(vec({0, 0, 1}), span)));
    EXPECT_TRUE(is_zero(residual(vec({0, 0, 0}), span)));
}

TEST(Residual, DeterministicRepresentative) {
    Matrix span(2, 1);
    span.at(0, 0) = 1;
    auto r1 = residual(vec({3, 5}), span);
    auto r2 = residual(vec({7, 5}), span);
    EXPECT_EQ(r1, r2);  // component along span removed identically
    EXPECT_EQ(r1, vec({0, 5}));
}

TEST(Solve, UniqueUnderdeterminedInconsistent) {
    auto x = solve(make({{1, 1}, {1, -1}}), vec({3, 1}));
    ASSERT_TRUE(x.has_value());
    EXPECT_EQ(*x, vec({2, 1}));

    // Underdetermined: free variable pinned to zero.
    auto y = solve(make({{1, 1}}), vec({5}));
    ASSERT_TRUE(y.has_value());
    EXPECT_EQ(*y, vec({5, 0}));

    EXPECT_FALSE(solve(make({{1, 1}, {2, 2}}), vec({1, 3})).has_value());
}

TEST(Solve, RationalEntries) {
    Matrix a(2, 2);
    a.at(0, 0) = rat(1, 2);
    a.at(0, 1) = rat(1, 3);
    a.at(1, 0) = rat(1, 4);
    a.at(1, 1) = rat(1, 5);
    Vector b{rat(7, 6), rat(13, 20)};
    auto x = solve(a, b);
    ASSERT_TRUE(x.has_value());
    EXPECT_EQ(*x, vec({1, 2}));
}

TEST(MatVec, Products) {
    EXPECT_EQ(mat_vec(make({{1, 2}, {3, 4}}), vec({1, 1})), vec({3, 7}));
    auto p = mat_mul(make({{1, 2}, {3, 4}}), make({{0, 1}, {1, 0}}));
    EXPECT_EQ(p, make({{2, 1}, {4, 3}}));
    EXPECT_EQ(dot(vec({1, 2, 3}), vec({4, 5, 6})), 32);
}

TEST(AffineHull, RotationFillsPlane) {
    // A = [[0,-1],[1,0]] at (1,0): tangent (0,1) enters, then A*(0,1) = (-1,0)
    // completes the plane.
    auto hull = affine_hull_closure(vec({1, 0}), Matrix(0, 2),
                                    make({{0, -1}, {1, 0}}), vec({0, 0}));
    EXPECT_EQ(hull.rows(), 2u);
    EXPECT_EQ(rank(hull), 2u);
}

TEST(AffineHull, FixedPointStaysPoint) {
    // Drift A*p + b vanishes at the origin, so nothing is added.
    auto hull = affine_hull_closure(vec({0, 0}), Matrix(0, 2),
                                    make({{1, 0}, {0, 2}}), vec({0, 0}));
    EXPECT_EQ(hull.rows(), 0u);
}

TEST(AffineHull, RayFromNonfixedPoint) {
    // A = diag(1,2), point (1,0): tangent (1,0) spans the invariant line.
    auto hull = affine_hull_closure(vec({1, 0}), Matrix(0, 2),
                                    make({{1, 0}, {0, 2}}), vec({0, 0}));
    ASSERT_EQ(hull.rows(), 1u);
    EXPECT_EQ(hull.row(0), vec({1, 0}));
}

TEST(AffineHull, DriftOnly) {
    // A = I, b = (1,2): every step moves by b, hull is the line along (1,2).
    auto hull = affine_hull_closure(vec({0, 0}), Matrix(0, 2), Matrix::identity(2),
                                    vec({1, 2}));
    ASSERT_EQ(hull.rows(), 1u);
    EXPECT_EQ(hull.row(0), vec({1, 2}));
}

TEST(AffineHull, DirectionsClosed) {
    // A maps e1 -> e2 -> e3, start direction e1, fixed point at origin.
    auto a = make({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}});
    auto hull = affine_hull_closure(vec({0, 0, 0}), make({{1, 0, 0}}), a,
                                    vec({0, 0, 0}));
    EXPECT_EQ(hull.rows(), 3u);
}

}  // namespace
