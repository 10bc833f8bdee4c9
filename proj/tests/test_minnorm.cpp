#include <gtest/gtest.h>

#include <higgsstrat/minnorm.hpp>
#include <higgsstrat/weight_lattice.hpp>

#include "oracles.hpp"

using namespace higgsstrat;

namespace {

RVector R(std::initializer_list<Rational> v) { return RVector(v); }

}  // namespace

TEST(MinNorm, Examples) {
    EXPECT_EQ(min_norm_point(PointCloud({R({1, 1}), R({-1, -1})})), R({0, 0}));
    EXPECT_EQ(min_norm_point(PointCloud({R({1, 0}), R({0, 1})})), R({Rational(1, 2), Rational(1, 2)}));
    EXPECT_EQ(min_norm_point(PointCloud({R({2, 3})})), R({2, 3}));
}

TEST(MinNorm, Errors) {
    EXPECT_THROW(PointCloud(std::vector<RVector>{}), InvalidArgument);
    EXPECT_THROW(PointCloud({R({1, 0}), R({1})}), DimensionMismatch);
}

TEST(MinNorm, DuplicatesAndCollinear) {
    EXPECT_EQ(min_norm_point(PointCloud({R({1, 2}), R({1, 2}), R({3, 6})})), R({1, 2}));
    EXPECT_EQ(min_norm_point(PointCloud({R({1, 1}), R({2, 2}), R({-1, 3})})),
              oracle::min_norm_by_faces({R({1, 1}), R({2, 2}), R({-1, 3})}));
}

TEST(MinNorm, MatchesFaceOracleOnRandomClouds) {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> dim(1, 4), cnt(1, 7);
    for (int trial = 0; trial < 150; ++trial) {
        const std::size_t d = std::size_t(dim(rng)), n = std::size_t(cnt(rng));
        std::vector<RVector> pts;
        for (std::size_t i = 0; i < n; ++i) pts.push_back(oracle::random_rational_vector(d, rng));
        EXPECT_EQ(min_norm_point(PointCloud(pts)), oracle::min_norm_by_faces(pts)) << "trial " << trial;
    }
}

TEST(MinNorm, OptimalityCertificate) {
    // x is optimal iff x . p >= |x|^2 for every p
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<RVector> pts;
        for (int i = 0; i < 6; ++i) pts.push_back(oracle::random_rational_vector(3, rng, 4));
        const auto x = min_norm_point(PointCloud(pts));
        const auto nn = oracle::dotp(x, x);
        for (const auto& p : pts) EXPECT_GE(oracle::dotp(x, p), nn);
    }
}

TEST(MinNorm, HullContainsOrigin) {
    EXPECT_TRUE(hull_contains_origin(PointCloud({R({1, 0}), R({-1, 1}), R({-1, -1})})));
    EXPECT_FALSE(hull_contains_origin(PointCloud({R({1, 0}), R({1, 1})})));
}

TEST(IndexSet, OneDimensional) {
    const auto B = index_set_B(PointCloud({R({-1}), R({1})}), true);
    EXPECT_EQ(B, (std::set<RVector>{R({0}), R({1})}));
    const auto all = index_set_B(PointCloud({R({-1}), R({1})}), false);
    EXPECT_EQ(all, (std::set<RVector>{R({-1}), R({0}), R({1})}));
}

TEST(IndexSet, AllEqual) {
    const auto B = index_set_B(PointCloud({R({1, 3}), R({1, 3})}), true);
    EXPECT_EQ(B, (std::set<RVector>{R({3, 1})}));
}

TEST(IndexSet, MatchesOracleOnSmallLattice) {
    const CurveContext c{2, 3, 1, 0, 1};  // m = 3
    std::vector<RVector> ws;
    for (const auto& idx : enumerate_coordinate_indices(c)) ws.push_back(project_trace_zero(alpha_of_index(idx, c)));
    EXPECT_EQ(index_set_B(PointCloud(ws), true), oracle::index_set(ws, true));
    EXPECT_EQ(index_set_B(PointCloud(ws), false), oracle::index_set(ws, false));
}

TEST(IndexSet, Cap) {
    std::vector<RVector> ws;
    for (int i = 0; i < 12; ++i) ws.push_back(R({i, 1}));
    EXPECT_THROW(index_set_B(PointCloud(ws), false, 100), CapExceeded);
}
