#include <gtest/gtest.h>

#include <higgsstrat/hn_types.hpp>

using namespace higgsstrat;

namespace {

HNType T(std::vector<int> r, std::vector<long> d) { return HNType::from_lists(r, d); }

CurveContext ctx(int r, long d, int g = 0, long degL = 0, int N = 1) { return {r, d, g, degL, N}; }

}  // namespace

TEST(Enumerate, RankOneHasOnlySemistable) {
    const auto ts = enumerate_hn_types(ctx(1, 5), 10);
    ASSERT_EQ(ts.size(), 1u);
    EXPECT_EQ(ts[0], HNType::semistable(1, 5));
}

TEST(Enumerate, RankTwoDegreeOne) {
    const auto ts = enumerate_hn_types(ctx(2, 1), 2);
    ASSERT_EQ(ts.size(), 3u);
    EXPECT_NE(std::find(ts.begin(), ts.end(), HNType::semistable(2, 1)), ts.end());
    EXPECT_NE(std::find(ts.begin(), ts.end(), T({1, 1}, {1, 0})), ts.end());
    EXPECT_NE(std::find(ts.begin(), ts.end(), T({1, 1}, {2, -1})), ts.end());
}

TEST(Enumerate, BruteForceCountRankThree) {
    // independent count: all compositions of 3 with integer degrees, slopes strictly decreasing
    const long d = 4;
    const Rational bound = 4;
    std::size_t expected = 0;
    expected += 1;  // (3)
    for (long a = -20; a <= 20; ++a) {
        // (1,2) and (2,1)
        if (Rational(a) <= bound && Rational(a) > Rational(d - a, 2)) ++expected;
        if (Rational(a, 2) <= bound && Rational(a, 2) > Rational(d - a)) ++expected;
        for (long b = -20; b <= 20; ++b)
            if (Rational(a) <= bound && a > b && b > d - a - b) ++expected;
    }
    EXPECT_EQ(enumerate_hn_types(ctx(3, d), bound).size(), expected);
}

TEST(Enumerate, OutputsAreValidAndDistinct) {
    const auto ts = enumerate_hn_types(ctx(4, 3), 5);
    for (std::size_t i = 0; i < ts.size(); ++i) {
        EXPECT_EQ(ts[i].rank(), 4);
        EXPECT_EQ(ts[i].degree(), 3);
        EXPECT_LE(ts[i].first_slope(), 5);
        for (std::size_t g = 1; g < ts[i].length(); ++g) EXPECT_GT(ts[i].slope(g - 1), ts[i].slope(g));
        for (std::size_t j = i + 1; j < ts.size(); ++j) EXPECT_FALSE(ts[i] == ts[j]);
    }
}

TEST(Enumerate, RejectsBadContext) { EXPECT_THROW(enumerate_hn_types(ctx(0, 1), 1), InvalidArgument); }

TEST(HNTypeCtor, RejectsNonDecreasingSlopes) {
    EXPECT_THROW(T({1, 1}, {0, 1}), InvalidArgument);
    EXPECT_THROW(T({1, 1}, {1, 1}), InvalidArgument);
    EXPECT_THROW(T({0, 2}, {1, 0}), InvalidArgument);
}

TEST(Polygon, SemistableIsMinimal) {
    const auto t0 = HNType::semistable(2, 1);
    EXPECT_EQ(compare_polygon(t0, T({1, 1}, {1, 0})), PolygonOrder::Less);
    EXPECT_EQ(compare_polygon(T({1, 1}, {1, 0}), t0), PolygonOrder::Greater);
}

TEST(Polygon, VertexComparison) {
    EXPECT_EQ(compare_polygon(T({1, 1}, {2, -1}), T({1, 1}, {1, 0})), PolygonOrder::Greater);
    EXPECT_EQ(compare_polygon(T({1, 1}, {1, 0}), T({1, 1}, {1, 0})), PolygonOrder::Equal);
}

TEST(Polygon, Incomparable) {
    // vertices (1,2),(3,0) against (2,3),(3,0): a is above at x=1, below at x=2
    const auto a = T({1, 2}, {2, -2});
    const auto b = T({2, 1}, {3, -3});
    EXPECT_EQ(compare_polygon(a, b), PolygonOrder::Incomparable);
}

TEST(Polygon, MismatchedAmbient) {
    EXPECT_THROW(compare_polygon(HNType::semistable(2, 1), HNType::semistable(2, 3)), MismatchedAmbient);
}

TEST(HiggsIndexOrder, Examples) {
    const auto mu = T({1, 1, 1}, {3, 2, 1});
    EXPECT_EQ(higgs_index_order({1, 3}, {1, 2}, mu), PolygonOrder::Less);
    EXPECT_EQ(higgs_index_order({1, 2}, {2, 3}, mu), PolygonOrder::Equal);
    EXPECT_EQ(higgs_index_order({1, 2}, {1, 2}, mu), PolygonOrder::Equal);
    EXPECT_THROW(higgs_index_order({0, 2}, {1, 2}, mu), IndexOutOfRange);
    EXPECT_THROW(higgs_index_order({1, 4}, {1, 2}, mu), IndexOutOfRange);
}

TEST(TMu, SemistableMu) {
    const auto c = ctx(2, 3, 0, 2);
    const auto set = t_mu_candidates(HNType::semistable(2, 3), c);
    EXPECT_EQ(set.bound, Rational(5, 2));
    ASSERT_EQ(set.types.size(), 2u);
    EXPECT_NE(std::find(set.types.begin(), set.types.end(), T({1, 1}, {2, 1})), set.types.end());
}

TEST(TMu, DegLZero) {
    const auto set = t_mu_candidates(HNType::semistable(2, 3), ctx(2, 3));
    ASSERT_EQ(set.types.size(), 1u);
    EXPECT_TRUE(set.types[0].is_semistable());
}

TEST(TMu, UnstableMu) {
    const auto set = t_mu_candidates(T({1, 1}, {2, 1}), ctx(2, 3, 0, 2));
    EXPECT_EQ(set.bound, 5);
    EXPECT_EQ(set.types.size(), 5u);
    for (long d1 = 2; d1 <= 5; ++d1)
        EXPECT_NE(std::find(set.types.begin(), set.types.end(), T({1, 1}, {d1, 3 - d1})), set.types.end());
}

TEST(UTau, RankTwo) {
    const auto c = ctx(2, 3, 0, 2);
    const auto u21 = u_tau_candidates(T({1, 1}, {2, 1}), c);
    EXPECT_EQ(u21.types.size(), 2u);
    EXPECT_TRUE(u21.sharpened);
    const auto u30 = u_tau_candidates(T({1, 1}, {3, 0}), c);
    ASSERT_EQ(u30.types.size(), 1u);
    EXPECT_EQ(u30.types[0], T({1, 1}, {3, 0}));
    EXPECT_EQ(u30.types[0].flavor(), Flavor::HiggsHN);
}

TEST(UTau, DegLZeroIsIdentity) {
    for (int r = 1; r <= 4; ++r)
        for (const auto& t : enumerate_hn_types(ctx(r, 5), Rational(5, r) + 3)) {
            const auto u = u_tau_candidates(t, ctx(r, 5));
            ASSERT_EQ(u.types.size(), 1u);
            EXPECT_EQ(u.types[0], t);
        }
}

TEST(UTau, RankFourIsUnsharpened) {
    const auto t = T({1, 3}, {3, 0});
    EXPECT_FALSE(u_tau_candidates(t, ctx(4, 3, 0, 1)).sharpened);
}

TEST(UTau, RankThreeNeverContainsForbidden) {
    for (long L = 1; L <= 2; ++L)
        for (const auto& t : enumerate_hn_types(ctx(3, 2, 0, L), Rational(2, 3) + 4))
            for (const auto& mu : u_tau_candidates(t, ctx(3, 2, 0, L)).types)
                EXPECT_NE(classify_rank3(t.shape(), mu.shape()).verdict, Rank3Verdict::Forbidden)
                    << t.str() << " " << mu.str();
}

TEST(Rank3, StatedVerdicts) {
    EXPECT_EQ(classify_rank3({2, 1}, {1, 1, 1}).verdict, Rank3Verdict::Forbidden);
    EXPECT_EQ(classify_rank3({1, 1, 1}, {1, 1, 1}).verdict, Rank3Verdict::ForcedEqual);
    EXPECT_EQ(classify_rank3({1, 2}, {1, 2}).verdict, Rank3Verdict::ForcedEqual);
    EXPECT_EQ(classify_rank3({1, 1, 1}, {2, 1}).constraint, "E^1 ⊇ E^1'");
    EXPECT_THROW(classify_rank3({1, 1}, {3}), InvalidArgument);
}

TEST(PhiBlocks, TwoBlocks) {
    RMatrix phi{{0, 0}, {1, 0}};
    const auto b = compute_phi_blocks(FlagShape({1, 1}), phi);
    EXPECT_EQ(b.at({1, 2}).state, BlockState::Nonzero);
    EXPECT_EQ(b.at({1, 2}).value, RMatrix({{1}}));
    RMatrix diag{{1, 0}, {0, 2}};
    EXPECT_EQ(compute_phi_blocks(FlagShape({1, 1}), diag).at({1, 2}).state, BlockState::Zero);
}

TEST(PhiBlocks, ThreeBlocks) {
    RMatrix phi(3, 3);
    phi(1, 0) = 1;
    const auto b = compute_phi_blocks(FlagShape({1, 1, 1}), phi);
    EXPECT_EQ(b.at({1, 3}).state, BlockState::Zero);
    EXPECT_EQ(b.at({1, 2}).state, BlockState::Nonzero);
    EXPECT_EQ(std::get<IndexPair>(higgs_stratum_index(FlagShape({1, 1, 1}), phi)), IndexPair(1, 2));
}

TEST(StratumIndex, TwoBlocks) {
    RMatrix low{{0, 0}, {1, 0}}, up{{1, 1}, {0, 2}};
    EXPECT_EQ(std::get<IndexPair>(higgs_stratum_index(FlagShape({1, 1}), low)), IndexPair(1, 2));
    EXPECT_TRUE(std::holds_alternative<FlagInvariant>(higgs_stratum_index(FlagShape({1, 1}), up)));
}

TEST(StratumIndex, DimensionMismatch) {
    RMatrix phi(3, 3);
    EXPECT_THROW(higgs_stratum_index(FlagShape({1, 1}), phi), DimensionMismatch);
}
