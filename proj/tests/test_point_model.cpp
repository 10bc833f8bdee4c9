#include <gtest/gtest.h>

#include <higgsstrat/corpus.hpp>
#include <higgsstrat/point_model.hpp>

#include "oracles.hpp"

using namespace higgsstrat;

namespace {

CurveContext context_of(const ModelPoint& p, int genus = 0) {
    CurveContext c;
    c.rank = p.rank();
    c.genus = genus;
    c.npoints = int(p.factors.size());
    c.degree = p.m() - long(c.rank) * (1 - genus);
    return c;
}

Membership membership_oracle(const ModelPoint& p, const BetaVector& beta) {
    const Rational nb = beta.norm_sq();
    std::optional<Rational> lo;
    bool all_equal = true;
    for (const auto& c : oracle::all_coordinates(p)) {
        if (c.value == 0) continue;
        const Rational a = oracle::dotp(oracle::weight(c.index, p.m()), beta.entries);
        if (!lo || a < *lo) lo = a;
        if (a != nb) all_equal = false;
    }
    if (!lo || *lo != nb) return Membership::Outside;
    return all_equal ? Membership::InZ : Membership::InY_not_Z;
}

HiggsDatum datum(const HNType& t, const CurveContext& c, std::mt19937_64& rng, bool graded = false) {
    GeneratorOptions opt;
    opt.graded = graded;
    return random_higgs_datum(t, c, rng, opt);
}

// at genus 0 a block fits the generator when m_gamma = d_gamma + r_gamma >= r_gamma
bool fits(const HNType& t) {
    for (const auto& b : t.blocks())
        if (b.degree < 0) return false;
    return true;
}

Factor factor(RMatrix y, Rational c, RMatrix phi) { return Factor{std::move(y), std::move(c), std::move(phi)}; }

}  // namespace

TEST(Coordinates, MatchProductFormulas) {
    std::mt19937_64 rng(3);
    for (auto [r, m, N] : std::vector<std::tuple<int, int, int>>{{2, 3, 1}, {2, 4, 1}, {2, 3, 2}, {3, 4, 1}, {1, 3, 2}}) {
        for (int trial = 0; trial < 4; ++trial) {
            const auto p = random_model_point(r, m, N, rng);
            const auto ctx = context_of(p);
            const auto tab = coordinates(p, ctx);
            const auto ref = oracle::all_coordinates(p);
            ASSERT_EQ(tab.values.size(), ref.size());
            for (const auto& c : ref) EXPECT_EQ(tab.values[tab.space.position(c.index)], c.value) << to_string(c.index);
        }
    }
}

TEST(Coordinates, EndExample) {
    ModelPoint p{{factor(RMatrix{{1, 0, 0}, {0, 1, 0}}, 1, RMatrix{{0, 0}, {1, 0}})}};
    const auto ctx = context_of(p);
    const auto tab = coordinates(p, ctx);
    const auto at = [&](std::pair<int, int> ij) {
        return tab.values[tab.space.position(CoordinateIndex{IndexKind::End, {{1, 2}}, {ij}})];
    };
    EXPECT_EQ(at({1, 2}), 1);
    EXPECT_EQ(at({2, 1}), 0);
}

TEST(Coordinates, ZeroScalarKillsDetFamily) {
    std::mt19937_64 rng(5);
    auto p = random_model_point(2, 3, 1, rng);
    p.factors[0].c = 0;
    p.factors[0].phi = RMatrix{{1, 0}, {0, 2}};
    const auto tab = coordinates(p, context_of(p));
    for (std::uint64_t i = 0; i < tab.space.det_count(); ++i) EXPECT_EQ(tab.values[i], 0);
}

TEST(Coordinates, Errors) {
    ModelPoint p{{factor(RMatrix{{1, 0, 0}, {0, 1, 0}}, 0, RMatrix(2, 2))}};
    EXPECT_THROW(coordinates(p, context_of(p)), DegeneratePoint);
    ModelPoint q{{factor(RMatrix{{1, 0, 0}, {0, 1, 0}}, 1, RMatrix(3, 3))}};
    EXPECT_THROW(coordinates(q, CurveContext{2, 1, 0, 0, 1}), DimensionMismatch);
}

TEST(Coordinates, GLInvarianceUpToScalar) {
    // y -> g y, phi -> g phi g^-1 multiplies every coordinate by det(g)^N
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 10; ++trial) {
        const auto p = random_model_point(2, 4, 2, rng);
        const auto ctx = context_of(p);
        RMatrix g = detail::random_full_rank(2, 2, rng, 3, false);
        const RMatrix gi = detail::inverse(g);
        ModelPoint q = p;
        for (auto& f : q.factors) {
            f.y = g * f.y;
            f.phi = g * f.phi * gi;
        }
        const Rational dg = oracle::laplace_det(g);
        const auto a = coordinates(p, ctx).values, b = coordinates(q, ctx).values;
        for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(b[i], a[i] * dg * dg);
    }
}

TEST(Membership, MatchesFullTableOracle) {
    std::mt19937_64 rng(13);
    const CurveContext ctx{2, 3, 1, 0, 1};  // m = 3
    const auto betas = std::vector<BetaVector>{
        beta_of_type(HNType::from_lists({1, 1}, {2, 1}), ctx),
        BetaVector::from_entries({Rational(1, 3), Rational(1, 3), Rational(-2, 3)}),
        BetaVector::from_entries({Rational(2, 3), Rational(-1, 3), Rational(-1, 3)}),
    };
    int hits = 0;
    for (int trial = 0; trial < 60; ++trial) {
        auto p = random_model_point(2, 3, 1, rng, 1);
        for (const auto& b : betas) {
            const auto m = membership(p, b, ctx);
            EXPECT_EQ(m, membership_oracle(p, b));
            hits += m != Membership::Outside;
        }
    }
    EXPECT_GT(hits, 0);
}

TEST(Membership, GradedAndFlagged) {
    std::mt19937_64 rng(17);
    const CurveContext ctx{2, 3, 0, 0, 2};
    const auto t = HNType::from_lists({1, 1}, {2, 1});
    const auto beta = beta_of_type(t, ctx);
    for (int trial = 0; trial < 5; ++trial) {
        EXPECT_EQ(membership(from_higgs_data(datum(t, ctx, rng, true)), beta, ctx), Membership::InZ);
        const auto p = from_higgs_data(datum(t, ctx, rng));
        EXPECT_EQ(membership(p, beta, ctx), membership_oracle(p, beta));
    }
}

TEST(Membership, GenericPointIsOutside) {
    std::mt19937_64 rng(19);
    const CurveContext ctx{2, 3, 0, 0, 1};
    const auto beta = beta_of_type(HNType::from_lists({1, 1}, {2, 1}), ctx);
    ModelPoint p{{factor(RMatrix{{1, 1, 1, 1, 2}, {1, 2, 3, 4, 1}}, 1, RMatrix{{1, 2}, {3, 4}})}};
    EXPECT_EQ(membership(p, beta, ctx), Membership::Outside);
    EXPECT_THROW(membership(p, BetaVector::from_entries({1, -1}), ctx), DimensionMismatch);
}

TEST(FromHiggsData, Shapes) {
    std::mt19937_64 rng(23);
    const CurveContext ctx{2, 1, 0, 0, 1};  // m = 3
    const auto t = HNType::from_lists({1, 1}, {1, 0});
    auto h = datum(t, ctx, rng);
    EXPECT_EQ(h.flag.sizes(), (std::vector<int>{2, 1}));
    const auto p = from_higgs_data(h);
    EXPECT_TRUE(verify_step1(p, beta_of_type(t, ctx), ctx).passed);
    h.factors[0].phi(1, 0) = 1;
    EXPECT_THROW(from_higgs_data(h), InvariantViolation);
}

TEST(FromHiggsData, SemistableUnconstrained) {
    std::mt19937_64 rng(29);
    const CurveContext ctx{2, 1, 0, 0, 1};
    const auto h = datum(HNType::semistable(2, 1), ctx, rng);
    EXPECT_NO_THROW(from_higgs_data(h));
}

TEST(Step1, PassFailAndZeroBeta) {
    std::mt19937_64 rng(31);
    const CurveContext ctx{2, 3, 0, 0, 1};
    const auto t = HNType::from_lists({1, 1}, {2, 1}), other = HNType::from_lists({1, 1}, {3, 0});
    const auto p = from_higgs_data(datum(t, ctx, rng));
    const auto ok = verify_step1(p, beta_of_type(t, ctx), ctx);
    EXPECT_TRUE(ok.passed);
    EXPECT_TRUE(ok.equality_witness.has_value());
    const auto bad = verify_step1(p, beta_of_type(other, ctx), ctx);
    EXPECT_FALSE(bad.passed);
    ASSERT_FALSE(bad.violations.empty());
    const auto w = oracle::weight(bad.violations.front(), 5);
    EXPECT_LT(oracle::dotp(w, beta_of_type(other, ctx).entries), bad.norm_sq);
    const auto tab = coordinates(p, ctx);
    EXPECT_NE(tab.values[tab.space.position(bad.violations.front())], 0);
    EXPECT_TRUE(verify_step1(p, BetaVector::zero(5), ctx).passed);
}

TEST(Step1, MutationIsDetected) {
    std::mt19937_64 rng(37);
    const CurveContext ctx{3, 4, 0, 0, 2};
    for (const auto& t : enumerate_hn_types(ctx, 4)) {
        if (t.is_semistable() || !fits(t)) continue;
        const auto beta = beta_of_type(t, ctx);
        const auto h = datum(t, ctx, rng);
        EXPECT_TRUE(verify_step1(from_higgs_data(h), beta, ctx).passed) << t.str();
        const auto bad = verify_step1(mutate_break_flag(h, rng), beta, ctx);
        EXPECT_FALSE(bad.passed) << t.str();
        EXPECT_FALSE(bad.violations.empty()) << t.str();
    }
}

TEST(Retraction, IdempotentAndInZ) {
    std::mt19937_64 rng(41);
    const CurveContext ctx{2, 3, 0, 0, 2};
    for (const auto& t : enumerate_hn_types(ctx, 5)) {
        if (t.is_semistable() || !fits(t)) continue;
        const auto beta = beta_of_type(t, ctx);
        const auto p = from_higgs_data(datum(t, ctx, rng));
        const auto q = retract_p_beta(p, beta, ctx);
        EXPECT_EQ(membership(q, beta, ctx), Membership::InZ);
        const auto q2 = retract_p_beta(q, beta, ctx);
        EXPECT_TRUE(proportional(coordinates(q, ctx).values, coordinates(q2, ctx).values));
        // equality coordinates survive unchanged up to one scalar
        const auto a = coordinates(p, ctx), b = coordinates(q, ctx);
        std::vector<Rational> x, y;
        for (std::uint64_t i = 0; i < a.values.size(); ++i) {
            const auto w = oracle::weight(a.space.at(i), int(ctx.m()));
            if (oracle::dotp(w, beta.entries) == beta.norm_sq()) {
                x.push_back(a.values[i]);
                y.push_back(b.values[i]);
            } else {
                EXPECT_EQ(b.values[i], 0);
            }
        }
        EXPECT_TRUE(proportional(x, y));
    }
}

TEST(Retraction, OutsideThrows) {
    const CurveContext ctx{2, 3, 0, 0, 1};
    ModelPoint p{{factor(RMatrix{{1, 1, 1, 1, 2}, {1, 2, 3, 4, 1}}, 1, RMatrix{{1, 2}, {3, 4}})}};
    EXPECT_THROW(retract_p_beta(p, beta_of_type(HNType::from_lists({1, 1}, {2, 1}), ctx), ctx), NotInY);
}

TEST(Step2, GradedGeneralPositionPasses) {
    std::mt19937_64 rng(43);
    const CurveContext ctx{2, 3, 0, 0, 1};
    const auto t = HNType::from_lists({1, 1}, {2, 1});
    const auto rep = verify_step2(from_higgs_data(datum(t, ctx, rng, true)), beta_of_type(t, ctx), ctx);
    EXPECT_TRUE(rep.passed);
    EXPECT_TRUE(rep.trace.holds);
    EXPECT_EQ(rep.blocks.size(), 2u);
}

TEST(Step2, UnstableBlockFails) {
    // block 1 of y has a zero column, so its torus support misses the twisted character
    const CurveContext ctx{2, 3, 0, 0, 1};
    const auto t = HNType::from_lists({1, 1}, {2, 1});
    const auto beta = beta_of_type(t, ctx);
    ModelPoint p{{factor(RMatrix{{1, 0, 0, 0, 0}, {0, 0, 0, 1, 1}}, 1, RMatrix{{1, 0}, {0, 2}})}};
    ASSERT_NE(membership(p, beta, ctx), Membership::Outside);
    const auto rep = verify_step2(p, beta, ctx);
    EXPECT_FALSE(rep.passed);
    EXPECT_FALSE(rep.blocks[0].semistable);
    EXPECT_FALSE(rep.blocks[0].witness.empty());
}

TEST(Step2, TraceIdentity) {
    const CurveContext ctx{3, 2, 0, 0, 2};
    for (const auto& t : enumerate_hn_types(ctx, 2)) {
        if (t.blocks().back().degree + t.blocks().back().rank <= 0) continue;
        const auto r = step2_trace_identity(beta_of_type(t, ctx), 2);
        EXPECT_TRUE(r.holds) << t.str();
        EXPECT_GT(r.checked, 0u);
    }
}

TEST(Stabilizer, Examples) {
    const CurveContext ctx{2, 0, 0, 0, 1};  // m = 2
    const FlagShape flag({1, 1});
    auto with_phi = [](RMatrix phi) { return ModelPoint{{factor(RMatrix::identity(2), 1, std::move(phi))}}; };
    EXPECT_EQ(unipotent_stabilizer_dim(with_phi(RMatrix{{1, 0}, {0, 2}}), flag, ctx), 0u);
    EXPECT_EQ(unipotent_stabilizer_dim(with_phi(RMatrix{{0, 0}, {1, 0}}), flag, ctx), 0u);
    EXPECT_EQ(unipotent_stabilizer_dim(with_phi(RMatrix(2, 2)), flag, ctx), 1u);
}

TEST(Stabilizer, MatchesInterpolationOracle) {
    std::mt19937_64 rng(47);
    std::uniform_int_distribution<int> coin(0, 1);
    int checked = 0;
    for (auto [r, m, N] : std::vector<std::tuple<int, int, int>>{{1, 2, 1}, {2, 3, 1}, {2, 3, 2}, {2, 4, 1}}) {
        for (int trial = 0; trial < 6; ++trial) {
            auto p = random_model_point(r, m, N, rng, 1);
            if (coin(rng))
                for (auto& f : p.factors) f.phi = RMatrix(std::size_t(r), std::size_t(r));
            const auto ctx = context_of(p);
            try {
                (void)FactorizedPoint(p, index_space(ctx));
            } catch (const DegeneratePoint&) {
                continue;
            }
            std::vector<int> sizes = m == 4 ? std::vector<int>{2, 1, 1} : std::vector<int>{m - 1, 1};
            const FlagShape flag(sizes);
            EXPECT_EQ(unipotent_stabilizer_dim(p, flag, ctx), oracle::stabilizer_dim_by_interpolation(p, flag));
            ++checked;
        }
    }
    EXPECT_GE(checked, 12);
}

TEST(Commutant, Examples) {
    const FlagShape f({1, 1});
    EXPECT_EQ(nilpotent_commutant_dim(f, {RMatrix{{0, 0}, {1, 0}}}), 0u);
    EXPECT_EQ(nilpotent_commutant_dim(f, {RMatrix(2, 2)}), 1u);
    RMatrix d(4, 4);
    d(0, 0) = d(1, 1) = 1;
    d(2, 2) = 2;
    d(3, 3) = 5;
    EXPECT_EQ(nilpotent_commutant_dim(FlagShape({2, 1, 1}), {d}), 0u);
    EXPECT_THROW(nilpotent_commutant_dim(f, {RMatrix(3, 3)}), DimensionMismatch);
}

TEST(Commutant, MatchesDenseOracle) {
    std::mt19937_64 rng(53);
    std::uniform_int_distribution<int> rdist(1, 5), sparse(0, 3);
    for (int trial = 0; trial < 40; ++trial) {
        const int r = rdist(rng);
        std::vector<int> sizes;
        for (int left = r; left > 0;) {
            const int b = std::uniform_int_distribution<int>(1, left)(rng);
            sizes.push_back(b);
            left -= b;
        }
        std::vector<RMatrix> phis;
        for (int k = 0; k < 2; ++k) {
            RMatrix phi{RMatrix(std::size_t(r), std::size_t(r))};
            for (std::size_t i = 0; i < phi.rows(); ++i)
                for (std::size_t j = 0; j < phi.cols(); ++j)
                    if (sparse(rng) == 0) phi(i, j) = random_entry(rng, 2);
            phis.push_back(phi);
        }
        const FlagShape f(sizes);
        EXPECT_EQ(nilpotent_commutant_dim(f, phis), oracle::commutant_dim_dense(f, phis));
    }
}
