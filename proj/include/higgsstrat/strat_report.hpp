#pragma once

#include <algorithm>
#include <future>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "corpus.hpp"
#include "hn_types.hpp"
#include "point_model.hpp"
#include "weight_lattice.hpp"

namespace higgsstrat {

struct StratumRecord {
    BetaVector beta;
    Rational norm_sq;
    std::optional<std::size_t> delta;  // only for beta != 0 points outside the graded locus
    bool graded = false;               // graded (Z_beta) points of a nonzero beta
    std::vector<std::string> member_ids;
};

// beta(tau') for every type with first slope <= bound and positive block dimensions, then 0.
inline std::vector<BetaVector> default_candidates(const CurveContext& ctx, const Rational& slope_bound) {
    std::vector<BetaVector> out;
    for (const auto& t : enumerate_hn_types(ctx, slope_bound)) {
        if (t.is_semistable()) continue;
        try {
            out.push_back(beta_of_type(t, ctx));
        } catch (const NonPositiveBlockDimension&) {
        }
    }
    auto z = BetaVector::zero(ctx.m(), ctx.npoints);
    z.source = HNType::semistable(ctx.rank, ctx.degree);
    out.push_back(std::move(z));
    return out;
}

namespace detail {

struct Classified {
    std::size_t candidate;
    bool graded = false;
    std::optional<std::size_t> delta;
};

inline Classified classify_point(const CorpusEntry& e, const CurveContext& ctx,
                                 const std::vector<BetaVector>& candidates, std::uint64_t cap) {
    const FactorizedPoint fp(e.point, index_space(ctx, cap));
    std::optional<std::size_t> found, zero;
    Membership found_mem = Membership::Outside;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
        const auto& b = candidates[c];
        if (b.is_zero()) {
            zero = c;
            continue;
        }
        const auto mem = membership(fp, b);
        if (mem == Membership::Outside) continue;
        const auto rep = verify_step2(e.point, b, ctx, 0, cap);
        if (!rep.passed) continue;
        if (found && !(candidates[*found] == b)) throw AmbiguousMembership(e.id);
        found = c;
        found_mem = mem;
    }
    Classified out{};
    if (found) {
        out.candidate = *found;
        if (found_mem == Membership::InZ) {
            out.graded = true;
        } else {
            const auto flag = e.flag ? *e.flag : candidates[*found].flag();
            out.delta = unipotent_stabilizer_dim(e.point, flag, ctx, cap);
        }
        return out;
    }
    if (zero) {
        const auto v = torus_instability_vector(e.point, ctx.npoints, cap);
        if (std::all_of(v.begin(), v.end(), [](const Rational& x) { return x == 0; })) {
            out.candidate = *zero;
            return out;
        }
    }
    throw Unclassified(e.id);
}

}  // namespace detail

inline std::vector<StratumRecord> assemble(const std::vector<CorpusEntry>& corpus, const CurveContext& ctx,
                                           const std::vector<BetaVector>& candidates, bool parallel = false,
                                           std::uint64_t cap = default_cap()) {
    std::vector<detail::Classified> cls(corpus.size());
    if (parallel) {
        std::vector<std::future<detail::Classified>> futs;
        for (const auto& e : corpus)
            futs.push_back(std::async(std::launch::async, [&] { return detail::classify_point(e, ctx, candidates, cap); }));
        for (std::size_t i = 0; i < futs.size(); ++i) cls[i] = futs[i].get();
    } else {
        for (std::size_t i = 0; i < corpus.size(); ++i) cls[i] = detail::classify_point(corpus[i], ctx, candidates, cap);
    }
    // key: (candidate, graded, delta)
    std::map<std::tuple<std::size_t, bool, long>, StratumRecord> acc;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        const auto& c = cls[i];
        const auto key = std::make_tuple(c.candidate, c.graded, c.delta ? long(*c.delta) : -1L);
        auto it = acc.find(key);
        if (it == acc.end()) {
            StratumRecord rec;
            rec.beta = candidates[c.candidate];
            rec.norm_sq = rec.beta.norm_sq();
            rec.delta = c.delta;
            rec.graded = c.graded;
            it = acc.emplace(key, std::move(rec)).first;
        }
        it->second.member_ids.push_back(corpus[i].id);
    }
    std::vector<StratumRecord> out;
    for (auto& [k, rec] : acc) out.push_back(std::move(rec));
    std::stable_sort(out.begin(), out.end(), [](const StratumRecord& a, const StratumRecord& b) {
        if (a.norm_sq != b.norm_sq) return a.norm_sq < b.norm_sq;
        if (a.beta.entries != b.beta.entries) return a.beta.entries > b.beta.entries;
        if (a.graded != b.graded) return !a.graded;
        const long da = a.delta ? long(*a.delta) : -1, db = b.delta ? long(*b.delta) : -1;
        return da < db;
    });
    return out;
}

inline std::vector<StratumRecord> assemble(const std::vector<CorpusEntry>& corpus, const CurveContext& ctx) {
    const Rational bound = Rational(ctx.degree, ctx.rank) + Rational(ctx.m());
    return assemble(corpus, ctx, default_candidates(ctx, bound));
}

struct ClosureRow {
    BetaVector beta;
    Rational norm_sq;
    std::size_t records = 0;
    std::size_t members = 0;
};

struct ClosurePair {
    std::size_t a, b;          // row positions
    PolygonOrder norm_order;   // comparison of |beta_a|^2 with |beta_b|^2
    std::optional<PolygonOrder> polygon_order;
};

struct ClosureReport {
    std::vector<ClosureRow> rows;
    std::vector<ClosurePair> pairs;
};

// Descriptive only: closure cannot be decided on finitely many points.
inline ClosureReport closure_order_report(const std::vector<StratumRecord>& records) {
    ClosureReport rep;
    for (const auto& rec : records) {
        auto it = std::find_if(rep.rows.begin(), rep.rows.end(), [&](const ClosureRow& r) { return r.beta == rec.beta; });
        if (it == rep.rows.end()) {
            rep.rows.push_back({rec.beta, rec.norm_sq, 0, 0});
            it = rep.rows.end() - 1;
        }
        ++it->records;
        it->members += rec.member_ids.size();
    }
    std::stable_sort(rep.rows.begin(), rep.rows.end(),
                     [](const ClosureRow& a, const ClosureRow& b) { return a.norm_sq < b.norm_sq; });
    auto source = [](const BetaVector& b) -> std::optional<HNType> {
        if (b.source) return b.source;
        return std::nullopt;
    };
    for (std::size_t i = 0; i < rep.rows.size(); ++i)
        for (std::size_t j = i + 1; j < rep.rows.size(); ++j) {
            ClosurePair p{i, j, PolygonOrder::Equal, std::nullopt};
            const auto &x = rep.rows[i].norm_sq, &y = rep.rows[j].norm_sq;
            p.norm_order = x < y ? PolygonOrder::Less : (x > y ? PolygonOrder::Greater : PolygonOrder::Equal);
            const auto sa = source(rep.rows[i].beta), sb = source(rep.rows[j].beta);
            if (sa && sb && sa->rank() == sb->rank() && sa->degree() == sb->degree())
                p.polygon_order = compare_polygon(*sa, *sb);
            rep.pairs.push_back(p);
        }
    return rep;
}

struct CompatEntry {
    CurveContext ctx;
    HNType tau, mu;
    bool tau_in_t_mu = false;
};

struct CompatTable {
    std::vector<CompatEntry> entries;
    std::vector<CompatEntry> violations;
};

// For every tau (first slope within d/r + window) and every mu in U(tau), checks tau in T(mu).
inline CompatTable compat_cross_table(const CurveContext& base, int r_max, std::pair<long, long> d_range,
                                      std::pair<long, long> degL_range, const Rational& window = 6) {
    CompatTable out;
    for (int r = 1; r <= r_max; ++r)
        for (long d = d_range.first; d <= d_range.second; ++d)
            for (long L = degL_range.first; L <= degL_range.second; ++L) {
                CurveContext ctx = base;
                ctx.rank = r;
                ctx.degree = d;
                ctx.degL = L;
                for (const auto& tau : enumerate_hn_types(ctx, Rational(d, r) + window)) {
                    for (const auto& mu : u_tau_candidates(tau, ctx).types) {
                        const auto tm = t_mu_candidates(mu, ctx).types;
                        CompatEntry e{ctx, tau, mu, std::find(tm.begin(), tm.end(), tau) != tm.end()};
                        if (!e.tau_in_t_mu) out.violations.push_back(e);
                        out.entries.push_back(std::move(e));
                    }
                }
            }
    return out;
}

}  // namespace higgsstrat
