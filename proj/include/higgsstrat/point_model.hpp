#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "errors.hpp"
#include "hn_types.hpp"
#include "matrix.hpp"
#include "minnorm.hpp"
#include "rational.hpp"
#include "weight_lattice.hpp"

namespace higgsstrat {

// One Grassmannian-completion factor <y, [c : phi]>.
struct Factor {
    RMatrix y;
    Rational c;
    RMatrix phi;
    friend bool operator==(const Factor&, const Factor&) = default;
};

struct ModelPoint {
    std::vector<Factor> factors;

    int rank() const { return factors.empty() ? 0 : static_cast<int>(factors.front().y.rows()); }
    int m() const { return factors.empty() ? 0 : static_cast<int>(factors.front().y.cols()); }

    void validate(int r, int m, int N) const {
        if (factors.size() != std::size_t(N))
            throw DimensionMismatch("point has " + std::to_string(factors.size()) + " factors, expected " +
                                    std::to_string(N));
        for (std::size_t k = 0; k < factors.size(); ++k) {
            const auto& f = factors[k];
            const std::string tag = "factor " + std::to_string(k + 1);
            if (f.y.rows() != std::size_t(r) || f.y.cols() != std::size_t(m))
                throw DimensionMismatch(tag + ": y must be " + std::to_string(r) + "x" + std::to_string(m));
            if (f.phi.rows() != std::size_t(r) || f.phi.cols() != std::size_t(r))
                throw DimensionMismatch(tag + ": phi must be " + std::to_string(r) + "x" + std::to_string(r));
            if (higgsstrat::rank(f.y) != std::size_t(r)) throw InvalidArgument(tag + ": y is not of full row rank");
            if (f.c == 0 && f.phi.is_zero()) throw DegeneratePoint(tag + ": (c, phi) is zero");
        }
    }
    void validate(const CurveContext& ctx) const { validate(ctx.rank, static_cast<int>(ctx.m()), ctx.npoints); }

    friend bool operator==(const ModelPoint&, const ModelPoint&) = default;
};

// Per-factor coordinate values. det[u] = c det(P_u); end[u r^2 + i r + j] = (adj(P_u) phi P_u)_{j i}
// where P_u is y restricted to the u-th column subset. No inverses are formed.
template <class T>
struct FactorValues {
    std::vector<T> det, end;
};

template <class T>
FactorValues<T> factor_values(const CoordinateIndexSpace& sp, const Matrix<T>& y, const T& c, const Matrix<T>& phi) {
    const std::size_t r = std::size_t(sp.r());
    FactorValues<T> out;
    out.det.reserve(sp.local_det_size());
    out.end.reserve(sp.local_end_size());
    for (const auto& sub : sp.subsets()) {
        const auto P = y.select_columns(sub);
        out.det.push_back(c * determinant(P));
        const auto A = adjugate(P) * phi * P;
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < r; ++j) out.end.push_back(A(j, i));
    }
    return out;
}

// Coordinates kept in product form: a full coordinate is the product of one local value per factor.
class FactorizedPoint {
public:
    FactorizedPoint(const ModelPoint& p, const CoordinateIndexSpace& space) : space_(space) {
        p.validate(space.r(), space.m(), space.npoints());
        for (const auto& f : p.factors) values_.push_back(factor_values<Rational>(space_, f.y, f.c, f.phi));
        for (int fam = 0; fam < 2; ++fam)
            for (const auto& fv : values_) {
                const auto& v = fam == 0 ? fv.det : fv.end;
                std::vector<std::size_t> s;
                for (std::size_t l = 0; l < v.size(); ++l)
                    if (v[l] != 0) s.push_back(l);
                support_[fam].push_back(std::move(s));
            }
        if (family_empty(IndexKind::Det) && family_empty(IndexKind::End))
            throw DegeneratePoint("every coordinate vanishes");
    }

    const CoordinateIndexSpace& space() const { return space_; }
    const std::vector<FactorValues<Rational>>& values() const { return values_; }

    const std::vector<std::vector<std::size_t>>& local_support(IndexKind kind) const {
        return support_[kind == IndexKind::Det ? 0 : 1];
    }
    bool family_empty(IndexKind kind) const {
        for (const auto& s : local_support(kind))
            if (s.empty()) return true;
        return false;
    }

    Rational local_value(IndexKind kind, std::size_t k, std::size_t l) const {
        return kind == IndexKind::Det ? values_[k].det[l] : values_[k].end[l];
    }

    Rational value(std::uint64_t pos) const {
        std::vector<std::size_t> local;
        const auto kind = space_.decode(pos, local);
        Rational v = 1;
        for (std::size_t k = 0; k < local.size(); ++k) {
            v *= local_value(kind, k, local[k]);
            if (v == 0) break;
        }
        return v;
    }

    // pairing of each local weight with beta, shared by all factors
    RVector local_pairings(IndexKind kind, const RVector& beta) const {
        const std::size_t n = kind == IndexKind::Det ? space_.local_det_size() : space_.local_end_size();
        RVector out(n);
        for (std::size_t l = 0; l < n; ++l) {
            RVector w(std::size_t(space_.m()), Rational(0));
            space_.add_local_weight(kind, l, w);
            out[l] = dot(w, beta);
        }
        return out;
    }

private:
    CoordinateIndexSpace space_;
    std::vector<FactorValues<Rational>> values_;
    std::vector<std::vector<std::size_t>> support_[2];
};

struct CoordinateTable {
    CoordinateIndexSpace space;
    std::vector<Rational> values;

    std::vector<std::uint64_t> support() const {
        std::vector<std::uint64_t> s;
        for (std::uint64_t p = 0; p < values.size(); ++p)
            if (values[p] != 0) s.push_back(p);
        return s;
    }
};

inline CoordinateTable coordinates(const ModelPoint& p, const CurveContext& ctx, std::uint64_t cap = default_cap()) {
    const FactorizedPoint fp(p, index_space(ctx, cap));
    CoordinateTable t{fp.space(), {}};
    t.values.resize(fp.space().size());
    for (std::uint64_t pos = 0; pos < t.values.size(); ++pos) t.values[pos] = fp.value(pos);
    return t;
}

// Equal up to one nonzero scalar.
inline bool proportional(const std::vector<Rational>& a, const std::vector<Rational>& b) {
    if (a.size() != b.size()) return false;
    std::optional<Rational> ratio;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if ((a[i] == 0) != (b[i] == 0)) return false;
        if (a[i] == 0) continue;
        const Rational q = a[i] / b[i];
        if (!ratio) ratio = q;
        else if (*ratio != q) return false;
    }
    return ratio.has_value();
}

enum class Membership { InZ, InY_not_Z, Outside };

inline std::string to_string(Membership m) {
    switch (m) {
        case Membership::InZ: return "InZ";
        case Membership::InY_not_Z: return "InY_not_Z";
        default: return "Outside";
    }
}

namespace detail {

inline void check_beta(const BetaVector& beta, int m) {
    if (beta.entries.size() != std::size_t(m))
        throw DimensionMismatch("beta has length " + std::to_string(beta.entries.size()) + ", expected m = " +
                                std::to_string(m));
}

struct FamilyRange {
    bool empty = true;
    Rational min, max;
    std::vector<std::size_t> argmin;
};

inline FamilyRange family_range(const FactorizedPoint& fp, IndexKind kind, const RVector& pair) {
    FamilyRange fr;
    if (fp.family_empty(kind)) return fr;
    fr.empty = false;
    fr.min = 0;
    fr.max = 0;
    for (const auto& s : fp.local_support(kind)) {
        std::size_t best = s.front();
        Rational lo = pair[s.front()], hi = pair[s.front()];
        for (auto l : s) {
            if (pair[l] < lo) {
                lo = pair[l];
                best = l;
            }
            if (pair[l] > hi) hi = pair[l];
        }
        fr.min += lo;
        fr.max += hi;
        fr.argmin.push_back(best);
    }
    return fr;
}

}  // namespace detail

inline Membership membership(const FactorizedPoint& fp, const BetaVector& beta) {
    detail::check_beta(beta, fp.space().m());
    const Rational nb = beta.norm_sq();
    bool equality = false, all_equal = true;
    for (auto kind : {IndexKind::Det, IndexKind::End}) {
        const auto fr = detail::family_range(fp, kind, fp.local_pairings(kind, beta.entries));
        if (fr.empty) continue;
        if (fr.min < nb) return Membership::Outside;
        if (fr.min == nb) equality = true;
        if (fr.min != nb || fr.max != nb) all_equal = false;
    }
    if (!equality) return Membership::Outside;
    return all_equal ? Membership::InZ : Membership::InY_not_Z;
}

inline Membership membership(const ModelPoint& p, const BetaVector& beta, const CurveContext& ctx,
                             std::uint64_t cap = default_cap()) {
    return membership(FactorizedPoint(p, index_space(ctx, cap)), beta);
}

struct Step1Report {
    bool passed = false;
    Rational norm_sq;
    Rational min_pairing;
    std::vector<CoordinateIndex> violations;  // truncated to the listing limit
    bool violations_truncated = false;
    std::optional<CoordinateIndex> equality_witness;
};

inline Step1Report verify_step1(const ModelPoint& p, const BetaVector& beta, const CurveContext& ctx,
                                std::size_t listing_limit = 32, std::uint64_t cap = default_cap()) {
    const FactorizedPoint fp(p, index_space(ctx, cap));
    detail::check_beta(beta, fp.space().m());
    Step1Report rep;
    rep.norm_sq = beta.norm_sq();
    bool have_min = false;
    for (auto kind : {IndexKind::Det, IndexKind::End}) {
        const auto pair = fp.local_pairings(kind, beta.entries);
        const auto fr = detail::family_range(fp, kind, pair);
        if (fr.empty) continue;
        if (!have_min || fr.min < rep.min_pairing) rep.min_pairing = fr.min;
        have_min = true;
        if (fr.min == rep.norm_sq && !rep.equality_witness) rep.equality_witness = fp.space().from_locals(kind, fr.argmin);
        if (fr.min >= rep.norm_sq) continue;
        // list violating tuples, pruning with the per-factor minima
        const auto& sup = fp.local_support(kind);
        const std::size_t N = sup.size();
        std::vector<Rational> tail_min(N + 1, Rational(0));
        for (std::size_t k = N; k-- > 0;) {
            Rational lo = pair[sup[k].front()];
            for (auto l : sup[k]) lo = std::min(lo, pair[l]);
            tail_min[k] = tail_min[k + 1] + lo;
        }
        std::vector<std::size_t> cur(N);
        auto dfs = [&](auto&& self, std::size_t k, const Rational& acc) -> void {
            if (rep.violations_truncated) return;
            if (acc + tail_min[k] >= rep.norm_sq) return;
            if (k == N) {
                if (rep.violations.size() == listing_limit) {
                    rep.violations_truncated = true;
                    return;
                }
                rep.violations.push_back(fp.space().from_locals(kind, cur));
                return;
            }
            for (auto l : sup[k]) {
                cur[k] = l;
                self(self, k + 1, acc + pair[l]);
            }
        };
        dfs(dfs, 0, Rational(0));
    }
    rep.passed = rep.violations.empty() && rep.equality_witness.has_value();
    return rep;
}

namespace detail {

struct FactorRetraction {
    Factor factor;
    std::vector<int> row_blocks;  // rho_gamma, dimension of the new part of y(M_gamma)
};

inline Matrix<Rational> inverse(const RMatrix& a) {
    const Rational d = determinant(a);
    if (d == 0) throw InvalidArgument("singular matrix");
    return (1 / d) * adjugate(a);
}

// Limit of lambda_beta(t) . <y, [c : phi]> as t -> 0 for one factor.
inline FactorRetraction retract_factor(const Factor& f, const std::vector<int>& col_blocks, const RVector& block_value) {
    const std::size_t r = f.y.rows(), s = col_blocks.size();
    std::vector<RVector> basis;
    std::vector<int> rho(s, 0);
    RankAccumulator acc(r);
    std::size_t col = 0;
    for (std::size_t g = 0; g < s; ++g)
        for (int t = 0; t < col_blocks[g]; ++t, ++col) {
            RVector v(r);
            for (std::size_t i = 0; i < r; ++i) v[i] = f.y(i, col);
            if (acc.add(v)) {
                basis.push_back(v);
                ++rho[g];
            }
        }
    RMatrix B(r, r);
    for (std::size_t j = 0; j < r; ++j)
        for (std::size_t i = 0; i < r; ++i) B(i, j) = basis[j][i];
    const RMatrix Binv = inverse(B);
    const RMatrix yt = Binv * f.y;
    const RMatrix pt = Binv * f.phi * B;

    std::vector<std::size_t> row_block(r), col_block(f.y.cols());
    {
        std::size_t i = 0, c = 0;
        for (std::size_t g = 0; g < s; ++g) {
            for (int t = 0; t < rho[g]; ++t) row_block[i++] = g;
            for (int t = 0; t < col_blocks[g]; ++t) col_block[c++] = g;
        }
    }
    FactorRetraction out;
    out.row_blocks = rho;
    out.factor.y = RMatrix(r, f.y.cols());
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < f.y.cols(); ++j)
            if (row_block[i] == col_block[j]) out.factor.y(i, j) = yt(i, j);

    // [c : phi~] with phi~_{ab} scaled by t^(e_a - e_b); keep the lowest exponent
    std::optional<Rational> lowest;
    if (f.c != 0) lowest = Rational(0);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j)
            if (pt(i, j) != 0) {
                const Rational e = block_value[row_block[i]] - block_value[row_block[j]];
                if (!lowest || e < *lowest) lowest = e;
            }
    out.factor.c = (f.c != 0 && *lowest == 0) ? f.c : Rational(0);
    out.factor.phi = RMatrix(r, r);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j)
            if (pt(i, j) != 0 && block_value[row_block[i]] - block_value[row_block[j]] == *lowest)
                out.factor.phi(i, j) = pt(i, j);
    return out;
}

inline void check_chamber(const BetaVector& beta) {
    for (std::size_t i = 1; i < beta.entries.size(); ++i)
        if (beta.entries[i] > beta.entries[i - 1])
            throw InvalidArgument("beta must have weakly decreasing entries");
}

struct Retraction {
    ModelPoint point;
    std::vector<std::vector<int>> row_blocks;  // per factor
};

inline Retraction retract_detailed(const ModelPoint& p, const BetaVector& beta, const CurveContext& ctx,
                                   std::uint64_t cap) {
    const auto mem = membership(p, beta, ctx, cap);
    if (mem == Membership::Outside) throw NotInY("point is outside Y_beta");
    check_chamber(beta);
    const auto flag = BetaVector::from_entries(beta.entries).flag();
    const auto values = BetaVector::from_entries(beta.entries).block_values();
    Retraction out;
    for (const auto& f : p.factors) {
        auto fr = retract_factor(f, flag.sizes(), values);
        out.point.factors.push_back(std::move(fr.factor));
        out.row_blocks.push_back(std::move(fr.row_blocks));
    }
    return out;
}

}  // namespace detail

inline ModelPoint retract_p_beta(const ModelPoint& p, const BetaVector& beta, const CurveContext& ctx,
                                 std::uint64_t cap = default_cap()) {
    return detail::retract_detailed(p, beta, ctx, cap).point;
}

struct HiggsFactor {
    FlagShape image_flag;  // dims of the images of the M_gamma in k^r, blockwise
    RMatrix y;
    Rational c;
    RMatrix phi;
};

struct HiggsDatum {
    FlagShape flag;  // blocks of k^m
    std::vector<HiggsFactor> factors;
};

// Type whose beta has the blocks of h: m_gamma = d_gamma + r_gamma (1 - g).
inline HNType type_of(const HiggsDatum& h, const CurveContext& ctx) {
    if (h.factors.empty()) throw InvalidArgument("datum has no factors");
    const auto& img = h.factors.front().image_flag;
    for (const auto& f : h.factors)
        if (!(f.image_flag == img)) throw InvalidArgument("image flags differ between factors");
    if (img.length() != h.flag.length()) throw DimensionMismatch("image flag and flag differ in length");
    std::vector<Block> blocks;
    for (std::size_t g = 0; g < img.length(); ++g) {
        const long rg = img.sizes()[g];
        blocks.push_back({static_cast<int>(rg), h.flag.sizes()[g] - rg * (1 - ctx.genus)});
    }
    return HNType(blocks);
}

inline ModelPoint from_higgs_data(const HiggsDatum& h) {
    ModelPoint p;
    const std::size_t s = h.flag.length();
    for (std::size_t k = 0; k < h.factors.size(); ++k) {
        const auto& f = h.factors[k];
        const auto fail = [&](std::size_t g, const std::string& what) {
            throw InvariantViolation("(gamma=" + std::to_string(g + 1) + ", k=" + std::to_string(k + 1) + "): " + what);
        };
        const std::size_t r = f.y.rows();
        if (f.y.cols() != std::size_t(h.flag.dim())) throw DimensionMismatch("y columns differ from flag dimension");
        if (f.image_flag.dim() != static_cast<int>(r) || f.image_flag.length() != s)
            throw DimensionMismatch("image flag does not fit y");
        if (f.phi.rows() != r || f.phi.cols() != r) throw DimensionMismatch("phi is not r x r");
        for (std::size_t g = 0; g < s; ++g) {
            const int R = f.image_flag.cumulative(g + 1);
            const int col0 = h.flag.cumulative(g), col1 = h.flag.cumulative(g + 1);
            for (std::size_t i = std::size_t(R); i < r; ++i)
                for (int j = col0; j < col1; ++j)
                    if (f.y(i, std::size_t(j)) != 0) fail(g, "y does not map M_gamma into the image flag");
            if (higgsstrat::rank(f.y.block(0, 0, r, std::size_t(col1))) != std::size_t(R))
                fail(g, "image of M_gamma has the wrong dimension");
            for (std::size_t i = std::size_t(R); i < r; ++i)
                for (int j = 0; j < R; ++j)
                    if (f.phi(i, std::size_t(j)) != 0) fail(g, "image of M_gamma is not phi-invariant");
        }
        if (f.c == 0 && f.phi.is_zero()) throw InvalidArgument("(c, phi) is zero at factor " + std::to_string(k + 1));
        p.factors.push_back({f.y, f.c, f.phi});
    }
    return p;
}

struct BlockCheck {
    std::size_t gamma = 0;  // 1-based
    bool semistable = false;
    RVector character;
    RVector witness;  // separating direction when not semistable
    std::string note;
};

struct TraceIdentityCheck {
    std::uint64_t checked = 0;
    bool holds = true;
    std::optional<std::vector<long>> counterexample;
};

// Sum_gamma (-N r_gamma / m_gamma) tr(lambda_gamma) = lambda . beta over integer trace-zero lambda.
inline TraceIdentityCheck step2_trace_identity(const BetaVector& beta, int bound,
                                               std::uint64_t cap = 50'000'000) {
    if (beta.k_blocks.empty()) throw InvalidArgument("beta carries no block data");
    const std::size_t m = beta.entries.size();
    std::vector<Rational> coef;
    std::vector<std::size_t> block_of;
    for (std::size_t g = 0; g < beta.m_blocks.size(); ++g) {
        coef.push_back(Rational(-long(beta.npoints) * beta.block_rank(g), beta.m_blocks[g]));
        for (long t = 0; t < beta.m_blocks[g]; ++t) block_of.push_back(g);
    }
    TraceIdentityCheck out;
    std::vector<long> lam(m);
    auto visit = [&](auto&& self, std::size_t i, long sum) -> void {
        if (!out.holds) return;
        const long rest = long(m - i);
        if (sum > rest * bound || sum < -rest * bound) return;
        if (i + 1 == m) {
            lam[i] = -sum;
            if (++out.checked > cap) throw CapExceeded("trace identity family exceeds cap " + std::to_string(cap));
            Rational lhs = 0, rhs = 0;
            for (std::size_t l = 0; l < m; ++l) {
                lhs += coef[block_of[l]] * lam[l];
                rhs += beta.entries[l] * lam[l];
            }
            if (lhs != rhs) {
                out.holds = false;
                out.counterexample = lam;
            }
            return;
        }
        for (long v = -bound; v <= bound; ++v) {
            lam[i] = v;
            self(self, i + 1, sum + v);
        }
    };
    if (m == 1) {
        lam[0] = 0;
        out.checked = 1;
        if (beta.entries[0] != 0) out.holds = false;
    } else {
        visit(visit, 0, 0);
    }
    return out;
}

struct Step2Report {
    bool passed = false;
    ModelPoint retracted;
    std::vector<BlockCheck> blocks;
    TraceIdentityCheck trace;
};

namespace detail {

inline std::vector<RVector> minkowski_distinct(const std::vector<std::vector<RVector>>& parts) {
    std::set<RVector> acc{RVector(parts.front().front().size(), Rational(0))};
    for (const auto& part : parts) {
        std::set<RVector> next;
        for (const auto& a : acc)
            for (const auto& b : part) {
                RVector v = a;
                for (std::size_t i = 0; i < v.size(); ++i) v[i] += b[i];
                next.insert(std::move(v));
            }
        acc = std::move(next);
    }
    return {acc.begin(), acc.end()};
}

// distinct weights of the support of a point, in ambient coordinates
inline std::vector<RVector> support_weights(const FactorizedPoint& fp) {
    std::vector<RVector> out;
    for (auto kind : {IndexKind::Det, IndexKind::End}) {
        if (fp.family_empty(kind)) continue;
        std::vector<std::vector<RVector>> parts;
        for (const auto& s : fp.local_support(kind)) {
            std::set<RVector> ws;
            for (auto l : s) {
                RVector w(std::size_t(fp.space().m()), Rational(0));
                fp.space().add_local_weight(kind, l, w);
                ws.insert(w);
            }
            parts.emplace_back(ws.begin(), ws.end());
        }
        auto sum = minkowski_distinct(parts);
        out.insert(out.end(), sum.begin(), sum.end());
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace detail

// Torus semistability of a point of Ghat(r,m)^N: the barycentric character lies in the
// hull of the support weights. Returns the min-norm point of the translated hull.
inline RVector torus_instability_vector(const ModelPoint& p, int N, std::uint64_t cap = default_cap()) {
    const FactorizedPoint fp(p, CoordinateIndexSpace(p.rank(), p.m(), N, cap));
    const auto ws = detail::support_weights(fp);
    const Rational chi(long(N) * (p.m() - p.rank()), p.m());
    std::vector<RVector> shifted;
    for (auto w : ws) {
        for (auto& x : w) x -= chi;
        shifted.push_back(std::move(w));
    }
    return min_norm_point(PointCloud(shifted));
}

inline Step2Report verify_step2(const ModelPoint& p, const BetaVector& beta, const CurveContext& ctx,
                                int lambda_bound = 3, std::uint64_t cap = default_cap()) {
    auto ret = detail::retract_detailed(p, beta, ctx, cap);
    Step2Report rep;
    rep.retracted = ret.point;
    const auto flag = BetaVector::from_entries(beta.entries).flag();
    const int N = ctx.npoints;
    bool ok = true;
    for (std::size_t g = 0; g < flag.length(); ++g) {
        BlockCheck bc;
        bc.gamma = g + 1;
        const int mg = flag.sizes()[g];
        const int rho = ret.row_blocks.front()[g];
        bool same = true;
        for (const auto& rb : ret.row_blocks) same = same && rb[g] == rho;
        if (!same || rho == 0) {
            bc.note = rho == 0 ? "block has rank 0" : "block ranks differ between factors";
            rep.blocks.push_back(bc);
            ok = false;
            continue;
        }
        bc.character.assign(std::size_t(mg), Rational(long(N) * (mg - rho), mg));
        ModelPoint block;
        bool valid = true;
        for (std::size_t k = 0; k < ret.point.factors.size(); ++k) {
            const auto& f = ret.point.factors[k];
            int row0 = 0;
            for (std::size_t a = 0; a < g; ++a) row0 += ret.row_blocks[k][a];
            Factor bf{f.y.block(std::size_t(row0), std::size_t(flag.offset(g)), std::size_t(rho), std::size_t(mg)), f.c,
                      f.phi.block(std::size_t(row0), std::size_t(row0), std::size_t(rho), std::size_t(rho))};
            if (bf.c == 0 && bf.phi.is_zero()) valid = false;
            block.factors.push_back(std::move(bf));
        }
        if (!valid) {
            bc.note = "block factor has (c, phi) = 0";
            rep.blocks.push_back(bc);
            ok = false;
            continue;
        }
        try {
            const auto v = torus_instability_vector(block, N, cap);
            bc.semistable = std::all_of(v.begin(), v.end(), [](const Rational& x) { return x == 0; });
            if (!bc.semistable) bc.witness = v;
        } catch (const DegeneratePoint&) {
            bc.note = "block coordinates vanish";
        }
        ok = ok && bc.semistable;
        rep.blocks.push_back(bc);
    }
    if (!beta.k_blocks.empty()) {
        rep.trace = step2_trace_identity(beta, lambda_bound);
        ok = ok && rep.trace.holds;
    }
    rep.passed = ok;
    return rep;
}

// Dimension of {xi in Lie U : first-order action of xi on the coordinates is a multiple
// of the coordinates}. U is strictly block upper triangular for the flag on k^m and
// acts by y -> y (I - eps xi).
inline std::size_t unipotent_stabilizer_dim(const ModelPoint& p, const FlagShape& flag, const CurveContext& ctx,
                                            std::uint64_t cap = default_cap()) {
    using D = Dual<Rational>;
    const auto space = index_space(ctx, cap);
    const FactorizedPoint base(p, space);
    if (flag.dim() != space.m()) throw DimensionMismatch("flag does not flag k^m");
    const std::size_t m = std::size_t(space.m()), N = p.factors.size();
    std::vector<std::pair<std::size_t, std::size_t>> basis;
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = 0; b < m; ++b)
            if (flag.block_of(int(a)) < flag.block_of(int(b))) basis.emplace_back(a, b);
    if (basis.empty()) return 0;

    // derivative tables: deriv[xi][k] are the eps-parts of factor k's local values
    std::vector<std::vector<FactorValues<Rational>>> deriv(basis.size());
    for (std::size_t x = 0; x < basis.size(); ++x) {
        const auto [a, b] = basis[x];
        for (const auto& f : p.factors) {
            Matrix<D> y(f.y.rows(), m), phi(f.phi.rows(), f.phi.cols());
            for (std::size_t i = 0; i < f.y.rows(); ++i)
                for (std::size_t j = 0; j < m; ++j) y(i, j) = D(f.y(i, j));
            for (std::size_t i = 0; i < f.y.rows(); ++i) y(i, b) = y(i, b) - D(Rational(0), f.y(i, a));
            for (std::size_t i = 0; i < phi.rows(); ++i)
                for (std::size_t j = 0; j < phi.cols(); ++j) phi(i, j) = D(f.phi(i, j));
            const auto fv = factor_values<D>(space, y, D(f.c), phi);
            FactorValues<Rational> dv;
            for (const auto& v : fv.det) dv.det.push_back(v.b);
            for (const auto& v : fv.end) dv.end.push_back(v.b);
            deriv[x].push_back(std::move(dv));
        }
    }
    RankAccumulator acc(basis.size() + 1);
    std::vector<std::size_t> local;
    for (std::uint64_t pos = 0; pos < space.size() && !acc.full(); ++pos) {
        const auto kind = space.decode(pos, local);
        std::vector<Rational> val(N);
        for (std::size_t k = 0; k < N; ++k) val[k] = base.local_value(kind, k, local[k]);
        RVector row(basis.size() + 1, Rational(0));
        bool nonzero = false;
        for (std::size_t x = 0; x < basis.size(); ++x) {
            Rational d = 0;
            for (std::size_t k = 0; k < N; ++k) {
                const auto& tab = kind == IndexKind::Det ? deriv[x][k].det : deriv[x][k].end;
                if (tab[local[k]] == 0) continue;
                Rational term = tab[local[k]];
                for (std::size_t q = 0; q < N && term != 0; ++q)
                    if (q != k) term *= val[q];
                d += term;
            }
            row[x] = d;
            nonzero = nonzero || d != 0;
        }
        Rational v = 1;
        for (std::size_t k = 0; k < N; ++k) v *= val[k];
        row.back() = -v;
        nonzero = nonzero || v != 0;
        if (nonzero) acc.add(std::move(row));
    }
    return basis.size() + 1 - acc.rank();
}

// Dimension of {psi : psi(E^i) in E^(i-1), psi phi_k = phi_k psi for all k}. With E^i spanned by
// the first B_i basis vectors, psi is strictly block upper triangular as a matrix.
inline std::size_t nilpotent_commutant_dim(const FlagShape& flag, const std::vector<RMatrix>& phis) {
    const std::size_t r = std::size_t(flag.dim());
    for (const auto& phi : phis)
        if (phi.rows() != r || phi.cols() != r) throw DimensionMismatch("phi must be " + std::to_string(r) + "x" + std::to_string(r));
    std::vector<std::pair<std::size_t, std::size_t>> unknowns;
    for (std::size_t a = 0; a < r; ++a)
        for (std::size_t b = 0; b < r; ++b)
            if (flag.block_of(int(a)) < flag.block_of(int(b))) unknowns.emplace_back(a, b);
    if (unknowns.empty()) return 0;
    RMatrix eq(phis.size() * r * r, unknowns.size());
    for (std::size_t k = 0; k < phis.size(); ++k)
        for (std::size_t u = 0; u < unknowns.size(); ++u) {
            const auto [a, b] = unknowns[u];
            // psi = E_ab: (E_ab phi)_{pq} = [p=a] phi_{bq}; (phi E_ab)_{pq} = phi_{pa} [q=b]
            for (std::size_t q = 0; q < r; ++q) eq(k * r * r + a * r + q, u) += phis[k](b, q);
            for (std::size_t pp = 0; pp < r; ++pp) eq(k * r * r + pp * r + b, u) -= phis[k](pp, a);
        }
    return unknowns.size() - rank(eq);
}

}  // namespace higgsstrat
