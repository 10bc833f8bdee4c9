#pragma once

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "errors.hpp"
#include "matrix.hpp"
#include "rational.hpp"

namespace higgsstrat {

struct CurveContext {
    int rank = 1;
    long degree = 0;
    int genus = 0;
    long degL = 0;
    int npoints = 1;

    long m() const { return degree + long(rank) * (1 - genus); }

    void validate() const {
        if (rank < 1) throw InvalidArgument("rank must be positive");
        if (genus < 0) throw InvalidArgument("genus must be non-negative");
        if (degL < 0) throw InvalidArgument("degL must be non-negative");
        if (npoints < 1) throw InvalidArgument("npoints must be positive");
    }
};

enum class Flavor { HN, HiggsHN };

struct Block {
    int rank;
    long degree;
    friend bool operator==(const Block&, const Block&) = default;
};

class HNType {
public:
    HNType() = default;
    HNType(std::vector<Block> blocks, Flavor flavor = Flavor::HN) : blocks_(std::move(blocks)), flavor_(flavor) {
        validate();
    }

    static HNType semistable(int r, long d, Flavor flavor = Flavor::HN) { return HNType({{r, d}}, flavor); }

    static HNType from_lists(const std::vector<int>& ranks, const std::vector<long>& degrees,
                             Flavor flavor = Flavor::HN) {
        if (ranks.size() != degrees.size()) throw InvalidArgument("ranks and degrees differ in length");
        std::vector<Block> b;
        for (std::size_t i = 0; i < ranks.size(); ++i) b.push_back({ranks[i], degrees[i]});
        return HNType(std::move(b), flavor);
    }

    const std::vector<Block>& blocks() const { return blocks_; }
    std::size_t length() const { return blocks_.size(); }
    Flavor flavor() const { return flavor_; }
    HNType with_flavor(Flavor f) const { return HNType(blocks_, f); }
    bool is_semistable() const { return blocks_.size() == 1; }

    int rank() const {
        int r = 0;
        for (const auto& b : blocks_) r += b.rank;
        return r;
    }
    long degree() const {
        long d = 0;
        for (const auto& b : blocks_) d += b.degree;
        return d;
    }
    Rational slope(std::size_t gamma) const { return Rational(blocks_.at(gamma).degree, blocks_.at(gamma).rank); }
    Rational first_slope() const { return slope(0); }
    int max_block_rank() const {
        int r = 0;
        for (const auto& b : blocks_) r = std::max(r, b.rank);
        return r;
    }
    std::vector<int> shape() const {
        std::vector<int> s;
        for (const auto& b : blocks_) s.push_back(b.rank);
        return s;
    }

    // slope of each block repeated rank times
    RVector slope_vector() const {
        RVector v;
        for (std::size_t g = 0; g < blocks_.size(); ++g)
            for (int i = 0; i < blocks_[g].rank; ++i) v.push_back(slope(g));
        return v;
    }

    std::string str() const {
        std::string s = "[";
        for (std::size_t i = 0; i < blocks_.size(); ++i) {
            if (i) s += ",";
            s += "(" + std::to_string(blocks_[i].rank) + "," + std::to_string(blocks_[i].degree) + ")";
        }
        return s + "]";
    }

    // flavor is a label only
    friend bool operator==(const HNType& a, const HNType& b) { return a.blocks_ == b.blocks_; }
    // lexicographic on slope_vector(), then on shape()
    friend bool operator<(const HNType& a, const HNType& b) {
        std::size_t ga = 0, gb = 0;
        int ia = 0, ib = 0;
        while (ga < a.blocks_.size() && gb < b.blocks_.size()) {
            const int c = detail_slope_cmp(a.blocks_[ga], b.blocks_[gb]);
            if (c != 0) return c < 0;
            if (++ia == a.blocks_[ga].rank) ++ga, ia = 0;
            if (++ib == b.blocks_[gb].rank) ++gb, ib = 0;
        }
        if (ga < a.blocks_.size() || gb < b.blocks_.size()) return gb < b.blocks_.size();
        return a.shape() < b.shape();
    }

private:
    void validate() const {
        if (blocks_.empty()) throw InvalidArgument("HN type needs at least one block");
        for (const auto& b : blocks_)
            if (b.rank < 1) throw InvalidArgument("block ranks must be positive");
        for (std::size_t g = 1; g < blocks_.size(); ++g)
            if (detail_slope_cmp(blocks_[g - 1], blocks_[g]) <= 0) throw InvalidArgument("slopes must strictly decrease: " + str());
    }

    static int detail_slope_cmp(const Block& x, const Block& y) {
        const __int128 l = __int128(x.degree) * y.rank, r = __int128(y.degree) * x.rank;
        return l < r ? -1 : (l > r ? 1 : 0);
    }

    std::vector<Block> blocks_;
    Flavor flavor_ = Flavor::HN;
};

enum class PolygonOrder { Less, Greater, Equal, Incomparable };

inline std::string to_string(PolygonOrder o) {
    switch (o) {
        case PolygonOrder::Less: return "Less";
        case PolygonOrder::Greater: return "Greater";
        case PolygonOrder::Equal: return "Equal";
        default: return "Incomparable";
    }
}

class FlagShape {
public:
    FlagShape() = default;
    explicit FlagShape(std::vector<int> sizes) : sizes_(std::move(sizes)) {
        if (sizes_.empty()) throw InvalidArgument("flag needs at least one block");
        for (int b : sizes_)
            if (b < 1) throw InvalidArgument("flag block sizes must be positive");
    }
    const std::vector<int>& sizes() const { return sizes_; }
    std::size_t length() const { return sizes_.size(); }
    int dim() const { return std::accumulate(sizes_.begin(), sizes_.end(), 0); }
    // B_gamma for gamma = 0..s (B_0 = 0)
    int cumulative(std::size_t gamma) const {
        return std::accumulate(sizes_.begin(), sizes_.begin() + static_cast<long>(gamma), 0);
    }
    int offset(std::size_t block) const { return cumulative(block); }
    std::size_t block_of(int index) const {
        int acc = 0;
        for (std::size_t g = 0; g < sizes_.size(); ++g) {
            acc += sizes_[g];
            if (index < acc) return g;
        }
        throw IndexOutOfRange("flag index " + std::to_string(index));
    }
    friend bool operator==(const FlagShape&, const FlagShape&) = default;

private:
    std::vector<int> sizes_;
};

namespace detail {

// upper slope bound as un / ud with ud > 0
struct SlopeBound {
    long un, ud;
    bool inclusive;
};

inline long floor_div(long a, long b) { return a / b - ((a % b != 0) && ((a < 0) != (b < 0))); }

inline void extend_types(int R, long D, const SlopeBound& upper, std::vector<Block>& prefix,
                         std::vector<HNType>& out) {
    for (int rg = 1; rg <= R; ++rg) {
        // largest admissible degree for a block of rank rg
        const __int128 top = __int128(upper.un) * rg;
        long hi = long(top / upper.ud);
        if (top % upper.ud != 0 && top < 0) --hi;
        if (!upper.inclusive && __int128(hi) * upper.ud == top) --hi;
        if (rg == R) {
            if (D <= hi) {
                prefix.push_back({rg, D});
                out.emplace_back(prefix);
                prefix.pop_back();
            }
            continue;
        }
        // this block is not the last: its slope must exceed D/R
        for (long dg = floor_div(D * rg, R) + 1; dg <= hi; ++dg) {
            prefix.push_back({rg, dg});
            extend_types(R - rg, D - dg, {dg, rg, false}, prefix, out);
            prefix.pop_back();
        }
    }
}

}  // namespace detail

// All types of (ctx.rank, ctx.degree) with first slope <= bound, sorted by slope vector.
inline std::vector<HNType> enumerate_hn_types(const CurveContext& ctx, const Rational& max_first_slope,
                                              Flavor flavor = Flavor::HN) {
    ctx.validate();
    std::vector<HNType> out;
    std::vector<Block> prefix;
    const auto lim = [](const Integer& v) {
        const Integer cap(std::numeric_limits<long>::max() / 4);
        if (v > cap || v < -cap) throw CapExceeded("slope bound out of range");
        return v.convert_to<long>();
    };
    detail::extend_types(ctx.rank, ctx.degree, {lim(num(max_first_slope)), lim(den(max_first_slope)), true}, prefix,
                         out);
    std::sort(out.begin(), out.end());
    if (flavor != Flavor::HN)
        for (auto& t : out) t = t.with_flavor(flavor);
    return out;
}

namespace detail {
inline RVector polygon_vertices(const HNType& t) {
    RVector p{Rational(0)};
    Rational acc = 0;
    for (std::size_t g = 0; g < t.length(); ++g) {
        const Rational s = t.slope(g);
        for (int i = 0; i < t.blocks()[g].rank; ++i) {
            acc += s;
            p.push_back(acc);
        }
    }
    return p;
}
}  // namespace detail

// Less means a lies on or below b everywhere, strictly somewhere.
inline PolygonOrder compare_polygon(const HNType& a, const HNType& b) {
    if (a.rank() != b.rank() || a.degree() != b.degree())
        throw MismatchedAmbient("(" + std::to_string(a.rank()) + "," + std::to_string(a.degree()) + ") vs (" +
                                std::to_string(b.rank()) + "," + std::to_string(b.degree()) + ")");
    const auto pa = detail::polygon_vertices(a), pb = detail::polygon_vertices(b);
    bool below = false, above = false;
    for (std::size_t x = 0; x < pa.size(); ++x) {
        if (pa[x] < pb[x]) below = true;
        if (pa[x] > pb[x]) above = true;
    }
    if (below && above) return PolygonOrder::Incomparable;
    if (below) return PolygonOrder::Less;
    if (above) return PolygonOrder::Greater;
    return PolygonOrder::Equal;
}

using IndexPair = std::pair<int, int>;

// Compares d_j/r_j - d_i/r_i for 1-based pairs i < j.
inline PolygonOrder higgs_index_order(IndexPair p, IndexPair q, const HNType& mu) {
    const int s = static_cast<int>(mu.length());
    auto gap = [&](IndexPair x) {
        if (x.first < 1 || x.second > s || x.first >= x.second)
            throw IndexOutOfRange("pair (" + std::to_string(x.first) + "," + std::to_string(x.second) + ")");
        return mu.slope(x.second - 1) - mu.slope(x.first - 1);
    };
    const Rational a = gap(p), b = gap(q);
    if (a < b) return PolygonOrder::Less;
    if (a > b) return PolygonOrder::Greater;
    return PolygonOrder::Equal;
}

inline Rational semistable_higgs_bound(const CurveContext& ctx) {
    const int r = ctx.rank;
    return Rational(ctx.degree, r) + Rational(long(r - 1) * (r - 1), r) * ctx.degL;
}

// Uses the total rank r in place of r_s; (x - 1)^2 / x increases in x, so this only enlarges the set.
inline Rational unstable_higgs_bound(const HNType& mu, const CurveContext& ctx) {
    const int r = mu.rank();
    return mu.first_slope() + (Rational(long(r - 1) * (r - 1), r) + 1) * ctx.degL;
}

inline Rational t_mu_bound(const HNType& mu, const CurveContext& ctx) {
    return mu.is_semistable() ? semistable_higgs_bound(ctx) : unstable_higgs_bound(mu, ctx);
}

namespace detail {
inline void check_ambient(const HNType& t, const CurveContext& ctx) {
    if (t.rank() != ctx.rank || t.degree() != ctx.degree)
        throw MismatchedAmbient("type " + t.str() + " is not of rank " + std::to_string(ctx.rank) + ", degree " +
                                std::to_string(ctx.degree));
}
}  // namespace detail

struct CandidateSet {
    std::vector<HNType> types;
    Rational bound;
    bool sharpened = false;  // false: necessary conditions only
};

inline CandidateSet t_mu_candidates(const HNType& mu, const CurveContext& ctx) {
    detail::check_ambient(mu, ctx);
    const Rational bound = t_mu_bound(mu, ctx);
    return {enumerate_hn_types(ctx, bound, Flavor::HN), bound, false};
}

inline bool in_t_mu(const HNType& tau, const HNType& mu, const CurveContext& ctx) {
    return tau.first_slope() <= t_mu_bound(mu, ctx);
}

enum class Rank3Verdict { Forbidden, ForcedEqual, AllowedWithConstraint };

struct Rank3Cell {
    Rank3Verdict verdict;
    std::string constraint;  // empty when no extra condition is attached
    friend bool operator==(const Rank3Cell&, const Rank3Cell&) = default;
};

inline std::string to_string(Rank3Verdict v) {
    switch (v) {
        case Rank3Verdict::Forbidden: return "Forbidden";
        case Rank3Verdict::ForcedEqual: return "ForcedEqual";
        default: return "AllowedWithConstraint";
    }
}

inline Rank3Cell classify_rank3(const std::vector<int>& tau_shape, const std::vector<int>& mu_shape) {
    auto check = [](const std::vector<int>& c, const char* what) {
        int s = 0;
        for (int x : c) {
            if (x < 1) throw InvalidArgument(std::string(what) + " has a non-positive part");
            s += x;
        }
        if (s != 3) throw InvalidArgument(std::string(what) + " does not sum to 3");
    };
    check(tau_shape, "tau shape");
    check(mu_shape, "mu shape");
    using V = Rank3Verdict;
    const std::vector<int> t = tau_shape, u = mu_shape;
    const std::vector<int> s3{3}, s111{1, 1, 1}, s21{2, 1}, s12{1, 2};
    if (t == s3) return u == s3 ? Rank3Cell{V::ForcedEqual, ""} : Rank3Cell{V::Forbidden, ""};
    if (t == s111) {
        if (u == s111) return {V::ForcedEqual, ""};
        if (u == s21) return {V::AllowedWithConstraint, "E^1 ⊇ E^1'"};
        if (u == s12) return {V::AllowedWithConstraint, "E^1 ⊆ E^2'"};
        return {V::AllowedWithConstraint, ""};
    }
    if (t == s21) {
        if (u == s111) return {V::Forbidden, ""};
        if (u == s21) return {V::ForcedEqual, ""};
        if (u == s12) return {V::AllowedWithConstraint, "E^1 ⊆ E^1'"};
        return {V::AllowedWithConstraint, ""};
    }
    // t == (1,2)
    if (u == s12) return {V::ForcedEqual, ""};
    if (u == s3) return {V::AllowedWithConstraint, ""};
    return {V::Forbidden, ""};
}

// Higgs types mu that can occur for a bundle whose HN type is tau.
inline CandidateSet u_tau_candidates(const HNType& tau, const CurveContext& ctx) {
    detail::check_ambient(tau, ctx);
    CandidateSet out;
    out.bound = tau.first_slope();
    // both necessary conditions: slope of mu below tau, and tau within the bound for mu
    std::vector<HNType> base;
    for (const auto& mu : enumerate_hn_types(ctx, tau.first_slope(), Flavor::HiggsHN))
        if (in_t_mu(tau, mu, ctx)) base.push_back(mu);

    const auto mu0 = HNType::semistable(ctx.rank, ctx.degree, Flavor::HiggsHN);
    if (tau.is_semistable()) {
        out.types = {mu0};
        out.sharpened = true;
    } else if (ctx.degL == 0) {
        out.types = {tau.with_flavor(Flavor::HiggsHN)};
        out.sharpened = true;
    } else if (ctx.rank == 2) {
        if (!(Rational(tau.blocks()[0].degree) > Rational(ctx.degree + ctx.degL, 2))) out.types.push_back(mu0);
        out.types.push_back(tau.with_flavor(Flavor::HiggsHN));
        out.sharpened = true;
    } else if (ctx.rank == 3) {
        for (const auto& mu : base) {
            const auto cell = classify_rank3(tau.shape(), mu.shape());
            if (cell.verdict == Rank3Verdict::Forbidden) continue;
            if (cell.verdict == Rank3Verdict::ForcedEqual && !(mu == tau)) continue;
            out.types.push_back(mu);
        }
        out.sharpened = true;
    } else {
        out.types = base;
    }
    std::sort(out.types.begin(), out.types.end());
    return out;
}

enum class BlockState { Undefined, Zero, Nonzero };

struct PhiBlock {
    BlockState state = BlockState::Undefined;
    RMatrix value;  // rows of block j, columns of block i
};

// Blocks phi_{ij}, i < j (1-based), defined recursively from phi_{1s}.
inline std::map<IndexPair, PhiBlock> compute_phi_blocks(const FlagShape& flag, const RMatrix& phi) {
    const int n = flag.dim();
    if (phi.rows() != std::size_t(n) || phi.cols() != std::size_t(n))
        throw DimensionMismatch("phi must be " + std::to_string(n) + "x" + std::to_string(n));
    const int s = static_cast<int>(flag.length());
    std::map<IndexPair, PhiBlock> out;
    auto zero_defined = [&](int i, int j) {
        auto it = out.find({i, j});
        return it != out.end() && it->second.state == BlockState::Zero;
    };
    for (int i = 1; i <= s; ++i)
        for (int j = s; j > i; --j) {
            PhiBlock b;
            const bool ok = (i == 1 || zero_defined(i - 1, j)) && (j == s || zero_defined(i, j + 1));
            if (ok) {
                b.value = phi.block(flag.offset(j - 1), flag.offset(i - 1), flag.sizes()[j - 1], flag.sizes()[i - 1]);
                b.state = b.value.is_zero() ? BlockState::Zero : BlockState::Nonzero;
            }
            out[{i, j}] = b;
        }
    return out;
}

struct FlagInvariant {
    friend bool operator==(const FlagInvariant&, const FlagInvariant&) = default;
};
using StratumIndex = std::variant<IndexPair, FlagInvariant>;

// Smallest i, then largest j, among pairs satisfying the vanishing conditions.
inline StratumIndex higgs_stratum_index(const FlagShape& flag, const RMatrix& phi) {
    const auto blocks = compute_phi_blocks(flag, phi);
    const int s = static_cast<int>(flag.length());
    auto zero = [&](int i, int j) { return blocks.at({i, j}).state == BlockState::Zero; };
    for (int i = 1; i <= s; ++i)
        for (int j = s; j > i; --j) {
            if (blocks.at({i, j}).state != BlockState::Nonzero) continue;
            bool ok = true;
            for (int a = 1; a <= i && ok; ++a)
                for (int b = a + 1; b <= s && ok; ++b) {
                    if ((a < i && b >= j) || (a <= i && b > j))
                        if (!zero(a, b)) ok = false;
                }
            if (ok) return IndexPair{i, j};
        }
    for (const auto& [k, b] : blocks)
        if (b.state != BlockState::Zero)
            throw InvalidArgument("phi has no well-defined leading block");
    return FlagInvariant{};
}

}  // namespace higgsstrat
