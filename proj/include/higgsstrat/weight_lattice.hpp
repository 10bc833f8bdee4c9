#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "hn_types.hpp"
#include "rational.hpp"

namespace higgsstrat {

using WeightVector = RVector;

enum class IndexKind { Det, End };

// Subsets are 1-based and increasing; ij pairs are 1-based.
struct CoordinateIndex {
    IndexKind kind = IndexKind::Det;
    std::vector<std::vector<int>> subsets;
    std::vector<std::pair<int, int>> ij;
    friend bool operator==(const CoordinateIndex&, const CoordinateIndex&) = default;
};

inline std::string to_string(const CoordinateIndex& idx) {
    std::string s = idx.kind == IndexKind::Det ? "det" : "end";
    for (std::size_t k = 0; k < idx.subsets.size(); ++k) {
        s += k ? ";" : " ";
        s += "{";
        for (std::size_t t = 0; t < idx.subsets[k].size(); ++t) s += (t ? "," : "") + std::to_string(idx.subsets[k][t]);
        s += "}";
        if (idx.kind == IndexKind::End)
            s += "(" + std::to_string(idx.ij[k].first) + "," + std::to_string(idx.ij[k].second) + ")";
    }
    return s;
}

inline std::vector<std::vector<int>> r_subsets(int m, int r) {
    std::vector<std::vector<int>> out;
    if (r > m || r < 0) return out;
    std::vector<int> cur(r);
    for (int i = 0; i < r; ++i) cur[i] = i;
    while (true) {
        out.push_back(cur);
        int i = r - 1;
        while (i >= 0 && cur[i] == m - r + i) --i;
        if (i < 0) break;
        ++cur[i];
        for (int j = i + 1; j < r; ++j) cur[j] = cur[j - 1] + 1;
    }
    return out;
}

inline std::uint64_t binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    std::uint64_t b = 1;
    for (int i = 1; i <= k; ++i) b = b * std::uint64_t(n - k + i) / std::uint64_t(i);
    return b;
}

namespace detail {
inline std::uint64_t checked_pow(std::uint64_t b, int e) {
    std::uint64_t out = 1;
    for (int i = 0; i < e; ++i) {
        if (b != 0 && out > UINT64_MAX / b) throw CapExceeded("index count overflows 64 bits");
        out *= b;
    }
    return out;
}
}  // namespace detail

inline std::uint64_t coordinate_index_count(int r, int m, int N) {
    const auto s = detail::checked_pow(binomial(m, r), N);
    const auto e = detail::checked_pow(std::uint64_t(r) * std::uint64_t(r), N);
    if (e != 0 && s > (UINT64_MAX - s) / e) throw CapExceeded("index count overflows 64 bits");
    return s * (1 + e);
}

// Flat positions: Det indices first (factor 1 most significant), then End indices
// grouped by subset tuple and then by the (i,j) tuple. A factor's local index is its
// subset number for Det, and subset*r*r + i*r + j (0-based) for End.
class CoordinateIndexSpace {
public:
    CoordinateIndexSpace(int r, int m, int N, std::uint64_t cap = UINT64_MAX) : r_(r), m_(m), n_(N) {
        if (r < 1 || m < r || N < 1)
            throw InvalidArgument("index space needs 1 <= r <= m and N >= 1 (r=" + std::to_string(r) +
                                  ", m=" + std::to_string(m) + ")");
        count_ = coordinate_index_count(r, m, N);
        if (count_ > cap)
            throw CapExceeded(std::to_string(count_) + " coordinate indices exceed cap " + std::to_string(cap));
        subsets_ = r_subsets(m, r);
        det_count_ = detail::checked_pow(subsets_.size(), N);
    }

    int r() const { return r_; }
    int m() const { return m_; }
    int npoints() const { return n_; }
    std::uint64_t size() const { return count_; }
    std::uint64_t det_count() const { return det_count_; }
    const std::vector<std::vector<int>>& subsets() const { return subsets_; }
    std::size_t local_det_size() const { return subsets_.size(); }
    std::size_t local_end_size() const { return subsets_.size() * std::size_t(r_) * std::size_t(r_); }

    // per-factor local indices for a flat position
    IndexKind decode(std::uint64_t pos, std::vector<std::size_t>& local) const {
        if (pos >= count_) throw IndexOutOfRange("coordinate position " + std::to_string(pos));
        local.assign(std::size_t(n_), 0);
        const std::uint64_t S = subsets_.size();
        if (pos < det_count_) {
            for (int k = n_ - 1; k >= 0; --k) {
                local[std::size_t(k)] = pos % S;
                pos /= S;
            }
            return IndexKind::Det;
        }
        pos -= det_count_;
        const std::uint64_t rr = std::uint64_t(r_) * std::uint64_t(r_);
        std::uint64_t ij = pos % detail::checked_pow(rr, n_);
        std::uint64_t sub = pos / detail::checked_pow(rr, n_);
        for (int k = n_ - 1; k >= 0; --k) {
            local[std::size_t(k)] = (sub % S) * rr + (ij % rr);
            sub /= S;
            ij /= rr;
        }
        return IndexKind::End;
    }

    CoordinateIndex at(std::uint64_t pos) const {
        std::vector<std::size_t> local;
        const auto kind = decode(pos, local);
        return from_locals(kind, local);
    }

    CoordinateIndex from_locals(IndexKind kind, const std::vector<std::size_t>& local) const {
        CoordinateIndex idx;
        idx.kind = kind;
        const std::size_t rr = std::size_t(r_) * std::size_t(r_);
        for (int k = 0; k < n_; ++k) {
            const std::size_t l = local[std::size_t(k)];
            const auto& sub = subsets_[idx.kind == IndexKind::Det ? l : l / rr];
            std::vector<int> one;
            for (int c : sub) one.push_back(c + 1);
            idx.subsets.push_back(one);
            if (idx.kind == IndexKind::End) {
                const int ij = static_cast<int>(l % rr);
                idx.ij.emplace_back(ij / r_ + 1, ij % r_ + 1);
            }
        }
        return idx;
    }

    std::uint64_t position(const CoordinateIndex& idx) const {
        validate(idx);
        const std::uint64_t S = subsets_.size();
        std::uint64_t sub = 0, ij = 0;
        const std::uint64_t rr = std::uint64_t(r_) * std::uint64_t(r_);
        for (int k = 0; k < n_; ++k) {
            std::vector<int> zero_based;
            for (int c : idx.subsets[std::size_t(k)]) zero_based.push_back(c - 1);
            const auto it = std::lower_bound(subsets_.begin(), subsets_.end(), zero_based);
            sub = sub * S + std::uint64_t(it - subsets_.begin());
            if (idx.kind == IndexKind::End)
                ij = ij * rr + std::uint64_t((idx.ij[std::size_t(k)].first - 1) * r_ + idx.ij[std::size_t(k)].second - 1);
        }
        if (idx.kind == IndexKind::Det) return sub;
        return det_count_ + sub * detail::checked_pow(rr, n_) + ij;
    }

    void validate(const CoordinateIndex& idx) const {
        if (idx.subsets.size() != std::size_t(n_)) throw IndexOutOfRange("index needs one subset per point");
        for (const auto& sub : idx.subsets) {
            if (sub.size() != std::size_t(r_)) throw IndexOutOfRange("subset size differs from rank");
            for (std::size_t t = 0; t < sub.size(); ++t) {
                if (sub[t] < 1 || sub[t] > m_) throw IndexOutOfRange("subset element " + std::to_string(sub[t]));
                if (t && sub[t] <= sub[t - 1]) throw IndexOutOfRange("subset not strictly increasing");
            }
        }
        if (idx.kind == IndexKind::End) {
            if (idx.ij.size() != std::size_t(n_)) throw IndexOutOfRange("index needs one (i,j) per point");
            for (const auto& [i, j] : idx.ij)
                if (i < 1 || i > r_ || j < 1 || j > r_) throw IndexOutOfRange("(i,j) outside 1..r");
        } else if (!idx.ij.empty()) {
            throw IndexOutOfRange("det index carries (i,j) data");
        }
    }

    // weight of a single factor's local index, added into alpha
    void add_local_weight(IndexKind kind, std::size_t local, WeightVector& alpha) const {
        const std::size_t rr = std::size_t(r_) * std::size_t(r_);
        const auto& sub = subsets_[kind == IndexKind::Det ? local : local / rr];
        std::vector<bool> in(std::size_t(m_), false);
        for (int c : sub) in[std::size_t(c)] = true;
        for (int l = 0; l < m_; ++l)
            if (!in[std::size_t(l)]) alpha[std::size_t(l)] += 1;
        if (kind == IndexKind::End) {
            const std::size_t ij = local % rr;
            const std::size_t i = ij / std::size_t(r_), j = ij % std::size_t(r_);
            alpha[std::size_t(sub[j])] += 1;
            alpha[std::size_t(sub[i])] -= 1;
        }
    }

private:
    int r_, m_, n_;
    std::uint64_t count_ = 0, det_count_ = 0;
    std::vector<std::vector<int>> subsets_;
};

inline std::uint64_t default_cap() {
    if (const char* env = std::getenv("HIGGSSTRAT_CAP")) {
        try {
            return std::stoull(env);
        } catch (...) {
            throw InvalidArgument("HIGGSSTRAT_CAP is not a non-negative integer");
        }
    }
    return 2'000'000;
}

inline CoordinateIndexSpace index_space(const CurveContext& ctx, std::uint64_t cap = default_cap()) {
    ctx.validate();
    if (ctx.m() < ctx.rank) throw NonPositiveBlockDimension("m = " + std::to_string(ctx.m()) + " is below the rank");
    return CoordinateIndexSpace(ctx.rank, static_cast<int>(ctx.m()), ctx.npoints, cap);
}

inline std::vector<CoordinateIndex> enumerate_coordinate_indices(const CurveContext& ctx,
                                                                 std::uint64_t cap = default_cap()) {
    const auto space = index_space(ctx, cap);
    std::vector<CoordinateIndex> out;
    out.reserve(space.size());
    for (std::uint64_t p = 0; p < space.size(); ++p) out.push_back(space.at(p));
    return out;
}

inline WeightVector alpha_of_index(const CoordinateIndex& idx, const CurveContext& ctx) {
    const long m = ctx.m();
    if (m < 1) throw NonPositiveBlockDimension("m = " + std::to_string(m));
    WeightVector alpha(std::size_t(m), Rational(0));
    const std::size_t N = idx.subsets.size();
    if (N != std::size_t(ctx.npoints)) throw IndexOutOfRange("index has " + std::to_string(N) + " factors");
    for (std::size_t k = 0; k < N; ++k) {
        const auto& sub = idx.subsets[k];
        if (sub.size() != std::size_t(ctx.rank)) throw IndexOutOfRange("subset size differs from rank");
        std::vector<bool> in(std::size_t(m), false);
        for (int c : sub) {
            if (c < 1 || c > m) throw IndexOutOfRange("subset element " + std::to_string(c));
            in[std::size_t(c - 1)] = true;
        }
        for (long l = 0; l < m; ++l)
            if (!in[std::size_t(l)]) alpha[std::size_t(l)] += 1;
        if (idx.kind == IndexKind::End) {
            if (idx.ij.size() != N) throw IndexOutOfRange("missing (i,j) data");
            const auto [i, j] = idx.ij[k];
            if (i < 1 || i > ctx.rank || j < 1 || j > ctx.rank) throw IndexOutOfRange("(i,j) outside 1..r");
            alpha[std::size_t(sub[std::size_t(j - 1)] - 1)] += 1;
            alpha[std::size_t(sub[std::size_t(i - 1)] - 1)] -= 1;
        }
    }
    return alpha;
}

inline Rational pairing(const WeightVector& a, const WeightVector& b) { return dot(a, b); }
inline Rational norm_sq(const WeightVector& b) { return dot(b, b); }

inline RVector project_trace_zero(const RVector& v) {
    if (v.empty()) return v;
    Rational mean = 0;
    for (const auto& x : v) mean += x;
    mean /= Rational(static_cast<long>(v.size()));
    RVector out = v;
    for (auto& x : out) x -= mean;
    return out;
}

struct BetaVector {
    RVector entries;
    // block data; k_blocks is empty when the vector did not come from a type
    std::vector<long> k_blocks, m_blocks;
    long k = 0, m = 0;
    int npoints = 1;
    std::optional<HNType> source;

    Rational norm_sq() const { return higgsstrat::norm_sq(entries); }
    bool is_zero() const {
        for (const auto& x : entries)
            if (x != 0) return false;
        return true;
    }
    FlagShape flag() const {
        std::vector<int> sizes;
        for (long b : m_blocks) sizes.push_back(static_cast<int>(b));
        return FlagShape(sizes);
    }
    RVector block_values() const {
        RVector v;
        std::size_t off = 0;
        for (long b : m_blocks) {
            v.push_back(entries[off]);
            off += std::size_t(b);
        }
        return v;
    }
    // rank of block gamma, r_gamma = m_gamma - k_gamma / N
    long block_rank(std::size_t gamma) const { return m_blocks.at(gamma) - k_blocks.at(gamma) / npoints; }

    static BetaVector from_entries(RVector v, int npoints = 1) {
        if (v.empty()) throw InvalidArgument("empty beta vector");
        BetaVector b;
        b.entries = std::move(v);
        b.npoints = npoints;
        b.m = static_cast<long>(b.entries.size());
        std::size_t i = 0;
        while (i < b.entries.size()) {
            std::size_t j = i;
            while (j < b.entries.size() && b.entries[j] == b.entries[i]) ++j;
            b.m_blocks.push_back(static_cast<long>(j - i));
            i = j;
        }
        return b;
    }
    static BetaVector zero(long m, int npoints = 1) { return from_entries(RVector(std::size_t(m), Rational(0)), npoints); }

    friend bool operator==(const BetaVector& a, const BetaVector& b) { return a.entries == b.entries; }
};

inline BetaVector beta_of_type(const HNType& tau, const CurveContext& ctx) {
    ctx.validate();
    detail::check_ambient(tau, ctx);
    BetaVector b;
    b.npoints = ctx.npoints;
    b.source = tau;
    for (std::size_t g = 0; g < tau.length(); ++g) {
        const auto& blk = tau.blocks()[g];
        const long mg = blk.degree + long(blk.rank) * (1 - ctx.genus);
        if (mg <= 0)
            throw NonPositiveBlockDimension("block " + std::to_string(g + 1) + " of " + tau.str() +
                                            " has m_gamma = " + std::to_string(mg));
        b.m_blocks.push_back(mg);
        b.k_blocks.push_back(long(ctx.npoints) * (blk.degree - long(blk.rank) * ctx.genus));
        b.m += mg;
        b.k += b.k_blocks.back();
    }
    const Rational ratio(b.k, b.m);
    for (std::size_t g = 0; g < tau.length(); ++g) {
        const Rational v = Rational(b.k_blocks[g], b.m_blocks[g]) - ratio;
        for (long i = 0; i < b.m_blocks[g]; ++i) b.entries.push_back(v);
    }
    return b;
}

struct BBWeights {
    RVector weights;  // sorted ascending
    Rational min_weight;
};

inline BBWeights bb_weights(const HNType& tau, const CurveContext& ctx) {
    const auto b = beta_of_type(tau, ctx);
    RVector ratio;
    for (std::size_t g = 0; g < b.m_blocks.size(); ++g) ratio.push_back(Rational(b.k_blocks[g], b.m_blocks[g]));
    BBWeights out;
    out.weights.push_back(0);
    for (std::size_t i = 0; i < ratio.size(); ++i)
        for (std::size_t j = 0; j < ratio.size(); ++j)
            if (i != j) out.weights.push_back(ratio[j] - ratio[i]);
    std::sort(out.weights.begin(), out.weights.end());
    out.min_weight = out.weights.front();
    return out;
}

}  // namespace higgsstrat
