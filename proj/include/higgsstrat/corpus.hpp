#pragma once

#include <random>
#include <string>
#include <vector>

#include "hn_types.hpp"
#include "point_model.hpp"
#include "weight_lattice.hpp"

namespace higgsstrat {

struct CorpusEntry {
    std::string id;
    ModelPoint point;
    std::optional<FlagShape> flag;
};

struct GeneratorOptions {
    int entry_range = 3;            // entries drawn from [-range, range]
    bool graded = false;            // zero off-diagonal blocks of y and phi
    bool general_position = true;   // all maximal minors of the diagonal y blocks nonzero
};

inline Rational random_entry(std::mt19937_64& rng, int range, bool nonzero = false) {
    std::uniform_int_distribution<int> dist(-range, range);
    int v = dist(rng);
    while (nonzero && v == 0) v = dist(rng);
    return Rational(v);
}

inline RMatrix random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng, int range) {
    RMatrix a(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) a(i, j) = random_entry(rng, range);
    return a;
}

namespace detail {
inline bool all_minors_nonzero(const RMatrix& a) {
    for (const auto& sub : r_subsets(static_cast<int>(a.cols()), static_cast<int>(a.rows())))
        if (determinant(a.select_columns(sub)) == 0) return false;
    return true;
}

inline RMatrix random_full_rank(std::size_t rows, std::size_t cols, std::mt19937_64& rng, int range, bool general) {
    for (int attempt = 0; attempt < 10000; ++attempt) {
        auto a = random_matrix(rows, cols, rng, range);
        if (general ? all_minors_nonzero(a) : rank(a) == rows) return a;
    }
    throw InvalidArgument("could not draw a full-rank block");
}
}  // namespace detail

// Standard-position datum of type tau: y is block upper triangular with full-rank diagonal
// blocks, phi_k preserves the image flag and has diagonal blocks of nonzero trace.
inline HiggsDatum random_higgs_datum(const HNType& tau, const CurveContext& ctx, std::mt19937_64& rng,
                                     const GeneratorOptions& opt = {}) {
    const auto beta = beta_of_type(tau, ctx);
    const std::size_t s = tau.length();
    std::vector<int> rs, ms;
    for (std::size_t g = 0; g < s; ++g) {
        rs.push_back(tau.blocks()[g].rank);
        ms.push_back(static_cast<int>(beta.m_blocks[g]));
        if (ms.back() < rs.back()) throw InvalidArgument("block " + std::to_string(g + 1) + " has m_gamma < r_gamma");
    }
    HiggsDatum h{FlagShape(ms), {}};
    const FlagShape img(rs);
    const std::size_t r = std::size_t(ctx.rank), m = std::size_t(ctx.m());
    for (int k = 0; k < ctx.npoints; ++k) {
        HiggsFactor f{img, RMatrix(r, m), random_entry(rng, opt.entry_range, true), RMatrix(r, r)};
        for (std::size_t b = 0; b < s; ++b) {
            const auto rb = std::size_t(img.offset(b)), cb = std::size_t(h.flag.offset(b));
            f.y.set_block(rb, cb, detail::random_full_rank(std::size_t(rs[b]), std::size_t(ms[b]), rng, opt.entry_range,
                                                           opt.general_position));
            auto d = random_matrix(std::size_t(rs[b]), std::size_t(rs[b]), rng, opt.entry_range);
            Rational tr = 0;
            for (std::size_t i = 0; i < d.rows(); ++i) tr += d(i, i);
            if (tr == 0) d(0, 0) += 1;
            f.phi.set_block(rb, rb, d);
            if (opt.graded) continue;
            for (std::size_t a = 0; a < b; ++a) {
                const auto ra = std::size_t(img.offset(a));
                f.y.set_block(ra, cb, random_matrix(std::size_t(rs[a]), std::size_t(ms[b]), rng, opt.entry_range));
                f.phi.set_block(ra, rb, random_matrix(std::size_t(rs[a]), std::size_t(rs[b]), rng, opt.entry_range));
            }
        }
        h.factors.push_back(std::move(f));
    }
    return h;
}

// Breaks phi-invariance of the image flag in one factor by a nonzero lower-left entry.
inline ModelPoint mutate_break_flag(const HiggsDatum& h, std::mt19937_64& rng, int range = 3) {
    if (h.flag.length() < 2) throw InvalidArgument("a one-block flag cannot be broken");
    auto p = from_higgs_data(h);
    std::uniform_int_distribution<std::size_t> pick_k(0, h.factors.size() - 1);
    const std::size_t k = pick_k(rng);
    const auto& img = h.factors[k].image_flag;
    const std::size_t r = std::size_t(img.dim());
    std::vector<std::pair<std::size_t, std::size_t>> lower;
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j)
            if (img.block_of(int(i)) > img.block_of(int(j))) lower.emplace_back(i, j);
    std::uniform_int_distribution<std::size_t> pick(0, lower.size() - 1);
    const auto [i, j] = lower[pick(rng)];
    p.factors[k].phi(i, j) = random_entry(rng, range, true);
    return p;
}

inline ModelPoint random_model_point(int r, int m, int N, std::mt19937_64& rng, int range = 3) {
    ModelPoint p;
    for (int k = 0; k < N; ++k) {
        Factor f{detail::random_full_rank(std::size_t(r), std::size_t(m), rng, range, false), random_entry(rng, range),
                 random_matrix(std::size_t(r), std::size_t(r), rng, range)};
        if (f.c == 0 && f.phi.is_zero()) f.c = 1;
        p.factors.push_back(std::move(f));
    }
    return p;
}

}  // namespace higgsstrat
