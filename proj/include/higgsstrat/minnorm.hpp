#pragma once

#include <algorithm>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "errors.hpp"
#include "matrix.hpp"
#include "rational.hpp"

namespace higgsstrat {

struct PointCloud {
    std::size_t dim = 0;
    std::vector<RVector> points;

    PointCloud() = default;
    explicit PointCloud(std::vector<RVector> pts) : points(std::move(pts)) {
        if (points.empty()) throw InvalidArgument("point cloud is empty");
        dim = points.front().size();
        if (dim == 0) throw InvalidArgument("point cloud has dimension 0");
        for (const auto& p : points)
            if (p.size() != dim) throw DimensionMismatch("point cloud has mixed dimensions");
    }
};

namespace detail {

// Minimum-norm point of the affine hull of s, with its affine coefficients.
inline std::pair<RVector, RVector> affine_min_norm(const std::vector<RVector>& s) {
    const std::size_t n = s.size(), d = s.front().size();
    if (n == 1) return {s.front(), RVector{Rational(1)}};
    // y = s0 + sum t_i (s_i - s0); normal equations G t = -D^T s0
    RMatrix g(n - 1, n - 1);
    RVector rhs(n - 1);
    std::vector<RVector> diff(n - 1, RVector(d));
    for (std::size_t i = 1; i < n; ++i)
        for (std::size_t c = 0; c < d; ++c) diff[i - 1][c] = s[i][c] - s[0][c];
    for (std::size_t i = 0; i + 1 < n; ++i) {
        for (std::size_t j = 0; j + 1 < n; ++j) g(i, j) = dot(diff[i], diff[j]);
        rhs[i] = -dot(diff[i], s[0]);
    }
    const auto t = solve_unique(g, rhs);
    if (!t) throw InvalidArgument("affinely dependent corral");
    RVector coef(n);
    coef[0] = 1;
    for (std::size_t i = 1; i < n; ++i) {
        coef[i] = (*t)[i - 1];
        coef[0] -= coef[i];
    }
    RVector y(d, Rational(0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < d; ++c) y[c] += coef[i] * s[i][c];
    return {y, coef};
}

}  // namespace detail

// Wolfe's algorithm in exact arithmetic. The corral stays affinely independent, since
// every entering point p has p.x < |x|^2 while the whole affine hull pairs to |x|^2.
inline RVector min_norm_point(const PointCloud& cloud) {
    if (cloud.points.empty()) throw InvalidArgument("point cloud is empty");
    const auto& P = cloud.points;
    std::size_t start = 0;
    for (std::size_t i = 1; i < P.size(); ++i)
        if (dot(P[i], P[i]) < dot(P[start], P[start])) start = i;

    std::vector<RVector> corral{P[start]};
    RVector lambda{Rational(1)};
    RVector x = P[start];
    const std::size_t max_major = 1000 + 100 * P.size();
    for (std::size_t iter = 0; iter < max_major; ++iter) {
        const Rational xx = dot(x, x);
        std::size_t best = 0;
        Rational best_val = dot(P[0], x);
        for (std::size_t i = 1; i < P.size(); ++i) {
            const Rational v = dot(P[i], x);
            if (v < best_val) {
                best_val = v;
                best = i;
            }
        }
        if (best_val >= xx) return x;
        corral.push_back(P[best]);
        lambda.push_back(0);
        while (true) {
            auto [y, alpha] = detail::affine_min_norm(corral);
            bool interior = true;
            for (const auto& a : alpha)
                if (a <= 0) interior = false;
            if (interior) {
                x = y;
                lambda = alpha;
                break;
            }
            Rational theta = 1;
            for (std::size_t i = 0; i < alpha.size(); ++i)
                if (alpha[i] <= 0) {
                    const Rational t = lambda[i] / (lambda[i] - alpha[i]);
                    if (t < theta) theta = t;
                }
            std::vector<RVector> next;
            RVector next_lambda;
            for (std::size_t i = 0; i < alpha.size(); ++i) {
                const Rational l = (1 - theta) * lambda[i] + theta * alpha[i];
                if (l > 0) {
                    next.push_back(corral[i]);
                    next_lambda.push_back(l);
                }
            }
            corral = std::move(next);
            lambda = std::move(next_lambda);
            x.assign(x.size(), Rational(0));
            for (std::size_t i = 0; i < corral.size(); ++i)
                for (std::size_t c = 0; c < x.size(); ++c) x[c] += lambda[i] * corral[i][c];
        }
    }
    throw InvalidArgument("min-norm iteration did not terminate");
}

inline bool hull_contains_origin(const PointCloud& cloud) {
    for (const auto& v : min_norm_point(cloud))
        if (v != 0) return false;
    return true;
}

// Weyl representative: coordinates sorted weakly decreasing. A one-dimensional
// vector is read as a rank-one torus coordinate, whose chamber is v >= 0.
inline RVector chamber_representative(RVector v) {
    if (v.size() == 1) {
        if (v[0] < 0) v[0] = -v[0];
        return v;
    }
    std::sort(v.begin(), v.end(), [](const Rational& a, const Rational& b) { return a > b; });
    return v;
}

inline std::set<RVector> index_set_B(const PointCloud& weights, bool restrict_to_chamber,
                                     std::uint64_t cap = 1u << 20) {
    std::set<RVector> distinct(weights.points.begin(), weights.points.end());
    const std::vector<RVector> w(distinct.begin(), distinct.end());
    if (w.size() >= 63 || ((std::uint64_t(1) << w.size()) - 1) > cap)
        throw CapExceeded(std::to_string(w.size()) + " distinct weights give more than " + std::to_string(cap) +
                          " supports");
    std::set<RVector> out;
    const std::uint64_t total = std::uint64_t(1) << w.size();
    for (std::uint64_t mask = 1; mask < total; ++mask) {
        std::vector<RVector> pts;
        for (std::size_t i = 0; i < w.size(); ++i)
            if (mask & (std::uint64_t(1) << i)) pts.push_back(w[i]);
        auto v = min_norm_point(PointCloud(pts));
        out.insert(restrict_to_chamber ? chamber_representative(std::move(v)) : std::move(v));
    }
    return out;
}

}  // namespace higgsstrat
