#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <cstddef>
#include <string>
#include <vector>

#include "errors.hpp"

namespace higgsstrat {

using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;
using Integer = boost::multiprecision::number<boost::multiprecision::gmp_int,
                                              boost::multiprecision::et_off>;
using RVector = std::vector<Rational>;

inline Integer num(const Rational& q) { return boost::multiprecision::numerator(q); }
inline Integer den(const Rational& q) { return boost::multiprecision::denominator(q); }

inline std::string to_string(const Rational& q) { return q.str(); }

// Accepts "p", "p/q", optional sign, surrounding blanks.
inline Rational parse_rational(std::string s) {
    auto trim = [](std::string& t) {
        const auto b = t.find_first_not_of(" \t");
        const auto e = t.find_last_not_of(" \t");
        t = b == std::string::npos ? std::string{} : t.substr(b, e - b + 1);
    };
    trim(s);
    auto valid_int = [](const std::string& t) {
        std::size_t i = (!t.empty() && (t[0] == '-' || t[0] == '+')) ? 1 : 0;
        if (i == t.size()) return false;
        for (; i < t.size(); ++i)
            if (t[i] < '0' || t[i] > '9') return false;
        return true;
    };
    const auto slash = s.find('/');
    std::string p = slash == std::string::npos ? s : s.substr(0, slash);
    std::string q = slash == std::string::npos ? "1" : s.substr(slash + 1);
    trim(p);
    trim(q);
    if (!p.empty() && p[0] == '+') p.erase(0, 1);
    if (!valid_int(p) || !valid_int(q)) throw ParseError("not a rational: '" + s + "'");
    Integer n(p), d(q);
    if (d == 0) throw ParseError("zero denominator: '" + s + "'");
    return Rational(n, d);
}

inline RVector parse_rational_list(const std::string& csv) {
    RVector out;
    std::size_t start = 0;
    while (start <= csv.size()) {
        const auto comma = csv.find(',', start);
        const auto piece = csv.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        out.push_back(parse_rational(piece));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

inline Rational dot(const RVector& a, const RVector& b) {
    if (a.size() != b.size()) throw DimensionMismatch("vector lengths " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
    Rational s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline std::string to_string(const RVector& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ",";
        s += v[i].str();
    }
    return s + "]";
}

}  // namespace higgsstrat
