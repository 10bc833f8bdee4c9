#pragma once

#include <json.hpp>

#include <limits>
#include <string>
#include <vector>

#include "hn_types.hpp"
#include "point_model.hpp"
#include "strat_report.hpp"
#include "weight_lattice.hpp"

namespace nlohmann {

// {"num": n, "den": d}, lowest terms, d > 0; integers that overflow int64 are written as strings
template <>
struct adl_serializer<higgsstrat::Rational> {
    static json integer(const higgsstrat::Integer& z) {
        if (z >= std::numeric_limits<long long>::min() && z <= std::numeric_limits<long long>::max())
            return z.convert_to<long long>();
        return z.str();
    }
    static void to_json(json& j, const higgsstrat::Rational& q) {
        j = json{{"num", integer(higgsstrat::num(q))}, {"den", integer(higgsstrat::den(q))}};
    }
    static higgsstrat::Integer read_integer(const json& j) {
        if (j.is_number_integer()) return higgsstrat::Integer(j.get<long long>());
        if (j.is_string()) {
            const auto q = higgsstrat::parse_rational(j.get<std::string>());
            if (higgsstrat::den(q) != 1) throw higgsstrat::ParseError("expected an integer");
            return higgsstrat::num(q);
        }
        throw higgsstrat::ParseError("expected an integer, got " + j.dump());
    }
    static void from_json(const json& j, higgsstrat::Rational& q) {
        if (j.is_object()) {
            if (!j.contains("num") || !j.contains("den")) throw higgsstrat::ParseError("rational object needs num and den");
            const auto n = read_integer(j.at("num")), d = read_integer(j.at("den"));
            if (d == 0) throw higgsstrat::ParseError("zero denominator");
            q = higgsstrat::Rational(n, d);
        } else if (j.is_number_integer()) {
            q = higgsstrat::Rational(j.get<long long>());
        } else if (j.is_string()) {
            q = higgsstrat::parse_rational(j.get<std::string>());
        } else {
            throw higgsstrat::ParseError("not a rational: " + j.dump());
        }
    }
};

}  // namespace nlohmann

namespace higgsstrat {

using json = nlohmann::json;

inline json matrix_to_json(const RMatrix& a) {
    json rows = json::array();
    for (std::size_t i = 0; i < a.rows(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < a.cols(); ++j) row.push_back(a(i, j));
        rows.push_back(row);
    }
    return rows;
}

inline RMatrix matrix_from_json(const json& j) {
    if (!j.is_array()) throw ParseError("matrix must be an array of rows");
    const std::size_t rows = j.size();
    const std::size_t cols = rows ? j.at(0).size() : 0;
    RMatrix a(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        if (!j.at(i).is_array() || j.at(i).size() != cols) throw ParseError("ragged matrix");
        for (std::size_t k = 0; k < cols; ++k) a(i, k) = j.at(i).at(k).get<Rational>();
    }
    return a;
}

inline std::vector<RVector> points_from_json(const json& j) {
    if (!j.is_array()) throw ParseError("points must be an array");
    std::vector<RVector> out;
    for (const auto& p : j) out.push_back(p.get<RVector>());
    return out;
}

inline void to_json(json& j, const CurveContext& c) {
    j = json{{"rank", c.rank}, {"degree", c.degree}, {"genus", c.genus}, {"degL", c.degL}, {"npoints", c.npoints}};
}
inline void from_json(const json& j, CurveContext& c) {
    c.rank = j.at("rank").get<int>();
    c.degree = j.at("degree").get<long>();
    c.genus = j.value("genus", 0);
    c.degL = j.value("degL", 0L);
    c.npoints = j.value("npoints", 1);
    c.validate();
}

inline void to_json(json& j, const HNType& t) {
    json pairs = json::array();
    for (const auto& b : t.blocks()) pairs.push_back({b.rank, b.degree});
    j = json{{"rank_degree_pairs", pairs}};
}
inline void from_json(const json& j, HNType& t) {
    std::vector<Block> blocks;
    for (const auto& p : j.at("rank_degree_pairs")) blocks.push_back({p.at(0).get<int>(), p.at(1).get<long>()});
    t = HNType(blocks);
}

inline void to_json(json& j, const FlagShape& f) { j = f.sizes(); }
inline void from_json(const json& j, FlagShape& f) { f = FlagShape(j.get<std::vector<int>>()); }

inline void to_json(json& j, const CoordinateIndex& idx) {
    j = json{{"kind", idx.kind == IndexKind::Det ? "det" : "end"}, {"subsets", idx.subsets}};
    json ij = json::array();
    for (const auto& [a, b] : idx.ij) ij.push_back({a, b});
    j["ij"] = ij;
}
inline void from_json(const json& j, CoordinateIndex& idx) {
    const auto kind = j.at("kind").get<std::string>();
    if (kind != "det" && kind != "end") throw ParseError("index kind must be det or end");
    idx.kind = kind == "det" ? IndexKind::Det : IndexKind::End;
    idx.subsets = j.at("subsets").get<std::vector<std::vector<int>>>();
    idx.ij.clear();
    for (const auto& p : j.value("ij", json::array())) idx.ij.emplace_back(p.at(0).get<int>(), p.at(1).get<int>());
}

inline void to_json(json& j, const BetaVector& b) {
    j = json{{"entries", b.entries}, {"m_blocks", b.m_blocks}, {"k_blocks", b.k_blocks},
             {"k", b.k},             {"m", b.m},               {"npoints", b.npoints},
             {"norm_sq", b.norm_sq()}};
    j["source"] = b.source ? json(*b.source) : json(nullptr);
}
inline void from_json(const json& j, BetaVector& b) {
    b = BetaVector::from_entries(j.at("entries").get<RVector>(), j.value("npoints", 1));
    if (j.contains("k_blocks") && !j.at("k_blocks").empty()) {
        b.m_blocks = j.at("m_blocks").get<std::vector<long>>();
        b.k_blocks = j.at("k_blocks").get<std::vector<long>>();
        b.k = j.at("k").get<long>();
        b.m = j.at("m").get<long>();
    }
    if (j.contains("source") && !j.at("source").is_null()) b.source = j.at("source").get<HNType>();
}

inline void to_json(json& j, const ModelPoint& p) {
    json fs = json::array();
    for (const auto& f : p.factors) fs.push_back({{"y", matrix_to_json(f.y)}, {"c", f.c}, {"phi", matrix_to_json(f.phi)}});
    j = json{{"factors", fs}};
}
inline void from_json(const json& j, ModelPoint& p) {
    p.factors.clear();
    for (const auto& f : j.at("factors"))
        p.factors.push_back({matrix_from_json(f.at("y")), f.at("c").get<Rational>(), matrix_from_json(f.at("phi"))});
}

inline void to_json(json& j, const HiggsDatum& h) {
    json fs = json::array();
    for (const auto& f : h.factors)
        fs.push_back({{"image_flag", f.image_flag},
                      {"y", matrix_to_json(f.y)},
                      {"c", f.c},
                      {"phi", matrix_to_json(f.phi)}});
    j = json{{"flag", h.flag}, {"factors", fs}};
}
inline void from_json(const json& j, HiggsDatum& h) {
    h.flag = j.at("flag").get<FlagShape>();
    h.factors.clear();
    for (const auto& f : j.at("factors"))
        h.factors.push_back({f.at("image_flag").get<FlagShape>(), matrix_from_json(f.at("y")), f.at("c").get<Rational>(),
                             matrix_from_json(f.at("phi"))});
}

inline json table_to_json(const CoordinateTable& t) {
    json sup = json::array();
    for (auto pos : t.support()) sup.push_back({{"index", t.space.at(pos)}, {"value", t.values[pos]}});
    return json{{"r", t.space.r()}, {"m", t.space.m()}, {"npoints", t.space.npoints()},
                {"size", t.space.size()}, {"support", sup}};
}

inline CoordinateTable table_from_json(const json& j) {
    CoordinateTable t{CoordinateIndexSpace(j.at("r").get<int>(), j.at("m").get<int>(), j.at("npoints").get<int>()), {}};
    t.values.assign(t.space.size(), Rational(0));
    for (const auto& e : j.at("support")) t.values[t.space.position(e.at("index").get<CoordinateIndex>())] = e.at("value").get<Rational>();
    return t;
}

inline void to_json(json& j, const Step1Report& r) {
    j = json{{"passed", r.passed},         {"norm_sq", r.norm_sq},
             {"min_pairing", r.min_pairing}, {"violations", r.violations},
             {"violations_truncated", r.violations_truncated}};
    j["equality_witness"] = r.equality_witness ? json(*r.equality_witness) : json(nullptr);
}
inline void from_json(const json& j, Step1Report& r) {
    r.passed = j.at("passed").get<bool>();
    r.norm_sq = j.at("norm_sq").get<Rational>();
    r.min_pairing = j.at("min_pairing").get<Rational>();
    r.violations = j.at("violations").get<std::vector<CoordinateIndex>>();
    r.violations_truncated = j.at("violations_truncated").get<bool>();
    r.equality_witness.reset();
    if (!j.at("equality_witness").is_null()) r.equality_witness = j.at("equality_witness").get<CoordinateIndex>();
}

inline void to_json(json& j, const BlockCheck& b) {
    j = json{{"gamma", b.gamma}, {"semistable", b.semistable}, {"character", b.character},
             {"witness", b.witness}, {"note", b.note}};
}
inline void from_json(const json& j, BlockCheck& b) {
    b.gamma = j.at("gamma").get<std::size_t>();
    b.semistable = j.at("semistable").get<bool>();
    b.character = j.at("character").get<RVector>();
    b.witness = j.at("witness").get<RVector>();
    b.note = j.at("note").get<std::string>();
}

inline void to_json(json& j, const Step2Report& r) {
    j = json{{"passed", r.passed},
             {"retracted", r.retracted},
             {"blocks", r.blocks},
             {"trace_identity", {{"checked", r.trace.checked}, {"holds", r.trace.holds}}}};
    j["trace_identity"]["counterexample"] = r.trace.counterexample ? json(*r.trace.counterexample) : json(nullptr);
}
inline void from_json(const json& j, Step2Report& r) {
    r.passed = j.at("passed").get<bool>();
    r.retracted = j.at("retracted").get<ModelPoint>();
    r.blocks = j.at("blocks").get<std::vector<BlockCheck>>();
    const auto& t = j.at("trace_identity");
    r.trace.checked = t.at("checked").get<std::uint64_t>();
    r.trace.holds = t.at("holds").get<bool>();
    r.trace.counterexample.reset();
    if (!t.at("counterexample").is_null()) r.trace.counterexample = t.at("counterexample").get<std::vector<long>>();
}

inline void to_json(json& j, const StratumRecord& s) {
    j = json{{"beta", s.beta}, {"norm_sq", s.norm_sq}, {"graded", s.graded}, {"member_ids", s.member_ids}};
    j["delta"] = s.delta ? json(*s.delta) : json(nullptr);
}
inline void from_json(const json& j, StratumRecord& s) {
    s.beta = j.at("beta").get<BetaVector>();
    s.norm_sq = j.at("norm_sq").get<Rational>();
    s.graded = j.at("graded").get<bool>();
    s.member_ids = j.at("member_ids").get<std::vector<std::string>>();
    s.delta.reset();
    if (!j.at("delta").is_null()) s.delta = j.at("delta").get<std::size_t>();
}

inline PolygonOrder polygon_order_from_string(const std::string& s) {
    if (s == "Less") return PolygonOrder::Less;
    if (s == "Greater") return PolygonOrder::Greater;
    if (s == "Equal") return PolygonOrder::Equal;
    if (s == "Incomparable") return PolygonOrder::Incomparable;
    throw ParseError("unknown order '" + s + "'");
}

inline void to_json(json& j, const ClosureReport& r) {
    json rows = json::array(), pairs = json::array();
    for (const auto& row : r.rows)
        rows.push_back({{"beta", row.beta}, {"norm_sq", row.norm_sq}, {"records", row.records}, {"members", row.members}});
    for (const auto& p : r.pairs) {
        json e{{"a", p.a}, {"b", p.b}, {"norm_order", to_string(p.norm_order)}};
        e["polygon_order"] = p.polygon_order ? json(to_string(*p.polygon_order)) : json(nullptr);
        pairs.push_back(e);
    }
    j = json{{"rows", rows}, {"pairs", pairs}};
}
inline void from_json(const json& j, ClosureReport& r) {
    r.rows.clear();
    r.pairs.clear();
    for (const auto& row : j.at("rows"))
        r.rows.push_back({row.at("beta").get<BetaVector>(), row.at("norm_sq").get<Rational>(),
                          row.at("records").get<std::size_t>(), row.at("members").get<std::size_t>()});
    for (const auto& p : j.at("pairs")) {
        ClosurePair cp{p.at("a").get<std::size_t>(), p.at("b").get<std::size_t>(),
                       polygon_order_from_string(p.at("norm_order").get<std::string>()), std::nullopt};
        if (!p.at("polygon_order").is_null()) cp.polygon_order = polygon_order_from_string(p.at("polygon_order").get<std::string>());
        r.pairs.push_back(cp);
    }
}

inline void to_json(json& j, const CompatEntry& e) {
    j = json{{"rank", e.ctx.rank}, {"degree", e.ctx.degree}, {"degL", e.ctx.degL},
             {"tau", e.tau},       {"mu", e.mu},             {"tau_in_t_mu", e.tau_in_t_mu}};
}
inline void from_json(const json& j, CompatEntry& e) {
    e.ctx.rank = j.at("rank").get<int>();
    e.ctx.degree = j.at("degree").get<long>();
    e.ctx.degL = j.at("degL").get<long>();
    e.tau = j.at("tau").get<HNType>();
    e.mu = j.at("mu").get<HNType>().with_flavor(Flavor::HiggsHN);
    e.tau_in_t_mu = j.at("tau_in_t_mu").get<bool>();
}

inline void to_json(json& j, const CompatTable& t) { j = json{{"entries", t.entries}, {"violations", t.violations}}; }
inline void from_json(const json& j, CompatTable& t) {
    t.entries = j.at("entries").get<std::vector<CompatEntry>>();
    t.violations = j.at("violations").get<std::vector<CompatEntry>>();
}

inline void to_json(json& j, const CorpusEntry& e) {
    j = json{{"id", e.id}, {"point", e.point}};
    j["flag"] = e.flag ? json(*e.flag) : json(nullptr);
}
inline void from_json(const json& j, CorpusEntry& e) {
    e.id = j.at("id").get<std::string>();
    e.point = j.at("point").get<ModelPoint>();
    e.flag.reset();
    if (j.contains("flag") && !j.at("flag").is_null()) e.flag = j.at("flag").get<FlagShape>();
}

}  // namespace higgsstrat
