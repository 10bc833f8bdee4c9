#pragma once

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "corpus.hpp"
#include "hn_types.hpp"
#include "json_io.hpp"
#include "minnorm.hpp"
#include "point_model.hpp"
#include "strat_report.hpp"
#include "svg.hpp"
#include "weight_lattice.hpp"

namespace higgsstrat::cli {

inline constexpr const char* kSchemaPrefix = "higgsstrat/";

// Malformed or inconsistent options; exit code 2.
struct UsageError : std::runtime_error {
    UsageError(const std::string& flag, const std::string& what) : std::runtime_error(flag + ": " + what) {}
};

template <class F>
auto usage(const std::string& flag, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const Error& e) {
        throw UsageError(flag, e.what());
    } catch (const json::exception& e) {
        throw UsageError(flag, e.what());
    } catch (const std::invalid_argument& e) {
        throw UsageError(flag, e.what());
    } catch (const std::out_of_range& e) {
        throw UsageError(flag, e.what());
    }
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError(path, "cannot read file");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::vector<long> parse_long_list(const std::string& csv) {
    std::vector<long> out;
    for (const auto& q : parse_rational_list(csv)) {
        if (den(q) != 1) throw ParseError("expected integers: '" + csv + "'");
        out.push_back(num(q).convert_to<long>());
    }
    return out;
}

inline std::vector<int> parse_int_list(const std::string& csv) {
    std::vector<int> out;
    for (long v : parse_long_list(csv)) out.push_back(static_cast<int>(v));
    return out;
}

// Degrees with optional ranks; a single degree means the semistable type, otherwise ranks default to 1.
inline HNType type_from_lists(const std::string& degrees, const std::string& ranks, int rank) {
    const auto d = parse_long_list(degrees);
    std::vector<int> r;
    if (!ranks.empty()) r = parse_int_list(ranks);
    else if (d.size() == 1 && rank > 0) r = {rank};
    else r.assign(d.size(), 1);
    auto t = HNType::from_lists(r, d);
    if (rank > 0 && t.rank() != rank) throw InvalidArgument("type has rank " + std::to_string(t.rank()));
    return t;
}

// "r:d,r:d,..."
inline HNType type_from_pairs(const std::string& spec) {
    std::vector<Block> blocks;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos) throw ParseError("expected r:d pairs in '" + spec + "'");
        const auto r = parse_rational(item.substr(0, colon)), d = parse_rational(item.substr(colon + 1));
        if (den(r) != 1 || den(d) != 1) throw ParseError("ranks and degrees must be integers");
        blocks.push_back({num(r).convert_to<int>(), num(d).convert_to<long>()});
    }
    return HNType(blocks);
}

inline json with_schema(const std::string& verb, json body) {
    body["schema"] = std::string(kSchemaPrefix) + verb + "/v1";
    return body;
}

struct Common {
    bool as_json = false;
    bool parallel = false;
    std::uint64_t cap = 0;
};

inline std::string records_csv(const std::vector<StratumRecord>& recs) {
    std::ostringstream os;
    os << "beta,norm_sq,delta,graded,members\n";
    for (const auto& r : recs) {
        os << "\"";
        for (std::size_t i = 0; i < r.beta.entries.size(); ++i) os << (i ? " " : "") << r.beta.entries[i].str();
        os << "\"," << r.norm_sq.str() << "," << (r.delta ? std::to_string(*r.delta) : "") << ","
           << (r.graded ? "true" : "false") << ",\"";
        for (std::size_t i = 0; i < r.member_ids.size(); ++i) os << (i ? " " : "") << r.member_ids[i];
        os << "\"\n";
    }
    return os.str();
}

inline std::string records_text(const std::vector<StratumRecord>& recs) {
    std::ostringstream os;
    for (const auto& r : recs) {
        os << "beta=" << to_string(r.beta.entries) << " norm_sq=" << r.norm_sq.str();
        if (r.graded) os << " graded";
        if (r.delta) os << " delta=" << *r.delta;
        os << " members=" << r.member_ids.size() << "\n";
    }
    return os.str();
}

inline std::vector<CorpusEntry> corpus_from_json(const json& j) {
    const json& arr = j.is_object() ? j.at("entries") : j;
    return arr.get<std::vector<CorpusEntry>>();
}

// Synthetic corpus: for every type with first slope <= bound and m_gamma >= r_gamma,
// `per_type` standard-position points plus one graded point; semistable points for tau_0.
inline std::vector<CorpusEntry> synthetic_corpus(const CurveContext& ctx, const Rational& bound, int per_type,
                                                 std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<CorpusEntry> out;
    for (const auto& t : enumerate_hn_types(ctx, bound)) {
        BetaVector b;
        try {
            b = beta_of_type(t, ctx);
        } catch (const NonPositiveBlockDimension&) {
            continue;
        }
        bool fits = true;
        for (std::size_t g = 0; g < t.length(); ++g) fits = fits && b.m_blocks[g] >= t.blocks()[g].rank;
        if (!fits) continue;
        for (int i = 0; i <= per_type; ++i) {
            GeneratorOptions opt;
            opt.graded = (i == per_type) && !t.is_semistable();
            if (i == per_type && t.is_semistable()) break;
            const auto h = random_higgs_datum(t, ctx, rng, opt);
            out.push_back({t.str() + (opt.graded ? "#graded" : "#" + std::to_string(i)), from_higgs_data(h),
                           t.is_semistable() ? std::nullopt : std::optional<FlagShape>(h.flag)});
        }
    }
    return out;
}

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Exact combinatorics of instability strata for Higgs bundles", "higgsstrat"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");

    Common common;
    std::string s_rank_csv, s_a, s_b, s_a_ranks, s_b_ranks, s_tau, s_ranks, s_bound, s_points, s_points_file, s_point,
        s_point_file, s_beta, s_flag, s_image_flag, s_corpus, s_candidates, s_out, s_svg, s_flavor = "hn", s_types_json,
        s_window = "6";
    int rank = 0, genus = 0, npoints = 1, r_max = 3, lambda_bound = 3, per_type = 2;
    long degree = 0, degL = 0, d_min = 0, d_max = 12, degL_min = 0, degL_max = 2;
    bool have_degree = false, chamber = false, lattice = false, csv = false, with_bb = false;
    std::uint64_t seed = 1;
    std::vector<std::string> type_specs;

    auto add_json = [&](CLI::App* s) { s->add_flag("--json", common.as_json, "emit one JSON document"); };
    auto add_cap = [&](CLI::App* s) {
        s->add_option("--cap", common.cap, "enumeration cap (default from HIGGSSTRAT_CAP or 2000000)");
    };
    auto add_ctx = [&](CLI::App* s, bool need_rd) {
        auto* r = s->add_option("--rank,-r", rank, "rank r");
        auto* d = s->add_option("--degree,-d", degree, "degree d");
        if (need_rd) {
            r->required();
            d->required();
        }
        s->add_option("--genus,-g", genus, "genus g")->check(CLI::NonNegativeNumber);
        s->add_option("--degL", degL, "degree of L")->check(CLI::NonNegativeNumber);
        s->add_option("--npoints,-N", npoints, "number of evaluation points")->check(CLI::PositiveNumber);
    };

    auto* c_enum = app.add_subcommand("enumerate", "list HN types with first slope at most --bound");
    add_ctx(c_enum, true);
    c_enum->add_option("--bound", s_bound, "maximal first slope (p/q)")->required();
    c_enum->add_option("--flavor", s_flavor, "hn or higgs")->check(CLI::IsMember({"hn", "higgs"}));
    add_json(c_enum);

    auto* c_order = app.add_subcommand("order", "compare two HN polygons");
    c_order->add_option("--a", s_a, "degrees of the first type")->required();
    c_order->add_option("--b", s_b, "degrees of the second type")->required();
    c_order->add_option("--a-ranks", s_a_ranks, "block ranks of the first type");
    c_order->add_option("--b-ranks", s_b_ranks, "block ranks of the second type");
    c_order->add_option("--rank,-r", rank, "ambient rank")->required();
    add_json(c_order);

    auto* c_beta = app.add_subcommand("beta", "instability vector of a type");
    c_beta->add_option("--tau", s_tau, "block degrees")->required();
    c_beta->add_option("--ranks", s_ranks, "block ranks");
    c_beta->add_option("--genus,-g", genus, "genus")->check(CLI::NonNegativeNumber);
    c_beta->add_option("--npoints,-N", npoints, "number of evaluation points")->check(CLI::PositiveNumber);
    c_beta->add_flag("--bb", with_bb, "also print the Bialynicki-Birula weights");
    add_json(c_beta);

    auto* c_compat = app.add_subcommand("compat", "cross-check U(tau) against T(mu)");
    c_compat->add_option("--r-max", r_max, "largest rank")->check(CLI::PositiveNumber);
    c_compat->add_option("--d-min", d_min, "smallest degree");
    c_compat->add_option("--d-max", d_max, "largest degree");
    c_compat->add_option("--degL-min", degL_min, "smallest deg L")->check(CLI::NonNegativeNumber);
    c_compat->add_option("--degL-max", degL_max, "largest deg L")->check(CLI::NonNegativeNumber);
    c_compat->add_option("--window", s_window, "slope window above d/r for tau");
    add_json(c_compat);

    auto* c_mn = app.add_subcommand("minnorm", "minimum-norm point of a convex hull");
    c_mn->add_option("--points", s_points, "JSON array of rational vectors");
    c_mn->add_option("--points-file", s_points_file, "file holding the JSON array");
    add_json(c_mn);

    auto* c_is = app.add_subcommand("index-set", "closest points over all supports of a weight set");
    c_is->add_option("--points", s_points, "JSON array of rational vectors");
    c_is->add_option("--points-file", s_points_file, "file holding the JSON array");
    c_is->add_flag("--lattice", lattice, "use the trace-zero weights of the coordinate embedding");
    c_is->add_flag("--chamber", chamber, "keep chamber representatives only");
    add_ctx(c_is, false);
    add_cap(c_is);
    add_json(c_is);

    auto add_point = [&](CLI::App* s) {
        s->add_option("--point", s_point, "ModelPoint JSON");
        s->add_option("--point-file", s_point_file, "file holding the ModelPoint JSON");
        s->add_option("--genus,-g", genus, "genus")->check(CLI::NonNegativeNumber);
        add_cap(s);
    };
    auto* c_pc = app.add_subcommand("point-coords", "coordinates of a model point");
    add_point(c_pc);
    add_json(c_pc);

    auto* c_pk = app.add_subcommand("point-check", "membership and the two verification steps");
    add_point(c_pk);
    c_pk->add_option("--tau", s_tau, "block degrees of the type defining beta");
    c_pk->add_option("--ranks", s_ranks, "block ranks");
    c_pk->add_option("--beta", s_beta, "beta entries as a comma list (alternative to --tau)");
    c_pk->add_option("--lambda-bound", lambda_bound, "entry bound for the trace identity family")
        ->check(CLI::NonNegativeNumber);
    add_json(c_pk);

    auto* c_sd = app.add_subcommand("stabdim", "unipotent stabilizer and nilpotent commutant dimensions");
    add_point(c_sd);
    c_sd->add_option("--flag", s_flag, "block sizes of the flag on k^m")->required();
    c_sd->add_option("--image-flag", s_image_flag, "block sizes of the flag on k^r for the commutant");
    add_json(c_sd);

    auto* c_cl = app.add_subcommand("classify", "partition a corpus into strata records");
    add_ctx(c_cl, true);
    c_cl->add_option("--corpus", s_corpus, "corpus JSON file")->required();
    c_cl->add_option("--bound", s_bound, "slope bound for the default candidates");
    c_cl->add_option("--candidates", s_candidates, "JSON file with a list of beta vectors");
    c_cl->add_flag("--csv", csv, "CSV output");
    c_cl->add_flag("--parallel", common.parallel, "classify points concurrently");
    add_cap(c_cl);
    add_json(c_cl);

    auto* c_pg = app.add_subcommand("polygons", "SVG of HN polygons");
    c_pg->add_option("--type", type_specs, "type as r:d,r:d,... (repeatable; first is drawn black)");
    c_pg->add_option("--types", s_types_json, "JSON array of types");
    c_pg->add_option("--out,-o", s_out, "output path (default stdout)");
    add_json(c_pg);

    auto* c_rp = app.add_subcommand("report", "strata records and closure-order table");
    add_ctx(c_rp, true);
    c_rp->add_option("--corpus", s_corpus, "corpus JSON file (default: synthetic corpus)");
    c_rp->add_option("--bound", s_bound, "slope bound for types");
    c_rp->add_option("--per-type", per_type, "synthetic points per type")->check(CLI::NonNegativeNumber);
    c_rp->add_option("--seed", seed, "seed of the synthetic corpus");
    c_rp->add_option("--svg", s_svg, "write the polygon SVG of the source types here");
    c_rp->add_flag("--csv", csv, "CSV output of the records");
    c_rp->add_flag("--parallel", common.parallel, "classify points concurrently");
    add_cap(c_rp);
    add_json(c_rp);

    std::vector<std::string> argv_store{"higgsstrat"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& a : argv_store) argv.push_back(a.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    }
    have_degree = false;
    for (auto* s : {c_enum, c_is, c_cl, c_rp})
        if (s->parsed() && s->count("--degree")) have_degree = true;

    auto cap = [&]() -> std::uint64_t { return common.cap ? common.cap : default_cap(); };
    auto context = [&]() {
        return usage("--rank", [&] {
            CurveContext c{rank, degree, genus, degL, npoints};
            c.validate();
            return c;
        });
    };
    auto load_point = [&]() {
        if (s_point.empty() == s_point_file.empty()) throw UsageError("--point", "give exactly one of --point, --point-file");
        const std::string text = s_point.empty() ? read_file(s_point_file) : s_point;
        return usage(s_point.empty() ? "--point-file" : "--point", [&] {
            auto p = json::parse(text).get<ModelPoint>();
            if (p.factors.empty()) throw InvalidArgument("point has no factors");
            return p;
        });
    };
    auto point_context = [&](const ModelPoint& p) {
        CurveContext c;
        c.rank = p.rank();
        c.genus = genus;
        c.npoints = static_cast<int>(p.factors.size());
        c.degree = long(p.m()) - long(c.rank) * (1 - genus);
        try {
            p.validate(c);
        } catch (const DegeneratePoint&) {
            throw;
        } catch (const Error& e) {
            throw UsageError("--point", e.what());
        }
        return c;
    };
    auto load_points = [&]() {
        if (s_points.empty() == s_points_file.empty())
            throw UsageError("--points", "give exactly one of --points, --points-file");
        const std::string text = s_points.empty() ? read_file(s_points_file) : s_points;
        return usage("--points", [&] { return PointCloud(points_from_json(json::parse(text))); });
    };

    try {
        if (c_enum->parsed()) {
            const auto ctx = context();
            const auto bound = usage("--bound", [&] { return parse_rational(s_bound); });
            const auto types =
                enumerate_hn_types(ctx, bound, s_flavor == "higgs" ? Flavor::HiggsHN : Flavor::HN);
            if (common.as_json) {
                out << with_schema("enumerate", {{"context", ctx}, {"bound", bound}, {"types", types}}).dump() << "\n";
            } else {
                for (const auto& t : types) out << t.str() << "\n";
            }
        } else if (c_order->parsed()) {
            const auto a = usage("--a", [&] { return type_from_lists(s_a, s_a_ranks, rank); });
            const auto b = usage("--b", [&] { return type_from_lists(s_b, s_b_ranks, rank); });
            const auto o = compare_polygon(a, b);
            if (common.as_json) out << with_schema("order", {{"a", a}, {"b", b}, {"order", to_string(o)}}).dump() << "\n";
            else out << to_string(o) << "\n";
        } else if (c_beta->parsed()) {
            const auto t = usage("--tau", [&] { return type_from_lists(s_tau, s_ranks, 0); });
            CurveContext ctx{t.rank(), t.degree(), genus, 0, npoints};
            const auto b = beta_of_type(t, ctx);
            if (common.as_json) {
                json body{{"beta", b}};
                if (with_bb) {
                    const auto bb = bb_weights(t, ctx);
                    body["bb_weights"] = {{"weights", bb.weights}, {"min_weight", bb.min_weight}};
                }
                out << with_schema("beta", body).dump() << "\n";
            } else {
                out << to_string(b.entries) << "\n";
                out << "norm_sq " << b.norm_sq().str() << "\n";
                if (with_bb) {
                    const auto bb = bb_weights(t, ctx);
                    out << "bb_weights " << to_string(bb.weights) << "\nmin_weight " << bb.min_weight.str() << "\n";
                }
            }
        } else if (c_compat->parsed()) {
            if (d_min > d_max) throw UsageError("--d-min", "exceeds --d-max");
            if (degL_min > degL_max) throw UsageError("--degL-min", "exceeds --degL-max");
            const auto window = usage("--window", [&] { return parse_rational(s_window); });
            const auto t = compat_cross_table(CurveContext{}, r_max, {d_min, d_max}, {degL_min, degL_max}, window);
            if (common.as_json) {
                out << with_schema("compat", {{"table", t}}).dump() << "\n";
            } else {
                out << "entries " << t.entries.size() << "\nviolations " << t.violations.size() << "\n";
                for (const auto& v : t.violations)
                    out << "r=" << v.ctx.rank << " d=" << v.ctx.degree << " degL=" << v.ctx.degL << " tau=" << v.tau.str()
                        << " mu=" << v.mu.str() << "\n";
            }
        } else if (c_mn->parsed()) {
            const auto cloud = load_points();
            const auto v = min_norm_point(cloud);
            if (common.as_json) out << with_schema("minnorm", {{"point", v}, {"norm_sq", dot(v, v)}}).dump() << "\n";
            else out << to_string(v) << "\n";
        } else if (c_is->parsed()) {
            PointCloud cloud;
            if (lattice) {
                if (!s_points.empty() || !s_points_file.empty())
                    throw UsageError("--lattice", "cannot be combined with --points");
                if (!have_degree || rank < 1) throw UsageError("--lattice", "needs --rank and --degree");
                const auto ctx = context();
                std::vector<RVector> ws;
                for (const auto& idx : enumerate_coordinate_indices(ctx, cap()))
                    ws.push_back(project_trace_zero(alpha_of_index(idx, ctx)));
                cloud = PointCloud(ws);
            } else {
                cloud = load_points();
            }
            const auto B = index_set_B(cloud, chamber, cap());
            if (common.as_json) {
                out << with_schema("index-set", {{"vectors", std::vector<RVector>(B.begin(), B.end())}, {"chamber", chamber}})
                           .dump()
                    << "\n";
            } else {
                for (const auto& v : B) out << to_string(v) << "\n";
            }
        } else if (c_pc->parsed()) {
            const auto p = load_point();
            const auto ctx = point_context(p);
            const auto t = coordinates(p, ctx, cap());
            if (common.as_json) {
                out << with_schema("point-coords", {{"table", table_to_json(t)}}).dump() << "\n";
            } else {
                for (auto pos : t.support()) out << to_string(t.space.at(pos)) << " " << t.values[pos].str() << "\n";
            }
        } else if (c_pk->parsed()) {
            const auto p = load_point();
            const auto ctx = point_context(p);
            BetaVector beta;
            if (!s_beta.empty() && !s_tau.empty()) throw UsageError("--beta", "give only one of --beta, --tau");
            if (!s_beta.empty()) {
                beta = usage("--beta", [&] { return BetaVector::from_entries(parse_rational_list(s_beta), ctx.npoints); });
            } else if (!s_tau.empty()) {
                const auto t = usage("--tau", [&] { return type_from_lists(s_tau, s_ranks, ctx.rank); });
                if (t.degree() != ctx.degree)
                    throw UsageError("--tau", "type degree " + std::to_string(t.degree()) + " differs from point degree " +
                                                  std::to_string(ctx.degree));
                beta = beta_of_type(t, ctx);
            } else {
                throw UsageError("--tau", "one of --tau, --beta is required");
            }
            const auto mem = membership(p, beta, ctx, cap());
            const auto s1 = verify_step1(p, beta, ctx, 32, cap());
            std::optional<Step2Report> s2;
            if (mem != Membership::Outside) s2 = verify_step2(p, beta, ctx, lambda_bound, cap());
            if (common.as_json) {
                json body{{"beta", beta}, {"membership", to_string(mem)}, {"step1", s1}};
                body["step2"] = s2 ? json(*s2) : json(nullptr);
                out << with_schema("point-check", body).dump() << "\n";
            } else {
                out << "membership " << to_string(mem) << "\n";
                out << "step1 " << (s1.passed ? "pass" : "fail") << " violations " << s1.violations.size()
                    << (s1.violations_truncated ? "+" : "") << "\n";
                if (!s1.violations.empty()) out << "violating " << to_string(s1.violations.front()) << "\n";
                if (s1.equality_witness) out << "witness " << to_string(*s1.equality_witness) << "\n";
                if (s2) out << "step2 " << (s2->passed ? "pass" : "fail") << "\n";
            }
        } else if (c_sd->parsed()) {
            const auto p = load_point();
            const auto ctx = point_context(p);
            const auto flag = usage("--flag", [&] { return FlagShape(parse_int_list(s_flag)); });
            if (flag.dim() != ctx.m()) throw UsageError("--flag", "block sizes must sum to m = " + std::to_string(ctx.m()));
            const auto u = unipotent_stabilizer_dim(p, flag, ctx, cap());
            std::optional<std::size_t> n;
            if (!s_image_flag.empty()) {
                const auto img = usage("--image-flag", [&] { return FlagShape(parse_int_list(s_image_flag)); });
                if (img.dim() != ctx.rank) throw UsageError("--image-flag", "block sizes must sum to r");
                std::vector<RMatrix> phis;
                for (const auto& f : p.factors) phis.push_back(f.phi);
                n = nilpotent_commutant_dim(img, phis);
            }
            if (common.as_json) {
                json body{{"unipotent_stabilizer_dim", u}};
                body["nilpotent_commutant_dim"] = n ? json(*n) : json(nullptr);
                out << with_schema("stabdim", body).dump() << "\n";
            } else {
                out << "unipotent_stabilizer_dim " << u << "\n";
                if (n) out << "nilpotent_commutant_dim " << *n << "\n";
            }
        } else if (c_cl->parsed() || c_rp->parsed()) {
            const bool is_report = c_rp->parsed();
            const auto ctx = context();
            const auto bound = s_bound.empty() ? Rational(ctx.degree, ctx.rank) + Rational(ctx.m() > 0 ? ctx.m() : 1)
                                               : usage("--bound", [&] { return parse_rational(s_bound); });
            std::vector<CorpusEntry> corpus;
            if (!s_corpus.empty()) {
                const auto text = read_file(s_corpus);
                corpus = usage("--corpus", [&] { return corpus_from_json(json::parse(text)); });
            } else {
                corpus = synthetic_corpus(ctx, bound, per_type, seed);
            }
            std::vector<BetaVector> candidates;
            if (!s_candidates.empty()) {
                const auto text = read_file(s_candidates);
                candidates = usage("--candidates", [&] { return json::parse(text).get<std::vector<BetaVector>>(); });
            } else {
                candidates = default_candidates(ctx, bound);
            }
            const auto recs = assemble(corpus, ctx, candidates, common.parallel, cap());
            std::optional<ClosureReport> closure;
            if (is_report) closure = closure_order_report(recs);
            if (is_report && !s_svg.empty()) {
                std::vector<HNType> types;
                for (const auto& row : closure->rows)
                    if (row.beta.source) types.push_back(*row.beta.source);
                if (types.empty()) types.push_back(HNType::semistable(ctx.rank, ctx.degree));
                // highest-norm type in black
                std::rotate(types.rbegin(), types.rbegin() + 1, types.rend());
                std::ofstream f(s_svg, std::ios::binary);
                if (!f) throw UsageError("--svg", "cannot write " + s_svg);
                f << emit_polygon_svg(types);
            }
            if (common.as_json) {
                json body{{"context", ctx}, {"records", recs}};
                if (closure) body["closure"] = *closure;
                out << with_schema(is_report ? "report" : "classify", body).dump() << "\n";
            } else if (csv) {
                out << records_csv(recs);
            } else {
                out << records_text(recs);
                if (closure) {
                    out << "closure order (by norm):\n";
                    for (const auto& p : closure->pairs)
                        out << "  " << p.a << " vs " << p.b << ": norm " << to_string(p.norm_order) << ", polygon "
                            << (p.polygon_order ? to_string(*p.polygon_order) : "n/a") << "\n";
                }
            }
        } else if (c_pg->parsed()) {
            std::vector<HNType> types;
            for (const auto& s : type_specs) types.push_back(usage("--type", [&] { return type_from_pairs(s); }));
            if (!s_types_json.empty())
                for (const auto& t : usage("--types", [&] { return json::parse(s_types_json).get<std::vector<HNType>>(); }))
                    types.push_back(t);
            if (types.empty()) throw UsageError("--type", "at least one type is required");
            const auto svg = emit_polygon_svg(types);
            if (!s_out.empty()) {
                std::ofstream f(s_out, std::ios::binary);
                if (!f) throw UsageError("--out", "cannot write " + s_out);
                f << svg;
            }
            if (common.as_json) {
                json body{{"types", types}, {"bytes", svg.size()}};
                if (s_out.empty()) body["svg"] = svg;
                else body["path"] = s_out;
                out << with_schema("polygons", body).dump() << "\n";
            } else if (s_out.empty()) {
                out << svg;
            }
        }
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        err << e.name() << ": " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace higgsstrat::cli
