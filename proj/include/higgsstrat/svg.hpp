#pragma once

#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "hn_types.hpp"

namespace higgsstrat {

// Polygons through (sum r_gamma, sum d_gamma). The first type is drawn black on top of
// the others in grey; a one-block type (the straight segment) is always grey.
inline std::string emit_polygon_svg(const std::vector<HNType>& types) {
    if (types.empty()) throw InvalidArgument("no types to draw");
    const int r = types.front().rank();
    const long d = types.front().degree();
    for (const auto& t : types)
        if (t.rank() != r || t.degree() != d) throw MismatchedAmbient("types do not share (r, d)");

    std::vector<std::vector<std::pair<long, long>>> polys;
    long ymin = std::min(0L, d), ymax = std::max(0L, d);
    for (const auto& t : types) {
        std::vector<std::pair<long, long>> v{{0, 0}};
        long R = 0, D = 0;
        for (const auto& b : t.blocks()) {
            R += b.rank;
            D += b.degree;
            v.emplace_back(R, D);
            ymin = std::min(ymin, D);
            ymax = std::max(ymax, D);
        }
        polys.push_back(std::move(v));
    }
    const double W = 400, H = 300, margin = 40;
    const double sx = (W - 2 * margin) / r;
    const double sy = (H - 2 * margin) / double(ymax - ymin == 0 ? 1 : ymax - ymin);
    auto px = [&](long x) { return margin + sx * double(x); };
    auto py = [&](long y) { return H - margin - sy * double(y - ymin); };

    std::ostringstream os;
    os << std::fixed << std::setprecision(2);
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << W << "\" height=\"" << H
       << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
    os << "<rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
    os << "<line x1=\"" << px(0) << "\" y1=\"" << py(0) << "\" x2=\"" << px(r) << "\" y2=\"" << py(0)
       << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    os << "<line x1=\"" << px(0) << "\" y1=\"" << py(ymin) << "\" x2=\"" << px(0) << "\" y2=\"" << py(ymax)
       << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    os << "<text x=\"" << px(r) << "\" y=\"" << py(0) + 16 << "\" font-size=\"12\" text-anchor=\"end\">rank</text>\n";
    os << "<text x=\"" << px(0) - 6 << "\" y=\"" << py(ymax) << "\" font-size=\"12\" text-anchor=\"end\">degree</text>\n";
    for (int x = 0; x <= r; ++x)
        os << "<text x=\"" << px(x) << "\" y=\"" << py(0) + 30 << "\" font-size=\"10\" text-anchor=\"middle\">" << x
           << "</text>\n";
    auto draw = [&](std::size_t i, const char* colour) {
        os << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"2\" points=\"";
        for (std::size_t k = 0; k < polys[i].size(); ++k)
            os << (k ? " " : "") << px(polys[i][k].first) << "," << py(polys[i][k].second);
        os << "\"/>\n";
        for (const auto& [x, y] : polys[i])
            os << "<circle cx=\"" << px(x) << "\" cy=\"" << py(y) << "\" r=\"3\" fill=\"" << colour << "\"/>\n";
    };
    for (std::size_t i = 1; i < polys.size(); ++i) draw(i, "grey");
    draw(0, types.front().is_semistable() ? "grey" : "black");
    os << "</svg>\n";
    return os.str();
}

}  // namespace higgsstrat
